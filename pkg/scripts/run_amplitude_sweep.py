#!/usr/bin/env python3
"""Probe the weak-field regime: decoded-walker error against the conformal
weight oracle as the bump amplitude is halved at fixed eps."""

import argparse
from pathlib import Path

from homwalk import ConformalField
from homwalk.experiments import CurvedSweepSpec, amplitude_sweep
from homwalk.io import write_table_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eps", type=float, default=1.0 / 256)
    ap.add_argument("--eta", type=float, default=1.0)
    ap.add_argument("--amplitudes", type=float, nargs="+", default=[0.2, 0.1, 0.05, 0.025])
    ap.add_argument("--out", default="results/amplitude_sweep.csv")
    args = ap.parse_args()

    spec = CurvedSweepSpec(metric=ConformalField.constant(1.0), metric_id="seed")
    table = amplitude_sweep(spec, args.amplitudes, eps=args.eps, eta=args.eta)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    write_table_csv(args.out, table)
    print(f"wrote {args.out}")
    rows = sorted(table.rows, key=lambda r: -r.amplitude)
    prev = None
    for row in rows:
        ratio = "" if prev is None else f" ratio={row.l2_error / prev:.3f}"
        print(f"  A={row.amplitude:<8g} error={row.l2_error:.6e} fidelity={row.fidelity:.10f}{ratio}")
        prev = row.l2_error


if __name__ == "__main__":
    main()
