"""Command-line entry point.

Subcommands: simulate, converge, metric, validate.
Exit codes: 0 success, 1 invariant failure, 2 config error, 3 numerical
precondition failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, load_config
from .errors import ConfigError, PreconditionError
from .experiments import (
    CurvedSweepSpec,
    FlatSweepSpec,
    amplitude_sweep,
    curved_convergence_sweep,
    fit_order,
    flat_convergence_sweep,
)
from .io import write_manifest, write_metric_csv, write_snapshot_csv, write_table_csv
from .metric import christoffel, omega_field
from .pipeline import run_per_step, run_telescoped
from .validate import ALL_CHECKS, run_all

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _out_dir(args, cfg: RunConfig | None) -> Path:
    out = args.out_dir or (cfg.out_dir if cfg else "out")
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _manifest(out: Path, command: str, cfg: RunConfig | None, **extra) -> None:
    payload = {
        "command": command,
        "config": cfg.raw if cfg else None,
        "version": __version__,
    }
    payload.update(extra)
    write_manifest(out / "manifest.json", payload)


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    if cfg.pipeline is None:
        raise ConfigError("simulate requires a 'grid' section")
    pipe = cfg.pipeline
    if args.steps is not None:
        from dataclasses import replace

        pipe = replace(pipe, steps=args.steps)
    out = _out_dir(args, cfg)
    start = time.perf_counter()
    norm0 = pipe.initial_state().total_norm()
    if args.per_step:
        records = run_per_step(pipe)
    else:
        final = run_telescoped(pipe)
        records = [(pipe.time_at(0), pipe.initial_state()), (pipe.final_time, final)]
    sector = [(t, s.psi if pipe.sector == "psi" else s.phi) for t, s in records]
    write_snapshot_csv(out / "snapshot.csv", sector)
    drift = abs(records[-1][1].total_norm() - norm0)
    _manifest(
        out,
        "simulate",
        cfg,
        mode="per-step" if args.per_step else "telescoped",
        steps=pipe.steps,
        norm_drift=drift,
        wallclock_s=time.perf_counter() - start,
        outputs=["snapshot.csv"],
    )
    print(f"wrote {out / 'snapshot.csv'} ({len(sector)} snapshots, norm drift {drift:.3e})")
    return EXIT_OK


def _sweep_spec(cfg: RunConfig) -> dict:
    if cfg.sweep is None:
        raise ConfigError("converge requires a 'sweep' section")
    return cfg.sweep


def cmd_converge(args) -> int:
    if args.selftest_order:
        eps = np.array([0.1, 0.05, 0.025, 0.0125])
        fit = fit_order(eps, 3.0 * eps**2)
        print(f"selftest: fitted order {fit.slope:.6f} (expected 2.0), r2 {fit.r2:.6f}")
        return EXIT_OK if abs(fit.slope - 2.0) < 1e-8 else EXIT_INVARIANT

    cfg = load_config(args.config)
    sweep = _sweep_spec(cfg)
    kind = sweep.get("kind", "flat")
    out = _out_dir(args, cfg)
    start = time.perf_counter()

    if kind == "flat":
        if "eps_list" not in sweep:
            raise ConfigError("sweep.eps_list is required")
        eps_list = [float(e) for e in sweep["eps_list"]]
        mass = float(sweep.get("mass", 0.0))
        spec = FlatSweepSpec(
            mass=mass,
            eps_list=tuple(eps_list),
            domain=float(sweep.get("domain", 8.0)),
            horizon=float(sweep.get("horizon", 1.0)),
        )
        table, fit = flat_convergence_sweep(mass, eps_list, spec=spec, jobs=args.jobs)
        write_table_csv(out / "table.csv", table)
        errs = table.column("l2_error")
        summary = f"flat sweep: max error {np.max(errs):.3e}"
        if fit is not None:
            summary += f", fitted order {fit.slope:.3f} (r2 {fit.r2:.4f})"
        extra = {"fitted_order": None if fit is None else fit.slope,
                 "r2": None if fit is None else fit.r2,
                 "max_error": float(np.max(errs))}
    elif kind in ("curved", "amplitude"):
        from .config import parse_metric

        if kind == "curved" and "eps_list" not in sweep:
            raise ConfigError("sweep.eps_list is required")
        metric_sec = cfg.raw.get("metric", {"kind": "constant"})
        metric = parse_metric(metric_sec, None)
        spec = CurvedSweepSpec(
            metric=metric,
            metric_id=metric_sec.get("kind", "constant"),
            amplitude=float(metric_sec.get("amplitude", 0.0)),
            domain=float(sweep.get("domain", 16.0)),
            horizon=float(sweep.get("horizon", 6.0)),
        )
        if kind == "curved":
            eps_list = [float(e) for e in sweep["eps_list"]]
            eta_list = [float(h) for h in sweep.get("eta_list", [1.0])]
            table = curved_convergence_sweep(spec, eps_list, eta_list, jobs=args.jobs)
        else:
            if "amplitudes" not in sweep:
                raise ConfigError("sweep.amplitudes is required")
            table = amplitude_sweep(
                spec,
                [float(a) for a in sweep["amplitudes"]],
                eps=float(sweep.get("eps", 1.0 / 256)),
                eta=float(sweep.get("eta", 1.0)),
                bump_width=float(sweep.get("bump_width", 1.0)),
                jobs=args.jobs,
            )
        write_table_csv(out / "table.csv", table)
        errs = table.column("l2_error")
        summary = f"{kind} sweep: max error {np.max(errs):.3e}"
        extra = {"max_error": float(np.max(errs))}
        if kind == "amplitude":
            # halving ratios error(A/2)/error(A), strongest amplitude first
            by_amp = sorted(table.rows, key=lambda r: -r.amplitude)
            ratios = [
                float(s.l2_error / b.l2_error)
                for b, s in zip(by_amp, by_amp[1:])
                if b.l2_error > 0
            ]
            extra["error_ratios"] = ratios
            extra["amplitude_ratio_threshold"] = 0.6
            extra["max_observed_ratio"] = max(ratios) if ratios else None
        else:
            extra["error_ratios"] = [float(b / a) for a, b in zip(errs, errs[1:]) if a > 0]
    else:
        raise ConfigError(f"unknown sweep kind {kind!r}")

    _manifest(out, "converge", cfg, sweep_kind=kind,
              wallclock_s=time.perf_counter() - start, outputs=["table.csv"], **extra)
    print(f"wrote {out / 'table.csv'}")
    print(summary)
    return EXIT_OK


def cmd_metric(args) -> int:
    cfg = load_config(args.config)
    if "metric" not in cfg.raw:
        raise ConfigError("metric subcommand requires a 'metric' section")
    if cfg.pipeline is None:
        raise ConfigError("metric subcommand requires a 'grid' section")
    grid = cfg.pipeline.grid
    window = cfg.metric_window
    if window is None:
        t0 = cfg.pipeline.t_start
        window = (t0, cfg.pipeline.final_time, max(cfg.pipeline.steps + 1, 2))
    t0, t1, nt = window
    metric = cfg.pipeline.metric.with_window(t0, t1)
    out = _out_dir(args, cfg)
    rows = []
    for t in np.linspace(t0, t1, nt):
        omega, _ = omega_field(metric, float(t), grid)
        w = np.asarray(metric.omega2(float(t), grid.x), dtype=float)
        for j, x in enumerate(grid.x):
            rep = christoffel(metric, float(t), float(x))
            rows.append(
                (t, x, w[j], omega[j], rep.christoffel_time_class,
                 rep.christoffel_space_class, rep.ricci)
            )
    write_metric_csv(out / "metric.csv", rows)
    _manifest(out, "metric", cfg, window=list(window), outputs=["metric.csv"])
    print(f"wrote {out / 'metric.csv'} ({len(rows)} rows)")
    return EXIT_OK


def cmd_validate(args) -> int:
    if args.list:
        for name, _ in ALL_CHECKS:
            print(name)
        return EXIT_OK
    results = run_all(fault=args.inject_fault)
    all_ok = True
    for name, passed, detail in results:
        print(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
        all_ok &= passed
    if args.out_dir:
        out = _out_dir(args, None)
        _manifest(out, "validate", None,
                  results=[{"check": n, "passed": p, "detail": d} for n, p, d in results],
                  fault=args.inject_fault)
    return EXIT_OK if all_ok else EXIT_INVARIANT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="homwalk",
        description="Lattice walker for curved-spacetime propagation with "
        "metric-encoding boundary operators",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", required=config_required, help="JSON run configuration")
        p.add_argument("--out-dir", default=None, help="output directory (default from config)")
        p.add_argument("--jobs", type=int, default=1, help="parallel sweep jobs")

    p_sim = sub.add_parser("simulate", help="run the encode/bulk/decode pipeline")
    common(p_sim)
    p_sim.add_argument("--per-step", action="store_true",
                       help="apply the conjugated operator every step instead of telescoping")
    p_sim.add_argument("--steps", type=int, default=None, help="override config steps")
    p_sim.set_defaults(fn=cmd_simulate)

    p_conv = sub.add_parser("converge", help="run a convergence or amplitude sweep")
    common(p_conv, config_required=False)
    p_conv.add_argument("--selftest-order", action="store_true",
                        help="fit synthetic quadratic data and exit")
    p_conv.set_defaults(fn=cmd_converge)

    p_met = sub.add_parser("metric", help="tabulate the factor and curvature diagnostics")
    common(p_met)
    p_met.set_defaults(fn=cmd_metric)

    p_val = sub.add_parser("validate", help="run the built-in invariant suite")
    p_val.add_argument("--list", action="store_true", help="list check names without running")
    p_val.add_argument("--out-dir", default=None)
    p_val.add_argument("--inject-fault", default=None, metavar="NAME",
                       help="testing hook: corrupt one ingredient (encoder-scale)")
    p_val.set_defaults(fn=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "converge" and not args.selftest_order and not args.config:
            raise ConfigError("converge requires --config (or --selftest-order)")
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PreconditionError as exc:
        print(f"numerical precondition failed: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
