"""CSV and manifest writers for all run artifacts.

Reals are written with 17 significant digits so values round-trip exactly;
output ordering is deterministic for a given configuration.
"""

from __future__ import annotations

import json
from pathlib import Path

from .lattice import SpinorField
from .experiments import ExperimentTable

SNAPSHOT_HEADER = "t,x,re_up,im_up,re_dn,im_dn,prob"
TABLE_HEADER = "eps,eta,metric_id,amplitude,l2_error,fidelity,norm_drift,wallclock_s"
METRIC_HEADER = "t,x,omega2,omega,gamma_t,gamma_x,ricci"


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def write_snapshot_csv(path: str | Path, records: list[tuple[float, SpinorField]]) -> None:
    """One row per site per recorded time: t,x,re_up,im_up,re_dn,im_dn,prob."""
    lines = [SNAPSHOT_HEADER]
    for t, fld in records:
        x = fld.grid.x
        dens = fld.density()
        for j in range(fld.grid.n_sites):
            lines.append(
                ",".join(
                    _fmt(v)
                    for v in (
                        t,
                        x[j],
                        fld.up[j].real,
                        fld.up[j].imag,
                        fld.down[j].real,
                        fld.down[j].imag,
                        dens[j],
                    )
                )
            )
    Path(path).write_text("\n".join(lines) + "\n")


def write_table_csv(path: str | Path, table: ExperimentTable) -> None:
    lines = [TABLE_HEADER]
    for r in table.rows:
        lines.append(
            ",".join(
                (
                    _fmt(r.eps),
                    _fmt(r.eta),
                    r.metric_id,
                    _fmt(r.amplitude),
                    _fmt(r.l2_error),
                    _fmt(r.fidelity),
                    _fmt(r.norm_drift),
                    _fmt(r.wallclock_s),
                )
            )
        )
    Path(path).write_text("\n".join(lines) + "\n")


def write_metric_csv(path: str | Path, rows: list[tuple]) -> None:
    """rows of (t, x, omega2, omega, gamma_t, gamma_x, ricci)."""
    lines = [METRIC_HEADER]
    for row in rows:
        lines.append(",".join(_fmt(float(v)) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_manifest(path: str | Path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def table_physics_bytes(path: str | Path) -> bytes:
    """Table CSV content with the wallclock column blanked, for determinism
    comparisons (wallclock is the one legitimately run-dependent column)."""
    out = []
    for i, line in enumerate(Path(path).read_text().splitlines()):
        if i == 0:
            out.append(line)
            continue
        parts = line.split(",")
        parts[-1] = "_"
        out.append(",".join(parts))
    return "\n".join(out).encode()
