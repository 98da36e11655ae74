"""Render the simulator's CSV artifacts into figures.

Three figure kinds, one per CSV schema:

- density_heatmap   from snapshot CSVs  (t,x,re_up,im_up,re_dn,im_dn,prob)
- convergence_loglog from experiment tables
                     (eps,eta,metric_id,amplitude,l2_error,fidelity,norm_drift,wallclock_s)
- metric_profile    from metric tables  (t,x,omega2,omega,gamma_t,gamma_x,ricci)

Inputs are read only, never modified; the same CSV always yields the same
axes ranges and annotations.  No physics is computed here beyond the
least-squares slope annotated on convergence plots.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

SNAPSHOT_HEADER = ["t", "x", "re_up", "im_up", "re_dn", "im_dn", "prob"]
TABLE_HEADER = ["eps", "eta", "metric_id", "amplitude", "l2_error", "fidelity",
                "norm_drift", "wallclock_s"]
METRIC_HEADER = ["t", "x", "omega2", "omega", "gamma_t", "gamma_x", "ricci"]

KINDS = ("density_heatmap", "convergence_loglog", "metric_profile")


class PlotkitError(ValueError):
    """Schema mismatch, empty input, or unusable values."""


@dataclass
class FigureResult:
    """What a render produced, for callers that want to check it."""

    output: Path
    kind: str
    x_range: tuple
    y_range: tuple
    annotations: dict = field(default_factory=dict)


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    input_csv: str
    output: str
    title: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PlotkitError(f"unknown figure kind {self.kind!r}")

    def render(self) -> FigureResult:
        fn = {
            "density_heatmap": plot_density,
            "convergence_loglog": plot_convergence,
            "metric_profile": plot_metric,
        }[self.kind]
        return fn(self.input_csv, self.output, title=self.title)


def _read_csv(path: str | Path, expected_header: list[str], kind: str):
    try:
        with open(path, newline="") as f:
            reader = csv.reader(f)
            header = next(reader, None)
            rows = [row for row in reader if row]
    except OSError as exc:
        raise PlotkitError(f"cannot read {path}: {exc}") from exc
    if header is None or [h.strip() for h in header] != expected_header:
        raise PlotkitError(
            f"{path}: header {header} does not match the {kind} schema {expected_header}"
        )
    if not rows:
        raise PlotkitError(f"{path}: no data rows")
    return rows


def plot_density(input_csv, output, title=None, lightcone: bool = False) -> FigureResult:
    """Heatmap of the probability density over (x, t) from a snapshot CSV."""
    rows = _read_csv(input_csv, SNAPSHOT_HEADER, "density_heatmap")
    t = np.array([float(r[0]) for r in rows])
    x = np.array([float(r[1]) for r in rows])
    prob = np.array([float(r[6]) for r in rows])
    times = np.unique(t)
    xs = np.unique(x)
    if len(rows) != len(times) * len(xs):
        raise PlotkitError(f"{input_csv}: snapshot rows do not form a full (t, x) raster")
    order = np.lexsort((x, t))
    grid = prob[order].reshape(len(times), len(xs))

    fig, ax = plt.subplots(figsize=(7, 4.5))
    mesh = ax.pcolormesh(xs, times, grid, shading="nearest", cmap="magma")
    fig.colorbar(mesh, ax=ax, label=r"$|\psi|^2$")
    if lightcone and len(times) > 1:
        x0 = xs[np.argmax(grid[0])]
        for sign in (+1, -1):
            ax.plot(x0 + sign * (times[0] - times), times, color="cyan", lw=0.8, ls="--")
    ax.set_xlabel("x")
    ax.set_ylabel("t")
    ax.set_title(title or "probability density")
    fig.tight_layout()
    fig.savefig(output, dpi=150)
    plt.close(fig)
    return FigureResult(
        output=Path(output),
        kind="density_heatmap",
        x_range=(float(xs[0]), float(xs[-1])),
        y_range=(float(times[0]), float(times[-1])),
        annotations={"n_times": len(times), "n_sites": len(xs)},
    )


def plot_convergence(input_csv, output, title=None) -> FigureResult:
    """Log-log error against eps, one line per (metric_id, eta) series, each
    annotated with its least-squares slope."""
    rows = _read_csv(input_csv, TABLE_HEADER, "convergence_loglog")
    series: dict[tuple, list[tuple[float, float]]] = {}
    for r in rows:
        eps, eta, metric_id, err = float(r[0]), float(r[1]), r[2], float(r[4])
        if err <= 0.0:
            raise PlotkitError(f"{input_csv}: nonpositive error {err} cannot be drawn on a log axis")
        series.setdefault((metric_id, eta), []).append((eps, err))

    fig, ax = plt.subplots(figsize=(6, 4.5))
    slopes = {}
    for (metric_id, eta), pts in sorted(series.items()):
        if len(pts) < 2:
            raise PlotkitError(
                f"{input_csv}: series (metric_id={metric_id}, eta={eta}) has fewer than 2 rows"
            )
        pts.sort(key=lambda p: -p[0])
        eps = np.array([p[0] for p in pts])
        err = np.array([p[1] for p in pts])
        slope = float(np.polyfit(np.log(eps), np.log(err), 1)[0])
        label = f"{metric_id}, eta={eta:g}: slope {slope:.2f}"
        slopes[f"{metric_id}|eta={eta:g}"] = slope
        ax.loglog(eps, err, "o-", label=label)
    ax.set_xlabel(r"$\varepsilon$")
    ax.set_ylabel("L2 error")
    ax.set_title(title or "convergence")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(output, dpi=150)
    plt.close(fig)
    all_eps = np.array([float(r[0]) for r in rows])
    all_err = np.array([float(r[4]) for r in rows])
    return FigureResult(
        output=Path(output),
        kind="convergence_loglog",
        x_range=(float(all_eps.min()), float(all_eps.max())),
        y_range=(float(all_err.min()), float(all_err.max())),
        annotations={"slopes": slopes},
    )


def plot_metric(input_csv, output, title=None) -> FigureResult:
    """Stacked panels for the factor, the normalized weight, and the Ricci
    scalar over the tabulated window, one line per time slice."""
    rows = _read_csv(input_csv, METRIC_HEADER, "metric_profile")
    t = np.array([float(r[0]) for r in rows])
    x = np.array([float(r[1]) for r in rows])
    cols = {name: np.array([float(r[i]) for r in rows]) for i, name in enumerate(METRIC_HEADER)}
    times = np.unique(t)

    fig, axes = plt.subplots(3, 1, figsize=(6.5, 7), sharex=True)
    for name, ax in zip(("omega2", "omega", "ricci"), axes):
        shown = times if len(times) <= 6 else times[:: max(1, len(times) // 6)]
        for tv in shown:
            mask = t == tv
            xi = x[mask]
            order = np.argsort(xi)
            ax.plot(xi[order], cols[name][mask][order], label=f"t={tv:g}")
        ax.set_ylabel(name)
        ax.grid(alpha=0.3)
    axes[0].set_title(title or "conformal factor and curvature")
    axes[0].legend(fontsize=7)
    axes[-1].set_xlabel("x")
    fig.tight_layout()
    fig.savefig(output, dpi=150)
    plt.close(fig)
    return FigureResult(
        output=Path(output),
        kind="metric_profile",
        x_range=(float(x.min()), float(x.max())),
        y_range=(float(cols["ricci"].min()), float(cols["ricci"].max())),
        annotations={"n_times": len(times)},
    )
