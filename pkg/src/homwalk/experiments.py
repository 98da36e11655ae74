"""Convergence and validation sweeps with deterministic tabular output.

Every sweep point is an independent job; rows are merged in a fixed sort
order (metric_id, eta, eps descending) so repeated runs produce identical
tables up to the wallclock column.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .encoder import EncoderParams
from .errors import PreconditionError
from .lattice import Grid, fidelity, l2_distance, prob_norm
from .metric import ConformalField, omega_field
from .pipeline import PacketSpec, PipelineConfig, run_telescoped
from .solvers import flat_dirac_exact, conformal_oracle, transport_exact
from .walk import CoinParams, flat_step


@dataclass(frozen=True)
class ExperimentRow:
    eps: float
    eta: float
    metric_id: str
    amplitude: float
    l2_error: float
    fidelity: float
    norm_drift: float
    wallclock_s: float


@dataclass
class ExperimentTable:
    rows: list[ExperimentRow] = field(default_factory=list)

    def sorted(self) -> "ExperimentTable":
        return ExperimentTable(
            sorted(self.rows, key=lambda r: (r.metric_id, r.eta, -r.eps))
        )

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows])


@dataclass(frozen=True)
class OrderFit:
    slope: float
    r2: float


def fit_order(eps_list, errors) -> OrderFit:
    """Least-squares slope of log(error) against log(eps), with R^2."""
    eps = np.asarray(eps_list, dtype=float)
    err = np.asarray(errors, dtype=float)
    if len(eps) < 3:
        raise ValueError("need at least 3 points to fit an order")
    if np.any(np.diff(eps) >= 0.0):
        raise ValueError("eps_list must be strictly decreasing")
    if np.any(err <= 0.0):
        raise PreconditionError("errors must be positive for a log-log fit")
    lx, ly = np.log(eps), np.log(err)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((ly - np.mean(ly)) ** 2))
    if ss_tot < 1e-30:
        r2 = 1.0 if ss_res < 1e-30 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return OrderFit(slope=float(slope), r2=float(r2))


@dataclass(frozen=True)
class FlatSweepSpec:
    """Flat massive walk against the momentum-space solution under eps
    refinement at fixed physical domain and horizon."""

    mass: float
    eps_list: tuple
    domain: float = 8.0
    horizon: float = 1.0
    packet: PacketSpec = PacketSpec(x0=0.0, sigma=0.75, k0=0.5, chi=np.pi / 4)


def _flat_point(spec: FlatSweepSpec, eps: float) -> ExperimentRow:
    start = time.perf_counter()
    n = int(round(spec.domain / eps))
    if abs(n * eps - spec.domain) > 1e-9:
        raise ValueError(f"domain {spec.domain} not divisible by eps {eps}")
    grid = Grid(n_sites=n, dx=eps)
    steps = int(round(spec.horizon / eps))
    psi = spec.packet.build(grid)
    norm0 = prob_norm(psi)
    coin = CoinParams(eps=eps, theta=spec.mass)
    walked = psi
    for _ in range(steps):
        walked = flat_step(walked, coin)
    exact = flat_dirac_exact(psi, spec.mass, steps * eps)
    return ExperimentRow(
        eps=eps,
        eta=0.0,
        metric_id="flat",
        amplitude=0.0,
        l2_error=l2_distance(walked, exact),
        fidelity=fidelity(walked, exact),
        norm_drift=abs(prob_norm(walked) - norm0),
        wallclock_s=time.perf_counter() - start,
    )


def flat_convergence_sweep(
    mass: float, eps_list, spec: FlatSweepSpec | None = None, jobs: int = 1
) -> tuple[ExperimentTable, OrderFit | None]:
    """Error of the massive flat walk versus the exact solution for each eps,
    plus the fitted order (skipped when any error underflows the log fit)."""
    if spec is None:
        spec = FlatSweepSpec(mass=mass, eps_list=tuple(eps_list))
    else:
        spec = replace(spec, mass=mass, eps_list=tuple(eps_list))
    rows = _run_jobs(_flat_point, [(spec, e) for e in spec.eps_list], jobs)
    table = ExperimentTable(rows).sorted()
    order = None
    errs = table.column("l2_error")
    if len(errs) >= 3 and np.all(errs > 1e-14):
        order = fit_order(table.column("eps"), errs)
    return table, order


@dataclass(frozen=True)
class CurvedSweepSpec:
    """Telescoped massless pipeline against the conformal-weight oracle."""

    metric: ConformalField
    metric_id: str
    amplitude: float = 0.0
    domain: float = 16.0
    horizon: float = 6.0
    t_start: float = 0.0
    packet: PacketSpec = PacketSpec(x0=4.0, sigma=0.5)
    sector: str = "psi"


def _curved_point(spec: CurvedSweepSpec, eps: float, eta: float) -> ExperimentRow:
    start = time.perf_counter()
    n = int(round(spec.domain / eps))
    if abs(n * eps - spec.domain) > 1e-9:
        raise ValueError(f"domain {spec.domain} not divisible by eps {eps}")
    grid = Grid(n_sites=n, dx=eps)
    steps = int(round(spec.horizon / eps))
    cfg = PipelineConfig(
        grid=grid,
        steps=steps,
        coin=CoinParams(eps=eps, theta=0.0),
        encoder=EncoderParams(eps=eps, eta=eta),
        metric=spec.metric,
        initial=spec.packet,
        sector=spec.sector,
        t_start=spec.t_start,
    )
    state0 = cfg.initial_state()
    norm0 = state0.total_norm()
    final = run_telescoped(cfg)
    part = final.psi if spec.sector == "psi" else final.phi
    part0 = state0.psi if spec.sector == "psi" else state0.phi
    omega0, _ = omega_field(cfg.metric, cfg.t_start, grid)
    omega_t, _ = omega_field(cfg.metric, cfg.final_time, grid)
    oracle = conformal_oracle(part0, omega0, omega_t, steps * grid.dt)
    return ExperimentRow(
        eps=eps,
        eta=eta,
        metric_id=spec.metric_id,
        amplitude=spec.amplitude,
        l2_error=l2_distance(part, oracle),
        fidelity=fidelity(part, oracle),
        norm_drift=abs(final.total_norm() - norm0),
        wallclock_s=time.perf_counter() - start,
    )


def curved_convergence_sweep(
    spec: CurvedSweepSpec, eps_list, eta_list, jobs: int = 1
) -> ExperimentTable:
    """Decoded walker-sector error against the weight oracle over (eps, eta)."""
    args = [(spec, e, h) for h in eta_list for e in eps_list]
    rows = _run_jobs(_curved_point, args, jobs)
    return ExperimentTable(rows).sorted()


def amplitude_sweep(
    spec: CurvedSweepSpec, amplitudes, eps: float, eta: float = 1.0,
    bump_width: float = 1.0, jobs: int = 1,
) -> ExperimentTable:
    """Decoded-versus-oracle error as the bump amplitude shrinks at fixed eps.

    The A = 0 row is exact (flat pipeline identity); for A > 0 the error is
    dominated by the metric amplitude, so halving A must shrink it."""
    args = []
    for a in amplitudes:
        metric = (
            ConformalField.constant(1.0)
            if a == 0.0
            else ConformalField.gaussian_bump(amplitude=a, width=bump_width)
        )
        point = replace(spec, metric=metric, metric_id=f"bump-A{a:g}", amplitude=a)
        args.append((point, eps, eta))
    rows = _run_jobs(_curved_point, args, jobs)
    return ExperimentTable(rows).sorted()


def _run_jobs(fn, args_list, jobs: int):
    if jobs <= 1:
        return [fn(*args) for args in args_list]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(fn, *args) for args in args_list]
        return [f.result() for f in futures]


def massless_transport_errors(eps_list, spec: FlatSweepSpec | None = None) -> list[float]:
    """Massless walk against pure transport at each sweep level; exact zeros
    up to the arithmetic identity of the permutation."""
    if spec is None:
        spec = FlatSweepSpec(mass=0.0, eps_list=tuple(eps_list))
    out = []
    for eps in eps_list:
        n = int(round(spec.domain / eps))
        grid = Grid(n_sites=n, dx=eps)
        steps = int(round(spec.horizon / eps))
        psi = spec.packet.build(grid)
        walked = psi
        coin = CoinParams(eps=eps, theta=0.0)
        for _ in range(steps):
            walked = flat_step(walked, coin)
        out.append(l2_distance(walked, transport_exact(psi, steps * eps)))
    return out
