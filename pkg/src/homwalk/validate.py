"""Built-in invariant suite behind the `validate` subcommand.

Each check is small enough to run in seconds and returns (passed, detail).
The fault parameter exists for testing the suite itself: it deliberately
corrupts one ingredient so the corresponding check must fail.
"""

from __future__ import annotations

import numpy as np

from .encoder import EncoderParams, build_encoder, conditions_residual, decode, encode
from .lattice import (
    DoubledField,
    Grid,
    SpinorField,
    apply_pointwise_unitary,
    gaussian_packet,
    l2_distance,
    random_unitary_field,
)
from .metric import ConformalField, make_random_smooth_metric, make_step_metric
from .pipeline import PacketSpec, PipelineConfig, run_per_step, run_telescoped, zeroth_order_residual
from .solvers import transport_exact
from .walk import CoinParams, flat_step


def _pipeline(grid: Grid, steps: int, metric: ConformalField, theta: float = 0.0,
              eta: float = 1.0, packet: PacketSpec | None = None, t_start: float = 0.0):
    return PipelineConfig(
        grid=grid,
        steps=steps,
        coin=CoinParams(eps=grid.dx, theta=theta),
        encoder=EncoderParams(eps=grid.dx, eta=eta),
        metric=metric,
        initial=packet or PacketSpec(x0=0.0, sigma=max(4 * grid.dx, 0.25)),
        t_start=t_start,
    )


def check_encoder_unitarity(fault: str | None = None):
    """Per-site blocks of the built operator are orthogonal to 1e-14."""
    rng = np.random.default_rng(7)
    grid = Grid(n_sites=64, dx=1.0 / 64)
    worst = 0.0
    for _ in range(20):
        omega = rng.uniform(0.05, 1.0, size=grid.n_sites)
        op = build_encoder(omega, EncoderParams(eps=rng.uniform(0.01, 1.0), eta=1.0), grid)
        a, b, c, d = op.a, op.b, op.c, op.d
        if fault == "encoder-scale":
            a, b, c, d = 1.01 * a, 1.01 * b, 1.01 * c, 1.01 * d
        worst = max(
            worst,
            float(np.max(np.abs(a**2 + c**2 - 1.0))),
            float(np.max(np.abs(b**2 + d**2 - 1.0))),
            float(np.max(np.abs(a * b - c * d))),
        )
    return worst <= 1e-14, f"max block-orthogonality residual {worst:.3e} (tol 1e-14)"


def check_encoder_conditions(fault: str | None = None):
    """All three weighted-isometry residuals stay below 1e-12 on random draws."""
    rng = np.random.default_rng(11)
    grid = Grid(n_sites=32, dx=1.0 / 32)
    worst = 0.0
    for _ in range(100):
        omega = rng.uniform(0.05, 1.0, size=grid.n_sites)
        params = EncoderParams(eps=rng.uniform(1e-3, 1.0), eta=rng.choice([0.5, 1.0, 2.0]))
        res = conditions_residual(build_encoder(omega, params, grid))
        worst = max(worst, *res)
    return worst <= 1e-12, f"max condition residual {worst:.3e} (tol 1e-12)"


def check_no_go(fault: str | None = None):
    """Site-wise density is untouched by any per-site unitary map."""
    rng = np.random.default_rng(13)
    grid = Grid(n_sites=128, dx=1.0 / 128)
    psi = gaussian_packet(grid, 0.0, 0.1, k0=3.0, chi=0.7, phase=0.3)
    base = psi.density()
    worst = 0.0
    for _ in range(100):
        rotated = apply_pointwise_unitary(psi, random_unitary_field(rng, grid.n_sites))
        worst = max(worst, float(np.max(np.abs(rotated.density() - base))))
    return worst <= 1e-15, f"max density deviation {worst:.3e} (tol 1e-15)"


def check_telescoping(fault: str | None = None):
    """Per-step and telescoped pipelines agree after 1000 steps."""
    rng = np.random.default_rng(17)
    grid = Grid(n_sites=512, dx=1.0 / 128)
    steps = 1000
    metric = make_random_smooth_metric(rng, grid, 0.0, steps * grid.dt, steps)
    cfg = _pipeline(grid, steps, metric, theta=0.35)
    final_ps = run_per_step(cfg)[-1][1]
    final_tl = run_telescoped(cfg)
    dist = l2_distance(final_ps.psi, final_tl.psi) + l2_distance(final_ps.phi, final_tl.phi)
    return dist <= 1e-10, f"per-step vs telescoped distance {dist:.3e} (tol 1e-10)"


def check_pipeline_unitarity(fault: str | None = None):
    """Total doubled-field norm drifts below 1e-12 over 1000 conjugated steps."""
    rng = np.random.default_rng(19)
    grid = Grid(n_sites=256, dx=1.0 / 128)
    steps = 1000
    metric = make_random_smooth_metric(rng, grid, 0.0, steps * grid.dt, steps)
    cfg = _pipeline(grid, steps, metric, theta=0.2)
    state0 = cfg.initial_state()
    final = run_telescoped(cfg)
    drift = abs(final.total_norm() - state0.total_norm())
    return drift <= 1e-12, f"norm drift {drift:.3e} (tol 1e-12)"


def check_constant_metric_exactness(fault: str | None = None):
    """Constant factor decodes to exact transport (a^2 + b^2 = 1 identity)."""
    worst = 0.0
    for value in (0.25, 1.0, 4.0):
        for eta in (0.5, 1.0, 2.0):
            grid = Grid(n_sites=256, dx=1.0 / 128)
            cfg = _pipeline(grid, 300, ConformalField.constant(value), eta=eta)
            final = run_telescoped(cfg)
            expected = transport_exact(cfg.initial_state().psi, 300 * grid.dt)
            worst = max(worst, l2_distance(final.psi, expected))
    return worst <= 1e-12, f"max decoded-vs-transport error {worst:.3e} (tol 1e-12)"


def check_massless_flat_exactness(fault: str | None = None):
    """The massless walk is an exact permutation."""
    grid = Grid(n_sites=512, dx=1.0 / 256)
    psi = gaussian_packet(grid, 0.3, 0.05, k0=10.0, chi=0.9)
    walked = psi
    coin = CoinParams(eps=grid.dx, theta=0.0)
    for _ in range(400):
        walked = flat_step(walked, coin)
    err = l2_distance(walked, transport_exact(psi, 400 * grid.dt))
    return err <= 1e-12, f"massless walk vs transport error {err:.3e} (tol 1e-12)"


def check_zeroth_order(fault: str | None = None):
    """Shift-compensated step -> identity at O(eps) for smooth factors,
    but not for a discontinuous one."""
    ratios = []
    residuals = []
    for eps in (1.0 / 64, 1.0 / 128, 1.0 / 256):
        grid = Grid(n_sites=int(round(4.0 / eps)), dx=eps)
        cfg = _pipeline(grid, 4, ConformalField.gaussian_bump(0.3, 1.0))
        residuals.append(zeroth_order_residual(cfg, 0.0))
    for a, b in zip(residuals, residuals[1:]):
        ratios.append(a / b)
    ok_smooth = all(1.6 <= r <= 2.4 for r in ratios)

    rough = []
    for eps in (1.0 / 64, 1.0 / 128):
        grid = Grid(n_sites=int(round(4.0 / eps)), dx=eps)
        cfg = _pipeline(grid, 4, make_step_metric(grid))
        rough.append(zeroth_order_residual(cfg, 0.0))
    ok_rough = rough[1] >= 0.5 * rough[0]
    detail = f"smooth ratios {['%.2f' % r for r in ratios]}, rough {rough[1]:.3e} vs {rough[0]:.3e}"
    return ok_smooth and ok_rough, detail


def check_decode_roundtrip(fault: str | None = None):
    """decode(encode(state)) returns the state to 1e-14."""
    rng = np.random.default_rng(23)
    grid = Grid(n_sites=128, dx=1.0 / 64)
    worst = 0.0
    for _ in range(20):
        omega = rng.uniform(0.1, 1.0, size=grid.n_sites)
        op = build_encoder(omega, EncoderParams(eps=0.25, eta=1.0), grid)
        state = DoubledField(
            SpinorField(grid, *(rng.standard_normal((2, grid.n_sites, 2)) @ [1, 1j])),
            SpinorField(grid, *(rng.standard_normal((2, grid.n_sites, 2)) @ [1, 1j])),
        )
        back = decode(encode(state, op), op)
        worst = max(
            worst,
            l2_distance(back.psi, state.psi),
            l2_distance(back.phi, state.phi),
        )
    return worst <= 1e-14, f"max roundtrip distance {worst:.3e} (tol 1e-14)"


ALL_CHECKS = [
    ("encoder-unitarity", check_encoder_unitarity),
    ("encoder-conditions", check_encoder_conditions),
    ("no-go-density-invariance", check_no_go),
    ("decode-roundtrip", check_decode_roundtrip),
    ("telescoping-equivalence", check_telescoping),
    ("pipeline-unitarity", check_pipeline_unitarity),
    ("constant-metric-exactness", check_constant_metric_exactness),
    ("massless-flat-exactness", check_massless_flat_exactness),
    ("zeroth-order-residual", check_zeroth_order),
]


def run_all(fault: str | None = None):
    """Run every check; returns list of (name, passed, detail)."""
    results = []
    for name, fn in ALL_CHECKS:
        passed, detail = fn(fault)
        results.append((name, passed, detail))
    return results
