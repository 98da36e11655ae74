"""Homogeneous walk machinery: coin, spin-dependent shift, and the doubled step.

One step is shift-after-coin.  The coin angle is eps*theta, so theta plays
the mass in lattice units and eps is the expansion parameter (eps = dx = dt).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import DoubledField, SpinorField


@dataclass(frozen=True)
class CoinParams:
    eps: float
    theta: float

    def __post_init__(self):
        if not (0.0 <= self.eps <= 1.0):
            raise ValueError(f"eps must lie in [0, 1], got {self.eps}")
        if not np.isfinite(self.theta):
            raise ValueError("theta must be finite")


def coin_matrix(params: CoinParams) -> np.ndarray:
    """2x2 coin [[cos(eps*theta), i sin(eps*theta)], [i sin(eps*theta), cos]]."""
    c = np.cos(params.eps * params.theta)
    s = 1j * np.sin(params.eps * params.theta)
    return np.array([[c, s], [s, c]], dtype=complex)


def shift_apply(field: SpinorField) -> SpinorField:
    """Spin-dependent shift: output up at x reads input up at x+dx, down at x-dx."""
    return SpinorField(field.grid, np.roll(field.up, -1), np.roll(field.down, +1))


def coin_apply(field: SpinorField, params: CoinParams) -> SpinorField:
    c = np.cos(params.eps * params.theta)
    s = 1j * np.sin(params.eps * params.theta)
    return SpinorField(
        field.grid,
        c * field.up + s * field.down,
        s * field.up + c * field.down,
    )


def flat_step(field: SpinorField, params: CoinParams) -> SpinorField:
    """One walk step: shift o coin."""
    return shift_apply(coin_apply(field, params))


def doubled_step(
    state: DoubledField, coin_psi: CoinParams, coin_phi: CoinParams | None = None
) -> DoubledField:
    """Block-diagonal step: each sector takes an independent flat step."""
    if coin_phi is None:
        coin_phi = coin_psi
    return DoubledField(flat_step(state.psi, coin_psi), flat_step(state.phi, coin_phi))


def momentum_step_matrix(k: float, params: CoinParams, dx: float) -> np.ndarray:
    """The 2x2 unitary a flat step applies to the plane-wave mode e^{ikx}."""
    d = np.array([[np.exp(1j * k * dx), 0.0], [0.0, np.exp(-1j * k * dx)]], dtype=complex)
    return d @ coin_matrix(params)
