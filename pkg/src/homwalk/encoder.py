"""Construction and application of the metric-encoding boundary operator.

Per site the operator is the 4x4 block matrix

    U = [[ a*I2,  b*I2 ],
         [-c*I2,  d*I2 ]]

acting on the (walker, ancilla) pair, with real scalars chosen as

    a = d = sqrt(1 - q) * omega,      q = eps^eta,
    b = c = sqrt(1 - (1 - q) * omega^2),

i.e. a rotation by arccos(sqrt(1-q)*omega) in the sector plane.  This choice
satisfies all three weighted-isometry conditions

    (1-q) N'N + q T'T = I,   (1-q) V'V + q H'H = I,   N'H - T'V = 0

identically (with N = V = omega*I2 and H = T = tau*I2,
tau = sqrt((1 - (1-q) omega^2)/q)), and is exactly unitary, which the
telescoping pipeline depends on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .lattice import DoubledField, Grid, SpinorField


@dataclass(frozen=True)
class EncoderParams:
    eps: float
    eta: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.eps <= 1.0):
            raise ValueError(f"eps must lie in (0, 1], got {self.eps}")
        if not (self.eta > 0.0 and np.isfinite(self.eta)):
            raise ValueError(f"eta must be a positive real, got {self.eta}")

    @property
    def leak(self) -> float:
        """The sector-mixing weight q = eps^eta."""
        return self.eps**self.eta


@dataclass(frozen=True)
class EncodingOperator:
    """Per-site scalar coefficients of the block rotation; immutable."""

    grid: Grid
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    params: EncoderParams

    def block(self, j: int) -> np.ndarray:
        """The 4x4 matrix at site j, ordered (psi_up, psi_dn, phi_up, phi_dn)."""
        i2 = np.eye(2)
        return np.block(
            [[self.a[j] * i2, self.b[j] * i2], [-self.c[j] * i2, self.d[j] * i2]]
        ).astype(complex)


def build_encoder(omega: np.ndarray, params: EncoderParams, grid: Grid) -> EncodingOperator:
    """Build the boundary operator from a per-site weight field omega in (0, 1]."""
    omega = np.asarray(omega, dtype=float)
    if omega.shape != (grid.n_sites,):
        raise ValueError(f"omega must have one entry per site, got shape {omega.shape}")
    if np.any(omega <= 0.0) or np.any(omega > 1.0):
        raise PreconditionError("omega must lie in (0, 1] at every site")
    q = params.leak
    if q <= 0.0:
        raise PreconditionError("eps^eta vanishes: a flat bulk has nothing to encode")
    a = np.sqrt(1.0 - q) * omega
    c = np.sqrt(1.0 - (1.0 - q) * omega**2)
    return EncodingOperator(grid=grid, a=a, b=c.copy(), c=c, d=a.copy(), params=params)


def conditions_residual(op: EncodingOperator) -> tuple[float, float, float]:
    """Max-over-sites residuals of the three weighted-isometry conditions.

    The blocks are recovered from the stored coefficients:
    N = a/sqrt(1-q), H = b/sqrt(q), T = c/sqrt(q), V = d/sqrt(1-q).
    At q = 1 the N and V blocks drop out of the operator entirely and the
    third condition is vacuous; its residual is then the bare |a*b - c*d|.
    """
    q = op.params.leak
    r1 = float(np.max(np.abs(op.a**2 + op.c**2 - 1.0)))
    r2 = float(np.max(np.abs(op.d**2 + op.b**2 - 1.0)))
    cross = np.abs(op.a * op.b - op.c * op.d)
    denom = np.sqrt(q * (1.0 - q))
    r3 = float(np.max(cross / denom)) if denom > 1e-15 else float(np.max(cross))
    return r1, r2, r3


def _check_same_grid(state: DoubledField, op: EncodingOperator):
    if state.grid != op.grid:
        raise ValueError("state and encoder live on different grids")


def encode(state_tilde: DoubledField, op: EncodingOperator) -> DoubledField:
    """Map the encoded-frame state to the flat frame: apply the adjoint rows,
    psi <- a*psi - c*phi, phi <- b*psi + d*phi."""
    _check_same_grid(state_tilde, op)
    psi, phi = state_tilde.psi, state_tilde.phi
    new_psi = SpinorField(op.grid, op.a * psi.up - op.c * phi.up, op.a * psi.down - op.c * phi.down)
    new_phi = SpinorField(op.grid, op.b * psi.up + op.d * phi.up, op.b * psi.down + op.d * phi.down)
    return DoubledField(new_psi, new_phi)


def decode(state: DoubledField, op: EncodingOperator) -> DoubledField:
    """Map the flat-frame state back to the encoded frame: apply the operator
    itself, psi <- a*psi + b*phi, phi <- -c*psi + d*phi."""
    _check_same_grid(state, op)
    psi, phi = state.psi, state.phi
    new_psi = SpinorField(op.grid, op.a * psi.up + op.b * phi.up, op.a * psi.down + op.b * phi.down)
    new_phi = SpinorField(op.grid, -op.c * psi.up + op.d * phi.up, -op.c * psi.down + op.d * phi.down)
    return DoubledField(new_psi, new_phi)
