"""Grids, two-component complex fields, inner products, and initial data.

Lattice-units convention: the time step always equals the lattice spacing,
and both equal the expansion parameter of the walk.  Sites carry centered
coordinates x_j = (j - n//2) * dx on a periodic ring.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError

# Pauli matrices and the 2x2 identity, in the (up, down) spin basis.
IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


@dataclass(frozen=True)
class Grid:
    """Periodic 1D lattice with n_sites sites, spacing dx, time step dt == dx."""

    n_sites: int
    dx: float
    boundary: str = "periodic"

    def __post_init__(self):
        if self.n_sites < 4:
            raise ValueError(f"n_sites must be >= 4, got {self.n_sites}")
        if not (self.dx > 0.0 and np.isfinite(self.dx)):
            raise ValueError(f"dx must be a positive real, got {self.dx}")
        if self.boundary != "periodic":
            raise ValueError(f"unsupported boundary {self.boundary!r}")

    @property
    def dt(self) -> float:
        # bound to dx by the lattice-units convention
        return self.dx

    @property
    def x(self) -> np.ndarray:
        """Site coordinates, centered so that x=0 sits at index n_sites//2."""
        return (np.arange(self.n_sites) - self.n_sites // 2) * self.dx

    @property
    def length(self) -> float:
        return self.n_sites * self.dx


@dataclass(frozen=True)
class SpinorField:
    """Two complex amplitudes per site: up and down components."""

    grid: Grid
    up: np.ndarray
    down: np.ndarray

    def __post_init__(self):
        up = np.asarray(self.up, dtype=complex)
        down = np.asarray(self.down, dtype=complex)
        object.__setattr__(self, "up", up)
        object.__setattr__(self, "down", down)
        n = self.grid.n_sites
        if up.shape != (n,) or down.shape != (n,):
            raise ValueError(
                f"amplitude arrays must have shape ({n},), got {up.shape} and {down.shape}"
            )
        if not (np.all(np.isfinite(up.view(float))) and np.all(np.isfinite(down.view(float)))):
            raise ValueError("amplitudes must be finite")

    @classmethod
    def zero(cls, grid: Grid) -> "SpinorField":
        z = np.zeros(grid.n_sites, dtype=complex)
        return cls(grid, z, z.copy())

    def density(self) -> np.ndarray:
        """Site-wise probability density |up|^2 + |down|^2."""
        return np.abs(self.up) ** 2 + np.abs(self.down) ** 2

    def scaled(self, z: complex) -> "SpinorField":
        return SpinorField(self.grid, z * self.up, z * self.down)


@dataclass(frozen=True)
class DoubledField:
    """Ordered pair of spinor fields on one grid (walker plus ancilla sector)."""

    psi: SpinorField
    phi: SpinorField

    def __post_init__(self):
        if self.psi.grid != self.phi.grid:
            raise ValueError("psi and phi must share one grid")

    @property
    def grid(self) -> Grid:
        return self.psi.grid

    def total_norm(self) -> float:
        return prob_norm(self.psi) + prob_norm(self.phi)


def prob_norm(field: SpinorField) -> float:
    """Total probability sum_x (|up|^2 + |down|^2), no dx weight."""
    return float(np.sum(np.abs(field.up) ** 2) + np.sum(np.abs(field.down) ** 2))


def l2_distance(a: SpinorField, b: SpinorField) -> float:
    """Grid-weighted L2 distance sqrt(sum_x dx * |a - b|^2)."""
    if a.grid != b.grid:
        raise ValueError("fields live on different grids")
    s = np.sum(np.abs(a.up - b.up) ** 2) + np.sum(np.abs(a.down - b.down) ** 2)
    return float(np.sqrt(a.grid.dx * s))


def fidelity(a: SpinorField, b: SpinorField) -> float:
    """Squared normalized overlap; 1 means equal up to a global phase."""
    na, nb = prob_norm(a), prob_norm(b)
    if na == 0.0 or nb == 0.0:
        raise PreconditionError("fidelity undefined for zero-norm fields")
    ov = np.vdot(a.up, b.up) + np.vdot(a.down, b.down)
    return float(np.abs(ov) ** 2 / (na * nb))


def gaussian_packet(
    grid: Grid,
    x0: float,
    sigma: float,
    k0: float = 0.0,
    chi: float = 0.0,
    phase: float = 0.0,
) -> SpinorField:
    """Normalized Gaussian packet exp(-(x-x0)^2/(4 sigma^2) + i k0 x) with
    spin direction (cos chi, e^{i phase} sin chi).

    sigma must be at least 2*dx so the packet is resolved on the grid.
    """
    if sigma < 2.0 * grid.dx:
        raise PreconditionError(
            f"sigma={sigma} under-resolved: need sigma >= 2*dx = {2.0 * grid.dx}"
        )
    x = grid.x
    if not (x[0] <= x0 <= x[-1]):
        raise PreconditionError(f"x0={x0} outside grid extent [{x[0]}, {x[-1]}]")
    envelope = np.exp(-((x - x0) ** 2) / (4.0 * sigma**2) + 1j * k0 * x)
    up = np.cos(chi) * envelope
    down = np.exp(1j * phase) * np.sin(chi) * envelope
    raw = SpinorField(grid, up, down)
    return raw.scaled(1.0 / np.sqrt(prob_norm(raw)))


def apply_pointwise_unitary(field: SpinorField, mats: np.ndarray) -> SpinorField:
    """Apply a site-dependent 2x2 matrix to the spin at each site.

    mats has shape (n_sites, 2, 2).  Used both for coins and for the
    per-site-unitary invariance checks.
    """
    if mats.shape != (field.grid.n_sites, 2, 2):
        raise ValueError(f"expected mats of shape ({field.grid.n_sites}, 2, 2)")
    up = mats[:, 0, 0] * field.up + mats[:, 0, 1] * field.down
    down = mats[:, 1, 0] * field.up + mats[:, 1, 1] * field.down
    return SpinorField(field.grid, up, down)


def random_unitary_field(rng: np.random.Generator, n_sites: int) -> np.ndarray:
    """Haar-ish random site-dependent 2x2 unitaries via QR of complex Gaussians."""
    z = rng.standard_normal((n_sites, 2, 2)) + 1j * rng.standard_normal((n_sites, 2, 2))
    q, r = np.linalg.qr(z)
    # fix phases so the factorization is unique
    d = np.diagonal(r, axis1=1, axis2=2)
    return q * (d / np.abs(d))[:, None, :]
