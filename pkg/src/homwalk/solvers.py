"""Independent reference solvers used as oracles.

- transport_exact: on-lattice massless transport (pure permutation).
- flat_dirac_exact: momentum-space solution of i dPsi/dt = (i sz d/dx - m sx) Psi
  by per-mode 2x2 matrix exponentials on the periodic grid.
- conformal_oracle: the weight trick for the massless curved equation; the
  weighted field omega*Psi obeys flat transport exactly.
- cn_evolve: implicit-midpoint (Crank-Nicolson) integrator for the first-order
  curved equation with connection terms, used where no closed form exists.

All sign conventions are fixed by the walk's continuum limit: one walk step
on the mode e^{ikx} is exp(i k dx sz) exp(i eps theta sx), so the generator is
H_k = -k sz - m sx.
"""

from __future__ import annotations

import warnings

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import PreconditionError
from .lattice import SpinorField
from .metric import OMEGA_FLOOR, ConformalField


def _steps_of(T: float, dt: float) -> int:
    n = int(round(T / dt))
    if abs(T - n * dt) > 1e-9 * max(1.0, abs(T)):
        raise PreconditionError(f"T={T} is not a multiple of dt={dt}")
    return n


def transport_exact(psi0: SpinorField, T: float) -> SpinorField:
    """Massless transport: up translated by -T, down by +T (exact rolls)."""
    n = _steps_of(T, psi0.grid.dt)
    return SpinorField(psi0.grid, np.roll(psi0.up, -n), np.roll(psi0.down, +n))


def flat_dirac_exact(psi0: SpinorField, mass: float, T: float) -> SpinorField:
    """Evolve each momentum mode by exp(-i T H_k), H_k = -k sz - mass sx."""
    grid = psi0.grid
    k = 2.0 * np.pi * np.fft.fftfreq(grid.n_sites, d=grid.dx)
    fu = np.fft.fft(psi0.up)
    fd = np.fft.fft(psi0.down)
    e = np.sqrt(k**2 + mass**2)
    # exp(-iT H_k) = cos(eT) I + i sin(eT) (k sz + m sx)/e
    cos = np.cos(e * T)
    sinc = np.where(e > 0.0, np.sin(e * T) / np.where(e > 0.0, e, 1.0), T)
    gu = (cos + 1j * sinc * k) * fu + 1j * sinc * mass * fd
    gd = 1j * sinc * mass * fu + (cos - 1j * sinc * k) * fd
    return SpinorField(grid, np.fft.ifft(gu), np.fft.ifft(gd))


def conformal_oracle(
    psi_tilde0: SpinorField, omega0: np.ndarray, omegaT: np.ndarray, T: float
) -> SpinorField:
    """Exact massless curved solution: transport the weighted field, unweigh.

    Returns transport_exact(omega0 * psi, T) / omegaT pointwise."""
    omega0 = np.asarray(omega0, dtype=float)
    omegaT = np.asarray(omegaT, dtype=float)
    if np.any(np.abs(omegaT) < OMEGA_FLOOR):
        raise PreconditionError(f"omega below division floor {OMEGA_FLOOR}")
    grid = psi_tilde0.grid
    chi = SpinorField(grid, omega0 * psi_tilde0.up, omega0 * psi_tilde0.down)
    moved = transport_exact(chi, T)
    return SpinorField(grid, moved.up / omegaT, moved.down / omegaT)


def _centered_difference(n: int, dx: float) -> sp.csr_matrix:
    off = np.ones(n - 1) / (2.0 * dx)
    d = sp.diags([off, -off], [1, -1], shape=(n, n), format="lil")
    d[0, n - 1] = -1.0 / (2.0 * dx)
    d[n - 1, 0] = +1.0 / (2.0 * dx)
    return d.tocsr()


def cn_evolve(
    psi0: SpinorField,
    cf: ConformalField,
    mass: float,
    T: float,
    substeps: int,
    t0: float = 0.0,
) -> SpinorField:
    """Crank-Nicolson integration of the curved first-order system

        dPsi/dt = sz dPsi/dx + (W'/2W) sz Psi - (Wdot/2W) Psi + i W m sx Psi

    with centered spatial differences on the periodic grid.  The site-local
    connection terms are evaluated at the half step.  The internal time step
    is T/substeps and is independent of the lattice spacing.
    """
    if substeps < 1:
        raise ValueError("substeps must be a positive integer")
    grid = psi0.grid
    n = grid.n_sites
    x = grid.x
    dt = T / substeps

    # resolution guard: connection terms should vary slowly per step/site
    w0 = np.asarray(cf.omega2(t0, x), dtype=float)
    grad = np.max(np.abs(np.asarray(cf.d_x(t0, x)) / w0))
    if grad * grid.dx > 1.0:
        warnings.warn(
            "metric gradient exceeds grid resolution; cn_evolve output may be "
            "under-resolved",
            stacklevel=2,
        )

    diff = _centered_difference(n, grid.dx)
    sz_diff = sp.block_diag((diff, -diff), format="csr")
    eye = sp.identity(2 * n, format="csr", dtype=complex)

    static = cf.kind in ("constant", "gaussian_bump_static") or (
        cf.kind == "tabulated" and len(cf.params["t_values"]) == 1
    )

    solve = None
    psi = np.concatenate([psi0.up, psi0.down]).astype(complex)
    for step in range(substeps):
        if solve is None or not static:
            th = t0 + (step + 0.5) * dt
            w = np.asarray(cf.omega2(th, x), dtype=float)
            gx = np.asarray(cf.d_x(th, x), dtype=float) / (2.0 * w)
            gt = np.asarray(cf.d_t(th, x), dtype=float) / (2.0 * w)
            diag_up = gx - gt
            diag_dn = -gx - gt
            local = sp.diags(np.concatenate([diag_up, diag_dn])).astype(complex)
            if mass != 0.0:
                m_off = 1j * mass * w
                mass_op = sp.bmat(
                    [[None, sp.diags(m_off)], [sp.diags(m_off), None]], format="csr"
                )
                gen = sz_diff + local + mass_op
            else:
                gen = sz_diff + local
            lhs = (eye - (dt / 2.0) * gen).tocsc()
            rhs = (eye + (dt / 2.0) * gen).tocsr()
            solve = spla.factorized(lhs)
        psi = solve(rhs @ psi)
    if not np.all(np.isfinite(psi.view(float))):
        raise PreconditionError("cn_evolve produced nonfinite amplitudes")
    return SpinorField(grid, psi[:n], psi[n:])


def weighted_norm(field: SpinorField, cf: ConformalField, t: float) -> float:
    """Diagnostic sum_x W(t,x) |Psi|^2 dx, the quantity the curved flow
    transports; reported for monitoring, never asserted."""
    w = np.asarray(cf.omega2(t, field.grid.x), dtype=float)
    return float(np.sum(w * field.density()) * field.grid.dx)
