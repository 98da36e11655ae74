"""Conformal-factor library and curvature diagnostics.

A ConformalField represents the positive factor W(t, x) multiplying the flat
metric.  The walker only ever sees the normalized weight
omega(t, x) = sqrt(W / W_max), where W_max is the maximum of W over the
simulated window, so that omega lies in (0, 1] and stays cosine-representable
by the encoding rotation.  The raw maximum is reported as `scale` so users of
the massive sector can compensate the implied mass rescaling.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import PreconditionError
from .lattice import Grid

KINDS = ("constant", "gaussian_bump_static", "exponential_time", "power_time", "tabulated")

# omega values below this floor are treated as a user-input pathology
OMEGA_FLOOR = 1e-6


@dataclass(frozen=True)
class CurvatureReport:
    """Common values of the nonzero connection components plus the Ricci scalar.

    time_class is dW/dt / W and space_class is dW/dx / W, written without the
    conventional 1/2 (a deliberate quote-fidelity choice; see README).
    """

    christoffel_time_class: float
    christoffel_space_class: float
    ricci: float


@dataclass(frozen=True, eq=False)
class ConformalField:
    """One conformal factor of a named analytic kind, or a tabulated one.

    `window` is the time interval the simulation will cover; it drives the
    normalization maximum for time-dependent kinds.  Static kinds ignore it.
    """

    kind: str
    params: dict
    window: tuple[float, float] = (0.0, 0.0)
    fd_step: float = 1e-3
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown conformal kind {self.kind!r}")
        if self.window[1] < self.window[0]:
            raise ValueError(f"window {self.window} is reversed")

    # -- constructors ------------------------------------------------------

    @classmethod
    def constant(cls, value: float) -> "ConformalField":
        if value <= 0.0:
            raise PreconditionError("nonpositive conformal factor")
        return cls("constant", {"value": float(value)})

    @classmethod
    def gaussian_bump(cls, amplitude: float, width: float, center: float = 0.0) -> "ConformalField":
        if width <= 0.0:
            raise ValueError("bump width must be positive")
        if amplitude <= -1.0:
            raise PreconditionError("nonpositive conformal factor")
        return cls(
            "gaussian_bump_static",
            {"amplitude": float(amplitude), "width": float(width), "center": float(center)},
        )

    @classmethod
    def exponential(cls, rate: float, base: float = 1.0,
                    window: tuple[float, float] = (0.0, 0.0)) -> "ConformalField":
        if base <= 0.0:
            raise PreconditionError("nonpositive conformal factor")
        return cls("exponential_time", {"rate": float(rate), "base": float(base)}, window)

    @classmethod
    def power(cls, power: float, window: tuple[float, float] = (1.0, 1.0)) -> "ConformalField":
        if window[0] <= 0.0:
            raise PreconditionError("power-law factor needs a window with t > 0")
        return cls("power_time", {"power": float(power)}, window)

    @classmethod
    def tabulated(cls, t_values: np.ndarray, x_values: np.ndarray, values: np.ndarray,
                  fd_step: float | None = None) -> "ConformalField":
        t_values = np.atleast_1d(np.asarray(t_values, dtype=float))
        x_values = np.asarray(x_values, dtype=float)
        values = np.asarray(values, dtype=float).reshape(len(t_values), len(x_values))
        if np.any(values <= 0.0):
            raise PreconditionError("nonpositive conformal factor in table")
        if len(x_values) < 2:
            raise ValueError("tabulated factor needs at least two x samples")
        if fd_step is None:
            fd_step = 0.5 * float(np.min(np.diff(x_values)))
        window = (float(t_values[0]), float(t_values[-1]))
        return cls(
            "tabulated",
            {"t_values": t_values, "x_values": x_values, "values": values},
            window,
            float(fd_step),
        )

    @classmethod
    def from_csv(cls, path: str | Path) -> "ConformalField":
        """Load a tabulated factor from CSV with header t,x,omega2,
        row-major in t then x, all values strictly positive."""
        rows = []
        with open(path, newline="") as f:
            reader = csv.reader(f)
            header = next(reader, None)
            if header is None or [h.strip() for h in header] != ["t", "x", "omega2"]:
                raise PreconditionError(f"expected header 't,x,omega2' in {path}")
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != 3:
                    raise PreconditionError(f"{path}:{lineno}: expected 3 columns")
                rows.append((float(row[0]), float(row[1]), float(row[2])))
        if not rows:
            raise PreconditionError(f"empty metric table {path}")
        t_all = np.array([r[0] for r in rows])
        x_all = np.array([r[1] for r in rows])
        v_all = np.array([r[2] for r in rows])
        t_values = np.unique(t_all)
        x_values = np.unique(x_all)
        if len(rows) != len(t_values) * len(x_values):
            raise PreconditionError(f"metric table {path} is not a full t-x rectangle")
        order = np.lexsort((x_all, t_all))
        if np.any(v_all <= 0.0):
            raise PreconditionError("nonpositive conformal factor in table")
        values = v_all[order].reshape(len(t_values), len(x_values))
        return cls.tabulated(t_values, x_values, values)

    def with_window(self, t0: float, t1: float) -> "ConformalField":
        """Copy of this field normalized over the time window [t0, t1]."""
        if self.kind == "tabulated":
            if len(self.params["t_values"]) > 1:
                lo = float(self.params["t_values"][0])
                hi = float(self.params["t_values"][-1])
                if t0 < lo - 1e-12 or t1 > hi + 1e-12:
                    raise PreconditionError(
                        f"requested window [{t0}, {t1}] exceeds table range [{lo}, {hi}]"
                    )
            return ConformalField(self.kind, self.params, (t0, t1), self.fd_step)
        if self.kind == "power_time" and t0 <= 0.0:
            raise PreconditionError("power-law factor needs t > 0")
        return ConformalField(self.kind, self.params, (t0, t1), self.fd_step)

    # -- evaluation --------------------------------------------------------

    def omega2(self, t: float, x):
        """The conformal factor at (t, x); x may be an array."""
        x = np.asarray(x, dtype=float)
        p = self.params
        if self.kind == "constant":
            val = np.full_like(x, p["value"], dtype=float)
        elif self.kind == "gaussian_bump_static":
            u = (x - p["center"]) / p["width"]
            val = 1.0 + p["amplitude"] * np.exp(-0.5 * u * u)
        elif self.kind == "exponential_time":
            val = np.full_like(x, p["base"] * np.exp(p["rate"] * t), dtype=float)
        elif self.kind == "power_time":
            if t <= 0.0:
                raise PreconditionError("power-law factor evaluated at t <= 0")
            val = np.full_like(x, t ** p["power"], dtype=float)
        else:
            val = self._interp(t, x)
        if np.any(val <= 0.0):
            raise PreconditionError(f"nonpositive conformal factor at t={t}")
        return val if val.ndim else float(val)

    def _interp(self, t: float, x: np.ndarray) -> np.ndarray:
        """Bilinear interpolation of the table, clamped at the edges."""
        p = self.params
        tv, xv, vals = p["t_values"], p["x_values"], p["values"]
        if len(tv) == 1:
            row = vals[0]
        else:
            it = np.clip(np.searchsorted(tv, t) - 1, 0, len(tv) - 2)
            w = np.clip((t - tv[it]) / (tv[it + 1] - tv[it]), 0.0, 1.0)
            row = (1.0 - w) * vals[it] + w * vals[it + 1]
        xq = np.atleast_1d(x)
        ix = np.clip(np.searchsorted(xv, xq) - 1, 0, len(xv) - 2)
        wx = np.clip((xq - xv[ix]) / (xv[ix + 1] - xv[ix]), 0.0, 1.0)
        out = (1.0 - wx) * row[ix] + wx * row[ix + 1]
        return out.reshape(np.shape(x))

    def d_t(self, t: float, x):
        p = self.params
        if self.kind in ("constant", "gaussian_bump_static"):
            return np.zeros_like(np.asarray(x, dtype=float)) + 0.0
        if self.kind == "exponential_time":
            return p["rate"] * self.omega2(t, x)
        if self.kind == "power_time":
            return p["power"] * t ** (p["power"] - 1.0) + np.zeros_like(np.asarray(x, float))
        return self.d_t_fd(t, x, self.fd_step)

    def d_tt(self, t: float, x):
        p = self.params
        if self.kind in ("constant", "gaussian_bump_static"):
            return np.zeros_like(np.asarray(x, dtype=float)) + 0.0
        if self.kind == "exponential_time":
            return p["rate"] ** 2 * self.omega2(t, x)
        if self.kind == "power_time":
            pw = p["power"]
            return pw * (pw - 1.0) * t ** (pw - 2.0) + np.zeros_like(np.asarray(x, float))
        return self.d_tt_fd(t, x, self.fd_step)

    def d_x(self, t: float, x):
        p = self.params
        if self.kind == "gaussian_bump_static":
            x = np.asarray(x, dtype=float)
            u = (x - p["center"]) / p["width"]
            return -p["amplitude"] * (x - p["center"]) / p["width"] ** 2 * np.exp(-0.5 * u * u)
        if self.kind in ("constant", "exponential_time", "power_time"):
            return np.zeros_like(np.asarray(x, dtype=float)) + 0.0
        return self.d_x_fd(t, x, self.fd_step)

    def d_xx(self, t: float, x):
        p = self.params
        if self.kind == "gaussian_bump_static":
            x = np.asarray(x, dtype=float)
            s2 = p["width"] ** 2
            u2 = (x - p["center"]) ** 2 / s2
            return p["amplitude"] / s2 * (u2 - 1.0) * np.exp(-0.5 * u2)
        if self.kind in ("constant", "exponential_time", "power_time"):
            return np.zeros_like(np.asarray(x, dtype=float)) + 0.0
        return self.d_xx_fd(t, x, self.fd_step)

    # centered finite differences; available for every kind so the analytic
    # formulas can be cross-checked at h-halving
    def d_t_fd(self, t: float, x, h: float):
        return (self.omega2(t + h, x) - self.omega2(t - h, x)) / (2.0 * h)

    def d_tt_fd(self, t: float, x, h: float):
        return (self.omega2(t + h, x) - 2.0 * self.omega2(t, x) + self.omega2(t - h, x)) / h**2

    def d_x_fd(self, t: float, x, h: float):
        x = np.asarray(x, dtype=float)
        return (self.omega2(t, x + h) - self.omega2(t, x - h)) / (2.0 * h)

    def d_xx_fd(self, t: float, x, h: float):
        x = np.asarray(x, dtype=float)
        return (self.omega2(t, x + h) - 2.0 * self.omega2(t, x) + self.omega2(t, x - h)) / h**2

    # -- normalization -----------------------------------------------------

    def max_over_window(self, grid: Grid) -> float:
        """Maximum of the factor over grid sites and lattice times in the window.

        Sampling at exactly the times t0 + k*dt the pipeline visits guarantees
        omega <= 1 at every queried lattice point.
        """
        key = (grid.n_sites, grid.dx, self.window)
        if key in self._cache:
            return self._cache[key]
        x = grid.x
        if self.kind in ("constant", "gaussian_bump_static"):
            m = float(np.max(self.omega2(self.window[0], x)))
        elif self.kind == "tabulated":
            m = float(np.max(self.params["values"]))
        else:
            t0, t1 = self.window
            n_steps = max(int(round((t1 - t0) / grid.dt)), 0)
            times = t0 + np.arange(n_steps + 1) * grid.dt
            if len(times) == 0 or times[-1] < t1 - 1e-12:
                times = np.append(times, t1)
            m = max(float(np.max(self.omega2(float(t), x))) for t in times)
        if m <= 0.0:
            raise PreconditionError("nonpositive conformal factor in window")
        self._cache[key] = m
        return m


def omega_field(cf: ConformalField, t: float, grid: Grid) -> tuple[np.ndarray, float]:
    """Normalized weight omega(x) = sqrt(W(t,x)/W_max) on the grid slice at t,
    together with scale = W_max over the simulated window.

    omega is guaranteed to lie in (0, 1] at lattice times inside the window.
    """
    scale = cf.max_over_window(grid)
    w = np.asarray(cf.omega2(t, grid.x), dtype=float)
    omega = np.sqrt(w / scale)
    if np.any(omega > 1.0):
        over = float(np.max(omega))
        if over > 1.0 + 1e-12:
            raise PreconditionError(
                f"omega={over} exceeds 1 at t={t}: query outside the normalized window"
            )
        omega = np.minimum(omega, 1.0)
    if np.any(omega < OMEGA_FLOOR):
        raise PreconditionError(f"omega below floor {OMEGA_FLOOR} at t={t}")
    return omega, scale


def christoffel(cf: ConformalField, t: float, x: float) -> CurvatureReport:
    """Connection classes (dW/dt / W, dW/dx / W) and the Ricci scalar at (t, x)."""
    w = cf.omega2(t, x)
    return CurvatureReport(
        christoffel_time_class=float(cf.d_t(t, x) / w),
        christoffel_space_class=float(cf.d_x(t, x) / w),
        ricci=ricci_scalar(cf, t, x),
    )


def ricci_scalar(cf: ConformalField, t: float, x: float) -> float:
    """R = 2 ((dW/dt / W)^2 - d2W/dt2 / W) / W^2, time-derivative form."""
    w = cf.omega2(t, x)
    dt = cf.d_t(t, x)
    dtt = cf.d_tt(t, x)
    return float(2.0 * ((dt / w) ** 2 - dtt / w) / w**2)


def ricci_conformal_general(cf: ConformalField, t: float, x: float) -> float:
    """Convention-bearing extension for spatially varying factors:
    -(d_t^2 - d_x^2) ln W / W.  Distinct from ricci_scalar on purpose."""
    w = cf.omega2(t, x)
    dt, dtt = cf.d_t(t, x), cf.d_tt(t, x)
    dx, dxx = cf.d_x(t, x), cf.d_xx(t, x)
    lap_ln = (dtt / w - (dt / w) ** 2) - (dxx / w - (dx / w) ** 2)
    return float(-lap_ln / w)


def make_random_smooth_metric(
    rng: np.random.Generator, grid: Grid, t0: float, t1: float, n_steps: int
) -> ConformalField:
    """Random low-wavenumber Fourier factor tabulated on the lattice, bounded
    away from zero.  Used by the validation suite and the unitarity checks."""
    times = t0 + np.arange(n_steps + 1) * grid.dt
    x = grid.x
    length = grid.length
    vals = np.ones((len(times), len(x)))
    for _ in range(3):
        amp = 0.12 * rng.uniform(0.3, 1.0)
        m = rng.integers(1, 4)
        nu = rng.uniform(0.0, 2.0 / max(t1 - t0, 1e-9))
        phix, phit = rng.uniform(0.0, 2 * np.pi, size=2)
        vals += amp * np.outer(
            np.cos(nu * (times - t0) + phit), np.cos(2 * np.pi * m * x / length + phix)
        )
    return ConformalField.tabulated(times, x, vals)


def make_step_metric(grid: Grid, low: float = 0.25, high: float = 1.0) -> ConformalField:
    """Discontinuous factor sampled at the grid resolution: the negative
    control for smoothness-dependent convergence checks."""
    if low <= 0.0 or high <= 0.0:
        raise PreconditionError("nonpositive conformal factor")
    vals = np.where(grid.x < 0.0, low, high)[None, :]
    return ConformalField.tabulated(np.array([0.0]), grid.x, vals)
