"""Strict JSON run configuration.

Unknown keys are rejected everywhere so a typo in a physics parameter can
never silently fall back to a default.  Documented ranges are enforced here;
numerical preconditions (positive conformal factor, resolvable packet) are
enforced where the values are first used and surface as PreconditionError.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .encoder import EncoderParams
from .errors import ConfigError, PreconditionError
from .lattice import Grid
from .metric import ConformalField
from .pipeline import PacketSpec, PipelineConfig
from .walk import CoinParams

_GRID_KEYS = {"n_sites", "dx"}
_INITIAL_KEYS = {"x0", "sigma", "k0", "chi", "phase"}
_METRIC_KEYS = {"kind", "value", "amplitude", "width", "center", "rate", "base", "power", "path"}
_SWEEP_KEYS = {"kind", "mass", "eps_list", "eta_list", "amplitudes", "eps", "eta",
               "domain", "horizon", "bump_width", "bump_amplitude"}
_WINDOW_KEYS = {"t0", "t1", "nt"}
_TOP_KEYS = {"grid", "steps", "theta", "eta", "metric", "initial", "ancilla_init",
             "sector", "t_start", "snapshot_every", "sweep", "metric_window", "out_dir"}


def _require(section: dict, allowed: set, where: str) -> None:
    if not isinstance(section, dict):
        raise ConfigError(f"{where} must be a JSON object")
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {where}")


def _get(section: dict, key: str, where: str, default=None, required: bool = False):
    if key not in section:
        if required:
            raise ConfigError(f"missing required key {key!r} in {where}")
        return default
    return section[key]


def _real(value, key: str, lo=-math.inf, hi=math.inf) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    v = float(value)
    if not (lo <= v <= hi) or not math.isfinite(v):
        raise ConfigError(f"{key}={v} outside documented range [{lo}, {hi}]")
    return v


def _int(value, key: str, lo=0, hi=10**9) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise ConfigError(f"{key} must be an integer, got {value!r}")
    if not (lo <= value <= hi):
        raise ConfigError(f"{key}={value} outside documented range [{lo}, {hi}]")
    return value


def parse_metric(section: dict, base_dir: Path | None = None) -> ConformalField:
    _require(section, _METRIC_KEYS, "metric")
    kind = _get(section, "kind", "metric", required=True)
    if kind == "constant":
        return ConformalField.constant(_real(_get(section, "value", "metric", 1.0), "metric.value"))
    if kind == "gaussian_bump_static":
        return ConformalField.gaussian_bump(
            amplitude=_real(_get(section, "amplitude", "metric", required=True), "metric.amplitude"),
            width=_real(_get(section, "width", "metric", 1.0), "metric.width", lo=1e-9),
            center=_real(_get(section, "center", "metric", 0.0), "metric.center"),
        )
    if kind == "exponential_time":
        return ConformalField.exponential(
            rate=_real(_get(section, "rate", "metric", required=True), "metric.rate"),
            base=_real(_get(section, "base", "metric", 1.0), "metric.base", lo=1e-12),
        )
    if kind == "power_time":
        return ConformalField.power(
            power=_real(_get(section, "power", "metric", required=True), "metric.power"),
            window=(1.0, 1.0),
        )
    if kind == "tabulated":
        path = _get(section, "path", "metric", required=True)
        if not isinstance(path, str):
            raise ConfigError("metric.path must be a string")
        full = Path(path)
        if base_dir is not None and not full.is_absolute():
            full = base_dir / full
        return ConformalField.from_csv(full)
    raise ConfigError(f"unknown metric kind {kind!r}")


@dataclass(frozen=True)
class RunConfig:
    """Parsed configuration for the simulate/converge/metric subcommands."""

    raw: dict
    pipeline: PipelineConfig | None
    sweep: dict | None
    metric_window: tuple | None
    out_dir: str


def load_config(path: str | Path) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(raw, base_dir=Path(path).resolve().parent)


def parse_config(raw: dict, base_dir: Path | None = None) -> RunConfig:
    _require(raw, _TOP_KEYS, "config")

    pipeline = None
    if "grid" in raw:
        grid_sec = raw["grid"]
        _require(grid_sec, _GRID_KEYS, "grid")
        n_sites = _int(_get(grid_sec, "n_sites", "grid", required=True), "grid.n_sites", lo=4, hi=1 << 22)
        dx = _real(_get(grid_sec, "dx", "grid", required=True), "grid.dx", lo=1e-9, hi=1.0)
        try:
            grid = Grid(n_sites=n_sites, dx=dx)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

        init_sec = _get(raw, "initial", "config", {})
        _require(init_sec, _INITIAL_KEYS, "initial")
        packet = PacketSpec(
            x0=_real(_get(init_sec, "x0", "initial", 0.0), "initial.x0"),
            sigma=_real(_get(init_sec, "sigma", "initial", 1.0), "initial.sigma", lo=0.0),
            k0=_real(_get(init_sec, "k0", "initial", 0.0), "initial.k0"),
            chi=_real(_get(init_sec, "chi", "initial", 0.0), "initial.chi"),
            phase=_real(_get(init_sec, "phase", "initial", 0.0), "initial.phase"),
        )

        metric = parse_metric(_get(raw, "metric", "config", {"kind": "constant"}), base_dir)
        theta = _real(_get(raw, "theta", "config", 0.0), "theta")
        eta = _real(_get(raw, "eta", "config", 1.0), "eta", lo=1e-6, hi=8.0)
        steps = _int(_get(raw, "steps", "config", 0), "steps", lo=0, hi=1 << 22)
        t_start = _real(_get(raw, "t_start", "config", _default_t_start(metric)), "t_start")
        ancilla = _get(raw, "ancilla_init", "config", "zero")
        sector = _get(raw, "sector", "config", "psi")
        snapshot_every = _int(_get(raw, "snapshot_every", "config", 0), "snapshot_every")
        try:
            pipeline = PipelineConfig(
                grid=grid,
                steps=steps,
                coin=CoinParams(eps=dx, theta=theta),
                encoder=EncoderParams(eps=dx, eta=eta),
                metric=metric,
                initial=packet,
                ancilla_init=ancilla,
                sector=sector,
                t_start=t_start,
                snapshot_every=snapshot_every,
            )
        except PreconditionError:
            raise  # numerical failure, not a config-shape problem
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    sweep = None
    if "sweep" in raw:
        _require(raw["sweep"], _SWEEP_KEYS, "sweep")
        sweep = raw["sweep"]

    window = None
    if "metric_window" in raw:
        sec = raw["metric_window"]
        _require(sec, _WINDOW_KEYS, "metric_window")
        window = (
            _real(_get(sec, "t0", "metric_window", required=True), "metric_window.t0"),
            _real(_get(sec, "t1", "metric_window", required=True), "metric_window.t1"),
            _int(_get(sec, "nt", "metric_window", 11), "metric_window.nt", lo=2, hi=100000),
        )

    out_dir = _get(raw, "out_dir", "config", "out")
    if not isinstance(out_dir, str):
        raise ConfigError("out_dir must be a string")
    return RunConfig(raw=raw, pipeline=pipeline, sweep=sweep, metric_window=window, out_dir=out_dir)


def _default_t_start(metric: ConformalField) -> float:
    # power-law factors are only defined for t > 0
    return 1.0 if metric.kind == "power_time" else 0.0
