"""Experiment configuration: defaults, ``key = value`` files, overrides, presets."""

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ConfigError
from ..metrics import MSD_MODES
from ..reliability import NORMALIZATIONS

SWEEP_AXES = ("ls", "a", "n_nodes")


@dataclass(frozen=True)
class ExperimentConfig:
    n_nodes: int = 30
    dim: int = 4
    mu_max: float = 0.01
    a: float = 10.0
    ls: int = 20
    variance_low: float = 1e-3
    variance_high: float = 1e-1
    n_cycles: int = 2000
    n_runs: int = 100
    master_seed: int = 0
    msd_mode: str = "node-averaged"
    msd_node: int = 0
    variance_normalization: str = "normalized"
    tail_fraction: float = 0.1
    threshold_factor: float = 2.0
    sweep_axis: str = ""
    sweep_values: tuple = field(default=())
    # memory knob only; results do not depend on it
    batch_size: int = 25

    def __post_init__(self):
        validate(self)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def items(self):
        """(key, value) pairs in declaration order."""
        return [(f.name, getattr(self, f.name)) for f in dataclasses.fields(self)]


FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)}


def validate(cfg):
    def need(cond, key, msg):
        if not cond:
            raise ConfigError(f"{key}: {msg}")

    need(cfg.n_nodes >= 1, "n_nodes", f"must be >= 1, got {cfg.n_nodes}")
    need(cfg.dim >= 1, "dim", f"must be >= 1, got {cfg.dim}")
    need(cfg.mu_max > 0, "mu_max", f"must be > 0, got {cfg.mu_max}")
    need(cfg.a >= 0, "a", f"must be >= 0, got {cfg.a}")
    need(cfg.ls >= 1, "ls", f"must be >= 1, got {cfg.ls}")
    need(cfg.variance_low > 0, "variance_low", f"must be > 0, got {cfg.variance_low}")
    need(
        cfg.variance_high >= cfg.variance_low,
        "variance_high",
        f"must be >= variance_low ({cfg.variance_low}), got {cfg.variance_high}",
    )
    need(cfg.n_runs >= 1, "n_runs", f"must be >= 1, got {cfg.n_runs}")
    need(cfg.master_seed >= 0, "master_seed", f"must be >= 0, got {cfg.master_seed}")
    need(cfg.msd_mode in MSD_MODES, "msd_mode", f"must be one of {MSD_MODES}, got {cfg.msd_mode!r}")
    need(0 <= cfg.msd_node < cfg.n_nodes, "msd_node", f"must be in 0..{cfg.n_nodes - 1}")
    need(
        cfg.variance_normalization in NORMALIZATIONS,
        "variance_normalization",
        f"must be one of {NORMALIZATIONS}, got {cfg.variance_normalization!r}",
    )
    need(0 < cfg.tail_fraction <= 1, "tail_fraction", f"must be in (0, 1], got {cfg.tail_fraction}")
    need(cfg.threshold_factor > 1, "threshold_factor", f"must be > 1, got {cfg.threshold_factor}")
    need(cfg.batch_size >= 1, "batch_size", f"must be >= 1, got {cfg.batch_size}")
    if cfg.n_cycles <= cfg.ls:
        raise ConfigError(f"n_cycles, ls: n_cycles ({cfg.n_cycles}) must exceed ls ({cfg.ls})")
    if cfg.sweep_axis:
        need(cfg.sweep_axis in SWEEP_AXES, "sweep_axis", f"must be one of {SWEEP_AXES}")
        need(len(cfg.sweep_values) > 0, "sweep_values", "must list at least one value")
        for v in cfg.sweep_values:
            point_config(cfg, v)
    else:
        need(not cfg.sweep_values, "sweep_values", "given without sweep_axis")


def point_config(cfg, value):
    """The non-sweep config for one value on the sweep axis."""
    caster = FIELD_TYPES[cfg.sweep_axis]
    value = _coerce(cfg.sweep_axis, caster, value)
    return dataclasses.replace(cfg, sweep_axis="", sweep_values=(), **{cfg.sweep_axis: value})


def _coerce(key, typ, raw):
    if typ in ("int", int):
        if isinstance(raw, bool):
            raise ConfigError(f"{key}: expected an integer, got {raw!r}")
        if isinstance(raw, int):
            return raw
        if isinstance(raw, float) and raw.is_integer():
            return int(raw)
        try:
            return int(str(raw).strip())
        except ValueError:
            raise ConfigError(f"{key}: expected an integer, got {raw!r}") from None
    if typ in ("float", float):
        if isinstance(raw, (int, float)) and not isinstance(raw, bool):
            return float(raw)
        try:
            return float(str(raw).strip())
        except ValueError:
            raise ConfigError(f"{key}: expected a number, got {raw!r}") from None
    if typ in ("str", str):
        return str(raw).strip()
    if typ in ("tuple", tuple):
        if isinstance(raw, (list, tuple)):
            items = list(raw)
        else:
            items = [s for s in str(raw).replace(",", " ").split() if s]
        out = []
        for s in items:
            try:
                out.append(float(s))
            except (TypeError, ValueError):
                raise ConfigError(f"{key}: expected numbers, got {s!r}") from None
        return tuple(int(v) if v.is_integer() else v for v in out)
    raise AssertionError(f"unhandled field type {typ!r}")


def read_config_file(path):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    values = {}
    for lineno, line in enumerate(path.read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        values[key] = val
    return values


def build_config(values, base=None):
    """Apply a mapping of raw values on top of ``base`` (defaults if None)."""
    base = base or ExperimentConfig()
    changes = {}
    for key, raw in values.items():
        if key not in FIELD_TYPES:
            raise ConfigError(f"{key}: unknown configuration key")
        changes[key] = _coerce(key, FIELD_TYPES[key], raw)
    return dataclasses.replace(base, **changes)


def parse_config(path=None, overrides=None, base=None):
    """Defaults, then the file at ``path``, then ``overrides`` (later wins)."""
    values = {}
    if path is not None:
        values.update(read_config_file(path))
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})
    return build_config(values, base)


def dump_config(cfg):
    lines = []
    for key, value in cfg.items():
        if isinstance(value, tuple):
            value = ",".join(repr(v) for v in value)
        elif isinstance(value, float):
            value = repr(value)
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


PRESETS = {
    "fig2": {},
    "fig3": {"n_runs": 1},
    "fig4": {"sweep_axis": "ls", "sweep_values": (5, 10, 20, 50)},
    "fig5": {"sweep_axis": "a", "sweep_values": (0, 5, 10, 20)},
    "fig6": {"sweep_axis": "n_nodes", "sweep_values": (10, 20, 30, 50)},
}


def preset(name):
    try:
        values = PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return build_config(values)
