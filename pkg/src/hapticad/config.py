"""Pipeline configuration loaded from a ``key = value`` text file.

Blank lines and lines starting with ``#`` are ignored. Unknown keys are an
error so that typos do not silently fall back to defaults.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

from .calib import DEFAULT_MAP, LinearMap
from .contour import DEFAULT_RING_SPACING_MM, DEFAULT_VERTEX_COUNT
from .haptics import (
    DEFAULT_GRID,
    DEFAULT_KI,
    DEFAULT_VALIDATION_GRID,
    ActuatorModel,
    TrainConfig,
)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Config:
    calibration: LinearMap = DEFAULT_MAP
    ring_spacing_mm: float = DEFAULT_RING_SPACING_MM
    vertex_count: int = DEFAULT_VERTEX_COUNT
    close_seam: bool = True
    actuator: ActuatorModel = field(default_factory=ActuatorModel)
    grid: tuple[int, int, int] = DEFAULT_GRID
    validation_grid: tuple[int, int, int] = DEFAULT_VALIDATION_GRID
    train: TrainConfig = field(default_factory=TrainConfig)
    ki: float = DEFAULT_KI
    spring_k: float = 0.1
    seed: int = 42

    def with_seed(self, seed: int) -> "Config":
        return replace(self, seed=seed, train=replace(self.train, seed=seed))


def _bool(v: str) -> bool:
    low = v.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


def _grid(v: str) -> tuple[int, int, int]:
    parts = v.replace("x", " ").replace(",", " ").split()
    if len(parts) != 3:
        raise ValueError(f"grid needs three counts, got {v!r}")
    return tuple(int(p) for p in parts)


# key -> (parser, setter)
_KEYS = {
    "calibration.slope": (float, lambda c, v: replace(c, calibration=replace(c.calibration, slope=v))),
    "calibration.intercept": (float, lambda c, v: replace(c, calibration=replace(c.calibration, intercept=v))),
    "scan.ring_spacing_mm": (float, lambda c, v: replace(c, ring_spacing_mm=v)),
    "scan.vertex_count": (int, lambda c, v: replace(c, vertex_count=v)),
    "scan.close_seam": (_bool, lambda c, v: replace(c, close_seam=v)),
    "actuator.f_max": (float, lambda c, v: replace(c, actuator=replace(c.actuator, f_max=v))),
    "actuator.beta": (float, lambda c, v: replace(c, actuator=replace(c.actuator, beta=v))),
    "train.grid": (_grid, lambda c, v: replace(c, grid=v)),
    "train.validation_grid": (_grid, lambda c, v: replace(c, validation_grid=v)),
    "train.epochs": (int, lambda c, v: replace(c, train=replace(c.train, epochs=v))),
    "train.learning_rate": (float, lambda c, v: replace(c, train=replace(c.train, learning_rate=v))),
    "train.lr_floor": (float, lambda c, v: replace(c, train=replace(c.train, lr_floor=v))),
    "train.warmup_epochs": (int, lambda c, v: replace(c, train=replace(c.train, warmup_epochs=v))),
    "train.param_weight": (float, lambda c, v: replace(c, train=replace(c.train, param_weight=v))),
    "train.val_fraction": (float, lambda c, v: replace(c, train=replace(c.train, val_fraction=v))),
    "control.ki": (float, lambda c, v: replace(c, ki=v)),
    "spring.k": (float, lambda c, v: replace(c, spring_k=v)),
    "seed": (int, lambda c, v: c.with_seed(v)),
}


def parse_config(text: str) -> Config:
    cfg = Config()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        parse, setter = _KEYS[key]
        try:
            cfg = setter(cfg, parse(value))
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: {key}: {exc}") from None
    if cfg.vertex_count < 3:
        raise ConfigError("scan.vertex_count must be >= 3")
    if not 0.0 <= cfg.train.val_fraction < 1.0:
        raise ConfigError("train.val_fraction must be in [0, 1)")
    return cfg


def load_config(path) -> Config:
    return parse_config(Path(path).read_text(encoding="utf-8"))


def dump_config(cfg: Config) -> str:
    """Render ``cfg`` in the same format :func:`parse_config` reads."""
    t = cfg.train
    lines = [
        f"calibration.slope = {cfg.calibration.slope!r}",
        f"calibration.intercept = {cfg.calibration.intercept!r}",
        f"scan.ring_spacing_mm = {cfg.ring_spacing_mm!r}",
        f"scan.vertex_count = {cfg.vertex_count}",
        f"scan.close_seam = {str(cfg.close_seam).lower()}",
        f"actuator.f_max = {cfg.actuator.f_max!r}",
        f"actuator.beta = {cfg.actuator.beta!r}",
        f"train.grid = {' '.join(map(str, cfg.grid))}",
        f"train.validation_grid = {' '.join(map(str, cfg.validation_grid))}",
        f"train.epochs = {t.epochs}",
        f"train.learning_rate = {t.learning_rate!r}",
        f"train.lr_floor = {t.lr_floor!r}",
        f"train.warmup_epochs = {t.warmup_epochs}",
        f"train.param_weight = {t.param_weight!r}",
        f"train.val_fraction = {t.val_fraction!r}",
        f"control.ki = {cfg.ki!r}",
        f"spring.k = {cfg.spring_k!r}",
        f"seed = {cfg.seed}",
    ]
    return "\n".join(lines) + "\n"
