"""Line-oriented run configuration: ``section.key = value`` with ``#`` comments."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from calderon_states.errors import ConfigError
from calderon_states.geometry import FamilyKind, MetricFamily

DEFAULT_SEED = 0x5EED


@dataclass
class FamilyConfig:
    kind: str = "ultrastatic"
    h0: tuple = (1.0,)
    V: tuple = ()
    m2: float = 1.0
    kappa: float = 0.0
    alpha: float = 0.0

    def build(self) -> MetricFamily:
        return MetricFamily(FamilyKind(self.kind), self.h0, self.V, self.m2, self.kappa, self.alpha)


@dataclass
class DiscConfig:
    T: float = 1.0
    M: int = 200
    N: int = 16


@dataclass
class TolConfig:
    sum: float = 5e-3
    positivity: float = 1e-6
    idempotence: float = 1e-2
    purity: float = 1e-2
    oracle: float = 5e-3
    green: float = 1e-3
    adjoint: float = 1e-13
    charge: float = 1e-13
    reflection: float = 1e-12
    conjugation: float = 1e-10
    frequency: float = 0.1
    frequency_floor: float = 1e-3
    order: float = 2.0
    order_band: float = 0.3


@dataclass
class EvolutionConfig:
    T_w: float = 2.0 * np.pi
    dt: float = 2e-3
    probe: bool = True


@dataclass
class OutputConfig:
    dir: str = "out"
    emit_matrices: bool = True


@dataclass
class RunConfig:
    family: FamilyConfig = field(default_factory=FamilyConfig)
    disc: DiscConfig = field(default_factory=DiscConfig)
    tol: TolConfig = field(default_factory=TolConfig)
    evolution: EvolutionConfig = field(default_factory=EvolutionConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    seed: int = DEFAULT_SEED


def _convert(raw: str, like, line: int, key: str):
    try:
        if isinstance(like, bool):
            low = raw.lower()
            if low not in ("true", "false", "1", "0", "yes", "no", "on", "off"):
                raise ValueError(raw)
            return low in ("true", "1", "yes", "on")
        if isinstance(like, int):
            return int(raw, 0)
        if isinstance(like, float):
            return float(raw)
        if isinstance(like, tuple):
            items = [p.strip() for p in raw.strip("[]() ").split(",") if p.strip()]
            return tuple(float(p) for p in items)
        return raw
    except ValueError:
        raise ConfigError(f"malformed value {raw!r} for {key}", line) from None


def _validate(cfg: RunConfig, lines: dict) -> None:
    def fail(key, msg):
        raise ConfigError(msg, lines.get(key))

    if cfg.family.kind not in {k.value for k in FamilyKind}:
        fail("family.kind", f"unknown family kind {cfg.family.kind!r}")
    if cfg.family.m2 < 0:
        fail("family.m2", "family.m2 must be >= 0")
    if not cfg.family.h0:
        fail("family.h0", "family.h0 needs at least one coefficient")
    for key in ("M", "N"):
        val = getattr(cfg.disc, key)
        if val < 4 or val % 2:
            fail(f"disc.{key}", f"disc.{key} must be even and >= 4, got {val}")
    if cfg.disc.T <= 0:
        fail("disc.T", "disc.T must be positive")
    for f in dataclasses.fields(TolConfig):
        if getattr(cfg.tol, f.name) <= 0:
            fail(f"tol.{f.name}", f"tol.{f.name} must be positive")
    if cfg.evolution.T_w <= 0 or cfg.evolution.dt <= 0:
        fail("evolution.dt" if cfg.evolution.dt <= 0 else "evolution.T_w",
             "evolution window and step must be positive")
    if not 0 <= cfg.seed < 2**64:
        fail("run.seed", "run.seed must fit in an unsigned 64-bit integer")


def parse_config(text: str) -> RunConfig:
    """Parse ``section.key = value`` lines into a fully defaulted :class:`RunConfig`.

    Lists are comma separated, booleans accept ``true``/``false``.  Errors
    carry the offending line number.
    """
    cfg = RunConfig()
    lines: dict[str, int] = {}
    for n, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"expected 'section.key = value', got {body!r}", n)
        key, raw = (p.strip() for p in body.split("=", 1))
        if key == "run.seed":
            cfg.seed = _convert(raw, 0, n, key)
            lines[key] = n
            continue
        if key.count(".") != 1:
            raise ConfigError(f"unknown key {key!r}", n)
        section, name = key.split(".")
        block = getattr(cfg, section, None)
        if not dataclasses.is_dataclass(block) or name not in {f.name for f in dataclasses.fields(block)}:
            raise ConfigError(f"unknown key {key!r}", n)
        setattr(block, name, _convert(raw, getattr(block, name), n, key))
        lines[key] = n
    _validate(cfg, lines)
    return cfg
