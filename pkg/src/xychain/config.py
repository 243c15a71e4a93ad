"""Flat ``key = value`` run configuration with dotted keys.

Example::

    # trichloroethylene sample
    j.12 = 200.9
    j.23 = 9.16
    sweep.stop = 2pi
    sweep.count = 21
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .nmrcompile import GAMMA_H_OVER_C, SpinSystem


class ConfigError(ValueError):
    pass


_PI_SUFFIX = re.compile(r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?|[+-]?)\s*\*?\s*pi\s*$")


def parse_angle(text: str) -> float:
    """Radians from ``"0.7"``, ``"0.5pi"``, ``"pi"`` or ``"-2*pi"``."""
    text = str(text).strip()
    m = _PI_SUFFIX.match(text)
    if m:
        coef = m.group(1)
        factor = {"": 1.0, "+": 1.0, "-": -1.0}.get(coef)
        return (float(coef) if factor is None else factor) * math.pi
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"not an angle: {text!r}") from None


# config key -> (field name, converter)
_KEYS = {
    "nu.1": ("nu1", float),
    "nu.2": ("nu2", float),
    "nu.3": ("nu3", float),
    "j.12": ("j12", float),
    "j.23": ("j23", float),
    "j.13": ("j13", float),
    "gamma.ratio": ("gamma_ratio", float),
    "sweep.start": ("sweep_start", parse_angle),
    "sweep.stop": ("sweep_stop", parse_angle),
    "sweep.count": ("sweep_count", int),
    "verify.count": ("verify_count", int),
    "verify.seed": ("verify_seed", int),
    "tol.verify": ("tol_verify", float),
    "tol.compile": ("tol_compile", float),
    "out.compile": ("out_compile", str),
    "out.sweep": ("out_sweep", str),
    "out.pst": ("out_pst", str),
}


@dataclass(frozen=True)
class RunConfig:
    nu1: float = 0.0
    nu2: float = 0.0
    nu3: float = 904.4
    j12: float = 200.9
    j23: float = 9.16
    j13: float = 103.1
    gamma_ratio: float = GAMMA_H_OVER_C
    sweep_start: float = 0.0
    sweep_stop: float = 2 * math.pi
    sweep_count: int = 21
    verify_count: int = 200
    verify_seed: int = 20050101
    tol_verify: float = 1e-9
    tol_compile: float = 1e-8
    out_compile: str = "sequence.txt"
    out_sweep: str = "sweep.csv"
    out_pst: str = "pst.json"

    def __post_init__(self):
        if self.sweep_count < 1 or self.verify_count < 1:
            raise ConfigError("sample counts must be at least 1")
        if self.sweep_stop < self.sweep_start:
            raise ConfigError("sweep.stop must not be below sweep.start")
        if not (self.tol_verify > 0 and self.tol_compile > 0):
            raise ConfigError("tolerances must be positive")
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, float) and not math.isfinite(v):
                raise ConfigError(f"{f.name} must be finite")

    @property
    def spin_system(self) -> SpinSystem:
        try:
            return SpinSystem.from_constants(
                self.j12, self.j23, self.j13, (self.nu1, self.nu2, self.nu3), self.gamma_ratio
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def with_overrides(self, **kw) -> "RunConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


def parse_config(text: str) -> RunConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip().lower(), value.strip()
        if not sep or not value:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        name, conv = _KEYS[key]
        try:
            values[name] = conv(value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from None
    return RunConfig(**values)


def load_config(path: str | Path | None) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text)
