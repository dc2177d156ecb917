"""Flat key-value run configuration with unit-suffixed numbers.

Internal units are micrometers and radians; lengths accept um/mm/cm/m
suffixes (bare numbers are micrometers), angles accept an optional rad/deg
suffix. CLI flags override file values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

from .crystal import ExperimentConfig, SellmeierSet, load_crystal
from .errors import ConfigError

_LENGTH_UNITS = {"um": 1.0, "μm": 1.0, "mkm": 1.0, "mm": 1e3, "cm": 1e4, "m": 1e6}
_ANGLE_UNITS = {"rad": 1.0, "deg": math.pi / 180.0}

REFERENCE_CONFIG_NAME = "reference.config"


def parse_length(text: str) -> float:
    """Length with optional unit suffix, returned in micrometers."""
    return _parse_unit(text, _LENGTH_UNITS, "length")


def parse_angle(text: str) -> float:
    """Angle with optional rad/deg suffix, returned in radians."""
    return _parse_unit(text, _ANGLE_UNITS, "angle")


def _parse_unit(text: str, units: dict, what: str) -> float:
    s = text.strip()
    for suffix, factor in sorted(units.items(), key=lambda kv: -len(kv[0])):
        if s.endswith(suffix):
            num = s[: -len(suffix)].strip()
            break
    else:
        num, factor = s, 1.0
    try:
        return float(num) * factor
    except ValueError:
        raise ConfigError(f"cannot parse {what} value {text!r}") from None


@dataclass(frozen=True)
class RunConfig:
    """Experiment parameters plus output and mode switches."""

    lambda_p: float = 0.4047  # um
    w: float = 1464.0  # um
    L: float = 5000.0  # um
    phi0: float = 0.7  # rad
    crystal_name: str = "BBO"
    out_dir: Path = Path(".")
    out_format: str = "csv"
    grid: int = 201
    include_walkoff: bool = True
    published_constants: bool = False
    crystal: SellmeierSet | None = field(default=None, repr=False)

    def experiment(self) -> ExperimentConfig:
        crystal = self.crystal or load_crystal(self.crystal_name)
        return ExperimentConfig(
            lambda_p=self.lambda_p, w=self.w, L=self.L, phi0=self.phi0,
            crystal=crystal,
        )


_KEY_PARSERS = {
    "lambda_p": ("lambda_p", parse_length),
    "w": ("w", parse_length),
    "L": ("L", parse_length),
    "phi0": ("phi0", parse_angle),
    "crystal": ("crystal_name", str),
    "grid": ("grid", int),
    "format": ("out_format", str),
    "include_walkoff": ("include_walkoff", lambda s: s.lower() in ("1", "true", "yes")),
    "published_constants": (
        "published_constants",
        lambda s: s.lower() in ("1", "true", "yes"),
    ),
}


def load_run_config(path: str | Path | None = None, **overrides) -> RunConfig:
    """Load a config file (or the built-in reference when path is None) and
    apply keyword overrides."""
    if path is None:
        text = (
            resources.files("biphoton")
            .joinpath(f"data/{REFERENCE_CONFIG_NAME}")
            .read_text()
        )
        source = REFERENCE_CONFIG_NAME
    else:
        p = Path(path)
        if not p.exists():
            raise ConfigError(f"config file not found: {path}")
        text = p.read_text()
        source = str(path)

    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in _KEY_PARSERS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        attr, parser = _KEY_PARSERS[key]
        try:
            values[attr] = parser(val.strip())
        except ConfigError:
            raise
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"{source}:{lineno}: {exc}") from None

    values.update({k: v for k, v in overrides.items() if v is not None})
    cfg = RunConfig(**values)
    if cfg.out_format not in ("csv", "json"):
        raise ConfigError(f"output format must be csv or json, got {cfg.out_format!r}")
    if cfg.grid < 8:
        raise ConfigError(f"grid resolution too small: {cfg.grid}")
    return cfg


def with_overrides(cfg: RunConfig, **overrides) -> RunConfig:
    return replace(cfg, **{k: v for k, v in overrides.items() if v is not None})
