"""Run configuration: a single flat key = value text file.

The grammar is deliberately nesting-free so configs stay trivially parseable
and diffable: blank lines and '#' comments are skipped, every other line must
be "key = value", keys are known in advance, and duplicates are rejected.
Errors carry the file name and line number.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError
from .profiles import PROFILE_NAMES

__all__ = ["RunConfig", "parse_config_file"]

_MODELS = ("direct", "exchange")
_SCHEMES = ("hybrid", "exponential", "central")


def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_times(text: str) -> tuple[float, ...]:
    if not text.strip():
        return ()
    return tuple(float(tok) for tok in text.split(","))


@dataclass
class RunConfig:
    """Validated settings for one simulate run."""

    model: str = "direct"
    profile: str = "gaussian_stationary"
    mass: float | None = None
    shift: float = 0.0
    width: float = 0.3
    steepness: float = 0.05
    profile_csv: str | None = None
    n_cells: int = 1000
    dt: float = 1e-2
    t_end: float = 4.0
    record_every: int = 1
    alpha_threshold: float | None = None
    supnorm_threshold: float | None = None
    scheme: str = "hybrid"
    alpha_refresh: bool = False
    snapshot_times: tuple[float, ...] = ()
    mu_left: float | None = None
    mu_right: float | None = None
    seed: int = 0
    out_dir: str = "run_output"

    def validate(self, where: str = "config") -> None:
        def bad(fieldname: str, msg: str):
            return ConfigError(f"{where}: field '{fieldname}': {msg}")

        if self.model not in _MODELS:
            raise bad("model", f"must be one of {_MODELS}, got {self.model!r}")
        if self.profile not in PROFILE_NAMES:
            raise bad("profile", f"must be one of {PROFILE_NAMES}, got {self.profile!r}")
        if self.profile == "custom_csv":
            if self.profile_csv is None:
                raise bad("profile_csv", "required when profile = custom_csv")
        elif self.mass is None:
            raise bad("mass", f"required for profile {self.profile!r}")
        if self.mass is not None and not self.mass > 0.0:
            raise bad("mass", f"must be positive, got {self.mass}")
        if self.n_cells < 4 or self.n_cells % 2 != 0:
            raise bad("n_cells", f"must be even and >= 4, got {self.n_cells}")
        if not self.dt > 0.0:
            raise bad("dt", f"must be positive, got {self.dt}")
        if not self.t_end > 0.0:
            raise bad("t_end", f"must be positive, got {self.t_end}")
        if self.record_every < 1:
            raise bad("record_every", f"must be >= 1, got {self.record_every}")
        for name in ("alpha_threshold", "supnorm_threshold"):
            v = getattr(self, name)
            if v is not None and not v > 0.0:
                raise bad(name, f"must be positive (or omitted for auto), got {v}")
        if self.scheme not in _SCHEMES:
            raise bad("scheme", f"must be one of {_SCHEMES}, got {self.scheme!r}")
        if (self.mu_left is None) != (self.mu_right is None):
            raise bad("mu_left", "mu_left and mu_right must be given together")
        if self.mu_left is not None and self.model != "exchange":
            raise bad("mu_left", "boundary masses only apply to the exchange model")
        for name in ("mu_left", "mu_right"):
            v = getattr(self, name)
            if v is not None and v < 0.0:
                raise bad(name, f"must be non-negative, got {v}")
        for t in self.snapshot_times:
            if not 0.0 <= t <= self.t_end:
                raise bad("snapshot_times", f"time {t} outside [0, t_end]")

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "profile": self.profile,
            "mass": self.mass,
            "shift": self.shift,
            "width": self.width,
            "steepness": self.steepness,
            "profile_csv": self.profile_csv,
            "n_cells": self.n_cells,
            "dt": self.dt,
            "t_end": self.t_end,
            "record_every": self.record_every,
            "alpha_threshold": self.alpha_threshold,
            "supnorm_threshold": self.supnorm_threshold,
            "scheme": self.scheme,
            "alpha_refresh": self.alpha_refresh,
            "snapshot_times": list(self.snapshot_times),
            "mu_left": self.mu_left,
            "mu_right": self.mu_right,
            "seed": self.seed,
            "out_dir": self.out_dir,
        }


# key -> (attribute, converter).  "auto" resets a threshold to its default.
_CONVERTERS = {
    "model": ("model", str),
    "profile": ("profile", str),
    "mass": ("mass", float),
    "shift": ("shift", float),
    "width": ("width", float),
    "steepness": ("steepness", float),
    "profile_csv": ("profile_csv", str),
    "n_cells": ("n_cells", int),
    "dt": ("dt", float),
    "t_end": ("t_end", float),
    "record_every": ("record_every", int),
    "alpha_threshold": ("alpha_threshold", lambda s: None if s == "auto" else float(s)),
    "supnorm_threshold": ("supnorm_threshold", lambda s: None if s == "auto" else float(s)),
    "scheme": ("scheme", str),
    "alpha_refresh": ("alpha_refresh", _parse_bool),
    "snapshot_times": ("snapshot_times", _parse_times),
    "mu_left": ("mu_left", float),
    "mu_right": ("mu_right", float),
    "seed": ("seed", int),
    "out_dir": ("out_dir", str),
}


def parse_config_file(path: str | Path) -> RunConfig:
    """Parse and validate a flat key = value config file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc}") from exc
    cfg = RunConfig()
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _CONVERTERS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key in seen:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        seen.add(key)
        attr, conv = _CONVERTERS[key]
        try:
            setattr(cfg, attr, conv(value))
        except ValueError as exc:
            raise ConfigError(
                f"{path}:{lineno}: field {key!r}: invalid value {value!r} ({exc})"
            ) from exc
    cfg.validate(where=str(path))
    return cfg
