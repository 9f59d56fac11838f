"""Flat ``key = value`` scenario files.

Blank lines and ``#`` comments are ignored. Unknown keys are errors, so a typo
in a parameter name never silently falls back to a default.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields

from .moments import GaussianSpec
from .tcd import ChangeScenario

__all__ = ["ConfigError", "ScenarioConfig", "parse_config", "load_config"]


class ConfigError(ValueError):
    pass


_INT_KEYS = {"m", "m_alpha", "v", "h_steps", "n_trials", "seed", "m_alpha_factor", "workers"}
_FLOAT_KEYS = {"mu0", "sigma0_sq", "mu1", "sigma1_sq", "h_min", "h_max", "p_lo", "p_hi"}
_REQUIRED = ("mu0", "sigma0_sq", "mu1", "sigma1_sq", "m")


@dataclass(frozen=True)
class ScenarioConfig:
    mu0: float
    sigma0_sq: float
    mu1: float
    sigma1_sq: float
    m: int
    m_alpha: int | None = None
    v: int = 1
    h_min: float | None = None
    h_max: float | None = None
    h_steps: int = 400
    n_trials: int = 1_000_000
    seed: int = 0
    m_list: tuple[int, ...] | None = None
    m_alpha_factor: int | None = None
    which: str = "both"
    p_lo: float = 0.0
    p_hi: float = 0.1
    workers: int = 1

    def __post_init__(self):
        for name in ("mu0", "mu1"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name}: must be finite")
        for name in ("sigma0_sq", "sigma1_sq"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise ConfigError(f"{name}: variance must be finite and > 0, got {val}")
        if (self.mu0, self.sigma0_sq) == (self.mu1, self.sigma1_sq):
            raise ConfigError("mu1/sigma1_sq: changed hypothesis must differ from the nominal one")
        for name in ("m", "v", "h_steps", "n_trials", "workers"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name}: must be >= 1")
        if self.m_alpha is not None and self.m_alpha < 1:
            raise ConfigError("m_alpha: must be >= 1")
        if self.m_alpha_factor is not None and self.m_alpha_factor < 1:
            raise ConfigError("m_alpha_factor: must be >= 1")
        if self.h_steps < 2:
            raise ConfigError(f"h_steps: must be >= 2, got {self.h_steps}")
        if (self.h_min is None) != (self.h_max is None):
            raise ConfigError("h_min/h_max: give both or neither")
        if self.h_min is not None and not self.h_min < self.h_max:
            raise ConfigError(f"h_min: must be < h_max, got {self.h_min} >= {self.h_max}")
        if self.m_list is not None:
            if not self.m_list:
                raise ConfigError("m_list: must not be empty")
            if any(m < 1 for m in self.m_list):
                raise ConfigError("m_list: entries must be >= 1")
        if self.which not in ("beta", "alpha", "both"):
            raise ConfigError(f"which: expected beta, alpha or both, got {self.which!r}")
        if not 0.0 <= self.p_lo < self.p_hi <= 1.0:
            raise ConfigError("p_lo/p_hi: need 0 <= p_lo < p_hi <= 1")

    def alpha_window(self, m: int) -> int:
        """Guarantee window for transient length ``m``."""
        if self.m_alpha_factor is not None:
            return self.m_alpha_factor * m
        if self.m_alpha is not None:
            return self.m_alpha
        return 10 * m

    def scenario(self, m: int | None = None) -> ChangeScenario:
        m = self.m if m is None else m
        return ChangeScenario(
            GaussianSpec(self.mu0, self.sigma0_sq),
            GaussianSpec(self.mu1, self.sigma1_sq),
            m,
            self.alpha_window(m),
            self.v,
        )

    def replace(self, **changes) -> "ScenarioConfig":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update({k: v for k, v in changes.items() if v is not None})
        return ScenarioConfig(**values)


def _convert(key: str, raw: str, lineno: int):
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
        if key == "m_list":
            return tuple(int(tok) for tok in raw.replace(",", " ").split())
        if key == "which":
            return raw.strip().lower()
    except ValueError:
        raise ConfigError(f"line {lineno}: {key}: cannot parse {raw!r}") from None
    raise ConfigError(f"line {lineno}: unknown key {key!r}")


def parse_config(text: str) -> ScenarioConfig:
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _convert(key, raw, lineno)
    missing = [k for k in _REQUIRED if k not in values]
    if missing:
        raise ConfigError(f"missing required key(s): {', '.join(missing)}")
    return ScenarioConfig(**values)


def load_config(path) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
