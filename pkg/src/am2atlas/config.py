"""Flat key-value configuration files.

Format: one `key = value` pair per line, `#` starts a comment, keys are
dotted (`kinetics.m1 = 0.5`).  Values are kept as their exact source
strings so a parse/serialize round trip is byte-identical; numbers are
only converted at the point of use.

Recognized keys::

    preset            caseA | caseB | caseC (base values, optional)
    kinetics.m1 kinetics.K1 kinetics.m2 kinetics.K2 kinetics.KI
    yields.k1 yields.k2 yields.k3 yields.k4 yields.alpha
    output.dir output.csv output.svg output.resolution
    seed
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import presets
from .equilibria import ModelParams
from .kinetics import Haldane, Monod

_KNOWN_KEYS = {
    "preset",
    "kinetics.m1",
    "kinetics.K1",
    "kinetics.m2",
    "kinetics.K2",
    "kinetics.KI",
    "yields.k1",
    "yields.k2",
    "yields.k3",
    "yields.k4",
    "yields.alpha",
    "output.dir",
    "output.csv",
    "output.svg",
    "output.resolution",
    "seed",
}


class ConfigError(ValueError):
    pass


def parse_config_text(text: str) -> dict[str, str]:
    """Parse to an ordered key -> raw string mapping; rejects unknown keys."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def format_config(raw: dict[str, str]) -> str:
    return "".join(f"{k} = {v}\n" for k, v in raw.items())


def _as_float(raw: dict[str, str], key: str) -> float | None:
    if key not in raw:
        return None
    try:
        return float(raw[key])
    except ValueError:
        raise ConfigError(f"key {key!r}: not a number: {raw[key]!r}") from None


def _as_bool(raw: dict[str, str], key: str, default: bool) -> bool:
    if key not in raw:
        return default
    v = raw[key].lower()
    if v in ("true", "yes", "1", "on"):
        return True
    if v in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"key {key!r}: not a boolean: {raw[key]!r}")


@dataclass
class Config:
    """Resolved configuration: model parameters plus output settings."""

    raw: dict[str, str] = field(default_factory=dict)

    @classmethod
    def from_text(cls, text: str) -> "Config":
        return cls(parse_config_text(text))

    @classmethod
    def from_file(cls, path) -> "Config":
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read())

    def to_text(self) -> str:
        return format_config(self.raw)

    def model_params(self) -> ModelParams:
        base_name = self.raw.get("preset", "caseA")
        base = presets.get(base_name)
        mu1 = Monod(
            m=_as_float(self.raw, "kinetics.m1") or base.mu1.m,
            K=_as_float(self.raw, "kinetics.K1") or base.mu1.K,
        )
        mu2 = Haldane(
            m=_as_float(self.raw, "kinetics.m2") or base.mu2.m,
            K=_as_float(self.raw, "kinetics.K2") or base.mu2.K,
            K_I=_as_float(self.raw, "kinetics.KI") or base.mu2.K_I,
        )
        return ModelParams(
            mu1=mu1,
            mu2=mu2,
            k1=_as_float(self.raw, "yields.k1") or base.k1,
            k2=_as_float(self.raw, "yields.k2") or base.k2,
            k3=_as_float(self.raw, "yields.k3") or base.k3,
            alpha=_as_float(self.raw, "yields.alpha") or base.alpha,
            k4=_as_float(self.raw, "yields.k4") or base.k4,
        )

    @property
    def out_dir(self) -> str | None:
        return self.raw.get("output.dir")

    @property
    def seed(self) -> int:
        return int(self.raw.get("seed", "0"))

    @property
    def resolution(self) -> int:
        return int(self.raw.get("output.resolution", "800"))

    @property
    def write_csv(self) -> bool:
        return _as_bool(self.raw, "output.csv", True)

    @property
    def write_svg(self) -> bool:
        return _as_bool(self.raw, "output.svg", True)
