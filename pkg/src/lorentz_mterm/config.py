"""Experiment configuration: YAML files, built-in presets and flag overrides."""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import yaml

from .classes import BesovParams
from .lorentz_norms import LorentzExponents
from .mterm import SchemeKind, regime_of

__all__ = ["ConfigError", "ExperimentConfig", "load_config", "preset_names", "parse_real"]

FAMILIES = ("lacunary", "dirichlet", "rudin-shapiro", "f3")


class ConfigError(ValueError):
    """Invalid or inconsistent configuration."""


def preset_names() -> list[str]:
    root = resources.files("lorentz_mterm") / "presets"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".yaml"))


def parse_real(value) -> float:
    """Float with ``inf`` (any case, optional leading dot) accepted for infinity."""
    if isinstance(value, str) and value.strip().lstrip(".").lower() in ("inf", "infinity"):
        return math.inf
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"not a number: {value!r}") from None


def load_config(path=None, preset: str | None = None) -> dict:
    """Raw mapping from a YAML file or a named preset (empty when neither is given)."""
    if path is not None and preset is not None:
        raise ConfigError("give either a config file or a preset, not both")
    if preset is not None:
        if preset not in preset_names():
            raise ConfigError(f"unknown preset {preset!r}; choose from {preset_names()}")
        text = (resources.files("lorentz_mterm") / "presets" / f"{preset}.yaml").read_text()
    elif path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(str(exc)) from None
    else:
        return {}
    try:
        data = yaml.safe_load(text) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"config does not parse: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping")
    return data


def _vector(value, m: int, name: str) -> tuple[float, ...]:
    vals = value if isinstance(value, (list, tuple)) else [value]
    vals = [parse_real(v) for v in vals]
    if len(vals) == 1:
        vals = vals * m
    if len(vals) != m:
        raise ConfigError(f"{name} must have length m = {m}")
    return tuple(vals)


@dataclass(frozen=True)
class ExperimentConfig:
    source: BesovParams
    target: LorentzExponents
    scheme: SchemeKind
    family: dict
    Ms: tuple[int, ...]
    M: int | None
    seed: int
    oversample: float
    band: float
    compensated_band: float
    certificates: bool
    raw: dict = field(default_factory=dict, compare=False)

    @property
    def dims(self) -> int:
        return self.source.dims

    @classmethod
    def from_mapping(cls, data: dict) -> "ExperimentConfig":
        """Validate a raw mapping; parameters are checked against the regime classifier."""
        data = copy.deepcopy(data)
        cls_sec = data.get("class") or {}
        tgt_sec = data.get("target") or {}
        if "p" not in cls_sec or "r" not in cls_sec or "q" not in tgt_sec:
            raise ConfigError("config needs class.p, class.r and target.q")
        p_raw = cls_sec["p"]
        m = int(data.get("m", len(p_raw) if isinstance(p_raw, (list, tuple)) else 1))
        try:
            p = _vector(p_raw, m, "class.p")
            source = BesovParams(
                LorentzExponents(p, _vector(cls_sec.get("theta", list(p)), m, "class.theta")),
                parse_real(cls_sec["r"]),
                parse_real(cls_sec.get("tau", "inf")),
            )
            q = _vector(tgt_sec["q"], m, "target.q")
            target = LorentzExponents(q, _vector(tgt_sec.get("theta", list(q)), m, "target.theta"))
            scheme = SchemeKind(data.get("scheme", "greedy"))
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        # raises Unsupported naming the violated hypothesis
        regime_of(source.base.p, target.p, source.r)

        family = dict(data.get("family") or {"name": "lacunary"})
        if family.get("name") not in FAMILIES:
            raise ConfigError(f"family.name must be one of {FAMILIES}")
        if "Ms" in data:
            Ms = tuple(int(v) for v in data["Ms"])
        elif "log2_M" in data:
            lo, hi = (int(v) for v in data["log2_M"])
            Ms = tuple(2**k for k in range(lo, hi + 1))
        else:
            Ms = ()
        M = int(data["M"]) if data.get("M") is not None else None
        oversample = parse_real(data.get("oversample", 8))
        if not oversample >= 2:
            raise ConfigError("oversample must be >= 2")
        return cls(
            source, target, scheme, family, Ms, M,
            seed=int(data.get("seed", 0)),
            oversample=oversample,
            band=parse_real(data.get("band", 0.2)),
            compensated_band=parse_real(data.get("compensated_band", 0.1)),
            certificates=bool(data.get("certificates", True)),
            raw=data,
        )

    def resolved(self) -> dict:
        """Canonical mapping echoed into every output artifact."""
        tau = self.source.tau
        return {
            "m": self.dims,
            "class": {
                "p": list(self.source.base.p),
                "theta": list(self.source.base.theta),
                "r": self.source.r,
                "tau": "inf" if math.isinf(tau) else tau,
            },
            "target": {"q": list(self.target.p), "theta": list(self.target.theta)},
            "scheme": self.scheme.value,
            "family": self.family,
            "Ms": list(self.Ms),
            "M": self.M,
            "seed": self.seed,
            "oversample": self.oversample,
            "band": self.band,
            "compensated_band": self.compensated_band,
            "certificates": self.certificates,
        }
