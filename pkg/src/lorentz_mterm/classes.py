"""Besov/Nikol'skii seminorms built from dyadic block norms."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lorentz_norms import LorentzExponents, mixed_lorentz
from .spectral import Spectrum, synthesize

__all__ = [
    "BesovParams",
    "ZeroFunction",
    "block_grid_sizes",
    "block_norm_profile",
    "besov_seminorm",
    "normalize_to_class",
    "in_class",
    "MEMBERSHIP_SLACK",
]

MEMBERSHIP_SLACK = 1e-9
DEFAULT_OVERSAMPLE = 8


class ZeroFunction(ValueError):
    """Normalization of the zero function was requested."""


@dataclass(frozen=True)
class BesovParams:
    """Smoothness class ``B^r_{p,θ,τ}``; ``tau = math.inf`` is the Nikol'skii class ``H^r``."""

    base: LorentzExponents
    r: float
    tau: float = math.inf

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("smoothness r must be positive")
        if not self.tau >= 1:
            raise ValueError("tau must be >= 1 (math.inf for the Nikol'skii class)")
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "tau", float(self.tau))

    @property
    def dims(self) -> int:
        return self.base.dims


def block_grid_sizes(s: int, m: int, oversample: float) -> tuple[int, ...]:
    need = max(4.0, oversample * 2**s)
    n = 4
    while n < need:
        n *= 2
    return (n,) * m


def block_norm_profile(
    S: Spectrum, e: LorentzExponents, oversample: float = DEFAULT_OVERSAMPLE
) -> np.ndarray:
    """``||δ_s(S)||`` for ``s = 0 .. max block``; each block on its own grid.

    The grid for block ``s`` has ``oversample * 2^s`` points per axis, rounded up
    to a power of two.  Empty blocks contribute exact zeros.
    """
    if oversample < 4:
        raise ValueError("oversample must be >= 4")
    if len(S) == 0:
        return np.zeros(0)
    ids = S.block_ids()
    profile = np.zeros(int(ids.max()) + 1)
    for s in np.unique(ids):
        block = S.select(ids == s)
        grid = synthesize(block, block_grid_sizes(int(s), S.dims, oversample))
        profile[s] = mixed_lorentz(grid, e)
    return profile


def besov_seminorm(profile, r: float, tau: float) -> float:
    """``(sum_s (2^{sr} profile[s])^τ)^{1/τ}``, or the supremum for ``τ = inf``."""
    profile = np.asarray(profile, dtype=np.float64)
    if profile.size == 0:
        return 0.0
    weighted = 2.0 ** (r * np.arange(profile.size)) * profile
    if math.isinf(tau):
        return float(weighted.max())
    top = weighted.max()
    if top == 0:
        return 0.0
    # scale out the maximum so large τ cannot overflow
    return float(top * np.sum((weighted / top) ** tau) ** (1.0 / tau))


def normalize_to_class(
    S: Spectrum, params: BesovParams, oversample: float = DEFAULT_OVERSAMPLE
) -> Spectrum:
    """Scale ``S`` so its Besov seminorm is exactly one."""
    if len(S) == 0:
        raise ZeroFunction("cannot normalize the zero function")
    norm = besov_seminorm(block_norm_profile(S, params.base, oversample), params.r, params.tau)
    if norm == 0:
        raise ZeroFunction("cannot normalize the zero function")
    return S.scaled(1.0 / norm)


def in_class(S: Spectrum, params: BesovParams, oversample: float = DEFAULT_OVERSAMPLE) -> bool:
    """Unit-ball membership with slack ``MEMBERSHIP_SLACK`` for quadrature noise."""
    profile = block_norm_profile(S, params.base, oversample)
    return besov_seminorm(profile, params.r, params.tau) <= 1 + MEMBERSHIP_SLACK
