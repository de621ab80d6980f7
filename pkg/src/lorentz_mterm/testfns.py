"""Extremal and random test functions, all returned as :class:`Spectrum` objects."""

from __future__ import annotations

import itertools

import numpy as np

from .classes import BesovParams, block_grid_sizes, normalize_to_class
from .lorentz_norms import LorentzExponents, mixed_lorentz
from .mterm import Regime, level_for, regime_of, window_alpha
from .spectral import Spectrum, block_indices, synthesize

__all__ = [
    "SeededSampler",
    "dirichlet_cubic",
    "cosine_product",
    "g1",
    "f3",
    "rudin_shapiro",
    "rudin_shapiro_product",
    "lacunary_random",
    "dirichlet_extremal",
    "dirichlet_level",
]


class SeededSampler:
    """Reproducible random source; ``child(key)`` derives an independent stream per key."""

    def __init__(self, seed: int):
        self.seed = int(seed)
        self.rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.seed)))

    def child(self, key: int) -> "SeededSampler":
        sub = SeededSampler.__new__(SeededSampler)
        sub.seed = self.seed
        sub.rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([self.seed, int(key)])))
        return sub


def dirichlet_cubic(l: int, m: int) -> Spectrum:
    """Coefficient one on every ``k`` with ``max_j |k_j| <= 2^l``."""
    if l < 0:
        raise ValueError("l must be nonnegative")
    axis = np.arange(-(2**l), 2**l + 1, dtype=np.int64)
    mesh = np.meshgrid(*([axis] * m), indexing="ij")
    freqs = np.stack([g.reshape(-1) for g in mesh], axis=1)
    return Spectrum(freqs, np.ones(len(freqs), dtype=complex), m)


def _positive_block(s: int, m: int) -> np.ndarray:
    """Rows of block ``s`` with every coordinate >= 1."""
    lo, hi = 2 ** (s - 1), 2**s - 1
    axis = np.arange(1, hi + 1, dtype=np.int64)
    mesh = np.meshgrid(*([axis] * m), indexing="ij")
    k = np.stack([g.reshape(-1) for g in mesh], axis=1)
    return k[k.max(axis=1) >= lo]


def cosine_product(k: np.ndarray, weights: np.ndarray) -> Spectrum:
    """Spectrum of ``sum_i weights[i] prod_j cos(k_ij x_j)`` for positive ``k``."""
    k = np.asarray(k, dtype=np.int64)
    m = k.shape[1]
    signs = np.array(list(itertools.product((-1, 1), repeat=m)), dtype=np.int64)
    freqs = (k[None, :, :] * signs[:, None, :]).reshape(-1, m)
    coeffs = np.tile(np.asarray(weights, dtype=complex) / 2**m, len(signs))
    return Spectrum.from_arrays(freqs, coeffs, m)


def g1(n: int, m: int) -> Spectrum:
    """``sum_{s=1}^n sum_{k in ρ(s), k_j >= 1} prod_j k_j^{-1} cos(k_j x_j)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    k = np.concatenate([_positive_block(s, m) for s in range(1, n + 1)])
    return cosine_product(k, 1.0 / np.prod(k, axis=1).astype(float))


def f3(n: int, m: int, p, r: float) -> Spectrum:
    """Cosine products with weights ``n^{-1} 2^{-s sum(1 - 1/p_j)} prod_j k_j^{-r/m}``."""
    if n < 1 or r <= 0:
        raise ValueError("need n >= 1 and r > 0")
    p = np.broadcast_to(np.asarray(p, dtype=float), (m,))
    decay = float(np.sum(1 - 1 / p))
    ks, ws = [], []
    for s in range(1, n + 1):
        k = _positive_block(s, m)
        ks.append(k)
        ws.append(2.0 ** (-s * decay) * np.prod(k.astype(float) ** (-r / m), axis=1) / n)
    return cosine_product(np.concatenate(ks), np.concatenate(ws))


def rudin_shapiro(s: int) -> np.ndarray:
    """Golay-Rudin-Shapiro signs for ``k = 2^{s-1} .. 2^s - 1``.

    ``ε_k = (-1)^{#adjacent 11 pairs in binary k}``.
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    k = np.arange(2 ** (s - 1), 2**s, dtype=np.int64)
    pairs = np.zeros_like(k)
    x = k & (k >> 1)
    while np.any(x):
        pairs += x & 1
        x >>= 1
    return np.where(pairs % 2 == 0, 1, -1).astype(np.int64)


def rudin_shapiro_product(n: int, m: int, r: float) -> Spectrum:
    """``2^{-n(m/2 + r)} sum_{s=1}^n prod_j R_s(x_j)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    freqs, coeffs = [], []
    for s in range(1, n + 1):
        eps = rudin_shapiro(s)
        idx = np.arange(2 ** (s - 1), 2**s, dtype=np.int64)
        mesh = np.meshgrid(*([idx] * m), indexing="ij")
        signs = np.meshgrid(*([eps] * m), indexing="ij")
        freqs.append(np.stack([g.reshape(-1) for g in mesh], axis=1))
        coeffs.append(np.prod(np.stack([g.reshape(-1) for g in signs]), axis=0))
    scale = 2.0 ** (-n * (m / 2 + r))
    return Spectrum.from_arrays(np.concatenate(freqs), scale * np.concatenate(coeffs), m)


def lacunary_random(
    params: BesovParams,
    L: int,
    sampler: SeededSampler,
    shape: str = "peaked",
    oversample: float = 8,
) -> Spectrum:
    """Random polynomial with ``||δ_s|| = 2^{-sr}`` exactly for every ``s = 0..L``.

    ``shape="peaked"`` puts a randomly translated, randomly phased Dirichlet
    block on each ``ρ(s)`` (coefficients ``e^{iφ} e^{-i<k, x0>}``), which is
    where block norms in different metrics are furthest apart.
    ``shape="flat"`` uses independent random signs.  Block ``s`` draws from
    ``sampler.child(s)``.
    """
    if L < 1:
        raise ValueError("L must be >= 1")
    if shape not in ("peaked", "flat"):
        raise ValueError(f"unknown shape {shape!r}")
    m = params.dims
    freqs, coeffs = [], []
    for s in range(L + 1):
        rng = sampler.child(s).rng
        k = block_indices(s, m)
        if shape == "peaked":
            x0 = rng.uniform(0, 2 * np.pi, size=m)
            c = np.exp(1j * (rng.uniform(0, 2 * np.pi) - k @ x0))
        else:
            c = rng.choice([-1.0, 1.0], size=len(k)).astype(complex)
        block = Spectrum(k, c, m)
        norm = mixed_lorentz(synthesize(block, block_grid_sizes(s, m, oversample)), params.base)
        freqs.append(k)
        coeffs.append(c * (2.0 ** (-s * params.r) / norm))
    return Spectrum.from_arrays(np.concatenate(freqs), np.concatenate(coeffs), m)


def dirichlet_level(n: int, params: BesovParams, target: LorentzExponents) -> int:
    """``l = floor(α n)`` with the block-budget window factor of the parameters' regime."""
    regime = regime_of(params.base.p, target.p, params.r)
    if regime in (Regime.THEOREM_2, Regime.THEOREM_3):
        raise ValueError(f"no Dirichlet extremal defined for {regime.value}")
    alpha = window_alpha(regime, params.base.p, target.p, params.r)
    return int(np.floor(alpha * n + 1e-9))


def dirichlet_extremal(
    M: int, params: BesovParams, target: LorentzExponents, oversample: float = 8
) -> Spectrum:
    """Class-normalized cubic Dirichlet kernel of half-width ``2^{floor(αn)}``.

    ``n`` is the largest integer with ``2^{nm} < M``.  In regimes 1 and 2 this is
    the classical lower-bound kernel ``F_{q,n}``; in regime 3 the same
    construction sits exactly at the block where the dropped tail is largest.
    """
    n = level_for(M, params.dims)
    l = dirichlet_level(n, params, target)
    return normalize_to_class(dirichlet_cubic(l, params.dims), params, oversample)
