"""Fourier analysis/synthesis on uniform periodic grids and dyadic block bookkeeping.

Conventions
-----------
A grid of per-axis sizes ``(n_1, ..., n_m)`` samples a 2π-periodic function at
``x = (2π i_1 / n_1, ..., 2π i_m / n_m)``; numpy axis ``j - 1`` is coordinate
``x_j``.  Fourier coefficients carry the ``1 / prod(n_j)`` forward normalization,
so on band-limited inputs they agree with ``(2π)^{-m} ∫ f e^{-i<k,x>} dx`` and
Parseval reads ``sum |a_k|^2 == mean(|f|^2)``.

Dyadic block ``s`` is ``{0}`` for ``s = 0`` and
``{k : 2^{s-1} <= max_j |k_j| <= 2^s - 1}`` for ``s >= 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

__all__ = [
    "BandLimitViolation",
    "GridFunction",
    "Spectrum",
    "analyze",
    "synthesize",
    "block_indices",
    "block_cardinality",
    "block_of",
    "block_project",
    "grid_sizes_for",
    "as_freqset",
]

DROP_THRESHOLD = 1e-13


class BandLimitViolation(ValueError):
    """A grid is too coarse to represent a spectrum without aliasing."""


def _is_pow2(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples of a 2π-periodic function on a uniform grid.

    ``samples[i_1, ..., i_m]`` holds ``f(2π i_1/n_1, ..., 2π i_m/n_m)``.
    Every size must be a power of two and at least 4.
    """

    samples: np.ndarray

    def __post_init__(self):
        arr = np.array(self.samples, dtype=np.complex128)
        if arr.ndim < 1:
            raise ValueError("a grid function needs at least one axis")
        for n in arr.shape:
            if n < 4 or not _is_pow2(n):
                raise ValueError(f"grid sizes must be powers of two >= 4, got {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    @property
    def dims(self) -> int:
        return self.samples.ndim

    @property
    def sizes(self) -> tuple[int, ...]:
        return self.samples.shape

    @classmethod
    def from_callable(cls, func, sizes: Sequence[int]) -> "GridFunction":
        """Sample ``func(x_1, ..., x_m)`` (vectorized, broadcasting) on the grid."""
        axes = [2 * np.pi * np.arange(n) / n for n in sizes]
        mesh = np.meshgrid(*axes, indexing="ij")
        return cls(np.broadcast_to(func(*mesh), tuple(sizes)))


def _lex_order(freqs: np.ndarray) -> np.ndarray:
    if freqs.shape[0] == 0:
        return np.arange(0)
    # np.lexsort uses the last key as primary
    return np.lexsort(freqs.T[::-1])


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Finite map from integer frequency vectors to nonzero complex coefficients.

    Rows of ``freqs`` (shape ``(K, m)``) are unique and kept in lexicographic
    order; ``coeffs[i]`` is the coefficient of ``freqs[i]``.  Use
    :meth:`from_arrays` or :meth:`from_dict` to build one from raw data; the
    plain constructor validates instead of normalizing.
    """

    freqs: np.ndarray
    coeffs: np.ndarray
    dims: int = field(default=0)

    def __post_init__(self):
        freqs = np.asarray(self.freqs, dtype=np.int64)
        coeffs = np.asarray(self.coeffs, dtype=np.complex128).reshape(-1)
        dims = self.dims or (freqs.shape[1] if freqs.ndim == 2 else 0)
        if dims < 1:
            raise ValueError("spectrum dimension must be positive")
        freqs = freqs.reshape(-1, dims)
        if freqs.shape[0] != coeffs.shape[0]:
            raise ValueError("freqs and coeffs disagree in length")
        if np.any(coeffs == 0):
            raise ValueError("a spectrum must not store zero coefficients")
        order = _lex_order(freqs)
        if not np.array_equal(order, np.arange(len(order))):
            raise ValueError("frequencies must be lexicographically sorted")
        if len(freqs) > 1 and np.any(np.all(freqs[1:] == freqs[:-1], axis=1)):
            raise ValueError("duplicate frequency vectors")
        freqs.setflags(write=False)
        coeffs.setflags(write=False)
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def from_arrays(cls, freqs, coeffs, dims: int | None = None) -> "Spectrum":
        """Sort, merge duplicate frequencies (summing) and drop exact zeros."""
        coeffs = np.asarray(coeffs, dtype=np.complex128).reshape(-1)
        if dims is None:
            dims = np.asarray(freqs).shape[1]
        freqs = np.asarray(freqs, dtype=np.int64).reshape(-1, dims)
        if len(freqs):
            uniq, inverse = np.unique(freqs, axis=0, return_inverse=True)
            if len(uniq) != len(freqs):
                summed = np.zeros(len(uniq), dtype=np.complex128)
                np.add.at(summed, inverse.reshape(-1), coeffs)
                freqs, coeffs = uniq, summed
        keep = coeffs != 0
        freqs, coeffs = freqs[keep], coeffs[keep]
        order = _lex_order(freqs)
        return cls(freqs[order], coeffs[order], dims)

    @classmethod
    def from_dict(cls, mapping: Mapping[tuple, complex], dims: int | None = None) -> "Spectrum":
        keys = [tuple(np.atleast_1d(k)) for k in mapping]
        if dims is None:
            if not keys:
                raise ValueError("dims required for an empty spectrum")
            dims = len(keys[0])
        freqs = np.array(keys, dtype=np.int64).reshape(-1, dims)
        return cls.from_arrays(freqs, np.array(list(mapping.values()), dtype=complex), dims)

    @classmethod
    def empty(cls, dims: int) -> "Spectrum":
        return cls(np.zeros((0, dims), dtype=np.int64), np.zeros(0, dtype=complex), dims)

    def to_dict(self) -> dict[tuple[int, ...], complex]:
        return {tuple(int(v) for v in k): complex(c) for k, c in zip(self.freqs, self.coeffs)}

    def __len__(self) -> int:
        return len(self.coeffs)

    @property
    def max_freq(self) -> np.ndarray:
        """Per-axis ``max |k_j|`` over the stored frequencies (zeros if empty)."""
        if len(self) == 0:
            return np.zeros(self.dims, dtype=np.int64)
        return np.abs(self.freqs).max(axis=0)

    def support(self) -> frozenset:
        return as_freqset(self.freqs)

    def select(self, mask: np.ndarray) -> "Spectrum":
        """Sub-spectrum of the rows where ``mask`` is true (order preserved)."""
        return Spectrum(self.freqs[mask], self.coeffs[mask], self.dims)

    def scaled(self, factor: complex) -> "Spectrum":
        if factor == 0:
            return Spectrum.empty(self.dims)
        return Spectrum(self.freqs, self.coeffs * factor, self.dims)

    def contains(self, freqs: np.ndarray) -> np.ndarray:
        """Boolean mask over ``self.freqs`` marking rows present in ``freqs``."""
        freqs = np.asarray(freqs, dtype=np.int64).reshape(-1, self.dims)
        if len(freqs) == 0 or len(self) == 0:
            return np.zeros(len(self), dtype=bool)
        both = np.concatenate([self.freqs, freqs])
        _, inverse = np.unique(both, axis=0, return_inverse=True)
        inverse = inverse.reshape(-1)
        present = np.zeros(inverse.max() + 1, dtype=bool)
        present[inverse[len(self):]] = True
        return present[inverse[: len(self)]]

    def restrict(self, freqs: np.ndarray) -> "Spectrum":
        return self.select(self.contains(freqs))

    def without(self, freqs: np.ndarray) -> "Spectrum":
        return self.select(~self.contains(freqs))

    def __add__(self, other: "Spectrum") -> "Spectrum":
        if other.dims != self.dims:
            raise ValueError("dimension mismatch")
        return Spectrum.from_arrays(
            np.concatenate([self.freqs, other.freqs]),
            np.concatenate([self.coeffs, other.coeffs]),
            self.dims,
        )

    def __sub__(self, other: "Spectrum") -> "Spectrum":
        return self + other.scaled(-1)

    def block_ids(self) -> np.ndarray:
        return block_of(self.freqs)

    def l2_mass(self) -> float:
        """``sum |a_k|^2``, the mean square of the synthesized function."""
        return float(np.sum(np.abs(self.coeffs) ** 2))


def as_freqset(freqs) -> frozenset:
    """Frozen set of tuples for order-free comparison of frequency collections."""
    arr = np.asarray(freqs)
    if arr.size == 0:
        return frozenset()
    return frozenset(tuple(int(v) for v in row) for row in arr.reshape(len(arr), -1))


def _signed_freqs(n: int) -> np.ndarray:
    return np.fft.fftfreq(n, d=1.0 / n).round().astype(np.int64)


def analyze(f: GridFunction) -> Spectrum:
    """Fourier coefficients of grid samples.

    Keeps every ``k`` with ``|k_j| < n_j / 2`` and drops coefficients whose
    modulus is below ``1e-13`` times the largest one.
    """
    coeffs = np.fft.fftn(f.samples) / f.samples.size
    axes = [_signed_freqs(n) for n in f.sizes]
    mesh = np.meshgrid(*axes, indexing="ij")
    freqs = np.stack([g.reshape(-1) for g in mesh], axis=1)
    flat = coeffs.reshape(-1)
    inside = np.all(2 * np.abs(freqs) < np.array(f.sizes), axis=1)
    mod = np.abs(flat)
    top = mod[inside].max() if inside.any() else 0.0
    keep = inside & (mod >= DROP_THRESHOLD * top) & (mod > 0)
    return Spectrum.from_arrays(freqs[keep], flat[keep], f.dims)


def synthesize(S: Spectrum, sizes: Sequence[int]) -> GridFunction:
    """Evaluate the trigonometric polynomial ``S`` at every grid point."""
    sizes = tuple(int(n) for n in sizes)
    if len(sizes) != S.dims:
        raise ValueError(f"expected {S.dims} grid sizes, got {len(sizes)}")
    mf = S.max_freq
    bad = [j for j, n in enumerate(sizes) if n <= 2 * mf[j]]
    if bad:
        raise BandLimitViolation(
            f"axis {bad[0] + 1}: size {sizes[bad[0]]} <= 2*maxFreq {2 * mf[bad[0]]}"
        )
    arr = np.zeros(sizes, dtype=np.complex128)
    if len(S):
        idx = tuple((S.freqs[:, j] % sizes[j]) for j in range(S.dims))
        arr[idx] = S.coeffs
    return GridFunction(np.fft.ifftn(arr) * arr.size)


def grid_sizes_for(max_freq, oversample: float) -> tuple[int, ...]:
    """Smallest power-of-two sizes ``>= max(4, oversample * (maxFreq_j + 1))``."""
    out = []
    for k in np.atleast_1d(max_freq):
        need = max(4.0, oversample * (int(k) + 1))
        n = 4
        while n < need or n <= 2 * int(k):
            n *= 2
        out.append(n)
    return tuple(out)


def block_of(freqs) -> np.ndarray:
    """Dyadic block index of each frequency row: 0 for the origin, else bit length of max|k_j|."""
    freqs = np.asarray(freqs, dtype=np.int64)
    if freqs.ndim == 1:
        freqs = freqs.reshape(1, -1)
    top = np.abs(freqs).max(axis=1) if freqs.shape[0] else np.zeros(0, dtype=np.int64)
    # frexp(x)[1] is the bit length for positive integers, 0 for x = 0
    return np.frexp(top.astype(np.float64))[1].astype(np.int64)


def block_cardinality(s: int, m: int) -> int:
    """``#rho(s)``: 1 for s = 0, ``(2^{s+1}-1)^m - (2^s-1)^m`` otherwise."""
    if s == 0:
        return 1
    return (2 ** (s + 1) - 1) ** m - (2**s - 1) ** m


def block_indices(s: int, m: int) -> np.ndarray:
    """All frequency vectors of dyadic block ``s`` in ``Z^m``, lexicographically sorted."""
    if s < 0:
        raise ValueError("block index must be nonnegative")
    if s == 0:
        return np.zeros((1, m), dtype=np.int64)
    hi = 2**s - 1
    axis = np.arange(-hi, hi + 1, dtype=np.int64)
    mesh = np.meshgrid(*([axis] * m), indexing="ij")
    freqs = np.stack([g.reshape(-1) for g in mesh], axis=1)
    return freqs[np.abs(freqs).max(axis=1) >= 2 ** (s - 1)]


def block_project(S: Spectrum, s: int) -> Spectrum:
    """Restriction of ``S`` to dyadic block ``s``."""
    return S.select(S.block_ids() == s)
