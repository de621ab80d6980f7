import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lorentz_mterm.spectral import (
    BandLimitViolation,
    GridFunction,
    Spectrum,
    analyze,
    as_freqset,
    block_cardinality,
    block_indices,
    block_of,
    block_project,
    grid_sizes_for,
    synthesize,
)

from conftest import random_spec


def direct_eval(S, sizes):
    """Sum a_k e^{i<k,x>} point by point."""
    axes = [2 * np.pi * np.arange(n) / n for n in sizes]
    mesh = np.meshgrid(*axes, indexing="ij")
    out = np.zeros(sizes, dtype=complex)
    for k, a in zip(S.freqs, S.coeffs):
        out += a * np.exp(1j * sum(kj * xj for kj, xj in zip(k, mesh)))
    return out


def direct_dft(samples):
    """(1/N) sum_x f(x) e^{-i<k,x>} for |k_j| < n_j/2, as a dict."""
    sizes = samples.shape
    axes = [2 * np.pi * np.arange(n) / n for n in sizes]
    mesh = np.meshgrid(*axes, indexing="ij")
    ranges = [range(-(n // 2) + 1, n // 2) for n in sizes]
    out = {}
    for k in itertools.product(*ranges):
        phase = np.exp(-1j * sum(kj * xj for kj, xj in zip(k, mesh)))
        out[k] = np.mean(samples * phase)
    return out


class TestGridFunction:
    def test_rejects_non_power_of_two(self):
        with pytest.raises(ValueError):
            GridFunction(np.ones(6))
        with pytest.raises(ValueError):
            GridFunction(np.ones((8, 2)))

    def test_samples_read_only(self):
        g = GridFunction(np.ones(8))
        with pytest.raises(ValueError):
            g.samples[0] = 2

    def test_from_callable(self):
        g = GridFunction.from_callable(lambda x, y: np.cos(x) + np.sin(2 * y), (8, 16))
        assert g.sizes == (8, 16)
        assert g.samples[2, 0] == pytest.approx(np.cos(np.pi / 2))


class TestSpectrum:
    def test_from_arrays_sorts_merges_and_drops(self):
        S = Spectrum.from_arrays([[2], [-1], [2], [0]], [1.0, 2.0, 3.0, 0.0], 1)
        assert S.to_dict() == {(-1,): 2.0, (2,): 4.0}

    def test_cancelling_duplicates_vanish(self):
        S = Spectrum.from_arrays([[1], [1]], [1.0, -1.0], 1)
        assert len(S) == 0

    def test_constructor_validates(self):
        with pytest.raises(ValueError, match="sorted"):
            Spectrum(np.array([[1], [0]]), np.array([1.0, 1.0]), 1)
        with pytest.raises(ValueError, match="duplicate"):
            Spectrum(np.array([[1], [1]]), np.array([1.0, 1.0]), 1)
        with pytest.raises(ValueError, match="zero"):
            Spectrum(np.array([[1]]), np.array([0.0]), 1)

    def test_lex_order_is_first_coordinate_major(self):
        S = Spectrum.from_dict({(1, -5): 1, (0, 3): 1, (0, -2): 1, (-1, 9): 1})
        assert [tuple(k) for k in S.freqs] == [(-1, 9), (0, -2), (0, 3), (1, -5)]

    def test_set_operations(self, rng):
        S = random_spec(rng, 2, 4, 20)
        omega = S.freqs[::3]
        kept, rest = S.restrict(omega), S.without(omega)
        assert len(kept) + len(rest) == len(S)
        assert kept.support() == as_freqset(omega)
        assert (kept + rest).to_dict() == S.to_dict()
        assert len(S - S) == 0

    def test_contains_ignores_foreign_frequencies(self):
        S = Spectrum.from_dict({(1,): 1, (3,): 1})
        assert list(S.contains(np.array([[3], [7]]))) == [False, True]

    def test_max_freq(self):
        S = Spectrum.from_dict({(1, -7): 1, (-3, 2): 1})
        assert list(S.max_freq) == [3, 7]
        assert list(Spectrum.empty(2).max_freq) == [0, 0]


class TestTransforms:
    def test_synthesize_matches_direct_sum(self, rng):
        S = random_spec(rng, 2, 3, 12)
        got = synthesize(S, (8, 16)).samples
        np.testing.assert_allclose(got, direct_eval(S, (8, 16)), atol=1e-12)

    def test_analyze_matches_direct_dft(self, rng):
        samples = rng.standard_normal((8, 4)) + 1j * rng.standard_normal((8, 4))
        want = direct_dft(samples)
        got = analyze(GridFunction(samples)).to_dict()
        for k, v in want.items():
            assert got.get(k, 0) == pytest.approx(v, abs=1e-12)

    def test_analyze_drops_nyquist_and_roundoff(self):
        # cos(4x) on 8 points lives on the Nyquist frequency: not representable
        g = GridFunction.from_callable(lambda x: 1 + 1e-15 * np.cos(x) + np.cos(4 * x), (8,))
        assert analyze(g).to_dict() == {(0,): pytest.approx(1.0)}

    def test_band_limit(self):
        S = Spectrum.from_dict({(4,): 1.0})
        with pytest.raises(BandLimitViolation):
            synthesize(S, (8,))
        synthesize(S, (16,))

    def test_size_count_must_match(self):
        with pytest.raises(ValueError):
            synthesize(Spectrum.from_dict({(1, 1): 1.0}), (8,))

    @given(
        m=st.integers(1, 3),
        max_freq=st.integers(1, 5),
        modes=st.integers(1, 15),
        seed=st.integers(0, 2**32 - 1),
    )
    def test_round_trip(self, m, max_freq, modes, seed):
        S = random_spec(np.random.default_rng(seed), m, max_freq, modes)
        sizes = grid_sizes_for(S.max_freq, 2)
        back = analyze(synthesize(S, sizes))
        assert back.support() == S.support()
        np.testing.assert_allclose(back.coeffs, S.coeffs, atol=1e-10)

    @given(m=st.integers(1, 2), modes=st.integers(1, 20), seed=st.integers(0, 2**32 - 1))
    def test_parseval(self, m, modes, seed):
        S = random_spec(np.random.default_rng(seed), m, 6, modes)
        f = synthesize(S, (16,) * m).samples
        assert S.l2_mass() == pytest.approx(np.mean(np.abs(f) ** 2), rel=1e-12)

    @given(k=st.lists(st.integers(0, 200), min_size=1, max_size=3), factor=st.floats(1, 10))
    def test_grid_sizes(self, k, factor):
        sizes = grid_sizes_for(k, factor)
        for n, kj in zip(sizes, k):
            assert n & (n - 1) == 0 and n >= 4
            assert n > 2 * kj and n >= factor * (kj + 1)
            half = n // 2  # minimality: halving breaks one of the conditions
            assert half < 4 or half < factor * (kj + 1) or half <= 2 * kj


class TestBlocks:
    @given(st.lists(st.integers(-10**6, 10**6), min_size=1, max_size=4))
    def test_block_of_formula(self, k):
        top = max(abs(v) for v in k)
        want = 0 if top == 0 else 1 + int(np.floor(np.log2(top)))
        assert block_of(np.array([k]))[0] == want == top.bit_length()

    @pytest.mark.parametrize("m", [1, 2, 3])
    @pytest.mark.parametrize("s", range(0, 7))
    def test_cardinality(self, s, m):
        idx = block_indices(s, m)
        assert len(idx) == block_cardinality(s, m)
        assert np.all(block_of(idx) == s)
        assert len(as_freqset(idx)) == len(idx)

    @pytest.mark.parametrize("m", [1, 2])
    def test_blocks_partition_a_cube(self, m):
        L = 5
        parts = np.concatenate([block_indices(s, m) for s in range(L + 1)])
        axis = np.arange(-(2**L) + 1, 2**L)
        cube = np.stack([g.reshape(-1) for g in np.meshgrid(*([axis] * m), indexing="ij")], axis=1)
        assert len(parts) == len(cube)
        assert as_freqset(parts) == as_freqset(cube)

    def test_block_indices_sorted(self):
        idx = block_indices(3, 2)
        assert [tuple(r) for r in idx] == sorted(tuple(r) for r in idx)

    def test_block_project(self, rng):
        S = random_spec(rng, 2, 9, 60)
        total = sum(len(block_project(S, s)) for s in range(6))
        assert total == len(S)
        assert set(block_project(S, 3).block_ids()) <= {3}
