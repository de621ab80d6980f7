import math

import numpy as np
import pytest

from lorentz_mterm.classes import BesovParams, besov_seminorm, block_norm_profile
from lorentz_mterm.lorentz_norms import LorentzExponents, mixed_lorentz
from lorentz_mterm.mterm import level_for
from lorentz_mterm.spectral import block_project, grid_sizes_for, synthesize
from lorentz_mterm.testfns import (
    SeededSampler,
    cosine_product,
    dirichlet_cubic,
    dirichlet_extremal,
    dirichlet_level,
    f3,
    g1,
    lacunary_random,
    rudin_shapiro,
    rudin_shapiro_product,
)


def slope(x, y):
    return np.polyfit(x, np.log2(y), 1)[0]


def grs_recursive(k):
    """a(0) = 1, a(2j) = a(j), a(2j+1) = (-1)^j a(j)."""
    if k == 0:
        return 1
    j, odd = divmod(k, 2)
    return grs_recursive(j) * ((-1) ** j if odd else 1)


def is_real(S):
    f = synthesize(S, grid_sizes_for(S.max_freq, 4)).samples
    return np.max(np.abs(f.imag)) < 1e-12


class TestSampler:
    def test_reproducible(self):
        a = SeededSampler(5).rng.standard_normal(4)
        b = SeededSampler(5).rng.standard_normal(4)
        np.testing.assert_array_equal(a, b)

    def test_children_differ_and_ignore_parent_state(self):
        s = SeededSampler(5)
        first = s.child(3).rng.standard_normal(3)
        s.rng.standard_normal(100)
        np.testing.assert_array_equal(first, s.child(3).rng.standard_normal(3))
        assert not np.array_equal(first, s.child(4).rng.standard_normal(3))


class TestDirichlet:
    def test_small(self):
        assert dirichlet_cubic(0, 1).to_dict() == {(-1,): 1, (0,): 1, (1,): 1}

    @pytest.mark.parametrize("l,m", [(0, 2), (3, 1), (2, 2), (1, 3)])
    def test_count_and_parseval(self, l, m):
        S = dirichlet_cubic(l, m)
        assert len(S) == (2 ** (l + 1) + 1) ** m
        norm = mixed_lorentz(synthesize(S, grid_sizes_for(S.max_freq, 2)), LorentzExponents.lebesgue(2.0, m))
        assert norm == pytest.approx((2 * math.pi) ** (m / 2) * math.sqrt(len(S)), rel=1e-12)

    def test_lp_growth(self):
        e = LorentzExponents.lebesgue(1.5)
        ls = np.arange(3, 9)
        norms = [mixed_lorentz(synthesize(dirichlet_cubic(l, 1), grid_sizes_for([2**l], 8)), e) for l in ls]
        assert slope(ls, norms) == pytest.approx(1 - 1 / 1.5, rel=0.05)


class TestCosines:
    def test_cosine_product_is_real_and_even(self):
        S = cosine_product(np.array([[1, 2], [3, 1]]), np.array([1.0, 0.5]))
        d = S.to_dict()
        assert d[(1, 2)] == d[(-1, -2)] == d[(1, -2)] == pytest.approx(0.25)
        assert is_real(S)

    def test_g1_first_block(self):
        assert g1(1, 1).to_dict() == {(-1,): pytest.approx(0.5), (1,): pytest.approx(0.5)}

    @pytest.mark.parametrize("m", [1, 2])
    def test_g1_real(self, m):
        assert is_real(g1(4, m))

    def test_g1_block_decay(self):
        p = 1.5
        e = LorentzExponents.lebesgue(p)
        S = g1(7, 1)
        prof = block_norm_profile(S, e)
        ratios = [prof[s] * 2 ** (s / p) for s in range(2, 8)]
        assert max(ratios) / min(ratios) < 1.5

    def test_f3_first_coefficient(self):
        assert f3(1, 1, 1.5, 1.0).to_dict()[(1,)] == pytest.approx(0.5 * 2 ** (-1 / 3))

    def test_f3_block_slope_and_bounded_seminorm(self):
        p, r = 1.5, 1.0
        e = LorentzExponents.lebesgue(p)
        prof = block_norm_profile(f3(8, 1, p, r), e)
        s = np.arange(3, 9)
        assert slope(s, prof[3:9]) == pytest.approx(-r, abs=0.15)
        semis = [besov_seminorm(block_norm_profile(f3(n, 1, p, r), e), r, 1.0) for n in range(2, 7)]
        assert max(semis) / min(semis) < 2.0

    def test_bad_args(self):
        with pytest.raises(ValueError):
            g1(0, 1)
        with pytest.raises(ValueError):
            f3(2, 1, 1.5, 0.0)


class TestRudinShapiro:
    def test_first_sign(self):
        assert list(rudin_shapiro(1)) == [1]

    @pytest.mark.parametrize("s", range(1, 11))
    def test_matches_recursive_sequence(self, s):
        want = [grs_recursive(k) for k in range(2 ** (s - 1), 2**s)]
        assert list(rudin_shapiro(s)) == want

    @pytest.mark.parametrize("s", range(2, 13))
    def test_sup_norm(self, s):
        eps = rudin_shapiro(s)
        n = 2 ** (s + 4)
        coeffs = np.zeros(n, dtype=complex)
        coeffs[2 ** (s - 1) : 2**s] = eps
        f = np.fft.ifft(coeffs) * n
        assert np.max(np.abs(f)) <= 4 * 2 ** (s / 2)
        assert np.mean(np.abs(f) ** 2) == pytest.approx(2 ** (s - 1))

    def test_product_small_case(self):
        assert rudin_shapiro_product(1, 1, 1.0).to_dict() == {(1,): pytest.approx(2**-1.5)}

    @pytest.mark.parametrize("m", [1, 2])
    def test_product_blocks(self, m):
        S = rudin_shapiro_product(5, m, 1.0)
        for s in range(1, 6):
            B = block_project(S, s)
            assert len(B) == 2 ** ((s - 1) * m)
            assert np.all(B.freqs >= 2 ** (s - 1)) and np.all(B.freqs < 2**s)

    def test_product_seminorm_bounded(self):
        P = BesovParams(LorentzExponents.lebesgue(2.5), 1.0, 2.0)
        vals = [besov_seminorm(block_norm_profile(rudin_shapiro_product(n, 1, P.r), P.base), P.r, P.tau)
                for n in range(2, 7)]
        assert max(vals) < 4 * min(vals)


class TestLacunary:
    @pytest.mark.parametrize("shape", ["peaked", "flat"])
    @pytest.mark.parametrize("m", [1, 2])
    def test_profile_on_sphere(self, shape, m):
        P = BesovParams(LorentzExponents.uniform(1.5, 2.5, m), 0.7 * m)
        S = lacunary_random(P, 6 if m == 1 else 4, SeededSampler(11), shape=shape)
        prof = block_norm_profile(S, P.base)
        np.testing.assert_allclose(prof, 2.0 ** (-np.arange(len(prof)) * P.r), rtol=1e-9)
        assert besov_seminorm(prof, P.r, math.inf) == pytest.approx(1.0, abs=1e-9)

    def test_deterministic(self):
        P = BesovParams(LorentzExponents.lebesgue(1.5), 0.5)
        a = lacunary_random(P, 6, SeededSampler(2))
        b = lacunary_random(P, 6, SeededSampler(2))
        np.testing.assert_array_equal(a.coeffs, b.coeffs)
        c = lacunary_random(P, 6, SeededSampler(3))
        assert not np.array_equal(a.coeffs, c.coeffs)

    def test_bad_args(self):
        P = BesovParams(LorentzExponents.lebesgue(1.5), 0.5)
        with pytest.raises(ValueError):
            lacunary_random(P, 0, SeededSampler(0))
        with pytest.raises(ValueError):
            lacunary_random(P, 3, SeededSampler(0), shape="spiky")


class TestExtremal:
    def test_level(self):
        P = BesovParams(LorentzExponents.lebesgue(1.5), 0.5)
        assert dirichlet_level(5, P, LorentzExponents.lebesgue(4.0)) == 10
        with pytest.raises(ValueError):
            dirichlet_level(5, BesovParams(LorentzExponents.lebesgue(1.25), 1.0), LorentzExponents.lebesgue(2.0))

    def test_normalization_scaling(self):
        """The computed constant scales like 2^{-nm(2 sum 1/q)^{-1}(r + sum(1 - 1/p))}."""
        p, q, r = 1.5, 4.0, 0.5
        P = BesovParams(LorentzExponents.lebesgue(p), r)
        target = LorentzExponents.lebesgue(q)
        ns, consts = [], []
        for n in range(3, 9):
            S = dirichlet_extremal(2**n + 1, P, target, oversample=4)
            assert level_for(2**n + 1, 1) == n
            ns.append(n)
            consts.append(abs(S.coeffs[0]))
        want = -(1 / (2 / q)) * (r + (1 - 1 / p))
        assert slope(ns, consts) == pytest.approx(want, rel=0.10)
