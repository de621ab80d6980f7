"""Numerical checks: inequality ratios, dual lower bounds and decay-rate sweeps."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .classes import BesovParams, normalize_to_class
from .lorentz_norms import LorentzExponents, mixed_lebesgue, mixed_lorentz
from .mterm import (
    Regime,
    SchemeKind,
    SchemeSpec,
    build_approximant,
    approximation_error,
    greedy_select,
    regime_of,
    theorem_exponent,
)
from .spectral import Spectrum, block_cardinality, grid_sizes_for, synthesize
from .testfns import (
    SeededSampler,
    dirichlet_extremal,
    f3,
    lacunary_random,
    rudin_shapiro_product,
)

__all__ = [
    "DegenerateFit",
    "InequalityReport",
    "RatePoint",
    "RateFitResult",
    "loglog_fit",
    "random_spectrum",
    "square_function_norm",
    "check_littlewood_paley",
    "check_different_metrics",
    "check_lemma1",
    "dual_certificate",
    "make_family",
    "rate_experiment",
    "QUADRATURE_FLOOR",
]

QUADRATURE_FLOOR = 1e-10


class DegenerateFit(ValueError):
    """Errors reached the quadrature floor; a log-log fit would be meaningless."""


@dataclass
class InequalityReport:
    trials: int
    max_ratio: float
    min_ratio: float
    seed: int | None
    ratios: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_ratios(cls, ratios, seed, **meta) -> "InequalityReport":
        ratios = [float(v) for v in ratios]
        return cls(len(ratios), max(ratios), min(ratios), seed, ratios, meta)

    def to_json(self) -> dict:
        return asdict(self)


def loglog_fit(x, y) -> tuple[float, float, float]:
    """Least-squares line through ``(log2 x, log2 y)``: ``(slope, intercept, R^2)``."""
    lx = np.log2(np.asarray(x, dtype=float))
    ly = np.log2(np.asarray(y, dtype=float))
    if len(lx) < 2:
        raise ValueError("need at least two points")
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    # a flat series leaves only rounding in ss_tot; call that a perfect fit
    flat = ss_tot <= 1e-24 * max(1.0, float(np.sum(ly**2)))
    r2 = 1.0 if flat else 1.0 - float(np.sum(resid**2)) / ss_tot
    return float(slope), float(intercept), r2


def random_spectrum(
    sampler: SeededSampler, m: int, max_freq: int, n_modes: int, real_coeffs: bool = False
) -> Spectrum:
    """``n_modes`` distinct frequencies in ``[-max_freq, max_freq]^m`` with Gaussian coefficients."""
    rng = sampler.rng
    side = 2 * max_freq + 1
    if n_modes > side**m:
        raise ValueError("more modes requested than frequencies available")
    flat = rng.choice(side**m, size=n_modes, replace=False)
    freqs = np.stack(np.unravel_index(flat, (side,) * m), axis=1) - max_freq
    coeffs = rng.standard_normal(n_modes)
    if not real_coeffs:
        coeffs = coeffs + 1j * rng.standard_normal(n_modes)
    return Spectrum.from_arrays(freqs, coeffs, m)


def square_function_norm(S: Spectrum, p: float, sizes) -> float:
    """``||(sum_s |δ_s f|^2)^{1/2}||_p`` on the given grid."""
    ids = S.block_ids()
    acc = np.zeros(tuple(sizes))
    for s in np.unique(ids):
        acc += np.abs(synthesize(S.select(ids == s), sizes).samples) ** 2
    return mixed_lebesgue(np.sqrt(acc), [p] * S.dims)


def check_littlewood_paley(
    spectra: Sequence[Spectrum], p: float, seed: int | None = None, oversample: float = 4
) -> InequalityReport:
    """Ratios ``||f||_p / ||square function||_p`` over the supplied spectra."""
    if not 1 < p < math.inf:
        raise ValueError("p must lie in (1, inf)")
    ratios = []
    for S in spectra:
        sizes = grid_sizes_for(S.max_freq, oversample)
        f = synthesize(S, sizes)
        ratios.append(mixed_lebesgue(f, [p] * S.dims) / square_function_norm(S, p, sizes))
    return InequalityReport.from_ratios(ratios, seed, p=p)


def check_different_metrics(
    T: Spectrum,
    degrees,
    source: LorentzExponents,
    target: LorentzExponents,
    oversample: float = 8,
) -> float:
    """``||T||_target / (prod n_j^{1/p_j - 1/q_j} ||T||_source)`` for a polynomial of degree ``<= n``."""
    degrees = np.atleast_1d(np.asarray(degrees, dtype=np.int64))
    if len(degrees) != T.dims or np.any(degrees < 1):
        raise ValueError("one positive degree per axis required")
    if np.any(T.max_freq > degrees):
        raise ValueError(f"polynomial degree {T.max_freq} exceeds {degrees}")
    p, q = np.array(source.p), np.array(target.p)
    if np.any(p >= q):
        raise ValueError("need p_j < q_j on every axis")
    grid = synthesize(T, grid_sizes_for(degrees, oversample))
    factor = float(np.prod(degrees.astype(float) ** (1 / p - 1 / q)))
    return mixed_lorentz(grid, target) / (factor * mixed_lorentz(grid, source))


def check_lemma1(S: Spectrum, M: int, target: LorentzExponents, oversample: float = 8) -> float:
    """Greedy residual norm over ``(N/M)^{1/2} ||S||_2`` with ``N = |support(S)|``."""
    if any(q <= 2 for q in target.p):
        raise ValueError("the bound needs q_j > 2 on every axis")
    N = len(S)
    if not 1 <= M <= N:
        raise ValueError(f"need 1 <= M <= N = {N}")
    R = S.without(greedy_select(S, M))
    if len(R) == 0:
        return 0.0
    err = mixed_lorentz(synthesize(R, grid_sizes_for(S.max_freq, oversample)), target)
    l2 = math.sqrt((2 * math.pi) ** S.dims * S.l2_mass())
    return err / (math.sqrt(N / M) * l2)


def dual_certificate(
    S: Spectrum, omega, dual_target: LorentzExponents, oversample: float = 8
) -> float:
    """Lower bound on ``||S - P||`` over all ``P`` with harmonics in ``omega``.

    The test function is ``P(x) = conj(R(x))`` for the residual ``R`` of ``S``
    off ``omega``; it annihilates every harmonic in ``omega``.  Its pairing with
    ``S`` is ``(2π)^m sum |a_k|^2`` over the residual; the dual norm is taken on
    the same grid ``approximation_error`` uses, so Hölder's inequality holds
    exactly for the step surrogates.
    """
    R = S.without(np.asarray(omega, dtype=np.int64).reshape(-1, S.dims))
    if len(R) == 0:
        return 0.0
    pairing = (2 * math.pi) ** S.dims * R.l2_mass()
    dual = Spectrum.from_arrays(-R.freqs, np.conj(R.coeffs), S.dims)
    norm = mixed_lorentz(synthesize(dual, grid_sizes_for(R.max_freq, oversample)), dual_target)
    return pairing / norm


@dataclass
class RatePoint:
    M: int
    error: float
    support: int
    certificate: float | None = None
    grid: tuple = ()


@dataclass
class RateFitResult:
    points: list
    slope: float
    intercept: float
    r_squared: float
    predicted_slope: float
    log_power: float
    regime: str
    compensated_slope: float | None = None
    fitted_log_power: float | None = None
    meta: dict = field(default_factory=dict)

    @property
    def Ms(self) -> list:
        return [pt.M for pt in self.points]

    @property
    def errors(self) -> list:
        return [pt.error for pt in self.points]

    def relative_deviation(self) -> float:
        return abs(self.slope - self.predicted_slope) / abs(self.predicted_slope)

    def within_band(self, rel_tol: float, compensated_tol: float = 0.1) -> bool:
        """Slope band check; regime 2 gates on the ``M^{1/2}``-compensated slope instead."""
        if self.regime == Regime.REGIME_2.value and self.compensated_slope is not None:
            return abs(self.compensated_slope) <= compensated_tol
        return self.relative_deviation() <= rel_tol

    def to_json(self) -> dict:
        out = asdict(self)
        out["points"] = [asdict(pt) for pt in self.points]
        return out


def _min_level(predicate) -> int:
    n = 1
    while not predicate(n):
        n += 1
    return n


def make_family(
    name: str,
    params: BesovParams,
    target: LorentzExponents,
    seed: int = 0,
    L: int = 12,
    shape: str = "peaked",
    oversample: float = 8,
) -> Callable[[int], Spectrum]:
    """Class members indexed by ``M``.

    ``lacunary``
        one fixed seeded member with every block norm on the Nikol'skii sphere.
    ``dirichlet``
        the class-normalized kernel at half-width ``2^{floor(αn)}``.
    ``rudin-shapiro``
        normalized Rudin-Shapiro products at the smallest ``n`` with ``2^{nm} >= 2M``.
    ``f3``
        normalized cosine products at the smallest ``n`` with ``#ρ(n) >= 2M``.
    """
    m = params.dims
    if name == "lacunary":
        member = lacunary_random(params, L, SeededSampler(seed), shape=shape, oversample=oversample)
        return lambda M: member
    if name == "dirichlet":
        return lambda M: dirichlet_extremal(M, params, target, oversample)
    if name == "rudin-shapiro":

        def rs(M):
            n = _min_level(lambda k: 2 ** (k * m) >= 2 * M)
            return normalize_to_class(rudin_shapiro_product(n, m, params.r), params, oversample)

        return rs
    if name == "f3":

        def f3_member(M):
            n = _min_level(lambda k: block_cardinality(k, m) >= 2 * M)
            return normalize_to_class(f3(n, m, params.base.p, params.r), params, oversample)

        return f3_member
    raise ValueError(f"unknown family {name!r}")


def rate_experiment(
    family: Callable[[int], Spectrum],
    kind: SchemeKind | str,
    source: BesovParams,
    target: LorentzExponents,
    Ms: Sequence[int],
    oversample: float = 8,
    certificates: bool = True,
    threads: int = 1,
) -> RateFitResult:
    """Error of the scheme at every ``M`` and a log-log fit against the predicted exponent."""
    Ms = sorted(int(M) for M in Ms)
    if len(Ms) < 4 or len(set(Ms)) != len(Ms):
        raise ValueError("need at least four distinct values of M")
    kind = SchemeKind(kind)
    regime = regime_of(source.base.p, target.p, source.r)
    predicted, log_power = theorem_exponent(source.base.p, target.p, source.r, source.tau)

    def run(M: int) -> RatePoint:
        S = family(M)
        A = build_approximant(S, SchemeSpec(kind, source, target, M))
        err = approximation_error(S, A, target, oversample)
        cert = dual_certificate(S, A.support, target.dual(), oversample) if certificates else None
        R = S.without(A.support)
        grid = tuple(int(v) for v in grid_sizes_for(R.max_freq, oversample)) if len(R) else ()
        return RatePoint(M, err, int(len(A.support)), cert, grid)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            points = list(pool.map(run, Ms))
    else:
        points = [run(M) for M in Ms]
    points.sort(key=lambda pt: pt.M)
    errors = np.array([pt.error for pt in points])
    if np.any(errors < QUADRATURE_FLOOR):
        raise DegenerateFit(f"errors below {QUADRATURE_FLOOR}: {errors.min():.3e}")

    Mv = np.array(Ms, dtype=float)
    slope, intercept, r2 = loglog_fit(Mv, errors)
    comp = fitted_log = None
    if regime is Regime.REGIME_2:
        compensated = errors * np.sqrt(Mv)
        comp = loglog_fit(Mv, compensated)[0]
        # informative only: log log M barely moves at desk scale
        fitted_log = loglog_fit(np.log2(Mv), compensated)[0]
    return RateFitResult(
        points, slope, intercept, r2, predicted, log_power, regime.value, comp, fitted_log,
        meta={"scheme": kind.value, "oversample": oversample},
    )


# ---------------------------------------------------------------- check suites


def _constant_ratio_closed_form(degrees, source: LorentzExponents, target: LorentzExponents) -> float:
    out = 1.0
    for n, p, t1, q, t2 in zip(degrees, source.p, source.theta, target.p, target.theta):
        top = (q / t2) ** (1 / t2) * (2 * math.pi) ** (1 / q)
        bottom = n ** (1 / p - 1 / q) * (p / t1) ** (1 / t1) * (2 * math.pi) ** (1 / p)
        out *= top / bottom
    return out


def suite_littlewood_paley(seed: int, trials: int = 100) -> dict:
    sampler = SeededSampler(seed)
    spectra = []
    for t in range(trials):
        sub = sampler.child(t)
        m = 1 + t % 2
        max_freq = int(sub.rng.integers(2, 33 if m == 1 else 9))
        modes = int(sub.rng.integers(1, min(24, (2 * max_freq + 1) ** m) + 1))
        spectra.append(random_spectrum(sub, m, max_freq, modes))
    reports = {str(p): check_littlewood_paley(spectra, p, seed).to_json() for p in (1.5, 3.0)}
    return {"suite": "littlewood-paley", "seed": seed, "reports": reports}


def suite_metrics(seed: int, trials: int = 100) -> dict:
    source = LorentzExponents.uniform(1.5, 1.5, 1)
    target = LorentzExponents.uniform(4.0, 4.0, 1)
    sampler = SeededSampler(seed)
    ratios = []
    for t in range(trials):
        sub = sampler.child(t)
        n = int(sub.rng.integers(4, 65))
        modes = int(sub.rng.integers(1, 2 * n + 2))
        ratios.append(check_different_metrics(random_spectrum(sub, 1, n, modes), [n], source, target))
    constants = []
    for m, n in ((1, 4), (1, 64), (2, 8)):
        src = LorentzExponents.uniform(1.5, 3.0, m)
        tgt = LorentzExponents.uniform(4.0, 2.0, m)
        one = Spectrum.from_arrays(np.zeros((1, m), dtype=np.int64), [1.0], m)
        got = check_different_metrics(one, [n] * m, src, tgt)
        want = _constant_ratio_closed_form([n] * m, src, tgt)
        constants.append({"m": m, "degree": n, "ratio": got, "closed_form": want,
                          "rel_error": abs(got - want) / want})
    report = InequalityReport.from_ratios(ratios, seed, source=list(source.p), target=list(target.p))
    return {"suite": "metrics", "seed": seed, "report": report.to_json(), "constants": constants}


def suite_lemma1(seed: int, trials: int = 100) -> dict:
    target = LorentzExponents.lebesgue(4.0)
    sampler = SeededSampler(seed)
    ratios, rows = [], []
    for t in range(trials):
        sub = sampler.child(t)
        factor = (2, 4, 8)[t % 3]
        N = 8 * int(sub.rng.integers(2, 9))
        S = random_spectrum(sub, 1, 63, N)
        ratio = check_lemma1(S, N // factor, target)
        ratios.append(ratio)
        rows.append({"N": N, "M": N // factor, "ratio": ratio})
    report = InequalityReport.from_ratios(ratios, seed, q=4.0)
    return {"suite": "lemma1", "seed": seed, "report": report.to_json(), "trials": rows}


def suite_certificate(seed: int, trials: int = 50) -> dict:
    sampler = SeededSampler(seed)
    gaps, ratios = [], []
    for t in range(trials):
        sub = sampler.child(t)
        m = 1 + t % 2
        target = LorentzExponents.lebesgue(4.0, m)
        S = random_spectrum(sub, m, 12 if m == 1 else 5, int(sub.rng.integers(2, 20)))
        support = greedy_select(S, int(sub.rng.integers(0, len(S))))
        R = S.without(support)
        err = mixed_lorentz(synthesize(R, grid_sizes_for(R.max_freq, 8)), target)
        cert = dual_certificate(S, support, target.dual())
        gaps.append(cert - err)
        ratios.append(cert / err)
    report = InequalityReport.from_ratios(ratios, seed, max_excess=max(gaps))
    return {"suite": "certificate", "seed": seed, "report": report.to_json()}


SUITES = {
    "littlewood-paley": suite_littlewood_paley,
    "metrics": suite_metrics,
    "lemma1": suite_lemma1,
    "certificate": suite_certificate,
}
