"""M-term approximation schemes and the decay exponents they are measured against.

Three schemes are provided:

* ``GREEDY``: keep the ``M`` coefficients of largest modulus.
* ``BLOCK_BUDGET``: keep every block ``s < n`` and, for ``n <= s < αn``, the
  ``N_s`` largest coefficients of block ``s``; drop everything above.
* ``TRUNCATION``: keep whole blocks ``0..n`` with ``n`` maximal such that
  ``sum #ρ(s) <= M``.

Retained coefficients are always the original Fourier coefficients.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .classes import BesovParams, block_norm_profile
from .lorentz_norms import LorentzExponents, mixed_lorentz
from .spectral import Spectrum, block_cardinality, grid_sizes_for, synthesize

__all__ = [
    "Regime",
    "SchemeKind",
    "Unsupported",
    "EmptyRange",
    "SchemeSpec",
    "BudgetPlan",
    "Approximant",
    "regime_of",
    "theorem_exponent",
    "window_alpha",
    "level_for",
    "greedy_select",
    "budget_plan",
    "truncation_level",
    "build_approximant",
    "approximation_error",
]

EQ_TOL = 1e-12


class Unsupported(ValueError):
    """Parameters outside every supported theorem's hypotheses."""


class EmptyRange(ValueError):
    """The block window ``n <= s < αn`` contains no integer."""


class Regime(str, enum.Enum):
    REGIME_1 = "regime-1"
    REGIME_2 = "regime-2"
    REGIME_3 = "regime-3"
    THEOREM_2 = "theorem-2"
    THEOREM_3 = "theorem-3"


class SchemeKind(str, enum.Enum):
    GREEDY = "greedy"
    BLOCK_BUDGET = "block-budget"
    TRUNCATION = "truncation"


def _vec(v) -> np.ndarray:
    return np.atleast_1d(np.asarray(v, dtype=np.float64))


def _check_dims(p, q, m):
    p, q = _vec(p), _vec(q)
    if m is None:
        m = len(p)
    if len(p) != m or len(q) != m:
        raise ValueError("p and q must both have length m")
    return p, q, m


def regime_of(p, q, r: float, m: int | None = None) -> Regime:
    """Classify ``(p, q, r)`` by the hypotheses of the three approximation theorems.

    ``1 < p_j <= 2 < q_j`` is checked first, so ``p_j = 2`` lands in Theorem 1
    (whose third regime has the same exponent as Theorem 3 there).
    """
    p, q, m = _check_dims(p, q, m)
    if np.any(p <= 1) or np.any(~np.isfinite(q)):
        raise Unsupported("need 1 < p_j and q_j < inf")
    inv_p = float(np.sum(1 / p))
    gap = float(np.sum(1 / p - 1 / q))
    if np.all(p <= 2) and np.all(q > 2):
        if abs(r - inv_p) <= EQ_TOL:
            return Regime.REGIME_2
        if r > inv_p:
            return Regime.REGIME_3
        if r > gap:
            return Regime.REGIME_1
        raise Unsupported(f"r = {r} <= sum(1/p_j - 1/q_j) = {gap}")
    if np.all(p < q) and np.all(q <= 2):
        if r > gap:
            return Regime.THEOREM_2
        raise Unsupported(f"r = {r} <= sum(1/p_j - 1/q_j) = {gap}")
    if np.all(p >= 2) and np.all(p < q):
        if r > m / 2:
            return Regime.THEOREM_3
        raise Unsupported(f"r = {r} <= m/2 = {m / 2}")
    raise Unsupported("need 1 < p_j <= 2 < q_j, 1 < p_j < q_j <= 2, or 2 <= p_j < q_j")


def theorem_exponent(p, q, r: float, tau: float = math.inf, m: int | None = None) -> tuple[float, float]:
    """Predicted ``(power of M, power of log M)`` for the class error."""
    p, q, m = _check_dims(p, q, m)
    regime = regime_of(p, q, r, m)
    gap = float(np.sum(1 / p - 1 / q))
    if regime is Regime.REGIME_1:
        return -(r - gap) / (2 * float(np.sum(1 / q))), 0.0
    if regime is Regime.REGIME_2:
        return -0.5, 1.0 - 1.0 / tau
    if regime is Regime.REGIME_3:
        return -(r + float(np.sum(0.5 - 1 / p))) / m, 0.0
    if regime is Regime.THEOREM_2:
        return -(r - gap) / m, 0.0
    return -r / m, 0.0


def window_alpha(regime: Regime, p, q, r: float) -> float:
    """Upper window factor ``α`` of the block-budget scheme."""
    p, q = _vec(p), _vec(q)
    m = len(p)
    if regime in (Regime.REGIME_1, Regime.REGIME_2):
        return m / (2 * float(np.sum(1 / q)))
    if regime is Regime.REGIME_3:
        return (r + float(np.sum(0.5 - 1 / p))) / (r + float(np.sum(1 / q - 1 / p)))
    raise Unsupported(f"no block-budget window for {regime.value}")


def level_for(M: int, m: int) -> int:
    """Largest ``n`` with ``2^{nm} < M``."""
    if M < 2:
        raise ValueError("M must be >= 2")
    n = 0
    while 2 ** ((n + 1) * m) < M:
        n += 1
    return n


def greedy_select(S: Spectrum, M: int) -> np.ndarray:
    """The ``M`` frequencies of largest modulus.

    Ties go to the lexicographically smaller frequency vector.  The result is
    returned in lexicographic order.
    """
    if M < 0:
        raise ValueError("M must be nonnegative")
    if M >= len(S):
        return S.freqs.copy()
    # S.freqs is already lexicographic, so a stable sort on -|a| breaks ties correctly
    order = np.argsort(-np.abs(S.coeffs), kind="stable")[:M]
    return S.freqs[np.sort(order)]


@dataclass(frozen=True)
class SchemeSpec:
    kind: SchemeKind
    source: BesovParams
    target: LorentzExponents
    M: int

    def __post_init__(self):
        object.__setattr__(self, "kind", SchemeKind(self.kind))
        if self.M < 1:
            raise ValueError("M must be >= 1")
        if self.source.dims != self.target.dims:
            raise ValueError("source and target dimension differ")


@dataclass(frozen=True)
class BudgetPlan:
    """Block-budget allocation: whole blocks ``s < n`` plus ``budgets[s]`` harmonics per window block."""

    n: int
    alpha: float
    budgets: dict
    regime: Regime
    m: int
    degenerate: bool = False

    @property
    def window(self) -> range:
        return range(self.n, self.n + len(self.budgets))

    @property
    def full_count(self) -> int:
        return sum(block_cardinality(s, self.m) for s in range(self.n))

    @property
    def total(self) -> int:
        """``sum_{s<n} #ρ(s) + sum N_s``: the harmonic count the plan allows."""
        return self.full_count + sum(self.budgets.values())

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "alpha": self.alpha,
            "budgets": {str(s): int(v) for s, v in sorted(self.budgets.items())},
            "regime": self.regime.value,
            "degenerate": self.degenerate,
            "total": self.total,
            "c": self.total / 2 ** (self.n * self.m),
        }


def _floor_plus_one(x: float) -> int:
    # guards against 2^(integer-valued float) landing just below an integer
    return int(math.floor(x * (1 + 1e-12))) + 1


def budget_plan(
    M: int,
    params: BesovParams,
    target: LorentzExponents,
    profile=None,
    strict: bool = False,
) -> BudgetPlan:
    """Per-block harmonic budgets ``N_s = [formula] + 1`` for the three regimes of Theorem 1.

    Regime 2 reads the block norms of the function being approximated from
    ``profile``.  When the window ``n <= s < αn`` is empty the plan keeps only
    whole blocks ``s < n`` and is flagged ``degenerate`` (``strict=True``
    raises :class:`EmptyRange` instead).
    """
    m = params.dims
    p = np.array(params.base.p)
    q = np.array(target.p)
    r = params.r
    if M < 2**m:
        raise ValueError(f"M must be >= 2^m = {2**m}")
    regime = regime_of(p, q, r, m)
    alpha = window_alpha(regime, p, q, r)
    n = level_for(M, m)
    upper = math.ceil(alpha * n - 1e-9)  # s < αn
    window = range(n, max(n, upper))
    if not window:
        if strict:
            raise EmptyRange(f"no integer s with {n} <= s < {alpha * n}")
        return BudgetPlan(n, alpha, {}, regime, m, degenerate=True)

    inv_p = float(np.sum(1 / p))
    budgets = {}
    for s in window:
        if regime is Regime.REGIME_1:
            e = n * m + (s - n * alpha) * (inv_p - r)
            budgets[s] = _floor_plus_one(2.0**e)
        elif regime is Regime.REGIME_2:
            if profile is None:
                raise ValueError("regime 2 needs the block-norm profile of the input")
            bn = float(profile[s]) if s < len(profile) else 0.0
            inv_tau = 0.0 if math.isinf(params.tau) else 1.0 / params.tau
            budgets[s] = _floor_plus_one(2.0 ** (n * m + s * r) * n ** (inv_tau - 1.0) * bn)
        else:
            e = n * (r - inv_p + m) - s * (r - inv_p)
            budgets[s] = _floor_plus_one(2.0**e)
    return BudgetPlan(n, alpha, budgets, regime, m)


def truncation_level(M: int, m: int) -> int:
    """Largest ``n`` with ``sum_{s<=n} #ρ(s) <= M`` (``-1`` if even block 0 does not fit)."""
    n, count = -1, 0
    while count + block_cardinality(n + 1, m) <= M:
        n += 1
        count += block_cardinality(n, m)
    return n


@dataclass(frozen=True, eq=False)
class Approximant:
    """Retained frequencies ``support`` and their (original) coefficients."""

    support: np.ndarray
    coefficients: Spectrum
    kind: SchemeKind
    M: int
    plan: BudgetPlan | None = None
    meta: dict = field(default_factory=dict)

    def plan_json(self) -> dict:
        out = {"kind": self.kind.value, "M": self.M, "support_size": int(len(self.support))}
        if self.plan is not None:
            out["plan"] = self.plan.to_json()
        out.update(self.meta)
        return out


def build_approximant(S: Spectrum, spec: SchemeSpec, profile=None) -> Approximant:
    """Apply the scheme named by ``spec.kind`` to ``S``."""
    if spec.kind is SchemeKind.GREEDY:
        support = greedy_select(S, spec.M)
        return Approximant(support, S.restrict(support), spec.kind, spec.M)

    ids = S.block_ids()
    if spec.kind is SchemeKind.TRUNCATION:
        n = truncation_level(spec.M, S.dims)
        kept = S.select(ids <= n)
        return Approximant(kept.freqs, kept, spec.kind, spec.M, meta={"n": n})

    if profile is None and regime_of(spec.source.base.p, spec.target.p, spec.source.r) is Regime.REGIME_2:
        profile = block_norm_profile(S, spec.source.base)
    plan = budget_plan(spec.M, spec.source, spec.target, profile)
    parts = [S.freqs[ids < plan.n]]
    for s, budget in plan.budgets.items():
        parts.append(greedy_select(S.select(ids == s), budget))
    support = np.concatenate(parts) if parts else np.zeros((0, S.dims), dtype=np.int64)
    kept = S.restrict(support)
    return Approximant(kept.freqs, kept, spec.kind, spec.M, plan=plan)


def residual(S: Spectrum, A: Approximant) -> Spectrum:
    return S.without(A.support)


def approximation_error(
    S: Spectrum, A: Approximant, target: LorentzExponents, oversample: float = 8
) -> float:
    """Target norm of ``S - A`` on a grid sized from the residual's band limit."""
    R = residual(S, A)
    if len(R) == 0:
        return 0.0
    return mixed_lorentz(synthesize(R, grid_sizes_for(R.max_freq, oversample)), target)
