"""Mixed-norm Lorentz functionals and M-term trigonometric approximation experiments."""

__version__ = "0.1.0"

from .spectral import (  # noqa: E402
    BandLimitViolation,
    GridFunction,
    Spectrum,
    analyze,
    block_cardinality,
    block_indices,
    block_of,
    block_project,
    grid_sizes_for,
    synthesize,
)
from .lorentz_norms import LorentzExponents, lorentz_1d, mixed_lebesgue, mixed_lorentz, rearrange  # noqa: E402
from .classes import BesovParams, besov_seminorm, block_norm_profile, in_class, normalize_to_class  # noqa: E402
from .mterm import (  # noqa: E402
    Approximant,
    BudgetPlan,
    EmptyRange,
    Regime,
    SchemeKind,
    SchemeSpec,
    Unsupported,
    approximation_error,
    budget_plan,
    build_approximant,
    greedy_select,
    regime_of,
    theorem_exponent,
)
from .testfns import SeededSampler  # noqa: E402
from .verify import RateFitResult, dual_certificate, loglog_fit, rate_experiment  # noqa: E402
