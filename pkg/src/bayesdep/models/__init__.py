"""H0-vs-H1 comparators, one module per model family."""
from .base import ModelComparator
from .circular import (
    PhaseSample,
    mean_resultant_length,
    n0_curve,
    vonmises_comparator,
    vonmises_log_bf,
    vonmises_logr,
    vonmises_logr_from_stats,
)
from .copula import (
    CopulaFit,
    GammaFit,
    copula_comparator,
    copula_ifm_fit,
    copula_lnbf,
    fit_gamma,
    t_copula_logpdf,
    t_copula_score,
)
from .functional import functional_comparator, functional_lnbf
from .known import known_dist_lnbf, known_normal_comparator, known_normal_densities
from .misspec import TrendReport, misspecification_trend
from .nested import fit_normal_nested, nested_bic_lnbf, nested_normal_comparator
from .noisy_normal import (
    NoisyNormalParams,
    ScatterMatrix,
    noisy_normal_comparator,
    noisy_normal_lnbf,
)
