"""False discovery rates, exactly and by simulation.

Exact conditional-probability trees for screening and significance tests,
the minimum-Bayes-factor calibration of observed p values, analytic power
of the two-sample t test, and a reproducible Monte Carlo engine that
simulates large batches of such tests.
"""

from .distributions import (
    RngStream,
    noncentral_t_cdf,
    normal_cdf,
    normal_quantile,
    regularized_incomplete_beta,
    sample_normal,
    student_t_cdf,
)
from .errors import (
    ConfigurationError,
    DegenerateDataError,
    DomainError,
    FdrLabError,
    UndefinedResultError,
)
from .fdr_calculus import (
    Breakdown,
    DiagnosticSpec,
    OddsResult,
    TestScenario,
    alpha_for_target_fdr,
    berger_min_bayes_factor,
    berger_min_fdr,
    berger_table,
    posterior_odds,
    screening_breakdown,
    significance_breakdown,
)
from .montecarlo import (
    DEFAULT_MASTER_SEED,
    InflationPoint,
    MixtureSpec,
    SimConfig,
    SimSummary,
    diff_distribution_stats,
    inflation_curve,
    inflation_stats,
    interval_fdr,
    make_mixture,
    mixture_fdr,
    run_batch,
    write_histogram_csv,
)
from .power import power_two_sample, solve_n, student_t_quantile
from .ttest import TestResult, batch_two_sample_t, significant, two_sample_t

__version__ = "0.1.0"

__all__ = [
    "Breakdown",
    "ConfigurationError",
    "DEFAULT_MASTER_SEED",
    "DegenerateDataError",
    "DiagnosticSpec",
    "DomainError",
    "FdrLabError",
    "InflationPoint",
    "MixtureSpec",
    "OddsResult",
    "RngStream",
    "SimConfig",
    "SimSummary",
    "TestResult",
    "TestScenario",
    "UndefinedResultError",
    "alpha_for_target_fdr",
    "batch_two_sample_t",
    "berger_min_bayes_factor",
    "berger_min_fdr",
    "berger_table",
    "diff_distribution_stats",
    "inflation_curve",
    "inflation_stats",
    "interval_fdr",
    "make_mixture",
    "mixture_fdr",
    "noncentral_t_cdf",
    "normal_cdf",
    "normal_quantile",
    "posterior_odds",
    "power_two_sample",
    "regularized_incomplete_beta",
    "run_batch",
    "sample_normal",
    "screening_breakdown",
    "significance_breakdown",
    "significant",
    "solve_n",
    "student_t_cdf",
    "student_t_quantile",
    "two_sample_t",
    "write_histogram_csv",
]
