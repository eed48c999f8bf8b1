"""Observer-weighted group-size inference and extinction forecasting.

The library turns a single observed rank within a group into posteriors
on the group's total size, maps those posteriors onto calendar-time
extinction forecasts, and quantifies how strongly picking an individual
(rather than a group) biases the apparent group-size distribution, both
on toy models and on real population tables.
"""

from .distributions import (
    BimodalLognormal,
    DistributionSpec,
    Lognormal,
    Pareto,
    SizeBiasedView,
    median_group,
    median_individual,
    size_biased,
)
from .errors import (
    CalibrationError,
    ImpossibleObservationError,
    InfiniteMeanError,
    InsufficientSamplesError,
    TableFormatError,
)
from .forecast import (
    BirthRateModel,
    ForecastCurve,
    constant_hazard_curve,
    extinction_curve,
    hazard_fit_window,
    milestones,
)
from .posterior import (
    ExactRank,
    ExpDecayAlpha,
    GridSpec,
    LogUniformRank,
    ParameterPrior,
    PointMassAlpha,
    TabulatedPosterior,
    UniformAlpha,
    coverage_check,
    frequentist_estimate,
    future_count_posterior,
    general_posterior,
    pareto_closed_form,
    prior_insensitivity_check,
    sia_truncation_demo,
    unbiasedness_check,
)
from .population import (
    PopulationTable,
    bundled_country_table,
    empirical_medians,
    fraction_between,
    load_table,
    neutrality_report,
)
from .urn import (
    EnsembleCandidate,
    MonteCarloResult,
    UrnEnsemble,
    candidate_posterior,
    monte_carlo_oracle,
    nu_insensitivity_check,
    rank_likelihood,
    source_urn_posterior,
    uniform_ensemble_scan,
)

__version__ = "0.1.0"

__all__ = [
    "BimodalLognormal",
    "BirthRateModel",
    "CalibrationError",
    "DistributionSpec",
    "EnsembleCandidate",
    "ExactRank",
    "ExpDecayAlpha",
    "ForecastCurve",
    "GridSpec",
    "ImpossibleObservationError",
    "InfiniteMeanError",
    "InsufficientSamplesError",
    "LogUniformRank",
    "Lognormal",
    "MonteCarloResult",
    "ParameterPrior",
    "Pareto",
    "PointMassAlpha",
    "PopulationTable",
    "SizeBiasedView",
    "TableFormatError",
    "TabulatedPosterior",
    "UniformAlpha",
    "UrnEnsemble",
    "bundled_country_table",
    "candidate_posterior",
    "constant_hazard_curve",
    "coverage_check",
    "empirical_medians",
    "extinction_curve",
    "fraction_between",
    "frequentist_estimate",
    "future_count_posterior",
    "general_posterior",
    "hazard_fit_window",
    "load_table",
    "median_group",
    "median_individual",
    "milestones",
    "monte_carlo_oracle",
    "neutrality_report",
    "nu_insensitivity_check",
    "pareto_closed_form",
    "prior_insensitivity_check",
    "rank_likelihood",
    "sia_truncation_demo",
    "size_biased",
    "source_urn_posterior",
    "unbiasedness_check",
    "uniform_ensemble_scan",
]
