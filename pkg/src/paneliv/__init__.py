"""Panel IV estimation engine with a predicted-mortality instrument builder,
weak-instrument diagnostics, a replication harness, and a Monte Carlo lab."""

from .diagnostics import (
    WeakIvReport,
    cragg_donald_stat,
    significance_stars,
    stock_yogo_critical,
    weak_iv_report,
)
from .instrument import (
    DiseaseMortalityPanel,
    InterventionSchedule,
    PredictedMortalitySeries,
    instrument_summary,
    intervention_indicator,
    predicted_mortality,
    predicted_mortality_change,
    zeroth_stage_dataset,
)
from .panel import (
    CountryYearPanel,
    SampleFilter,
    export_country_year_csv,
    filter_sample,
    ingest_country_year_csv,
)
from .regress import (
    FitResult,
    RegressionSpec,
    VcovKind,
    WeightSpec,
    first_stage,
    fit_ols,
    fit_tsls,
    oracle_dummy_ols,
)
from .transforms import (
    TransformKind,
    expand_frequency_weights,
    growth_rate,
    interact_with_year_dummies,
    lag_variable,
    long_difference,
)

__version__ = "0.1.0"

__all__ = [
    "CountryYearPanel",
    "DiseaseMortalityPanel",
    "FitResult",
    "InterventionSchedule",
    "PredictedMortalitySeries",
    "RegressionSpec",
    "SampleFilter",
    "TransformKind",
    "VcovKind",
    "WeakIvReport",
    "WeightSpec",
    "cragg_donald_stat",
    "expand_frequency_weights",
    "export_country_year_csv",
    "filter_sample",
    "first_stage",
    "fit_ols",
    "fit_tsls",
    "growth_rate",
    "ingest_country_year_csv",
    "instrument_summary",
    "interact_with_year_dummies",
    "intervention_indicator",
    "lag_variable",
    "long_difference",
    "oracle_dummy_ols",
    "predicted_mortality",
    "predicted_mortality_change",
    "significance_stars",
    "stock_yogo_critical",
    "weak_iv_report",
    "zeroth_stage_dataset",
]
