"""Synthetic data-generating process with a tunable exclusion violation.

A minimal linear-Gaussian world: richer countries start with lower disease
mortality (wealth_mortality_slope), life expectancy responds to predicted
mortality (gamma_iv), and GDP growth carries a direct channel from initial
mortality (rho_violation) that the instrument cannot see. With
rho_violation = 0 the instrument is valid; with rho_violation != 0 the
exclusion restriction fails by construction. Magnitudes are not calibrated
to any historical dataset; only signs and orderings are meaningful.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, SpecificationError
from ..instrument import DiseaseMortalityPanel, InterventionSchedule, predicted_mortality
from ..panel import CountryMeta, CountryYearPanel

TRUNCATION_WARN_FRACTION = 0.05


def _default_schedule() -> InterventionSchedule:
    # Mirrors the shipped schedule's structure: most mortality intervened at
    # the first grid year, the remainder one decade later.
    return InterventionSchedule({"disease_a": 1940, "disease_b": 1950})


@dataclass(frozen=True)
class DgpConfig:
    n_countries: int = 47
    years: tuple[int, ...] = (1940, 1950, 1960, 1970, 1980)
    true_alpha: float = 0.0
    gamma_iv: float = -0.45
    rho_violation: float = 0.0
    wealth_mortality_slope: float = 0.35
    mortality_base: float = 3.2
    loggdp_initial_mean: float = 8.0
    loggdp_initial_sd: float = 0.5
    mortality_noise: float = 0.1
    le_noise: float = 0.05
    growth_noise: float = 0.1
    intervention_schedule: InterventionSchedule = field(default_factory=_default_schedule)
    disease_shares: tuple[float, ...] = (0.6, 0.4)

    def __post_init__(self):
        if self.n_countries < 2:
            raise SpecificationError("n_countries must be >= 2")
        if len(self.years) < 2:
            raise SpecificationError("need at least two years")
        if tuple(sorted(self.years)) != tuple(self.years):
            raise SpecificationError("years must be sorted")
        for name in ("mortality_noise", "le_noise", "growth_noise", "loggdp_initial_sd"):
            if getattr(self, name) <= 0:
                raise SpecificationError(f"{name} must be > 0")
        diseases = self.intervention_schedule.diseases
        if len(self.disease_shares) != len(diseases):
            raise SpecificationError(
                f"{len(self.disease_shares)} disease shares for {len(diseases)} diseases"
            )
        if abs(sum(self.disease_shares) - 1.0) > 1e-9 or min(self.disease_shares) <= 0:
            raise SpecificationError("disease shares must be positive and sum to 1")
        if self.truncation_probability() > TRUNCATION_WARN_FRACTION:
            warnings.warn(
                f"config truncates about {100 * self.truncation_probability():.0f}% of mortality "
                "draws at 0, distorting the linear wealth-mortality channel", stacklevel=2)

    def truncation_probability(self) -> float:
        """Chance a mortality draw falls below 0 and is truncated."""
        mean = self.mortality_base - self.wealth_mortality_slope * self.loggdp_initial_mean
        sd = math.hypot(self.wealth_mortality_slope * self.loggdp_initial_sd, self.mortality_noise)
        return 0.5 * math.erfc(mean / (sd * math.sqrt(2.0)))

    @classmethod
    def from_options(cls, options: dict[str, str]) -> "DgpConfig":
        """Build from a [dgp] config section; unknown keys are an error."""
        kwargs = {}
        converters = {
            "n_countries": int,
            "true_alpha": float,
            "gamma_iv": float,
            "rho_violation": float,
            "wealth_mortality_slope": float,
            "mortality_base": float,
            "loggdp_initial_mean": float,
            "loggdp_initial_sd": float,
            "mortality_noise": float,
            "le_noise": float,
            "growth_noise": float,
        }
        for key, value in options.items():
            if key in ("seed", "reps"):
                continue
            if key == "years":
                kwargs["years"] = tuple(int(y) for y in value.split(",") if y.strip())
                continue
            if key not in converters:
                raise ConfigError(f"[dgp]: unknown key {key!r}")
            try:
                kwargs[key] = converters[key](value)
            except ValueError:
                raise ConfigError(f"[dgp]: bad value for {key}: {value!r}") from None
        return cls(**kwargs)


@dataclass
class DgpDraw:
    """One simulated world. Iterates as (panel, mortality) for convenience."""

    panel: CountryYearPanel
    mortality: DiseaseMortalityPanel
    truncated_countries: list[str]

    def __iter__(self):
        return iter((self.panel, self.mortality))

    @property
    def truncated_fraction(self) -> float:
        return len(self.truncated_countries) / max(1, len(self.panel.countries))


def simulate_dgp(config: DgpConfig, seed) -> DgpDraw:
    """Draw one synthetic panel; deterministic given (config, seed).

    ``seed`` is an integer or a numpy SeedSequence (the Monte Carlo driver
    passes per-replication sub-seeds).
    """
    if isinstance(seed, np.random.SeedSequence):
        sequence = seed
    else:
        sequence = np.random.SeedSequence(seed)
    rng = np.random.default_rng(sequence)
    n = config.n_countries
    years = list(config.years)
    countries = [f"S{i:03d}" for i in range(n)]
    diseases = config.intervention_schedule.diseases

    loggdp0 = rng.normal(config.loggdp_initial_mean, config.loggdp_initial_sd, n)
    raw_mortality = (config.mortality_base
                     - config.wealth_mortality_slope * loggdp0
                     + rng.normal(0.0, config.mortality_noise, n))
    initial_mortality = np.maximum(raw_mortality, 0.0)
    truncated = [countries[i] for i in range(n) if raw_mortality[i] < 0.0]

    country_effect_le = rng.normal(0.0, 0.05, n)
    country_effect_gdp = rng.normal(0.0, 0.05, n)
    le_shocks = rng.normal(0.0, config.le_noise, (n, len(years)))
    growth_shocks = rng.normal(0.0, config.growth_noise, (n, len(years) - 1))
    population = np.exp(rng.normal(9.0, 1.0, n))

    records: dict[tuple[str, str, int], float] = {}
    for i, country in enumerate(countries):
        for share, disease in zip(config.disease_shares, diseases):
            cutover = config.intervention_schedule.intervention_year[disease]
            for year in years:
                level = share * initial_mortality[i]
                if year > cutover:
                    level *= 0.2  # interventions shrink actual mortality
                records[(country, disease, year)] = float(level)
    mortality_panel = DiseaseMortalityPanel(records)
    series = predicted_mortality(mortality_panel, config.intervention_schedule, years=years)

    le_trend = {year: 0.04 * k for k, year in enumerate(years)}
    gdp_trend = 0.2
    observations: dict[tuple[str, int], dict[str, float]] = {}
    for i, country in enumerate(countries):
        log_le_path = []
        for k, year in enumerate(years):
            m_pred = series.values[(country, year)]
            log_le = (np.log(45.0) + le_trend[year] + country_effect_le[i]
                      + config.gamma_iv * m_pred + le_shocks[i, k])
            log_le_path.append(log_le)
        log_gdppc_path = [loggdp0[i] + country_effect_gdp[i]]
        for k in range(1, len(years)):
            growth = (config.true_alpha * (log_le_path[k] - log_le_path[k - 1])
                      + config.rho_violation * initial_mortality[i]
                      + gdp_trend + growth_shocks[i, k - 1])
            log_gdppc_path.append(log_gdppc_path[-1] + growth)
        for k, year in enumerate(years):
            pop = population[i] * np.exp(0.02 * k)
            observations[(country, year)] = {
                "log_le": float(log_le_path[k]),
                "le": float(np.exp(log_le_path[k])),
                "log_gdppc": float(log_gdppc_path[k]),
                "gdppc": float(np.exp(log_gdppc_path[k])),
                "log_population": float(np.log(pop)),
                "population": float(pop),
                "log_gdp": float(log_gdppc_path[k] + np.log(pop)),
                "predicted_mortality": float(series.values[(country, year)]),
            }
    meta = {country: CountryMeta(group="base") for country in countries}
    panel = CountryYearPanel(observations, tuple(years), meta)
    return DgpDraw(panel, mortality_panel, truncated)
