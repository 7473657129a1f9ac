"""Variable transforms over country-year panels.

Long differences, start-denominator growth rates, lags on an evenly spaced
year grid, year-dummy interactions, and the frequency-weight row expansion
used as a test oracle for weighted estimation. All functions are pure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DataError, SpecificationError
from .panel import CountryYearPanel

TRANSFORM_KINDS = ("levels_panel", "long_difference", "growth_rate", "lag", "year_interaction")


@dataclass(frozen=True)
class TransformKind:
    """How a regression's estimation dataset is built from the panel.

    levels_panel keeps (country, year) rows; ``years`` selects an explicit
    subset of the grid (the two-year "1940 & 1980" layouts), otherwise
    start/end bound an inclusive range. long_difference and growth_rate
    collapse to one row per country between start_year and end_year;
    growth_rate with decadal=True instead keeps one row per consecutive
    grid step. lag and year_interaction are levels panels with the named
    derived columns added.
    """

    kind: str = "levels_panel"
    start_year: int | None = None
    end_year: int | None = None
    lag_periods: int | None = None
    base_variable: str | None = None
    years: tuple[int, ...] | None = None
    decadal: bool = False

    def __post_init__(self):
        if self.kind not in TRANSFORM_KINDS:
            raise SpecificationError(f"unknown transform {self.kind!r}; expected one of {TRANSFORM_KINDS}")
        if self.start_year is not None and self.end_year is not None and self.start_year >= self.end_year:
            raise SpecificationError(f"start_year {self.start_year} must precede end_year {self.end_year}")
        if self.lag_periods is not None and self.lag_periods < 1:
            raise SpecificationError("lag_periods must be >= 1")
        if self.kind in ("long_difference", "growth_rate") and (self.start_year is None or self.end_year is None):
            raise SpecificationError(f"{self.kind} needs start_year and end_year")
        if self.kind == "lag" and self.lag_periods is None:
            raise SpecificationError("lag transform needs lag_periods")
        if self.kind == "year_interaction" and not self.base_variable:
            raise SpecificationError("year_interaction transform needs base_variable")


@dataclass
class CrossSection:
    """Per-country values plus the bookkeeping for dropped countries."""

    values: dict[str, float]
    omitted: list[str] = field(default_factory=list)
    flagged: dict[str, str] = field(default_factory=dict)


def _require_variable(panel: CountryYearPanel, variable: str) -> None:
    if not panel.has_variable(variable):
        raise DataError(f"unknown variable {variable!r}")


def _require_years(panel: CountryYearPanel, *years: int) -> None:
    for year in years:
        if year not in panel.year_grid:
            raise DataError(f"year {year} not in year grid {panel.year_grid}")


def long_difference(panel: CountryYearPanel, variable: str, start_year: int, end_year: int) -> CrossSection:
    """value(end_year) - value(start_year) per country.

    Countries missing either endpoint are omitted and listed in the report.
    """
    _require_variable(panel, variable)
    _require_years(panel, start_year, end_year)
    result = CrossSection({})
    for country in panel.countries:
        a = panel.value(country, start_year, variable)
        b = panel.value(country, end_year, variable)
        if a is None or b is None:
            result.omitted.append(country)
            continue
        result.values[country] = b - a
    return result


def growth_rate(panel: CountryYearPanel, variable: str, from_year: int, to_year: int) -> CrossSection:
    """(value(to) - value(from)) / value(from) per country.

    The denominator is the start-of-period level. A zero start excludes the
    country with a per-country error entry; a negative start is allowed but
    flagged.
    """
    _require_variable(panel, variable)
    _require_years(panel, from_year, to_year)
    result = CrossSection({})
    for country in panel.countries:
        a = panel.value(country, from_year, variable)
        b = panel.value(country, to_year, variable)
        if a is None or b is None:
            result.omitted.append(country)
            continue
        if a == 0.0:
            result.flagged[country] = f"zero {variable} at {from_year}; growth undefined"
            continue
        if a < 0.0:
            result.flagged[country] = f"negative {variable} at {from_year}"
        result.values[country] = (b - a) / a
    return result


def lag_variable(panel: CountryYearPanel, variable: str, periods: int) -> CountryYearPanel:
    """Add column ``{variable}_lag{periods}`` shifted back on the year grid.

    Requires an evenly spaced grid; cells whose lagged year is absent stay
    missing.
    """
    if periods < 1:
        raise SpecificationError("lag periods must be >= 1")
    _require_variable(panel, variable)
    step = panel.grid_step()
    name = f"{variable}_lag{periods}"
    new_columns: dict[tuple[str, int], dict[str, float]] = {}
    for (country, year) in panel.observations:
        lagged = panel.value(country, year - periods * step, variable)
        if lagged is not None:
            new_columns[(country, year)] = {name: lagged}
    return panel.with_variables(new_columns)


def interact_with_year_dummies(panel: CountryYearPanel, base_variable: str) -> CountryYearPanel:
    """Add ``{base}_x{year}`` = base * 1[t = year] for every non-reference year.

    The earliest grid year is the omitted reference.
    """
    _require_variable(panel, base_variable)
    interaction_years = panel.year_grid[1:]
    new_columns: dict[tuple[str, int], dict[str, float]] = {}
    for (country, year), record in panel.observations.items():
        if base_variable not in record:
            continue
        base = record[base_variable]
        cols = {f"{base_variable}_x{y}": (base if year == y else 0.0) for y in interaction_years}
        new_columns[(country, year)] = cols
    return panel.with_variables(new_columns)


def interaction_names(panel: CountryYearPanel, base_variable: str) -> list[str]:
    return [f"{base_variable}_x{y}" for y in panel.year_grid[1:]]


def expand_frequency_weights(panel: CountryYearPanel, weight_variable: str) -> CountryYearPanel:
    """Replicate each observation round(weight) times.

    Test oracle for frequency-weighted estimation: a weighted fit must equal
    the fit on the expanded panel. Replicas get synthetic country ids
    ``{country}#{k}`` so the (country, year) keys stay unique; grouping by
    original country is recovered from the ``#`` prefix.
    """
    _require_variable(panel, weight_variable)
    observations: dict[tuple[str, int], dict[str, float]] = {}
    for (country, year), record in sorted(panel.observations.items()):
        if weight_variable not in record:
            raise DataError(f"({country}, {year}) has no {weight_variable!r} value")
        weight = record[weight_variable]
        if weight <= 0:
            raise DataError(f"nonpositive weight {weight} at ({country}, {year})")
        copies = int(round(weight))
        if copies < 1:
            raise DataError(f"weight {weight} at ({country}, {year}) rounds to zero")
        if copies == 1:
            observations[(country, year)] = dict(record)
            continue
        for k in range(copies):
            observations[(f"{country}#{k}", year)] = dict(record)
    return CountryYearPanel(observations, panel.year_grid, panel.country_meta)


def expansion_base_country(country_id: str) -> str:
    """Original country id behind an expand_frequency_weights replica."""
    return country_id.split("#", 1)[0]
