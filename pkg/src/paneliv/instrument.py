"""Predicted-mortality instrument construction.

The instrument sums, for each country and year, the disease-level mortality
of diseases that have not yet seen a global intervention; once a disease is
intervened its term switches to the frontier rate (zero by default). The
boundary convention is strict: a disease still contributes in its
intervention year and drops out the year after.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import DataError, SpecificationError
from .panel import CountryYearPanel

DEFAULT_SCHEDULE_RESOURCE = "interventions.csv"


@dataclass(frozen=True)
class DiseaseMortalityPanel:
    """Mortality records keyed by (country, disease, year), deaths per 100 per year."""

    records: dict[tuple[str, str, int], float]

    def __post_init__(self):
        for key, rate in self.records.items():
            if rate < 0:
                raise DataError(f"negative mortality {rate} at {key}")

    @property
    def countries(self) -> list[str]:
        return sorted({c for c, _, _ in self.records})

    @property
    def diseases(self) -> list[str]:
        return sorted({d for _, d, _ in self.records})

    @property
    def years(self) -> list[int]:
        return sorted({y for _, _, y in self.records})


@dataclass(frozen=True)
class InterventionSchedule:
    """Per-disease global intervention years plus the frontier mortality rate."""

    intervention_year: dict[str, int]
    frontier_mortality: float = 0.0

    def __post_init__(self):
        if self.frontier_mortality < 0:
            raise DataError(f"frontier mortality must be >= 0, got {self.frontier_mortality}")

    @property
    def diseases(self) -> list[str]:
        return sorted(self.intervention_year)

    def require_covers(self, diseases) -> None:
        missing = sorted(set(diseases) - set(self.intervention_year))
        if missing:
            raise DataError(f"schedule has no intervention year for: {', '.join(missing)}")


@dataclass(frozen=True)
class PredictedMortalitySeries:
    """Instrument values keyed by (country, year), plus per-cell disease coverage.

    coverage maps each key to (observed, expected): how many not-yet-intervened
    diseases had a mortality record versus how many were expected to.
    """

    values: dict[tuple[str, int], float]
    coverage: dict[tuple[str, int], tuple[int, int]] = field(default_factory=dict)

    @property
    def countries(self) -> list[str]:
        return sorted({c for c, _ in self.values})

    @property
    def years(self) -> list[int]:
        return sorted({y for _, y in self.values})


def intervention_indicator(schedule: InterventionSchedule, disease: str, year: int) -> int:
    """1 iff ``year`` is strictly after the disease's intervention year."""
    if disease not in schedule.intervention_year:
        raise DataError(f"unknown disease {disease!r}")
    return 1 if year > schedule.intervention_year[disease] else 0


def predicted_mortality(mortality: DiseaseMortalityPanel, schedule: InterventionSchedule,
                        years: list[int] | None = None) -> PredictedMortalitySeries:
    """Sum actual mortality over not-yet-intervened diseases per country-year.

    With a nonzero frontier rate, intervened diseases contribute the frontier
    instead of dropping out. Missing (country, disease, year) cells contribute
    zero and are tallied in the coverage report. ``years`` defaults to the
    years present in the mortality data; pass the panel's grid to extend the
    series over post-intervention years.
    """
    schedule.require_covers(mortality.diseases)
    diseases = mortality.diseases
    countries = mortality.countries
    if years is None:
        years = mortality.years
    values: dict[tuple[str, int], float] = {}
    coverage: dict[tuple[str, int], tuple[int, int]] = {}
    for country in countries:
        for year in sorted(years):
            total = 0.0
            expected = 0
            observed = 0
            for disease in diseases:
                if intervention_indicator(schedule, disease, year):
                    total += schedule.frontier_mortality
                    continue
                expected += 1
                rate = mortality.records.get((country, disease, year))
                if rate is not None:
                    observed += 1
                    total += rate
            values[(country, year)] = total
            coverage[(country, year)] = (observed, expected)
    return PredictedMortalitySeries(values, coverage)


def predicted_mortality_change(series: PredictedMortalitySeries, from_year: int, to_year: int) -> dict[str, float]:
    """value(to_year) - value(from_year) per country."""
    for year in (from_year, to_year):
        if year not in series.years:
            raise DataError(f"year {year} absent from predicted-mortality series")
    changes = {}
    for country in series.countries:
        a = series.values.get((country, from_year))
        b = series.values.get((country, to_year))
        if a is None or b is None:
            continue
        changes[country] = b - a
    return changes


@dataclass(frozen=True)
class SummaryRow:
    label: str
    count: int
    mean: float
    sd: float
    minimum: float
    maximum: float
    degenerate: bool = False


def instrument_summary(series: PredictedMortalitySeries) -> list[SummaryRow]:
    """Per-year count/mean/sd/min/max plus a pooled Total row.

    Sample (n-1) standard deviation; a single-observation year reports sd 0
    with the degeneracy flag set.
    """
    if not series.values:
        raise DataError("empty predicted-mortality series")

    def row(label: str, data: list[float]) -> SummaryRow:
        n = len(data)
        mean = sum(data) / n
        if n > 1:
            sd = math.sqrt(sum((x - mean) ** 2 for x in data) / (n - 1))
            degenerate = False
        else:
            sd = 0.0
            degenerate = True
        return SummaryRow(label, n, mean, sd, min(data), max(data), degenerate)

    rows = []
    pooled: list[float] = []
    for year in series.years:
        data = [v for (c, y), v in series.values.items() if y == year]
        pooled.extend(data)
        rows.append(row(str(year), data))
    rows.append(row("Total", pooled))
    return rows


def zeroth_stage_dataset(mortality: DiseaseMortalityPanel, schedule: InterventionSchedule,
                         lags: int = 0) -> CountryYearPanel:
    """Country-disease-year rows for regressing actual mortality on interventions.

    Returns a CountryYearPanel whose unit ids are "country|disease" pairs, so
    the pair works directly as the fixed-effect and clustering unit. Columns:
    mortality, intervention, and intervention_lag1..lagK. Lagged indicators
    come from the schedule itself (the intervention path is deterministic),
    so they exist even at the first grid year.
    """
    if lags < 0:
        raise SpecificationError("lags must be >= 0")
    schedule.require_covers(mortality.diseases)
    years = mortality.years
    if not years:
        raise DataError("mortality panel has no observations")
    if len(years) > 1:
        steps = {b - a for a, b in zip(years, years[1:])}
        step = min(steps)
        if lags > 0 and len(steps) != 1:
            raise DataError(f"mortality years {years} unevenly spaced; lagged interventions undefined")
    else:
        step = 0

    observations: dict[tuple[str, int], dict[str, float]] = {}
    for (country, disease, year), rate in sorted(mortality.records.items()):
        record = {
            "mortality": rate,
            "intervention": float(intervention_indicator(schedule, disease, year)),
        }
        for k in range(1, lags + 1):
            record[f"intervention_lag{k}"] = float(
                intervention_indicator(schedule, disease, year - k * step)
            )
        observations[(f"{country}|{disease}", year)] = record
    return CountryYearPanel(observations, tuple(years), {})


def read_mortality_csv(path: str | Path) -> DiseaseMortalityPanel:
    """Read country,disease,year,mortality rows."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    records: dict[tuple[str, str, int], float] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        needed = {"country", "disease", "year", "mortality"}
        if reader.fieldnames is None or not needed <= set(reader.fieldnames):
            raise DataError(f"{path}: mortality file needs columns {sorted(needed)}")
        for rownum, row in enumerate(reader, start=2):
            try:
                key = (row["country"].strip(), row["disease"].strip(), int(row["year"]))
                rate = float(row["mortality"])
            except (ValueError, AttributeError):
                raise DataError(f"{path}: row {rownum}: cannot parse mortality record") from None
            if key in records:
                raise DataError(f"{path}: duplicate mortality record for {key}")
            records[key] = rate
    return DiseaseMortalityPanel(records)


def read_schedule_csv(path: str | Path | None = None, frontier_mortality: float = 0.0) -> InterventionSchedule:
    """Read disease,intervention_year rows; None loads the shipped default schedule."""
    if path is None:
        ref = resources.files("paneliv.data").joinpath(DEFAULT_SCHEDULE_RESOURCE)
        text = ref.read_text(encoding="utf-8")
        return _parse_schedule(text.splitlines(), "<default schedule>", frontier_mortality)
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        return _parse_schedule(fh, str(path), frontier_mortality)


def _parse_schedule(lines, source: str, frontier_mortality: float) -> InterventionSchedule:
    reader = csv.DictReader(lines)
    if reader.fieldnames is None or not {"disease", "intervention_year"} <= set(reader.fieldnames):
        raise DataError(f"{source}: schedule needs columns disease,intervention_year")
    table: dict[str, int] = {}
    for rownum, row in enumerate(reader, start=2):
        disease = (row["disease"] or "").strip()
        try:
            year = int(row["intervention_year"])
        except (TypeError, ValueError):
            raise DataError(f"{source}: row {rownum}: bad intervention year") from None
        if not disease:
            raise DataError(f"{source}: row {rownum}: empty disease name")
        if disease in table:
            raise DataError(f"{source}: duplicate schedule entry for {disease!r}")
        table[disease] = year
    return InterventionSchedule(table, frontier_mortality)


def write_series_csv(series: PredictedMortalitySeries, path: str | Path) -> None:
    """Export as country,year,predicted_mortality sorted by (country, year)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["country", "year", "predicted_mortality"])
        for (country, year) in sorted(series.values):
            writer.writerow([country, str(year), repr(series.values[(country, year)])])
