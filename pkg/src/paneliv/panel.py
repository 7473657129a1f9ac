"""Country-year panel data model, CSV ingestion, and sample filtering.

The canonical layout is long format: one observation per (country, year)
pair, each carrying a mapping from variable name to float. Missing cells
are simply absent from the mapping; no operation imputes. Panels are
immutable by convention after construction.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DataError, SpecificationError

GROUPS = ("base", "low_middle", "rich", "excluded")

FILTER_MODES = ("all", "base_sample", "low_middle_income", "explicit_list")


@dataclass(frozen=True)
class CountryMeta:
    group: str = "base"
    name: str = ""


@dataclass(frozen=True)
class CountryYearPanel:
    """Long-format country x year panel.

    observations maps (country_id, year) -> {variable: value}. year_grid is
    the sorted tuple of distinct years. country_meta carries group tags used
    by sample filters.
    """

    observations: dict[tuple[str, int], dict[str, float]]
    year_grid: tuple[int, ...]
    country_meta: dict[str, CountryMeta] = field(default_factory=dict)

    def __post_init__(self):
        for (country, year) in self.observations:
            if year not in self.year_grid:
                raise DataError(f"observation year {year} not in year grid {self.year_grid}")

    @property
    def countries(self) -> list[str]:
        seen = {}
        for country, _ in self.observations:
            seen[country] = None
        return sorted(seen)

    @property
    def n_observations(self) -> int:
        return len(self.observations)

    def variables(self) -> list[str]:
        names = set()
        for record in self.observations.values():
            names.update(record)
        return sorted(names)

    def has_variable(self, name: str) -> bool:
        return any(name in record for record in self.observations.values())

    def value(self, country: str, year: int, variable: str) -> float | None:
        record = self.observations.get((country, year))
        if record is None:
            return None
        return record.get(variable)

    def grid_step(self) -> int:
        """Spacing of the year grid; raises if the grid is uneven."""
        if len(self.year_grid) < 2:
            raise DataError("year grid has fewer than two years; spacing undefined")
        steps = {b - a for a, b in zip(self.year_grid, self.year_grid[1:])}
        if len(steps) != 1:
            raise DataError(f"year grid {self.year_grid} is unevenly spaced")
        return steps.pop()

    def with_variables(self, new_columns: dict[tuple[str, int], dict[str, float]]) -> "CountryYearPanel":
        """Return a copy with extra variables merged into matching observations.

        Keys absent from the panel are ignored; existing variable names may
        not be overwritten.
        """
        merged = {}
        for key, record in self.observations.items():
            extra = new_columns.get(key, {})
            clash = set(extra) & set(record)
            if clash:
                raise DataError(f"variables already present: {sorted(clash)}")
            merged[key] = {**record, **extra}
        return CountryYearPanel(merged, self.year_grid, self.country_meta)


@dataclass(frozen=True)
class SampleFilter:
    """Country selection rule: a group-based mode or an explicit list."""

    mode: str = "all"
    countries: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.mode not in FILTER_MODES:
            raise SpecificationError(f"unknown sample mode {self.mode!r}; expected one of {FILTER_MODES}")
        if self.mode == "explicit_list":
            if not self.countries:
                raise SpecificationError("explicit_list filter requires a non-empty country list")
        elif self.countries:
            raise SpecificationError(f"mode {self.mode!r} does not take a country list")


def ingest_country_year_csv(path: str | Path, schema: dict[str, str] | None = None,
                            groups_path: str | Path | None = None) -> CountryYearPanel:
    """Read a long-format CSV into a panel.

    ``schema`` maps the roles "country" and "year" to column names (defaults
    to those literal names). Every other column is parsed as a real-valued
    variable; empty cells become missing. Group tags, if any, come from a
    second CSV with columns country,group.
    """
    schema = schema or {}
    country_col = schema.get("country", "country")
    year_col = schema.get("year", "year")
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")

    observations: dict[tuple[str, int], dict[str, float]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        for required in (country_col, year_col):
            if required not in header:
                raise DataError(f"{path}: missing mandatory column {required!r}")
        ci = header.index(country_col)
        yi = header.index(year_col)
        var_cols = [(j, name) for j, name in enumerate(header) if j not in (ci, yi)]
        for name in (n for _, n in var_cols):
            if not name:
                raise DataError(f"{path}: empty variable name in header")

        for rownum, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            country = row[ci].strip()
            if not country:
                raise DataError(f"{path}: row {rownum}: empty country id")
            try:
                year = int(row[yi].strip())
            except ValueError:
                raise DataError(f"{path}: row {rownum}: year {row[yi]!r} is not an integer") from None
            key = (country, year)
            if key in observations:
                raise DataError(f"{path}: duplicate observation for ({country}, {year})")
            record: dict[str, float] = {}
            for j, name in var_cols:
                cell = row[j].strip() if j < len(row) else ""
                if not cell:
                    continue
                try:
                    record[name] = float(cell)
                except ValueError:
                    raise DataError(
                        f"{path}: row {rownum}, column {name!r}: cannot parse {cell!r} as a number"
                    ) from None
            observations[key] = record

    year_grid = tuple(sorted({year for _, year in observations}))
    meta = read_groups_csv(groups_path) if groups_path else {}
    return CountryYearPanel(observations, year_grid, meta)


def read_groups_csv(path: str | Path) -> dict[str, CountryMeta]:
    """Read country group tags from a CSV with columns country,group."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    meta: dict[str, CountryMeta] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "country" not in reader.fieldnames or "group" not in reader.fieldnames:
            raise DataError(f"{path}: groups file needs columns country,group")
        for rownum, row in enumerate(reader, start=2):
            country = (row["country"] or "").strip()
            group = (row["group"] or "").strip()
            if group not in GROUPS:
                raise DataError(f"{path}: row {rownum}: unknown group {group!r}; expected one of {GROUPS}")
            name = (row.get("name") or "").strip()
            meta[country] = CountryMeta(group=group, name=name)
    return meta


def export_country_year_csv(panel: CountryYearPanel, path: str | Path) -> None:
    """Write the panel back out, sorted by (country, year); inverse of ingest."""
    variables = panel.variables()
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["country", "year"] + variables)
        for (country, year) in sorted(panel.observations):
            record = panel.observations[(country, year)]
            row = [country, str(year)]
            row += [repr(record[v]) if v in record else "" for v in variables]
            writer.writerow(row)


def filter_sample(panel: CountryYearPanel, sample: SampleFilter) -> CountryYearPanel:
    """Return the sub-panel of countries selected by ``sample``.

    The year grid is preserved even if some years lose all observations.
    Selecting zero countries is an error.
    """
    if sample.mode == "all":
        keep = set(panel.countries)
    elif sample.mode == "explicit_list":
        keep = set(sample.countries) & set(panel.countries)
    else:
        group = {"base_sample": "base", "low_middle_income": "low_middle"}[sample.mode]
        if not panel.country_meta:
            raise SpecificationError(f"sample mode {sample.mode!r} needs country group tags (groups CSV)")
        if sample.mode == "base_sample":
            # Base sample = everything not excluded; low/middle is its subset.
            keep = {c for c in panel.countries
                    if panel.country_meta.get(c, CountryMeta()).group != "excluded"}
        else:
            keep = {c for c in panel.countries
                    if panel.country_meta.get(c, CountryMeta()).group == group}
    if not keep:
        raise SpecificationError(f"sample filter {sample.mode!r} selects no countries")
    observations = {key: record for key, record in panel.observations.items() if key[0] in keep}
    return CountryYearPanel(observations, panel.year_grid, panel.country_meta)
