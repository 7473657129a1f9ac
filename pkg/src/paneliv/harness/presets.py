"""Named replication presets, one per published table layout.

Each preset pins the sample, years, transform, weighting, and covariance
stated in the corresponding table note, lists the data columns it needs,
and renders in that table's shape. Observation counts follow the supplied
data; they are not forced to match any published N.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from ..diagnostics import weak_iv_report
from ..errors import DataError, PanelIvError, SpecificationError
from ..instrument import instrument_summary, predicted_mortality, read_mortality_csv, read_schedule_csv, zeroth_stage_dataset
from ..panel import CountryYearPanel, SampleFilter
from ..regress import RegressionSpec, VcovKind, WeightSpec, fit_ols, fit_tsls
from ..transforms import TransformKind
from .config import DataPaths
from .render import (
    ColumnResult,
    RenderedRow,
    RenderedTable,
    TableLayout,
    format_statistic,
    render_table,
    stack_sections,
)
from .runner import INSTRUMENT_VARIABLE, load_panel_bundle

ROBUST = VcovKind("robust_hc1")
CLUSTER = VcovKind("cluster", "country")
BASE = SampleFilter("base_sample")
LOW_MIDDLE = SampleFilter("low_middle_income")
ALL = SampleFilter("all")

STARS_NOTE = "*p<.1 **p<.05 ***p<.01"


@dataclass
class Preset:
    table_id: str
    title: str
    requires: tuple[str, ...]
    needs_mortality: bool
    build: callable
    notes: tuple[str, ...] = ()


@dataclass
class PresetColumn:
    label: str
    spec: RegressionSpec
    want_weak_iv: bool = False


def data_paths_for_dir(data_dir: str | Path) -> DataPaths:
    """Conventional file names inside a data directory.

    interventions.csv falls back to the shipped default schedule; groups.csv
    is optional (group-based samples then fail with a clear error).
    """
    data_dir = Path(data_dir)
    paths = DataPaths(country_year=data_dir / "country_year.csv")
    if (data_dir / "groups.csv").exists():
        paths.groups = data_dir / "groups.csv"
    if (data_dir / "disease_mortality.csv").exists():
        paths.disease_mortality = data_dir / "disease_mortality.csv"
    if (data_dir / "interventions.csv").exists():
        paths.interventions = data_dir / "interventions.csv"
    return paths


def _levels(*years: int) -> TransformKind:
    return TransformKind("levels_panel", years=tuple(years))


def _levels_range(start: int, end: int) -> TransformKind:
    return TransformKind("levels_panel", start_year=start, end_year=end)


def _longdiff(start: int, end: int) -> TransformKind:
    return TransformKind("long_difference", start_year=start, end_year=end)


def _growth(start: int, end: int, decadal: bool = False) -> TransformKind:
    return TransformKind("growth_rate", start_year=start, end_year=end, decadal=decadal)


def _run_columns(panel: CountryYearPanel, columns: list[PresetColumn]) -> list[ColumnResult]:
    results = []
    for column in columns:
        result = ColumnResult(column.label)
        try:
            if column.spec.is_iv:
                result.fit = fit_tsls(column.spec, panel)
                if column.want_weak_iv:
                    result.weak_iv = weak_iv_report(column.spec, panel)
            else:
                result.fit = fit_ols(column.spec, panel)
        except PanelIvError as exc:
            result.error = str(exc)
        results.append(result)
    return results


def _table_1(panel: CountryYearPanel) -> RenderedTable:
    panels = [
        ("A. Log population", "log_population"),
        ("B. Log number of births", "log_births"),
        ("C. Percentage of Population under Age 20", "pct_under20"),
    ]
    columns = [
        ("Raw Sample 1960 & 2000", ALL, _levels(1960, 2000)),
        ("Main Sample 1940 & 1980", BASE, _levels(1940, 1980)),
        ("Developing Countries 1940 & 1980", LOW_MIDDLE, _levels(1940, 1980)),
    ]
    layout = TableLayout(coefficients=("log_le",), labels={"log_le": "Log Life Expectancy"},
                         stats=("n_observations", "n_countries", "r_squared"))
    sections = []
    for heading, dependent in panels:
        cols = [
            PresetColumn(label, RegressionSpec(
                dependent=dependent, exogenous=("log_le",),
                fixed_effects={"country", "year"}, vcov=ROBUST,
                sample=sample, transform=transform))
            for label, sample, transform in columns
        ]
        sections.append((heading, render_table(_run_columns(panel, cols), layout)))
    notes = ["Note: OLS with country and year fixed effects; robust standard errors in parentheses.",
             STARS_NOTE]
    table = stack_sections("Table 1. Log Population, Log Total Births and Population under 20",
                           [c[0] for c in columns], sections)
    table.footnotes = notes
    return table


def _table_2(data: DataPaths) -> RenderedTable:
    if data.disease_mortality is None:
        raise DataError("table T2 needs disease_mortality.csv")
    mortality = read_mortality_csv(data.disease_mortality)
    schedule = read_schedule_csv(data.interventions, data.frontier_mortality)
    stage0 = zeroth_stage_dataset(mortality, schedule, lags=1)
    pair_cluster = VcovKind("cluster", "country")  # unit ids are country|disease pairs
    columns = [
        PresetColumn("OLS", RegressionSpec(
            dependent="mortality", exogenous=("intervention",),
            fixed_effects={"country", "year"}, vcov=pair_cluster)),
        PresetColumn("OLS with Lags", RegressionSpec(
            dependent="mortality", exogenous=("intervention", "intervention_lag1"),
            fixed_effects={"country", "year"}, vcov=pair_cluster)),
    ]
    layout = TableLayout(
        labels={"intervention": "Intervention", "intervention_lag1": "Lagged Intervention"},
        stats=("r_squared", "n_observations"),
        footnotes=("Note: fixed effects for country-disease pairs and years; standard errors "
                   "clustered by country-disease pair.", STARS_NOTE))
    return render_table(_run_columns(stage0, columns), layout,
                        "Table 2. Effect of Interventions on Disease Mortality")


def _table_3(panel: CountryYearPanel) -> RenderedTable:
    columns = [
        PresetColumn("Base Sample", RegressionSpec(
            dependent="log_le", exogenous=(INSTRUMENT_VARIABLE,),
            fixed_effects={"country", "year"}, vcov=CLUSTER,
            sample=BASE, transform=_levels(1940, 1980))),
        PresetColumn("Low- & Middle-Income Countries", RegressionSpec(
            dependent="log_le", exogenous=(INSTRUMENT_VARIABLE,),
            fixed_effects={"country", "year"}, vcov=CLUSTER,
            sample=LOW_MIDDLE, transform=_levels(1940, 1980))),
    ]
    layout = TableLayout(
        coefficients=(INSTRUMENT_VARIABLE,),
        labels={INSTRUMENT_VARIABLE: "Predicted mortality"},
        stats=("r_squared", "n_observations", "n_countries"),
        footnotes=("Note: OLS with country and year fixed effects; standard errors "
                   "clustered by country.", STARS_NOTE))
    return render_table(_run_columns(panel, columns), layout,
                        "Table 3. First-Stage Estimates: Predicted Mortality and Log Life Expectancy")


def _table_4(panel: CountryYearPanel) -> RenderedTable:
    layout = TableLayout(coefficients=("log_le",), labels={"log_le": "Log Life Expectancy"},
                         stats=("n_countries", "r_squared"))
    sections = []
    for heading, dependent in (("A. Log GDP", "log_gdp"), ("B. Log GDP per capita", "log_gdppc")):
        cols = [
            PresetColumn(label, RegressionSpec(
                dependent=dependent, endogenous=("log_le",), instruments=(INSTRUMENT_VARIABLE,),
                fixed_effects={"country", "year"}, vcov=ROBUST,
                sample=sample, transform=_levels(1940, 1980)))
            for label, sample in (("Base Sample", BASE),
                                  ("Low- and Middle-Income Countries Only", LOW_MIDDLE))
        ]
        sections.append((heading, render_table(_run_columns(panel, cols), layout)))
    table = stack_sections("Table 4. Effect of Life Expectancy on GDP and per capita GDP: 2SLS",
                           ["Base Sample", "Low- and Middle-Income Countries Only"], sections)
    table.footnotes = ["Note: 2SLS with country and year fixed effects, instrumented by predicted "
                       "mortality; robust standard errors in parentheses.", STARS_NOTE]
    return table


def _table_5(panel: CountryYearPanel) -> RenderedTable:
    transform = _longdiff(1940, 2000)
    base = dict(sample=BASE, transform=transform, include_intercept=True, vcov=ROBUST)
    columns = [
        PresetColumn("OLS (1)", RegressionSpec(
            dependent="log_gdppc", exogenous=("log_le",), **base)),
        PresetColumn("IV (2)", RegressionSpec(
            dependent="log_gdppc", endogenous=("log_le",),
            instruments=(INSTRUMENT_VARIABLE,), **base), want_weak_iv=True),
        PresetColumn("OLS (3)", RegressionSpec(
            dependent="log_gdppc", exogenous=("log_le", "log_le@1940"), **base)),
        PresetColumn("IV (4)", RegressionSpec(
            dependent="log_gdppc", endogenous=("log_le",), exogenous=("log_le@1940",),
            instruments=(INSTRUMENT_VARIABLE,), **base), want_weak_iv=True),
    ]
    layout = TableLayout(
        labels={"log_le": "Growth in life expectancy 1940-2000",
                "log_le@1940": "Log Life Expectancy 1940",
                "const": "Constant"},
        stats=("n_observations", "r_squared", "cragg_donald", "critical_value_10"),
        coef_precision=2,
        footnotes=("Note: long differences 1940-2000; IV columns instrumented with the change in "
                   "predicted mortality; robust standard errors in parentheses.", STARS_NOTE))
    return render_table(_run_columns(panel, columns), layout,
                        "Table 5. Effect of Growth in Life Expectancy on Growth in GDP per capita")


def _table_6(panel: CountryYearPanel) -> RenderedTable:
    transform = _levels_range(1940, 2000)
    le_lags = tuple(f"yearx(log_le@{y})" for y in (1900, 1910, 1920, 1930))
    gdp_lags = tuple(f"yearx(log_gdppc@{y})" for y in (1900, 1910, 1920, 1930))
    common = dict(endogenous=("log_le",), instruments=(INSTRUMENT_VARIABLE,),
                  fixed_effects={"country", "year"}, vcov=ROBUST, sample=BASE,
                  transform=transform, auto_drop_collinear=True)
    columns = [
        PresetColumn("Baseline Specification (1)",
                     RegressionSpec(dependent="log_gdppc", **common)),
        PresetColumn("Adding Lags of Life expectancy (2)",
                     RegressionSpec(dependent="log_gdppc", exogenous=le_lags, **common)),
        PresetColumn("Adding Lags of GDP per capita (3)",
                     RegressionSpec(dependent="log_gdppc", exogenous=gdp_lags, **common)),
    ]
    layout = TableLayout(
        coefficients=("log_le",), labels={"log_le": "Life expectancy"},
        stats=("n_countries", "n_observations", "r_squared"), coef_precision=3,
        footnotes=("Note: decadal panel 1940-2000; 2SLS with country and year fixed effects; "
                   "columns 2-3 add pre-1940 levels interacted with year dummies; robust "
                   "standard errors in parentheses.", STARS_NOTE))
    return render_table(_run_columns(panel, columns), layout,
                        "Table 6. Effect of Life Expectancy on Log GDP per capita, "
                        "controlling Initial Health: 2SLS")


def _table_7(panel: CountryYearPanel) -> RenderedTable:
    combos = [
        ("Base Sample 1940 & 1980", BASE, _levels(1940, 1980)),
        ("Base Sample 1940 & 2000", BASE, _levels(1940, 2000)),
        ("Low- and Middle-Income 1940 & 1980", LOW_MIDDLE, _levels(1940, 1980)),
        ("Low- and Middle-Income 1940 & 2000", LOW_MIDDLE, _levels(1940, 2000)),
    ]
    columns = [
        PresetColumn(label, RegressionSpec(
            dependent="log_gdppc", endogenous=("log_le",), instruments=(INSTRUMENT_VARIABLE,),
            fixed_effects={"country", "year"}, weight=WeightSpec("population"),
            vcov=VcovKind("classical"), sample=sample, transform=transform))
        for label, sample, transform in combos
    ]
    layout = TableLayout(
        coefficients=("log_le",), labels={"log_le": "Log Life expectancy"},
        stats=("n_observations", "r_squared"), coef_precision=3,
        footnotes=("Note: 2SLS weighted by population (frequency weights; reported N is the "
                   "weight sum); standard errors in parentheses.", STARS_NOTE))
    return render_table(_run_columns(panel, columns), layout,
                        "Table 7. Effect of Log Life Expectancy on Log per capita GDP: "
                        "2SLS (Population Weighted)")


def _growth_columns(weighted: bool) -> list[PresetColumn]:
    weight = WeightSpec("population") if weighted else None
    combos = [
        ("Base Sample 1980", BASE, _growth(1940, 1980), True),
        ("Base Sample 1940-1980", BASE, _growth(1940, 1980, decadal=True), False),
        ("Low- and Middle-Income 1980", LOW_MIDDLE, _growth(1940, 1980), True),
        ("Low- and Middle-Income 1940-1980", LOW_MIDDLE, _growth(1940, 1980, decadal=True), False),
    ]
    columns = []
    for label, sample, transform, cross_section in combos:
        fe = frozenset() if cross_section else frozenset({"country"})
        columns.append(PresetColumn(label, RegressionSpec(
            dependent="gdppc", endogenous=("le",), instruments=(INSTRUMENT_VARIABLE,),
            fixed_effects=fe, include_intercept=cross_section, weight=weight,
            vcov=ROBUST, sample=sample, transform=transform), want_weak_iv=True))
    return columns


def _table_8(panel: CountryYearPanel) -> RenderedTable:
    columns = [c for c in _growth_columns(weighted=False) if "1980" == c.label.rsplit(" ", 1)[1]]
    layout = TableLayout(
        coefficients=("le",), labels={"le": "Life Expectancy Growth Rate"},
        stats=("n_observations", "r_squared", "cragg_donald", "critical_value_10"),
        coef_precision=3,
        footnotes=("Note: growth rates 1940-1980; instrumented with the change in predicted "
                   "mortality; robust standard errors in parentheses.", STARS_NOTE))
    return render_table(_run_columns(panel, columns), layout,
                        "Table 8. Effect of Growth Rate of Life Expectancy on Growth Rate of "
                        "per capita GDP: 2SLS")


def _table_9(panel: CountryYearPanel) -> RenderedTable:
    columns = [c for c in _growth_columns(weighted=False) if c.label.endswith("1940-1980")]
    layout = TableLayout(
        coefficients=("le",), labels={"le": "Life Expectancy Growth Rate"},
        stats=("n_observations", "r_squared", "cragg_donald", "critical_value_10"),
        coef_precision=3,
        footnotes=("Note: decadal growth rates with country fixed effects; instrumented with "
                   "the decadal change in predicted mortality; robust standard errors in "
                   "parentheses.", STARS_NOTE))
    return render_table(_run_columns(panel, columns), layout,
                        "Table 9. Effect of Growth Rate of Life Expectancy on Growth Rate of "
                        "per capita GDP: 2SLS, Decadal")


def _table_10(panel: CountryYearPanel) -> RenderedTable:
    columns = _growth_columns(weighted=True)
    for column in columns:
        column.label = column.label.replace("1980", "1980 Only").replace("1940-1980 Only", "1940 to 1980")
    layout = TableLayout(
        coefficients=("le",), labels={"le": "Life Expectancy Growth Rate"},
        stats=("n_observations", "r_squared", "cragg_donald"), coef_precision=3,
        footnotes=("Note: population-weighted 2SLS on growth rates; R-squared uses structural "
                   "residuals and may be negative; robust standard errors in parentheses.",
                   STARS_NOTE))
    return render_table(_run_columns(panel, columns), layout,
                        "Table 10. Change Rate of per capita GDP: 2SLS, Population Weighted")


def _table_11(data: DataPaths) -> RenderedTable:
    schedule = read_schedule_csv(data.interventions, data.frontier_mortality)
    rows = [RenderedRow(disease, [str(schedule.intervention_year[disease])])
            for disease in schedule.diseases]
    return RenderedTable("Table 11. Summary of Interventions", ["Intervention Time"], rows,
                         ["Note: a disease contributes to predicted mortality through its "
                          "intervention year and drops out afterwards."])


def _table_12(panel: CountryYearPanel, data: DataPaths) -> RenderedTable:
    if data.disease_mortality is None:
        raise DataError("table T12 needs disease_mortality.csv")
    mortality = read_mortality_csv(data.disease_mortality)
    schedule = read_schedule_csv(data.interventions, data.frontier_mortality)
    years = list(panel.year_grid) if panel is not None else None
    keep = None
    if panel is not None and panel.country_meta:
        keep = {c for c in panel.countries
                if panel.country_meta.get(c) and panel.country_meta[c].group != "excluded"}
        mortality_records = {k: v for k, v in mortality.records.items() if k[0] in keep}
        if mortality_records:
            mortality = type(mortality)(mortality_records)
    series = predicted_mortality(mortality, schedule, years=years)
    rows = []
    for row in instrument_summary(series):
        cells = [str(row.count)] + [format_statistic(v, 3)
                                    for v in (row.mean, row.sd, row.minimum, row.maximum)]
        rows.append(RenderedRow(row.label, cells))
    return RenderedTable(
        "Table 12. Predicted Mortality in Base Sample",
        ["Observations", "Mean", "Standard Deviation", "Minimum Value", "Maximum Value"],
        rows,
        ["Note: sample (n-1) standard deviation; single-observation years are flagged degenerate."])


def _table_13(panel: CountryYearPanel) -> RenderedTable:
    columns = [PresetColumn("Base Sample", RegressionSpec(
        dependent=f"log({INSTRUMENT_VARIABLE})", exogenous=("log_gdppc",),
        include_intercept=True, vcov=ROBUST, sample=BASE,
        transform=TransformKind("levels_panel", years=(1940,))))]
    layout = TableLayout(
        labels={"log_gdppc": "Log GDP per capita", "const": "Constant"},
        stats=("r_squared", "n_observations"), coef_precision=3,
        footnotes=("Note: cross-section of 1940 levels; the dependent variable is the log of "
                   "pre-intervention predicted mortality; robust standard errors in "
                   "parentheses.", STARS_NOTE))
    return render_table(_run_columns(panel, columns), layout,
                        "Table 13. Effect of Log GDP per capita on Log Pre-intervened Mortality")


def _table_14(panel: CountryYearPanel) -> RenderedTable:
    columns = [PresetColumn("Base Sample", RegressionSpec(
        dependent="gdppc", exogenous=(f"{INSTRUMENT_VARIABLE}@1940",),
        include_intercept=True, vcov=ROBUST, sample=ALL,
        transform=_growth(1940, 1950)))]
    layout = TableLayout(
        labels={f"{INSTRUMENT_VARIABLE}@1940": "Pre-intervened Mortality", "const": "Constant"},
        stats=("r_squared", "n_observations"), coef_precision=3,
        footnotes=("Note: GDP per capita growth rate 1940-1950 on 1940 predicted mortality; "
                   "robust standard errors in parentheses.", STARS_NOTE))
    return render_table(_run_columns(panel, columns), layout,
                        "Table 14. Effect of Pre-intervened Mortality on GDP per capita "
                        "growth rate between 1940 and 1950")


def _table_15(panel: CountryYearPanel) -> RenderedTable:
    columns = [
        PresetColumn(label, RegressionSpec(
            dependent="log_le", exogenous=(INSTRUMENT_VARIABLE,),
            fixed_effects={"country", "year"}, vcov=ROBUST, sample=ALL,
            transform=_levels_range(1940, end)))
        for label, end in (("1940-1950", 1950), ("1940-1980", 1980), ("1940-2000", 2000))
    ]
    layout = TableLayout(
        coefficients=(INSTRUMENT_VARIABLE,), labels={INSTRUMENT_VARIABLE: "Predicted Mortality"},
        stats=("r_squared", "n_observations", "n_countries"),
        footnotes=("Note: decadal panels with country and year fixed effects; robust standard "
                   "errors in parentheses.", STARS_NOTE))
    return render_table(_run_columns(panel, columns), layout,
                        "Table 15. First-Stage Estimate: Effect of Predicted Mortality on "
                        "Life Expectancy")


def _table_16(panel: CountryYearPanel) -> RenderedTable:
    base = dict(dependent="fertility", exogenous=("log_le",),
                fixed_effects={"country", "year"}, sample=BASE,
                transform=_levels_range(1940, 2000))
    columns = [
        PresetColumn("Base Sample", RegressionSpec(vcov=ROBUST, **base)),
        PresetColumn("Population Weighting", RegressionSpec(
            vcov=ROBUST, weight=WeightSpec("population"), **base)),
    ]
    layout = TableLayout(
        coefficients=("log_le",), labels={"log_le": "Log Life Expectancy"},
        stats=("n_observations", "r_squared"), coef_precision=4,
        footnotes=("Note: decadal panel 1940-2000 with country and year fixed effects; robust "
                   "standard errors in parentheses.", STARS_NOTE))
    return render_table(_run_columns(panel, columns), layout,
                        "Table 16. Effect of Life Expectancy on Fertility Rate, 1940-2000")


PRESETS: dict[str, Preset] = {
    "T1": Preset("T1", "population outcomes", ("log_population", "log_births", "pct_under20", "log_le"),
                 False, _table_1),
    "T2": Preset("T2", "zeroth stage", (), True, _table_2),
    "T3": Preset("T3", "first stage", ("log_le",), True, _table_3),
    "T4": Preset("T4", "main 2SLS", ("log_gdp", "log_gdppc", "log_le"), True, _table_4),
    "T5": Preset("T5", "long difference with initial health", ("log_gdppc", "log_le"), True, _table_5),
    "T6": Preset("T6", "decadal 2SLS with lag controls", ("log_gdppc", "log_le"), True, _table_6),
    "T7": Preset("T7", "population-weighted 2SLS", ("log_gdppc", "log_le", "population"), True, _table_7),
    "T8": Preset("T8", "growth-rate 2SLS", ("gdppc", "le"), True, _table_8),
    "T9": Preset("T9", "decadal growth-rate 2SLS", ("gdppc", "le"), True, _table_9),
    "T10": Preset("T10", "weighted growth-rate 2SLS", ("gdppc", "le", "population"), True, _table_10),
    "T11": Preset("T11", "intervention schedule", (), False, _table_11),
    "T12": Preset("T12", "instrument summary", (), True, _table_12),
    "T13": Preset("T13", "initial mortality vs income", ("log_gdppc",), True, _table_13),
    "T14": Preset("T14", "growth vs initial mortality", ("gdppc",), True, _table_14),
    "T15": Preset("T15", "decadal first stage", ("log_le",), True, _table_15),
    "T16": Preset("T16", "fertility", ("fertility", "log_le"), True, _table_16),
}


def preset_ids() -> list[str]:
    return sorted(PRESETS, key=lambda t: int(t[1:]))


def replicate_preset(table_id: str, data_dir: str | Path) -> RenderedTable:
    """Run one preset against the conventional files in ``data_dir``."""
    table_id = table_id.upper().strip()
    if not table_id.startswith("T"):
        table_id = f"T{table_id}"
    if table_id not in PRESETS:
        raise SpecificationError(f"unknown table id {table_id!r}; available: {', '.join(preset_ids())}")
    preset = PRESETS[table_id]
    data = data_paths_for_dir(data_dir)

    if table_id == "T11":
        return preset.build(data)
    if table_id == "T2":
        if data.disease_mortality is None:
            raise DataError("table T2 needs disease_mortality.csv in the data directory")
        return preset.build(data)

    if not data.country_year.exists():
        raise DataError(f"table {table_id} needs country_year.csv in {data_dir}")
    if preset.needs_mortality and data.disease_mortality is None:
        raise DataError(f"table {table_id} needs disease_mortality.csv in {data_dir}")
    panel = load_panel_bundle(data)
    missing = [v for v in preset.requires if not panel.has_variable(v)]
    if missing:
        raise DataError(f"table {table_id} needs columns absent from the data: {', '.join(missing)}")

    if table_id == "T12":
        return preset.build(panel, data)
    return preset.build(panel)
