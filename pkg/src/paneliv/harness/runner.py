"""Executes run configurations: ingestion, instrument merge, estimation,
diagnostics, and rendering. A failing spec yields an error column, not a
crashed batch."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from ..diagnostics import WeakIvReport, weak_iv_report
from ..errors import ConfigError, PanelIvError
from ..instrument import (
    InterventionSchedule,
    predicted_mortality,
    read_mortality_csv,
    read_schedule_csv,
)
from ..panel import CountryYearPanel, ingest_country_year_csv
from ..regress import FitResult, fit_ols, fit_tsls
from .config import DataPaths, RunConfig, read_run_config
from .render import ColumnResult, RenderedTable, TableLayout, render_table

INSTRUMENT_VARIABLE = "predicted_mortality"


@dataclass
class SpecOutcome:
    name: str
    fit: FitResult | None = None
    weak_iv: WeakIvReport | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def load_panel_bundle(data: DataPaths) -> CountryYearPanel:
    """Ingest the country-year CSV and merge the predicted-mortality series.

    The instrument is evaluated on the panel's own year grid so it extends
    over post-intervention years.
    """
    if data.country_year is None:
        raise ConfigError("[data]: country_year path is required")
    panel = ingest_country_year_csv(data.country_year, groups_path=data.groups)
    if data.disease_mortality is not None:
        mortality = read_mortality_csv(data.disease_mortality)
        schedule = read_schedule_csv(data.interventions, data.frontier_mortality)
        series = predicted_mortality(mortality, schedule, years=list(panel.year_grid))
        new_columns = {
            key: {INSTRUMENT_VARIABLE: value}
            for key, value in series.values.items()
            if key in panel.observations
        }
        panel = panel.with_variables(new_columns)
    return panel


def load_schedule(data: DataPaths) -> InterventionSchedule:
    return read_schedule_csv(data.interventions, data.frontier_mortality)


def execute_config(config: RunConfig) -> list[SpecOutcome]:
    """Run every spec in declaration order, recording per-spec failures."""
    try:
        panel = load_panel_bundle(config.data)
    except PanelIvError as exc:
        return [SpecOutcome(entry.name, error=str(exc)) for entry in config.specs]

    outcomes = []
    for entry in config.specs:
        outcome = SpecOutcome(entry.name)
        try:
            if entry.spec.is_iv:
                outcome.fit = fit_tsls(entry.spec, panel)
                if entry.weak_iv:
                    outcome.weak_iv = weak_iv_report(entry.spec, panel)
            else:
                outcome.fit = fit_ols(entry.spec, panel)
        except PanelIvError as exc:
            outcome.error = str(exc)
        outcomes.append(outcome)
    return outcomes


def run_config(path: str | Path) -> tuple[list[SpecOutcome], RunConfig]:
    config = read_run_config(path)
    if not config.specs:
        raise ConfigError(f"{path}: no regression specs defined")
    return execute_config(config), config


def render_outcomes(outcomes: list[SpecOutcome], title: str = "Estimation results") -> RenderedTable:
    columns = [
        ColumnResult(o.name, fit=o.fit, weak_iv=o.weak_iv, error=o.error)
        for o in outcomes
    ]
    stats = ["r_squared", "n_observations", "n_countries"]
    if any(o.weak_iv is not None for o in outcomes):
        stats += ["cragg_donald", "critical_value_10"]
    footnotes = _vcov_footnotes(outcomes)
    layout = TableLayout(stats=tuple(stats), footnotes=tuple(footnotes))
    return render_table(columns, layout, title)


def _vcov_footnotes(outcomes: list[SpecOutcome]) -> list[str]:
    notes = []
    described = set()
    for outcome in outcomes:
        if outcome.fit is None:
            continue
        key = (outcome.fit.vcov_kind, outcome.fit.weighted)
        if key in described:
            continue
        described.add(key)
        vcov = {
            "classical": "classical standard errors",
            "robust_hc1": "heteroskedasticity-robust (HC1) standard errors",
            "cluster": "cluster-robust standard errors",
        }[outcome.fit.vcov_kind]
        weighting = "frequency-weighted" if outcome.fit.weighted else "unweighted"
        notes.append(f"Note: {vcov}, {weighting}.")
    notes.append("*p<.1 **p<.05 ***p<.01")
    return notes
