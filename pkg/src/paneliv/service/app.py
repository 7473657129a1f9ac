"""FastAPI service wrapping the estimation engine.

Stateless: every request names its own inputs, so concurrent requests over
shared immutable data are safe. Domain errors map to HTTP 422 with the
error message as detail.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..errors import PanelIvError
from ..harness.config import parse_run_config, read_run_config
from ..harness.presets import PRESETS, preset_ids, replicate_preset
from ..harness.runner import SpecOutcome, execute_config, render_outcomes
from ..instrument import (
    instrument_summary,
    predicted_mortality,
    read_mortality_csv,
    read_schedule_csv,
    write_series_csv,
)
from ..regress.spec import FitResult
from ..simlab import DgpConfig, exclusion_violation_demo, monte_carlo_bias
from . import schemas


def _fit_to_model(fit: FitResult | None) -> schemas.FitResultModel | None:
    if fit is None:
        return None
    return schemas.FitResultModel(
        coefficient_names=fit.coefficient_names,
        coefficients=fit.coefficients,
        standard_errors=fit.standard_errors,
        t_statistics=fit.t_statistics,
        p_values=fit.p_values,
        n_observations=fit.n_observations,
        n_countries=fit.n_countries,
        n_clusters=fit.n_clusters,
        r_squared=fit.r_squared,
        dof_residual=fit.dof_residual,
        vcov_kind=fit.vcov_kind,
        weighted=fit.weighted,
        first_stage=_fit_to_model(fit.first_stage),
    )


def _outcome_to_model(outcome: SpecOutcome) -> schemas.SpecOutcomeModel:
    weak_iv = None
    if outcome.weak_iv is not None:
        weak_iv = schemas.WeakIvModel(
            cragg_donald_f=outcome.weak_iv.cragg_donald_f,
            critical_values=outcome.weak_iv.critical_values,
            n_endogenous=outcome.weak_iv.n_endogenous,
            n_instruments=outcome.weak_iv.n_instruments,
            verdict=outcome.weak_iv.verdict,
        )
    return schemas.SpecOutcomeModel(
        name=outcome.name, ok=outcome.ok, error=outcome.error,
        fit=_fit_to_model(outcome.fit), weak_iv=weak_iv,
    )


def create_app() -> FastAPI:
    app = FastAPI(title="paneliv", version=__version__)

    @app.exception_handler(PanelIvError)
    async def _domain_error(request, exc: PanelIvError):  # noqa: ANN001
        raise HTTPException(status_code=422, detail=str(exc))

    @app.get("/health", response_model=schemas.HealthResponse)
    def health() -> schemas.HealthResponse:
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.get("/presets", response_model=schemas.PresetListResponse)
    def presets() -> schemas.PresetListResponse:
        return schemas.PresetListResponse(presets=[
            schemas.PresetInfo(table_id=tid, title=PRESETS[tid].title) for tid in preset_ids()
        ])

    @app.post("/instrument/build", response_model=schemas.InstrumentBuildResponse)
    def instrument_build(request: schemas.InstrumentBuildRequest) -> schemas.InstrumentBuildResponse:
        mortality = read_mortality_csv(request.mortality_csv)
        schedule = read_schedule_csv(request.interventions_csv, request.frontier_mortality)
        series = predicted_mortality(mortality, schedule, years=request.years)
        written_to = None
        if request.out_path:
            write_series_csv(series, request.out_path)
            written_to = request.out_path
        return schemas.InstrumentBuildResponse(
            series=[
                schemas.InstrumentPoint(country=c, year=y, predicted_mortality=v)
                for (c, y), v in sorted(series.values.items())
            ],
            summary=[
                schemas.InstrumentSummaryRow(
                    label=row.label, count=row.count, mean=row.mean, sd=row.sd,
                    minimum=row.minimum, maximum=row.maximum, degenerate=row.degenerate)
                for row in instrument_summary(series)
            ],
            written_to=written_to,
        )

    @app.post("/run", response_model=schemas.RunResponse)
    def run(request: schemas.RunRequest) -> schemas.RunResponse:
        if request.config_path:
            config = read_run_config(request.config_path)
        elif request.config_text:
            config = parse_run_config(request.config_text, base_dir=request.base_dir)
        else:
            raise HTTPException(status_code=422, detail="need config_path or config_text")
        if not config.specs:
            raise HTTPException(status_code=422, detail="config defines no regression specs")
        outcomes = execute_config(config)
        rendered = render_outcomes(outcomes).render(request.format)
        return schemas.RunResponse(
            outcomes=[_outcome_to_model(o) for o in outcomes],
            rendered=rendered,
            all_ok=all(o.ok for o in outcomes),
        )

    @app.post("/replicate", response_model=schemas.ReplicateResponse)
    def replicate(request: schemas.ReplicateRequest) -> schemas.ReplicateResponse:
        table = replicate_preset(request.table_id, request.data_dir)
        return schemas.ReplicateResponse(
            table_id=request.table_id.upper(),
            title=table.title,
            rendered=table.render(request.format),
        )

    @app.post("/simulate", response_model=schemas.SimulateResponse)
    def simulate(request: schemas.SimulateRequest) -> schemas.SimulateResponse:
        options: dict[str, str] = dict(request.dgp)
        if request.config_path:
            config = read_run_config(request.config_path)
            options = {**config.dgp_options, **options}
        dgp = DgpConfig.from_options(options)
        # Explicit request values beat the config's [dgp] section.
        seed = request.seed if request.seed is not None else int(options.get("seed", 0))
        reps = request.reps if request.reps is not None else int(options.get("reps", 500))
        mc = monte_carlo_bias(dgp, reps=reps, seed=seed)
        report = exclusion_violation_demo(dgp, reps=reps, seed=seed) if request.demo else ""
        return schemas.SimulateResponse(
            mc=schemas.McResultModel(
                mean=mc.mean, sd=mc.sd, bias=mc.bias, ci95=mc.ci95, reps=mc.reps,
                seed=mc.seed, n_failed=mc.n_failed, estimates=mc.estimates),
            report=report,
        )

    return app
