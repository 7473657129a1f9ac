"""Pydantic request/response models for the estimation service.

File paths in requests are resolved on the service host; the bundled CLI
runs the app in-process, so paths behave like local CLI arguments.
"""

from __future__ import annotations

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str
    version: str


class PresetInfo(BaseModel):
    table_id: str
    title: str


class PresetListResponse(BaseModel):
    presets: list[PresetInfo]


class InstrumentBuildRequest(BaseModel):
    mortality_csv: str
    interventions_csv: str | None = None
    years: list[int] | None = None
    frontier_mortality: float = 0.0
    out_path: str | None = None


class InstrumentPoint(BaseModel):
    country: str
    year: int
    predicted_mortality: float


class InstrumentSummaryRow(BaseModel):
    label: str
    count: int
    mean: float
    sd: float
    minimum: float
    maximum: float
    degenerate: bool


class InstrumentBuildResponse(BaseModel):
    series: list[InstrumentPoint]
    summary: list[InstrumentSummaryRow]
    written_to: str | None = None


class FitResultModel(BaseModel):
    coefficient_names: list[str]
    coefficients: dict[str, float]
    standard_errors: dict[str, float]
    t_statistics: dict[str, float]
    p_values: dict[str, float]
    n_observations: float
    n_countries: int
    n_clusters: int | None
    r_squared: float
    dof_residual: int
    vcov_kind: str
    weighted: bool
    first_stage: "FitResultModel | None" = None


class WeakIvModel(BaseModel):
    cragg_donald_f: float
    critical_values: dict[int, float]
    n_endogenous: int
    n_instruments: int
    verdict: str


class SpecOutcomeModel(BaseModel):
    name: str
    ok: bool
    error: str | None = None
    fit: FitResultModel | None = None
    weak_iv: WeakIvModel | None = None


class RunRequest(BaseModel):
    config_path: str | None = None
    config_text: str | None = None
    base_dir: str = "."
    format: str = Field(default="text", pattern="^(text|csv)$")


class RunResponse(BaseModel):
    outcomes: list[SpecOutcomeModel]
    rendered: str
    all_ok: bool


class ReplicateRequest(BaseModel):
    table_id: str
    data_dir: str
    format: str = Field(default="text", pattern="^(text|csv)$")


class ReplicateResponse(BaseModel):
    table_id: str
    title: str
    rendered: str


class SimulateRequest(BaseModel):
    config_path: str | None = None
    dgp: dict[str, str] = Field(default_factory=dict)
    seed: int | None = None
    reps: int | None = None
    demo: bool = True


class McResultModel(BaseModel):
    mean: float
    sd: float
    bias: float
    ci95: tuple[float, float]
    reps: int
    seed: int
    n_failed: int
    estimates: list[float]


class SimulateResponse(BaseModel):
    mc: McResultModel
    report: str
