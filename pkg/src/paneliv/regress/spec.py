"""Regression specification and fit-result types."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import SpecificationError
from ..panel import SampleFilter
from ..transforms import TransformKind

VCOV_KINDS = ("classical", "robust_hc1", "cluster")


@dataclass(frozen=True)
class VcovKind:
    """Covariance estimator: classical, HC1 sandwich, or cluster-robust (CR1).

    cluster_variable is "country" for the panel's grouping unit, or the name
    of a panel variable whose per-row values define the clusters.
    """

    kind: str = "classical"
    cluster_variable: str | None = None

    def __post_init__(self):
        if self.kind not in VCOV_KINDS:
            raise SpecificationError(f"unknown vcov kind {self.kind!r}; expected one of {VCOV_KINDS}")
        if self.kind == "cluster" and not self.cluster_variable:
            raise SpecificationError("cluster vcov requires cluster_variable")


@dataclass(frozen=True)
class WeightSpec:
    """Frequency weighting: an observation with weight w counts as w rows."""

    variable: str
    kind: str = "frequency"

    def __post_init__(self):
        if self.kind != "frequency":
            raise SpecificationError(f"unsupported weight kind {self.kind!r}; only frequency weights")


@dataclass(frozen=True)
class RegressionSpec:
    """Declarative description of one estimation.

    Variable references accept a small expression syntax resolved against
    the panel: ``name``, ``name@YEAR`` (level pinned at a year), ``log(...)``,
    ``diff(...)`` / ``growth(...)`` (explicit collapses in cross-section
    transforms), ``lag(name, k)`` (levels panels), and ``yearx(...)``
    (interaction with year dummies, exogenous only).
    """

    dependent: str
    exogenous: tuple[str, ...] = ()
    endogenous: tuple[str, ...] = ()
    instruments: tuple[str, ...] = ()
    fixed_effects: frozenset[str] = frozenset()
    weight: WeightSpec | None = None
    vcov: VcovKind = VcovKind()
    sample: SampleFilter = SampleFilter()
    transform: TransformKind = TransformKind()
    include_intercept: bool = False
    auto_drop_collinear: bool = False

    def __post_init__(self):
        object.__setattr__(self, "exogenous", tuple(self.exogenous))
        object.__setattr__(self, "endogenous", tuple(self.endogenous))
        object.__setattr__(self, "instruments", tuple(self.instruments))
        object.__setattr__(self, "fixed_effects", frozenset(self.fixed_effects))
        unknown = self.fixed_effects - {"country", "year"}
        if unknown:
            raise SpecificationError(f"unknown fixed effects: {sorted(unknown)}")
        if bool(self.endogenous) != bool(self.instruments):
            raise SpecificationError("instruments must be nonempty iff endogenous variables are")
        if self.endogenous and len(self.instruments) < len(self.endogenous):
            raise SpecificationError(
                f"order condition fails: {len(self.instruments)} instruments "
                f"for {len(self.endogenous)} endogenous variables"
            )
        regressors = self.exogenous + self.endogenous
        if self.dependent in regressors:
            raise SpecificationError(f"dependent {self.dependent!r} appears among the regressors")

    @property
    def is_iv(self) -> bool:
        return bool(self.endogenous)


@dataclass
class FitResult:
    """Coefficients, covariance, and fit statistics from one estimation.

    n_observations is the weight sum under frequency weighting, otherwise
    the row count. r_squared may be negative for 2SLS (structural residuals,
    no refit).
    """

    coefficient_names: list[str]
    coefficients: dict[str, float]
    covariance: np.ndarray
    standard_errors: dict[str, float]
    t_statistics: dict[str, float]
    p_values: dict[str, float]
    n_observations: float
    n_countries: int
    n_clusters: int | None
    r_squared: float
    residuals: np.ndarray
    dof_residual: int
    first_stage: "FitResult | None" = None
    first_stages: tuple = ()
    vcov_kind: str = "classical"
    weighted: bool = False
    diagnostics: dict = field(default_factory=dict)

    def coefficient_vector(self) -> np.ndarray:
        return np.array([self.coefficients[name] for name in self.coefficient_names])

    def to_record(self) -> str:
        """Flat key=value text serialization for golden-file comparisons."""
        lines = []
        for name in self.coefficient_names:
            lines.append(f"coef.{name}={self.coefficients[name]!r}")
            lines.append(f"se.{name}={self.standard_errors[name]!r}")
            lines.append(f"t.{name}={self.t_statistics[name]!r}")
            lines.append(f"p.{name}={self.p_values[name]!r}")
        lines.append(f"n_observations={self.n_observations!r}")
        lines.append(f"n_countries={self.n_countries}")
        lines.append(f"n_clusters={self.n_clusters}")
        lines.append(f"r_squared={self.r_squared!r}")
        lines.append(f"dof_residual={self.dof_residual}")
        lines.append(f"vcov_kind={self.vcov_kind}")
        return "\n".join(lines)
