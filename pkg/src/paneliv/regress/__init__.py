from .core import first_stage, fit_ols, fit_tsls
from .design import build_design, parse_reference
from .oracle import dummy_design, oracle_dummy_ols
from .spec import FitResult, RegressionSpec, VcovKind, WeightSpec
from .vcov import compute_vcov

__all__ = [
    "FitResult",
    "RegressionSpec",
    "VcovKind",
    "WeightSpec",
    "build_design",
    "compute_vcov",
    "dummy_design",
    "first_stage",
    "fit_ols",
    "fit_tsls",
    "oracle_dummy_ols",
    "parse_reference",
]
