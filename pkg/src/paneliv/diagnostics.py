"""Weak-instrument diagnostics and significance stars.

The Cragg-Donald statistic uses homoskedastic covariance by construction,
even when the main fit reports clustered standard errors; the weak-IV
report notes this. Stock-Yogo critical values are simulation-derived
constants shipped as data and are never interpolated or extrapolated.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np
import scipy.linalg

from .errors import EstimationError, SpecificationError, UntabulatedError
from .panel import CountryYearPanel
from .regress.core import _Prepared, _rank_check
from .regress.design import build_design
from .regress.spec import RegressionSpec

MAXIMAL_SIZES = (10, 15, 20, 25)


@dataclass
class WeakIvReport:
    cragg_donald_f: float
    critical_values: dict[int, float]
    n_endogenous: int
    n_instruments: int
    verdict: str
    homoskedastic_note: str = (
        "Cragg-Donald statistic assumes homoskedastic errors regardless of the main fit's covariance."
    )


def _normalize_size(maximal_size) -> int:
    if isinstance(maximal_size, str):
        maximal_size = maximal_size.strip().rstrip("%")
        try:
            maximal_size = int(maximal_size)
        except ValueError:
            raise SpecificationError(f"bad maximal size {maximal_size!r}") from None
    if maximal_size not in MAXIMAL_SIZES:
        raise SpecificationError(f"maximal size must be one of {MAXIMAL_SIZES}, got {maximal_size}")
    return int(maximal_size)


@lru_cache(maxsize=1)
def _stock_yogo_table() -> dict[tuple[int, int, int], float]:
    text = resources.files("paneliv.data").joinpath("stock_yogo.csv").read_text(encoding="utf-8")
    table = {}
    for row in csv.DictReader(text.splitlines()):
        key = (int(row["n_endogenous"]), int(row["n_instruments"]), int(row["maximal_size"]))
        table[key] = float(row["critical_value"])
    return table


def stock_yogo_critical(n_endogenous: int, n_instruments: int, maximal_size) -> float:
    """Tabulated critical value for the weak-instrument F test; pure lookup."""
    size = _normalize_size(maximal_size)
    if n_instruments < n_endogenous:
        raise SpecificationError(
            f"order condition fails: {n_instruments} instruments for {n_endogenous} endogenous variables"
        )
    key = (n_endogenous, n_instruments, size)
    table = _stock_yogo_table()
    if key not in table:
        raise UntabulatedError(
            f"no tabulated critical value for {n_endogenous} endogenous, "
            f"{n_instruments} instruments at {size}% maximal size"
        )
    return table[key]


def significance_stars(p_value: float) -> str:
    """Star convention: *** below .01, ** below .05, * below .1 (strict)."""
    if not 0.0 <= p_value <= 1.0:
        raise SpecificationError(f"p-value {p_value} outside [0, 1]")
    if p_value < 0.01:
        return "***"
    if p_value < 0.05:
        return "**"
    if p_value < 0.1:
        return "*"
    return ""


def _partial_out(basis: np.ndarray, M: np.ndarray) -> np.ndarray:
    if basis.shape[1] == 0:
        return M
    coef, *_ = np.linalg.lstsq(basis, M, rcond=None)
    return M - basis @ coef


def cragg_donald_stat(spec: RegressionSpec, panel: CountryYearPanel) -> float:
    """Minimum-eigenvalue first-stage strength statistic.

    Exogenous regressors and fixed effects are partialled out of both the
    endogenous variables and the instruments; the concentration-matrix
    eigenvalue is scaled by (N - K1 - K2) / K2. In the one-endogenous,
    one-instrument case this equals the first-stage partial F exactly.
    With frequency weights, the statistic is computed on the weighted
    design and N is the weight sum.
    """
    if not spec.endogenous or not spec.instruments:
        raise SpecificationError("Cragg-Donald needs at least one endogenous variable and one instrument")
    prep = _Prepared(spec, build_design(spec, panel))
    data = prep.data
    Xw = prep.X_dm * prep.sw[:, None]
    kept = _rank_check(Xw, data.x_names, auto_drop=True)
    Xw = Xw[:, kept]
    endog_w = prep.endog_dm * prep.sw[:, None]
    Zw = prep.Z_dm * prep.sw[:, None]

    endog_t = _partial_out(Xw, endog_w)
    Z_t = _partial_out(Xw, Zw)

    k1 = len(kept) + prep.n_absorbed
    k2 = Z_t.shape[1]
    dof = prep.n_obs - k1 - k2
    if dof <= 0:
        raise EstimationError(f"no residual degrees of freedom for Cragg-Donald (N={prep.n_obs})")

    coef, *_ = np.linalg.lstsq(Z_t, endog_t, rcond=None)
    fitted = Z_t @ coef
    resid = endog_t - fitted
    A = endog_t.T @ fitted   # X' P_Z X
    B = endog_t.T @ resid    # X' M_Z X
    A = (A + A.T) / 2.0
    B = (B + B.T) / 2.0
    try:
        roots = scipy.linalg.eigh(A, B, eigvals_only=True)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise EstimationError(f"eigenvalue computation failed for Cragg-Donald: {exc}") from None
    return float(np.min(roots)) * dof / k2


def weak_iv_report(spec: RegressionSpec, panel: CountryYearPanel) -> WeakIvReport:
    """Cragg-Donald statistic, available critical values, and a verdict."""
    statistic = cragg_donald_stat(spec, panel)
    n_endog = len(spec.endogenous)
    n_instr = len(spec.instruments)
    critical: dict[int, float] = {}
    for size in MAXIMAL_SIZES:
        try:
            critical[size] = stock_yogo_critical(n_endog, n_instr, size)
        except UntabulatedError:
            continue
    if 10 in critical and statistic > critical[10]:
        verdict = "not_weak_at_10"
    elif 15 in critical and statistic > critical[15]:
        verdict = "not_weak_at_15"
    elif 10 in critical and 15 in critical:
        verdict = "weak"
    else:
        verdict = "undetermined"
    return WeakIvReport(statistic, critical, n_endog, n_instr, verdict)
