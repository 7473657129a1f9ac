"""Fixed-effects OLS and two-stage least squares.

Country effects are absorbed by (weighted) within-demeaning, year effects
enter as explicit dummies with the earliest year omitted. The production
solver runs on an orthogonal decomposition; the normal-equations path lives
only in the test oracle. Collinearity is an error unless the spec opts into
auto-dropping.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg
from scipy import stats

from ..errors import CollinearityError, EstimationError
from ..panel import CountryYearPanel
from .design import DesignData, build_design
from .spec import FitResult, RegressionSpec, VcovKind
from .vcov import compute_vcov

RANK_TOL = 1e-10


def _within_demean(M: np.ndarray, groups: list, weights: np.ndarray) -> np.ndarray:
    """Subtract the weighted group mean from every row, per column."""
    out = np.array(M, dtype=float, copy=True)
    if out.ndim == 1:
        out = out[:, None]
        squeeze = True
    else:
        squeeze = False
    index: dict = {}
    for i, g in enumerate(groups):
        index.setdefault(g, []).append(i)
    for rows in index.values():
        w = weights[rows]
        means = (w @ out[rows]) / w.sum()
        out[rows] -= means
    return out[:, 0] if squeeze else out


def _rank_check(M: np.ndarray, names: list[str], auto_drop: bool) -> list[int]:
    """Indices of independent columns; raises CollinearityError unless auto_drop."""
    n, p = M.shape
    if p == 0:
        return []
    norms = np.linalg.norm(M, axis=0)
    _, R, perm = scipy.linalg.qr(M, mode="economic", pivoting=True)
    bad: set[int] = {j for j in range(p) if norms[j] == 0.0}
    for k in range(min(n, p)):
        j = perm[k]
        if norms[j] == 0.0 or abs(R[k, k]) < RANK_TOL * norms[j]:
            bad.update(perm[k:])
            break
    if p > n:
        bad.update(perm[n:])
    if not bad:
        return list(range(p))
    if not auto_drop:
        raise CollinearityError([names[j] for j in sorted(bad)])
    return [j for j in range(p) if j not in bad]


def _solve_qr(Xw: np.ndarray, yw: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Least-squares coefficients and (X'X)^-1 from an economy QR."""
    Q, R = scipy.linalg.qr(Xw, mode="economic")
    beta = scipy.linalg.solve_triangular(R, Q.T @ yw)
    r_inv = scipy.linalg.solve_triangular(R, np.eye(R.shape[0]))
    return beta, r_inv @ r_inv.T


class _Prepared:
    """Demeaned arrays plus the shared bookkeeping for one estimation."""

    def __init__(self, spec: RegressionSpec, data: DesignData):
        self.spec = spec
        self.data = data
        self.weights = data.weights
        self.sw = np.sqrt(data.weights)
        self.n_obs = float(data.weights.sum())
        if data.absorb_country:
            self.groups_absorbed = sorted(set(data.groups))
            self.y_dm = _within_demean(data.y, data.groups, data.weights)
            self.X_dm = _within_demean(data.X, data.groups, data.weights)
            self.endog_dm = _within_demean(data.endog, data.groups, data.weights)
            self.Z_dm = _within_demean(data.Z, data.groups, data.weights)
            self.n_absorbed = len(self.groups_absorbed)
        else:
            self.groups_absorbed = []
            self.y_dm = np.array(data.y, dtype=float)
            self.X_dm = np.array(data.X, dtype=float)
            self.endog_dm = np.array(data.endog, dtype=float)
            self.Z_dm = np.array(data.Z, dtype=float)
            self.n_absorbed = 0
        centered = data.absorb_country or "const" in data.x_names
        if centered:
            grand = float(self.weights @ data.y) / self.n_obs
            self.tss = float(self.weights @ (data.y - grand) ** 2)
        else:
            self.tss = float(self.weights @ data.y**2)

    def clusters(self) -> list | None:
        if self.spec.vcov.kind != "cluster":
            return None
        if self.spec.vcov.cluster_variable == "country":
            return self.data.groups
        return self.data.cluster_ids


def _assemble(prep: _Prepared, names: list[str], beta: np.ndarray, xtx_inv: np.ndarray,
              rows_scaled: np.ndarray, residuals: np.ndarray,
              n_params: int, vcov_kind: VcovKind) -> FitResult:
    data = prep.data
    clusters = prep.clusters()
    rss = float(prep.weights @ residuals**2)
    dof = prep.n_obs - n_params
    if dof > 0:
        covariance = compute_vcov(vcov_kind, xtx_inv, rows_scaled, residuals,
                                  prep.weights, prep.n_obs, n_params, clusters)
    elif dof == 0 and rss <= 1e-12 * max(prep.tss, 1.0):
        # Exactly identified with an exact fit: the point estimates are
        # unique but there is no residual variation to do inference with.
        covariance = np.zeros((len(beta), len(beta)))
    else:
        raise EstimationError(f"zero residual degrees of freedom (N={prep.n_obs}, K={n_params})")
    diag = np.diag(covariance).copy()
    diag[diag < 0] = 0.0
    se = np.sqrt(diag)
    n_clusters = len(set(clusters)) if clusters is not None else None
    if vcov_kind.kind == "cluster":
        dof_tests = n_clusters - 1
    else:
        dof_tests = prep.n_obs - n_params
    with np.errstate(divide="ignore", invalid="ignore"):
        t_stats = np.where(se > 0, beta / se, np.where(beta == 0, 0.0, np.inf * np.sign(beta)))
    p_values = 2.0 * stats.t.sf(np.abs(t_stats), dof_tests) if dof_tests > 0 else np.zeros_like(beta)
    p_values = np.clip(np.nan_to_num(p_values, nan=0.0), 0.0, 1.0)

    r_squared = 1.0 - rss / prep.tss if prep.tss > 0 else float("nan")

    return FitResult(
        coefficient_names=list(names),
        coefficients={nm: float(b) for nm, b in zip(names, beta)},
        covariance=covariance,
        standard_errors={nm: float(s) for nm, s in zip(names, se)},
        t_statistics={nm: float(t) for nm, t in zip(names, t_stats)},
        p_values={nm: float(p) for nm, p in zip(names, p_values)},
        n_observations=prep.n_obs,
        n_countries=len(set(data.groups)),
        n_clusters=n_clusters,
        r_squared=r_squared,
        residuals=residuals,
        dof_residual=int(round(prep.n_obs - n_params)),
        vcov_kind=vcov_kind.kind,
        weighted=prep.spec.weight is not None,
        diagnostics={"n_dropped": data.n_dropped},
    )


def fit_ols(spec: RegressionSpec, panel: CountryYearPanel) -> FitResult:
    """Weighted least squares with fixed-effect absorption."""
    if spec.is_iv:
        raise EstimationError("spec has endogenous variables; use fit_tsls")
    prep = _Prepared(spec, build_design(spec, panel))
    Xw = prep.X_dm * prep.sw[:, None]
    yw = prep.y_dm * prep.sw
    kept = _rank_check(Xw, prep.data.x_names, spec.auto_drop_collinear)
    if not kept:
        raise EstimationError("no regressors survive the rank check")
    names = [prep.data.x_names[j] for j in kept]
    Xw = Xw[:, kept]
    n_params = len(kept) + prep.n_absorbed
    if prep.n_obs - n_params < 0:
        raise EstimationError(f"negative residual degrees of freedom (N={prep.n_obs}, K={n_params})")
    beta, xtx_inv = _solve_qr(Xw, yw)
    residuals = prep.y_dm - prep.X_dm[:, kept] @ beta
    return _assemble(prep, names, beta, xtx_inv, Xw, residuals, n_params, spec.vcov)


def _stage1(prep: _Prepared, spec: RegressionSpec):
    """First-stage designs and fits shared by fit_tsls and first_stage."""
    data = prep.data
    # An instrument without within variation projects to nothing after absorption.
    if data.absorb_country:
        pre = np.linalg.norm(data.Z, axis=0)
        post = np.linalg.norm(prep.Z_dm, axis=0)
        dead = [nm for nm, a, b in zip(data.z_names, pre, post) if a > 0 and b < RANK_TOL * a]
        if dead:
            raise EstimationError(f"instrument has no within variation: {', '.join(dead)}")

    ZX_dm = np.hstack([prep.Z_dm, prep.X_dm])
    zx_names = data.z_names + data.x_names
    ZXw = ZX_dm * prep.sw[:, None]
    kept = _rank_check(ZXw, zx_names, spec.auto_drop_collinear)
    kept_z = [j for j in kept if j < len(data.z_names)]
    if len(kept_z) < len(data.endog_names):
        raise EstimationError(
            f"order condition fails after rank check: {len(kept_z)} usable instruments "
            f"for {len(data.endog_names)} endogenous variables"
        )
    names1 = [zx_names[j] for j in kept]
    ZXw = ZXw[:, kept]
    ZX_dm = ZX_dm[:, kept]
    n_params1 = len(kept) + prep.n_absorbed
    if prep.n_obs - n_params1 < 0:
        raise EstimationError(f"negative residual degrees of freedom in first stage (K={n_params1})")

    fits = []
    fitted_dm = np.empty_like(prep.endog_dm)
    for j, name in enumerate(data.endog_names):
        xw_j = prep.endog_dm[:, j] * prep.sw
        beta1, xtx_inv1 = _solve_qr(ZXw, xw_j)
        fitted_dm[:, j] = ZX_dm @ beta1
        resid1 = prep.endog_dm[:, j] - fitted_dm[:, j]
        fit = _assemble(prep, names1, beta1, xtx_inv1, ZXw, resid1, n_params1, spec.vcov)
        # R-squared of the first stage is about the endogenous variable.
        centered = data.absorb_country or "const" in data.x_names
        if centered:
            grand = float(prep.weights @ data.endog[:, j]) / prep.n_obs
            tss_j = float(prep.weights @ (data.endog[:, j] - grand) ** 2)
        else:
            tss_j = float(prep.weights @ data.endog[:, j] ** 2)
        rss_j = float(prep.weights @ resid1**2)
        fit.r_squared = 1.0 - rss_j / tss_j if tss_j > 0 else float("nan")
        fits.append(fit)
    return fits, fitted_dm


def fit_tsls(spec: RegressionSpec, panel: CountryYearPanel) -> FitResult:
    """Two-stage least squares with fixed-effect absorption.

    Stage one regresses each endogenous variable on the instruments plus all
    exogenous regressors; stage two replaces the endogenous columns with
    fitted values. The reported covariance and R-squared use structural
    residuals (actual regressors times the 2SLS coefficients), so R-squared
    can be negative.
    """
    if not spec.is_iv:
        raise EstimationError("spec has no endogenous variables; use fit_ols")
    prep = _Prepared(spec, build_design(spec, panel))
    data = prep.data
    first_fits, fitted_dm = _stage1(prep, spec)

    X2_dm = np.hstack([fitted_dm, prep.X_dm])
    names2 = data.endog_names + data.x_names
    X2w = X2_dm * prep.sw[:, None]
    kept = _rank_check(X2w, names2, spec.auto_drop_collinear)
    kept_endog = [j for j in kept if j < len(data.endog_names)]
    if len(kept_endog) < len(data.endog_names):
        missing = [names2[j] for j in range(len(data.endog_names)) if j not in kept]
        raise EstimationError(f"endogenous variables dropped by rank check: {', '.join(missing)}")
    names = [names2[j] for j in kept]
    X2w = X2w[:, kept]
    n_params = len(kept) + prep.n_absorbed
    if prep.n_obs - n_params < 0:
        raise EstimationError(f"negative residual degrees of freedom (N={prep.n_obs}, K={n_params})")
    beta, xtx_inv = _solve_qr(X2w, prep.y_dm * prep.sw)

    actual_dm = np.hstack([prep.endog_dm, prep.X_dm])[:, kept]
    residuals = prep.y_dm - actual_dm @ beta
    result = _assemble(prep, names, beta, xtx_inv, X2w, residuals, n_params, spec.vcov)
    result.first_stages = tuple(first_fits)
    if len(first_fits) == 1:
        result.first_stage = first_fits[0]
    return result


def first_stage(spec: RegressionSpec, panel: CountryYearPanel):
    """Standalone first-stage fit(s): one FitResult, or a list when several
    endogenous variables are specified."""
    if not spec.is_iv:
        raise EstimationError("spec has no endogenous variables; no first stage exists")
    prep = _Prepared(spec, build_design(spec, panel))
    fits, _ = _stage1(prep, spec)
    return fits[0] if len(fits) == 1 else fits
