"""Coefficient covariance estimators.

All three estimators share the bread (X'X)^-1 computed from the
sqrt-weight-scaled design. Frequency weights enter so that every formula
agrees with the same computation on the row-expanded panel: the meat sums
w * e^2 * x x' (HC) or within-cluster score sums of w * e * x (CR1).
"""

from __future__ import annotations

import numpy as np

from ..errors import EstimationError, SpecificationError
from .spec import VcovKind


def compute_vcov(kind: VcovKind, xtx_inv: np.ndarray, rows_scaled: np.ndarray,
                 residuals: np.ndarray, weights: np.ndarray, n_obs: float,
                 n_params: int, clusters=None) -> np.ndarray:
    """Covariance of the coefficient estimates.

    rows_scaled are sqrt(w)-scaled (and demeaned) design rows; residuals are
    raw per-row residuals; n_obs is the weight sum; n_params counts every
    estimated parameter including absorbed fixed effects.
    """
    dof = n_obs - n_params
    if dof <= 0:
        raise EstimationError(f"zero residual degrees of freedom (N={n_obs}, K={n_params})")

    if kind.kind == "classical":
        s2 = float(weights @ residuals**2) / dof
        return s2 * xtx_inv

    if kind.kind == "robust_hc1":
        scores = rows_scaled * residuals[:, None]
        meat = scores.T @ scores
        return (n_obs / dof) * (xtx_inv @ meat @ xtx_inv)

    if kind.kind == "cluster":
        if clusters is None:
            raise SpecificationError("cluster vcov requires cluster assignments")
        scores = rows_scaled * (np.sqrt(weights) * residuals)[:, None]
        labels = {}
        for c in clusters:
            labels.setdefault(c, len(labels))
        n_clusters = len(labels)
        if n_clusters < 2:
            raise EstimationError(f"cluster-robust covariance needs at least 2 clusters, got {n_clusters}")
        sums = np.zeros((n_clusters, scores.shape[1]))
        for i, c in enumerate(clusters):
            sums[labels[c]] += scores[i]
        meat = sums.T @ sums
        factor = (n_clusters / (n_clusters - 1)) * ((n_obs - 1) / dof)
        return factor * (xtx_inv @ meat @ xtx_inv)

    raise SpecificationError(f"unknown vcov kind {kind.kind!r}")
