"""Dense normal-equations oracle for validating the absorption path.

Deliberately the opposite of the production solver: explicit dummy columns
for every fixed effect, cross products, and a direct solve. Test-only.
"""

from __future__ import annotations

import numpy as np

from ..errors import EstimationError


def oracle_dummy_ols(design: np.ndarray, response: np.ndarray,
                     weights: np.ndarray | None = None):
    """Solve least squares via the normal equations.

    Returns (coefficients, (X'WX)^-1). The design must already contain any
    dummy columns; singular normal matrices are an error.
    """
    X = np.asarray(design, dtype=float)
    y = np.asarray(response, dtype=float)
    if weights is None:
        weights = np.ones(len(y))
    W = np.asarray(weights, dtype=float)
    xtx = X.T @ (W[:, None] * X)
    xty = X.T @ (W * y)
    try:
        xtx_inv = np.linalg.inv(xtx)
    except np.linalg.LinAlgError:
        raise EstimationError("singular normal matrix in oracle") from None
    return xtx_inv @ xty, xtx_inv


def dummy_design(regressors: np.ndarray, groups: list, years: list,
                 country_fe: bool = True, year_fe: bool = True):
    """Explicit-dummy design: regressors, one dummy per country, year dummies
    with the earliest year omitted. Returns (matrix, names)."""
    n = regressors.shape[0]
    blocks = [regressors]
    names = [f"x{j}" for j in range(regressors.shape[1])]
    if country_fe:
        levels = sorted(set(groups))
        D = np.zeros((n, len(levels)))
        for i, g in enumerate(groups):
            D[i, levels.index(g)] = 1.0
        blocks.append(D)
        names += [f"country_{g}" for g in levels]
    if year_fe:
        levels = sorted(set(years))[1:]
        D = np.zeros((n, len(levels)))
        for i, y in enumerate(years):
            if y in levels:
                D[i, levels.index(y)] = 1.0
        blocks.append(D)
        names += [f"year_{y}" for y in levels]
    if not country_fe:
        blocks.append(np.ones((n, 1)))
        names.append("const")
    return np.hstack(blocks), names
