"""Builds the estimation dataset for a regression spec.

Resolves variable references against the panel, applies the spec's
transform (levels rows, long differences, growth rates, decadal growth
steps), attaches year dummies and the intercept, and records the grouping
unit used for fixed effects and clustering. Rows with any unresolvable
value are dropped and counted, never imputed.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from ..errors import DataError, EstimationError, SpecificationError
from ..panel import CountryYearPanel, filter_sample
from ..transforms import expansion_base_country, interact_with_year_dummies, lag_variable
from .spec import RegressionSpec

_ATOM = re.compile(r"^([A-Za-z_][A-Za-z0-9_.|-]*)(?:@(\d+))?$")
_CALL = re.compile(r"^(log|diff|growth|lag|yearx)\((.*)\)$")


class _Node:
    pass


@dataclass(frozen=True)
class Var(_Node):
    name: str


@dataclass(frozen=True)
class Pin(_Node):
    name: str
    year: int


@dataclass(frozen=True)
class Log(_Node):
    inner: _Node


@dataclass(frozen=True)
class Diff(_Node):
    inner: _Node


@dataclass(frozen=True)
class Growth(_Node):
    inner: _Node


@dataclass(frozen=True)
class Lag(_Node):
    inner: _Node
    periods: int


@dataclass(frozen=True)
class YearX(_Node):
    inner: _Node


def parse_reference(text: str) -> _Node:
    """Parse one variable reference into its expression tree."""
    text = text.strip()
    call = _CALL.match(text)
    if call:
        func, body = call.group(1), call.group(2).strip()
        if func == "lag":
            if "," not in body:
                raise SpecificationError(f"lag needs two arguments: lag(name, periods), got {text!r}")
            inner_text, _, periods_text = body.rpartition(",")
            try:
                periods = int(periods_text.strip())
            except ValueError:
                raise SpecificationError(f"bad lag periods in {text!r}") from None
            if periods < 1:
                raise SpecificationError(f"lag periods must be >= 1 in {text!r}")
            return Lag(parse_reference(inner_text), periods)
        inner = parse_reference(body)
        return {"log": Log, "diff": Diff, "growth": Growth, "yearx": YearX}[func](inner)
    atom = _ATOM.match(text)
    if not atom:
        raise SpecificationError(f"cannot parse variable reference {text!r}")
    name, year = atom.group(1), atom.group(2)
    if year is not None:
        return Pin(name, int(year))
    return Var(name)


def reference_names(node: _Node) -> set[str]:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Pin):
        return {node.name}
    return reference_names(node.inner)


def _eval_level(node: _Node, panel: CountryYearPanel, country: str, year: int, step: int | None):
    if isinstance(node, Var):
        return panel.value(country, year, node.name)
    if isinstance(node, Pin):
        return panel.value(country, node.year, node.name)
    if isinstance(node, Log):
        inner = _eval_level(node.inner, panel, country, year, step)
        if inner is None or inner <= 0:
            return None
        return math.log(inner)
    if isinstance(node, Lag):
        if step is None:
            raise SpecificationError("lag() needs an evenly spaced year grid")
        return _eval_level(node.inner, panel, country, year - node.periods * step, step)
    raise SpecificationError(f"{type(node).__name__.lower()}() is not valid for a single panel row")


def _eval_span(node: _Node, panel: CountryYearPanel, country: str, start: int, end: int):
    if isinstance(node, Diff):
        a = _eval_level(node.inner, panel, country, start, None)
        b = _eval_level(node.inner, panel, country, end, None)
        if a is None or b is None:
            return None
        return b - a
    if isinstance(node, Growth):
        a = _eval_level(node.inner, panel, country, start, None)
        b = _eval_level(node.inner, panel, country, end, None)
        if a is None or b is None or a == 0.0:
            return None
        return (b - a) / a
    if isinstance(node, Pin):
        return panel.value(country, node.year, node.name)
    if isinstance(node, Log):
        inner = _eval_span(node.inner, panel, country, start, end)
        if inner is None or inner <= 0:
            return None
        return math.log(inner)
    if isinstance(node, Var):
        raise SpecificationError(
            f"bare variable {node.name!r} is ambiguous over a period; "
            f"wrap it in diff()/growth() or pin it with @year"
        )
    raise SpecificationError(f"{type(node).__name__.lower()}() is not valid over a period")


@dataclass
class DesignData:
    """Numeric arrays plus row bookkeeping, ready for estimation."""

    y: np.ndarray
    X: np.ndarray
    x_names: list[str]
    endog: np.ndarray
    endog_names: list[str]
    Z: np.ndarray
    z_names: list[str]
    weights: np.ndarray
    groups: list[str]
    cluster_ids: list | None
    row_keys: list
    absorb_country: bool
    n_dropped: int = 0
    dropped: list = field(default_factory=list)

    @property
    def n_rows(self) -> int:
        return len(self.y)


def _default_wrap(node: _Node, transform_kind: str, role: str) -> _Node:
    """Apply the transform's default collapse to bare variable references."""
    if not isinstance(node, Var):
        return node
    if transform_kind == "long_difference":
        return Diff(node)
    if transform_kind == "growth_rate":
        # Instruments enter as changes: a variable that reaches zero (the
        # predicted-mortality case) has no well-defined growth rate.
        return Diff(node) if role == "instrument" else Growth(node)
    return node


def _check_names_exist(panel: CountryYearPanel, nodes, labels) -> None:
    missing = []
    for node, label in zip(nodes, labels):
        for name in sorted(reference_names(node)):
            if not panel.has_variable(name):
                missing.append(name)
    if missing:
        raise SpecificationError(f"unknown variables: {', '.join(sorted(set(missing)))}")


def build_design(spec: RegressionSpec, panel: CountryYearPanel) -> DesignData:
    panel = filter_sample(panel, spec.sample)
    transform = spec.transform
    kind = transform.kind

    if kind == "lag":
        if not transform.base_variable:
            raise SpecificationError("lag transform needs base_variable")
        panel = lag_variable(panel, transform.base_variable, transform.lag_periods)
        kind = "levels_panel"
    elif kind == "year_interaction":
        panel = interact_with_year_dummies(panel, transform.base_variable)
        kind = "levels_panel"

    cross_section = kind in ("long_difference", "growth_rate") and not transform.decadal
    if cross_section and "country" in spec.fixed_effects:
        raise SpecificationError("country fixed effects are not identified with one row per country")
    if cross_section and "year" in spec.fixed_effects:
        raise SpecificationError("year fixed effects are not identified in a single cross-section")
    if spec.include_intercept and "country" in spec.fixed_effects:
        raise SpecificationError("an intercept is not identified alongside country fixed effects")

    dep_node = _default_wrap(parse_reference(spec.dependent), kind, "dependent")
    exog_nodes = [_default_wrap(parse_reference(r), kind, "exogenous") for r in spec.exogenous]
    endog_nodes = [_default_wrap(parse_reference(r), kind, "endogenous") for r in spec.endogenous]
    instr_nodes = [_default_wrap(parse_reference(r), kind, "instrument") for r in spec.instruments]
    if isinstance(dep_node, YearX) or any(isinstance(n, YearX) for n in endog_nodes + instr_nodes):
        raise SpecificationError("yearx() is only valid for exogenous regressors")

    # Row layout per transform.
    if kind == "levels_panel":
        if transform.years:
            selected = tuple(sorted(transform.years))
            outside = [y for y in selected if y not in panel.year_grid]
            if outside:
                raise DataError(f"years {outside} not in year grid {panel.year_grid}")
        else:
            lo = transform.start_year if transform.start_year is not None else panel.year_grid[0]
            hi = transform.end_year if transform.end_year is not None else panel.year_grid[-1]
            selected = tuple(y for y in panel.year_grid if lo <= y <= hi)
        if not selected:
            raise SpecificationError("levels transform selects no years")
        rows = [(c, y, y, y) for (c, y) in sorted(panel.observations) if y in selected]
    elif transform.decadal:
        lo, hi = transform.start_year, transform.end_year
        grid = [y for y in panel.year_grid if lo <= y <= hi]
        if len(grid) < 2:
            raise SpecificationError(f"decadal growth needs at least two grid years in [{lo}, {hi}]")
        steps = list(zip(grid, grid[1:]))
        rows = [(c, b, a, b) for c in panel.countries for (a, b) in steps]
    else:
        _require_years_in_grid(panel, transform.start_year, transform.end_year)
        rows = [(c, transform.end_year, transform.start_year, transform.end_year)
                for c in panel.countries]

    try:
        step = panel.grid_step() if kind == "levels_panel" and len(panel.year_grid) > 1 else None
    except DataError:
        step = None

    _check_names_exist(panel, [dep_node] + exog_nodes + endog_nodes + instr_nodes,
                       [spec.dependent] + list(spec.exogenous + spec.endogenous + spec.instruments))
    if spec.weight is not None and not panel.has_variable(spec.weight.variable):
        raise SpecificationError(f"unknown variables: {spec.weight.variable}")
    cluster_var = None
    if spec.vcov.kind == "cluster" and spec.vcov.cluster_variable != "country":
        cluster_var = spec.vcov.cluster_variable
        if not panel.has_variable(cluster_var):
            raise SpecificationError(f"unknown variables: {cluster_var}")

    # Exogenous terms: yearx() expands later, once the surviving row years
    # are known; everything else is one column.
    exog_terms: list[tuple[str, _Node, bool]] = []  # (name or yearx body, node, is_yearx)
    for text, node in zip(spec.exogenous, exog_nodes):
        if isinstance(node, YearX):
            if kind != "levels_panel" and not transform.decadal:
                raise SpecificationError("yearx() needs panel rows, not a cross-section")
            body = text.strip()[len("yearx("):-1].strip()
            exog_terms.append((body, node.inner, True))
        else:
            exog_terms.append((text.strip(), node, False))

    def resolve(node: _Node, country: str, start: int, end: int):
        if kind == "levels_panel":
            return _eval_level(node, panel, country, end, step)
        return _eval_span(node, panel, country, start, end)

    y_rows, term_rows, endog_rows, z_rows = [], [], [], []
    weights, groups, cluster_ids, row_keys = [], [], [], []
    dropped = []
    for (country, row_year, start, end) in rows:
        values = [resolve(dep_node, country, start, end)]
        values += [resolve(node, country, start, end) for (_, node, _) in exog_terms]
        endog_vals = [resolve(node, country, start, end) for node in endog_nodes]
        z_vals = [resolve(node, country, start, end) for node in instr_nodes]
        w = 1.0
        if spec.weight is not None:
            wv = panel.value(country, end, spec.weight.variable)
            if wv is None or wv <= 0:
                dropped.append((country, row_year, spec.weight.variable))
                continue
            w = float(wv)
        cl = None
        if cluster_var is not None:
            cl = panel.value(country, end, cluster_var)
            if cl is None:
                dropped.append((country, row_year, cluster_var))
                continue
        if any(v is None for v in values + endog_vals + z_vals):
            dropped.append((country, row_year, None))
            continue
        y_rows.append(values[0])
        term_rows.append(values[1:])
        endog_rows.append(endog_vals)
        z_rows.append(z_vals)
        weights.append(w)
        groups.append(expansion_base_country(country))
        cluster_ids.append(cl)
        row_keys.append((country, row_year))

    if not y_rows:
        raise EstimationError(
            f"no usable observations for dependent {spec.dependent!r} after dropping missings"
        )

    # Year dummies and interactions span the years that survived the drop;
    # the earliest surviving year is the omitted reference.
    n = len(y_rows)
    present_years = [yk for _, yk in row_keys]
    surviving_years = sorted(set(present_years))
    x_names: list[str] = []
    columns: list[np.ndarray] = []
    for t, (name, _, is_yearx) in enumerate(exog_terms):
        base = np.array([term_rows[r][t] for r in range(n)], dtype=float)
        if not is_yearx:
            x_names.append(name)
            columns.append(base)
            continue
        for y in surviving_years[1:]:
            x_names.append(f"{name}_x{y}")
            columns.append(np.where(np.array(present_years) == y, base, 0.0))
    absorb_country = "country" in spec.fixed_effects
    if "year" in spec.fixed_effects:
        for y in surviving_years[1:]:
            x_names.append(f"year_{y}")
            columns.append((np.array(present_years) == y).astype(float))
    # Year effects are a full set of year intercepts: without country
    # absorption the omitted reference year needs an explicit constant.
    if spec.include_intercept or ("year" in spec.fixed_effects and not absorb_country):
        x_names.append("const")
        columns.append(np.ones(n))
    X = np.column_stack(columns) if columns else np.empty((n, 0))

    return DesignData(
        y=np.array(y_rows, dtype=float),
        X=X,
        x_names=x_names,
        endog=np.array(endog_rows, dtype=float).reshape(n, len(endog_nodes)),
        endog_names=[t.strip() for t in spec.endogenous],
        Z=np.array(z_rows, dtype=float).reshape(n, len(instr_nodes)),
        z_names=[t.strip() for t in spec.instruments],
        weights=np.array(weights, dtype=float),
        groups=groups,
        cluster_ids=cluster_ids if cluster_var is not None else None,
        row_keys=row_keys,
        absorb_country="country" in spec.fixed_effects,
        n_dropped=len(dropped),
        dropped=dropped,
    )


def _require_years_in_grid(panel: CountryYearPanel, *years: int) -> None:
    for year in years:
        if year not in panel.year_grid:
            raise DataError(f"year {year} not in year grid {panel.year_grid}")
