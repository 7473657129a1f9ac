"""Paper-style regression table rendering.

Coefficient cells read "b{stars} (se)"; statistic rows follow. Output is
fixed-width text or CSV, byte-stable across runs for golden-file tests.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field

from ..diagnostics import WeakIvReport, significance_stars
from ..errors import SpecificationError
from ..regress.spec import FitResult

KNOWN_STATS = ("r_squared", "n_observations", "n_countries", "n_clusters",
               "cragg_donald", "critical_value_10", "critical_value_15")

STAT_LABELS = {
    "r_squared": "R-squared",
    "n_observations": "Number of Observations",
    "n_countries": "Number of Countries",
    "n_clusters": "Number of Clusters",
    "cragg_donald": "Cragg-Donald F-Statistics",
    "critical_value_10": "Critical value (10% maximal size)",
    "critical_value_15": "Critical value (15% maximal size)",
}

_CELL = re.compile(r"^(-?\d+\.\d+)(\*{0,3})\s+\((\d+\.\d+)\)$")


@dataclass
class TableLayout:
    """Which rows a rendered table carries and at what precision."""

    coefficients: tuple[str, ...] | None = None
    labels: dict[str, str] = field(default_factory=dict)
    stats: tuple[str, ...] = ("r_squared", "n_observations", "n_countries")
    coef_precision: int = 2
    stat_precision: int = 3
    footnotes: tuple[str, ...] = ()

    def __post_init__(self):
        unknown = [s for s in self.stats if s not in KNOWN_STATS]
        if unknown:
            raise SpecificationError(f"layout references unknown statistics: {unknown}")


@dataclass
class RenderedRow:
    label: str
    cells: list[str]
    section: bool = False


@dataclass
class RenderedTable:
    title: str
    columns: list[str]
    rows: list[RenderedRow]
    footnotes: list[str] = field(default_factory=list)

    def to_text(self) -> str:
        label_width = max([len(r.label) for r in self.rows] + [len("")])
        widths = []
        for j, col in enumerate(self.columns):
            cells = [r.cells[j] for r in self.rows if not r.section and j < len(r.cells)]
            widths.append(max([len(col)] + [len(c) for c in cells]))
        sep = "-" * (label_width + sum(w + 2 for w in widths))
        lines = [self.title, sep]
        header = "".ljust(label_width) + "".join("  " + c.rjust(w) for c, w in zip(self.columns, widths))
        lines.append(header.rstrip())
        for row in self.rows:
            if row.section:
                lines.append(row.label)
                continue
            line = row.label.ljust(label_width)
            line += "".join("  " + c.rjust(w) for c, w in zip(row.cells, widths))
            lines.append(line.rstrip())
        lines.append(sep)
        lines.extend(self.footnotes)
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([self.title])
        writer.writerow([""] + self.columns)
        for row in self.rows:
            if row.section:
                writer.writerow([row.label])
            else:
                writer.writerow([row.label] + row.cells)
        for note in self.footnotes:
            writer.writerow([note])
        return buf.getvalue()

    def render(self, fmt: str = "text") -> str:
        if fmt == "text":
            return self.to_text()
        if fmt == "csv":
            return self.to_csv()
        raise SpecificationError(f"unknown output format {fmt!r}; expected text or csv")


def format_coefficient_cell(coefficient: float, se: float, p_value: float, precision: int = 2) -> str:
    stars = significance_stars(p_value)
    return f"{coefficient:.{precision}f}{stars} ({se:.{precision}f})"


def parse_coefficient_cell(text: str) -> tuple[float, float, str]:
    """Inverse of format_coefficient_cell at rendering precision."""
    m = _CELL.match(text.strip())
    if not m:
        raise SpecificationError(f"cannot parse coefficient cell {text!r}")
    return float(m.group(1)), float(m.group(3)), m.group(2)


def format_statistic(value: float, precision: int = 3) -> str:
    if value != value:  # NaN
        return "--"
    if abs(value) >= 1e5:
        return f"{value:.1e}"
    if value == int(value):
        return str(int(value))
    return f"{value:.{precision}f}"


@dataclass
class ColumnResult:
    """One rendered column: a fit, its optional weak-IV report, or an error."""

    label: str
    fit: FitResult | None = None
    weak_iv: WeakIvReport | None = None
    error: str | None = None


def _coefficient_order(results: list[ColumnResult], layout: TableLayout) -> list[str]:
    if layout.coefficients is not None:
        return list(layout.coefficients)
    order: list[str] = []
    for result in results:
        if result.fit is None:
            continue
        for name in result.fit.coefficient_names:
            if name.startswith("year_"):
                continue
            if name not in order:
                order.append(name)
    return order


def render_table(results: list[ColumnResult], layout: TableLayout, title: str = "") -> RenderedTable:
    """One table section: coefficient rows then statistic rows.

    Year dummies are hidden unless the layout lists them explicitly; every
    coefficient cell carries the stars implied by its p-value.
    """
    if not results:
        raise SpecificationError("nothing to render")
    names = _coefficient_order(results, layout)
    rows: list[RenderedRow] = []
    for name in names:
        cells = []
        for result in results:
            fit = result.fit
            if fit is None or name not in fit.coefficients:
                cells.append("")
                continue
            cells.append(format_coefficient_cell(
                fit.coefficients[name], fit.standard_errors[name],
                fit.p_values[name], layout.coef_precision))
        rows.append(RenderedRow(layout.labels.get(name, name), cells))
    for stat in layout.stats:
        cells = []
        for result in results:
            cells.append(_statistic_cell(result, stat, layout.stat_precision))
        rows.append(RenderedRow(STAT_LABELS[stat], cells))
    if any(r.error for r in results):
        rows.append(RenderedRow("Error", [r.error or "" for r in results]))
    footnotes = list(layout.footnotes)
    return RenderedTable(title, [r.label for r in results], rows, footnotes)


def _statistic_cell(result: ColumnResult, stat: str, precision: int) -> str:
    if stat == "cragg_donald":
        if result.weak_iv is None:
            return ""
        return format_statistic(result.weak_iv.cragg_donald_f, precision)
    if stat.startswith("critical_value_"):
        if result.weak_iv is None:
            return ""
        size = int(stat.rsplit("_", 1)[1])
        value = result.weak_iv.critical_values.get(size)
        return "" if value is None else f"{value:.2f}"
    fit = result.fit
    if fit is None:
        return ""
    value = getattr(fit, stat)
    if value is None:
        return ""
    if stat in ("n_observations", "n_countries", "n_clusters"):
        # Counts print in full, Table-7 style, even at population scale.
        return str(int(round(float(value))))
    return format_statistic(float(value), precision)


def stack_sections(title: str, columns: list[str],
                   sections: list[tuple[str, RenderedTable]]) -> RenderedTable:
    """Stack per-panel tables under section header rows (Table 1/4 style)."""
    rows: list[RenderedRow] = []
    footnotes: list[str] = []
    for heading, table in sections:
        rows.append(RenderedRow(heading, [], section=True))
        rows.extend(table.rows)
        for note in table.footnotes:
            if note not in footnotes:
                footnotes.append(note)
    return RenderedTable(title, columns, rows, footnotes)
