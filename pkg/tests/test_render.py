import numpy as np
import pytest

from paneliv.errors import SpecificationError
from paneliv.harness import (
    ColumnResult,
    TableLayout,
    format_coefficient_cell,
    format_statistic,
    parse_coefficient_cell,
    render_table,
)
from paneliv.regress import FitResult


def fake_fit(coefficients, ses, ps, r2=0.5, n=47.0, countries=47) -> FitResult:
    names = list(coefficients)
    return FitResult(
        coefficient_names=names,
        coefficients=coefficients,
        covariance=np.diag([s**2 for s in ses.values()]),
        standard_errors=ses,
        t_statistics={k: coefficients[k] / ses[k] for k in names},
        p_values=ps,
        n_observations=n,
        n_countries=countries,
        n_clusters=None,
        r_squared=r2,
        residuals=np.zeros(3),
        dof_residual=40,
    )


class TestCells:
    def test_paper_style_cell(self):
        assert format_coefficient_cell(-1.32, 0.56, 0.02) == "-1.32** (0.56)"

    def test_no_stars_at_p_half(self):
        assert format_coefficient_cell(0.32, 0.84, 0.5) == "0.32 (0.84)"

    def test_parse_round_trip(self):
        cell = format_coefficient_cell(-1.3234, 0.5618, 0.004)
        coefficient, se, stars = parse_coefficient_cell(cell)
        assert (coefficient, se, stars) == (-1.32, 0.56, "***")

    def test_parse_rejects_garbage(self):
        with pytest.raises(SpecificationError):
            parse_coefficient_cell("n/a")

    def test_negative_r_squared_rendered_verbatim(self):
        assert format_statistic(-10.186, 3) == "-10.186"

    def test_huge_statistic_in_scientific_notation(self):
        assert format_statistic(4.9e6, 3) == "4.9e+06"

    def test_integers_render_bare(self):
        assert format_statistic(47.0) == "47"


class TestRenderTable:
    def make_results(self):
        fit_a = fake_fit({"x": -1.32}, {"x": 0.56}, {"x": 0.02}, r2=0.92)
        fit_b = fake_fit({"x": -2.35}, {"x": 1.13}, {"x": 0.04}, r2=0.87, countries=36)
        return [ColumnResult("Base", fit=fit_a), ColumnResult("LowMid", fit=fit_b)]

    def test_coefficient_cells_and_stats(self):
        table = render_table(self.make_results(), TableLayout(), "Demo")
        text = table.to_text()
        assert "-1.32** (0.56)" in text
        assert "R-squared" in text
        assert text.endswith("\n")

    def test_byte_identical_across_renders(self):
        layout = TableLayout(footnotes=("*p<.1 **p<.05 ***p<.01",))
        first = render_table(self.make_results(), layout, "Demo").to_text()
        second = render_table(self.make_results(), layout, "Demo").to_text()
        assert first == second

    def test_csv_mode(self):
        table = render_table(self.make_results(), TableLayout(), "Demo")
        lines = table.to_csv().splitlines()
        assert lines[0] == "Demo"
        assert lines[1] == ",Base,LowMid"
        assert lines[2].startswith("x,")

    def test_year_dummies_hidden_by_default(self):
        fit = fake_fit({"x": 1.0, "year_1950": 0.2}, {"x": 0.1, "year_1950": 0.1},
                       {"x": 0.001, "year_1950": 0.5})
        table = render_table([ColumnResult("c", fit=fit)], TableLayout(), "t")
        assert "year_1950" not in table.to_text()

    def test_error_column_renders_error_row(self):
        results = [ColumnResult("ok", fit=fake_fit({"x": 1.0}, {"x": 0.5}, {"x": 0.2})),
                   ColumnResult("bad", error="no usable observations")]
        table = render_table(results, TableLayout(), "t")
        assert "no usable observations" in table.to_text()

    def test_layout_rejects_unknown_statistic(self):
        with pytest.raises(SpecificationError, match="unknown statistics"):
            TableLayout(stats=("r_squared", "bayes_factor"))

    def test_labels_applied(self):
        layout = TableLayout(labels={"x": "Log Life Expectancy"})
        table = render_table(self.make_results(), layout, "t")
        assert "Log Life Expectancy" in table.to_text()

    def test_stars_match_p_values_in_every_cell(self):
        from paneliv.diagnostics import significance_stars
        results = self.make_results()
        table = render_table(results, TableLayout(), "t")
        row = next(r for r in table.rows if r.label == "x")
        for cell, result in zip(row.cells, results):
            _, _, stars = parse_coefficient_cell(cell)
            assert stars == significance_stars(result.fit.p_values["x"])
