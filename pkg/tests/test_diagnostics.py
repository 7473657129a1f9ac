import numpy as np
import pytest
from hypothesis import given, strategies as st

from paneliv.diagnostics import (
    cragg_donald_stat,
    significance_stars,
    stock_yogo_critical,
    weak_iv_report,
)
from paneliv.errors import SpecificationError, UntabulatedError
from paneliv.panel import CountryYearPanel
from paneliv.regress import RegressionSpec, first_stage

FE_BOTH = frozenset({"country", "year"})


def iv_panel(rng, n_countries=15, n_years=4, gamma=-0.4, n_instruments=1):
    years = tuple(1940 + 10 * k for k in range(n_years))
    observations = {}
    for i in range(n_countries):
        for year in years:
            record = {}
            z = rng.normal(size=n_instruments)
            for k in range(n_instruments):
                record[f"z{k}"] = float(z[k])
            record["x"] = float(gamma * z.sum() + rng.normal() * 0.5 + 0.2 * i)
            record["y"] = float(2.0 * record["x"] + rng.normal())
            observations[(f"C{i:02d}", year)] = record
    return CountryYearPanel(observations, years)


def iv_spec(n_instruments=1, **kwargs):
    return RegressionSpec(dependent="y", endogenous=("x",),
                          instruments=tuple(f"z{k}" for k in range(n_instruments)),
                          fixed_effects=FE_BOTH, **kwargs)


class TestCraggDonald:
    @pytest.mark.parametrize("seed", range(5))
    def test_equals_squared_t_in_just_identified_case(self, seed):
        rng = np.random.default_rng(seed)
        panel = iv_panel(rng)
        spec = iv_spec()
        cd = cragg_donald_stat(spec, panel)
        fs = first_stage(spec, panel)  # classical vcov by default
        assert cd == pytest.approx(fs.t_statistics["z0"] ** 2, rel=1e-8)

    def test_matches_dense_eigen_oracle_two_instruments(self):
        rng = np.random.default_rng(77)
        panel = iv_panel(rng, n_instruments=2)
        spec = iv_spec(n_instruments=2)
        cd = cragg_donald_stat(spec, panel)

        # Independent oracle: explicit dummies, partialling, eigenvalues.
        rows = sorted(panel.observations)
        y = np.array([panel.observations[k]["x"] for k in rows])[:, None]
        Z = np.array([[panel.observations[k]["z0"], panel.observations[k]["z1"]] for k in rows])
        countries = sorted({c for c, _ in rows})
        years = sorted({t for _, t in rows})
        C = np.zeros((len(rows), len(countries) + len(years) - 1))
        for r, (country, year) in enumerate(rows):
            C[r, countries.index(country)] = 1.0
            if year != years[0]:
                C[r, len(countries) + years.index(year) - 1] = 1.0
        P = C @ np.linalg.pinv(C)
        Xt = y - P @ y
        Zt = Z - P @ Z
        Pz = Zt @ np.linalg.pinv(Zt)
        A = Xt.T @ Pz @ Xt
        B = Xt.T @ (Xt - Pz @ Xt)
        lam = np.min(np.linalg.eigvals(np.linalg.inv(B) @ A).real)
        n = len(rows)
        k1 = len(countries) + len(years) - 1
        expected = lam * (n - k1 - 2) / 2
        assert cd == pytest.approx(expected, rel=1e-8)

    def test_invariant_to_instrument_rescaling(self):
        rng = np.random.default_rng(8)
        panel = iv_panel(rng)
        cd = cragg_donald_stat(iv_spec(), panel)
        scaled_obs = {key: {**record, "z0": record["z0"] * 37.0}
                      for key, record in panel.observations.items()}
        scaled = CountryYearPanel(scaled_obs, panel.year_grid)
        assert cragg_donald_stat(iv_spec(), scaled) == pytest.approx(cd, rel=1e-6)

    def test_invariant_to_adding_exogenous_multiples(self):
        rng = np.random.default_rng(9)
        panel = iv_panel(rng)
        obs = {key: {**record, "c": float(rng.normal())} for key, record in panel.observations.items()}
        panel_c = CountryYearPanel(obs, panel.year_grid)
        spec = RegressionSpec(dependent="y", endogenous=("x",), instruments=("z0",),
                              exogenous=("c",), fixed_effects=FE_BOTH)
        cd = cragg_donald_stat(spec, panel_c)
        shifted_obs = {key: {**record, "z0": record["z0"] + 2.5 * record["c"]}
                       for key, record in panel_c.observations.items()}
        shifted = CountryYearPanel(shifted_obs, panel.year_grid)
        assert cragg_donald_stat(spec, shifted) == pytest.approx(cd, rel=1e-6)

    def test_requires_instruments(self, toy_panel):
        spec = RegressionSpec(dependent="y", exogenous=("x",))
        with pytest.raises(SpecificationError):
            cragg_donald_stat(spec, toy_panel)


class TestStockYogo:
    def test_paper_cells(self):
        assert stock_yogo_critical(1, 1, 10) == 16.38
        assert stock_yogo_critical(1, 1, 15) == 8.96

    def test_string_sizes_accepted(self):
        assert stock_yogo_critical(1, 1, "10%") == 16.38

    def test_order_condition(self):
        with pytest.raises(SpecificationError, match="order condition"):
            stock_yogo_critical(3, 2, 10)

    def test_untabulated_cell(self):
        with pytest.raises(UntabulatedError, match="tabulated"):
            stock_yogo_critical(2, 5, 10)

    def test_pure_lookup_is_stable(self):
        assert stock_yogo_critical(1, 2, 10) == stock_yogo_critical(1, 2, 10)

    def test_bad_size(self):
        with pytest.raises(SpecificationError):
            stock_yogo_critical(1, 1, 12)


class TestSignificanceStars:
    @pytest.mark.parametrize("p,stars", [(0.005, "***"), (0.01, "**"), (0.049, "**"),
                                         (0.05, "*"), (0.09, "*"), (0.1, ""), (0.5, "")])
    def test_thresholds(self, p, stars):
        assert significance_stars(p) == stars

    def test_out_of_range(self):
        with pytest.raises(SpecificationError):
            significance_stars(1.5)

    @given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
    def test_monotone(self, p1, p2):
        if p1 > p2:
            p1, p2 = p2, p1
        assert len(significance_stars(p1)) >= len(significance_stars(p2))


class TestWeakIvReport:
    def test_strong_instrument_not_weak_at_10(self):
        rng = np.random.default_rng(15)
        panel = iv_panel(rng, n_countries=40, gamma=-1.0)
        report = weak_iv_report(iv_spec(), panel)
        assert report.cragg_donald_f > 16.38
        assert report.verdict == "not_weak_at_10"

    def test_verdict_between_critical_values(self):
        # Tune relevance so CD lands between the 15% and 10% thresholds.
        for seed in range(200):
            rng = np.random.default_rng(seed)
            panel = iv_panel(rng, n_countries=12, n_years=2, gamma=-0.35)
            report = weak_iv_report(iv_spec(), panel)
            if 8.96 < report.cragg_donald_f <= 16.38:
                assert report.verdict == "not_weak_at_15"
                return
        pytest.fail("no seed produced a mid-range Cragg-Donald statistic")

    def test_weak_verdict(self):
        for seed in range(200):
            rng = np.random.default_rng(seed)
            panel = iv_panel(rng, n_countries=10, n_years=2, gamma=0.0)
            report = weak_iv_report(iv_spec(), panel)
            if report.cragg_donald_f <= 8.96:
                assert report.verdict == "weak"
                return
        pytest.fail("no seed produced a weak instrument")

    def test_report_carries_dimensions(self):
        rng = np.random.default_rng(2)
        panel = iv_panel(rng, n_instruments=2)
        report = weak_iv_report(iv_spec(n_instruments=2), panel)
        assert (report.n_endogenous, report.n_instruments) == (1, 2)
        assert report.critical_values[10] == 19.93
