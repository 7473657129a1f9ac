import numpy as np
import pytest

from paneliv.diagnostics import cragg_donald_stat
from paneliv.errors import SpecificationError
from paneliv.regress import RegressionSpec, fit_ols
from paneliv.simlab import (
    DgpConfig,
    exclusion_violation_demo,
    monte_carlo_bias,
    replication_seed,
    simulate_dgp,
)
from paneliv.simlab.mc import _estimation_spec, estimate_alpha
from paneliv.transforms import TransformKind


class TestDgpConfig:
    def test_defaults_valid(self):
        config = DgpConfig()
        assert config.n_countries == 47
        assert config.truncation_probability() < 0.05

    def test_too_few_countries(self):
        with pytest.raises(SpecificationError):
            DgpConfig(n_countries=1)

    def test_high_truncation_warns(self):
        with pytest.warns(UserWarning, match="truncates"):
            DgpConfig(mortality_base=2.8)  # mean initial mortality 0 -> half truncated

    def test_from_options(self):
        config = DgpConfig.from_options({"rho_violation": "-0.3", "n_countries": "20",
                                         "years": "1940, 1950, 1960"})
        assert config.rho_violation == -0.3
        assert config.years == (1940, 1950, 1960)

    def test_from_options_unknown_key(self):
        from paneliv.errors import ConfigError
        with pytest.raises(ConfigError, match="unknown key"):
            DgpConfig.from_options({"rho": "-0.3"})


class TestSimulateDgp:
    def test_same_seed_identical_panels(self):
        config = DgpConfig()
        a = simulate_dgp(config, 99)
        b = simulate_dgp(config, 99)
        assert a.panel.observations == b.panel.observations
        assert a.mortality.records == b.mortality.records

    def test_different_seeds_differ(self):
        config = DgpConfig()
        a = simulate_dgp(config, 1)
        b = simulate_dgp(config, 2)
        assert a.panel.observations != b.panel.observations

    def test_wealth_mortality_slope_sign(self):
        draw = simulate_dgp(DgpConfig(n_countries=200), 5)
        spec = RegressionSpec(dependent="predicted_mortality", exogenous=("log_gdppc",),
                              include_intercept=True,
                              transform=TransformKind("levels_panel", years=(1940,)))
        fit = fit_ols(spec, draw.panel)
        assert fit.coefficients["log_gdppc"] < 0
        assert fit.p_values["log_gdppc"] < 0.01

    def test_instrument_matches_mortality_sum(self):
        config = DgpConfig()
        draw = simulate_dgp(config, 11)
        country = draw.panel.countries[0]
        total_1940 = sum(v for (c, d, y), v in draw.mortality.records.items()
                         if c == country and y == 1940)
        assert draw.panel.value(country, 1940, "predicted_mortality") == pytest.approx(total_1940)
        assert draw.panel.value(country, 1960, "predicted_mortality") == 0.0

    def test_valid_iv_recovers_alpha_in_low_noise_limit(self):
        config = DgpConfig(true_alpha=0.7, rho_violation=0.0, n_countries=300,
                           le_noise=1e-4, growth_noise=1e-4)
        draw = simulate_dgp(config, 31)
        alpha_hat = estimate_alpha(draw, config)
        assert alpha_hat == pytest.approx(0.7, abs=1e-3)

    def test_truncated_countries_flagged(self):
        config = DgpConfig(n_countries=300)
        draw = simulate_dgp(config, 17)
        for country in draw.truncated_countries:
            assert draw.panel.value(country, 1940, "predicted_mortality") == 0.0


class TestMonteCarlo:
    def test_plumbing_two_reps(self):
        result = monte_carlo_bias(DgpConfig(), reps=2, seed=5)
        assert result.reps == 2
        assert len(result.estimates) == 2
        again = monte_carlo_bias(DgpConfig(), reps=2, seed=5)
        assert result.estimates == again.estimates

    def test_reps_lower_bound(self):
        with pytest.raises(SpecificationError):
            monte_carlo_bias(DgpConfig(), reps=1, seed=0)

    def test_sub_seed_mixing_is_stated_function(self):
        config = DgpConfig()
        result = monte_carlo_bias(config, reps=3, seed=13)
        direct = [estimate_alpha(simulate_dgp(config, replication_seed(13, r)), config)
                  for r in range(3)]
        assert result.estimates == direct

    def test_ci_contains_mean(self):
        result = monte_carlo_bias(DgpConfig(), reps=20, seed=1)
        assert result.ci95[0] <= result.mean <= result.ci95[1]

    def test_bias_monotone_in_violation(self):
        means = []
        for rho in (-0.4, -0.2, 0.0, 0.2):
            result = monte_carlo_bias(DgpConfig(rho_violation=rho), reps=40, seed=77)
            means.append(result.mean)
        assert means == sorted(means)

    def test_relevance_knob_strengthens_first_stage(self):
        cds = []
        for gamma in (-0.15, -0.45, -0.9):
            draw = simulate_dgp(DgpConfig(gamma_iv=gamma), 23)
            cds.append(cragg_donald_stat(_estimation_spec(DgpConfig()), draw.panel))
        assert cds == sorted(cds)


class TestDemo:
    def test_report_deterministic_bytes(self):
        config = DgpConfig(rho_violation=-0.3)
        first = exclusion_violation_demo(config, reps=10, seed=3)
        second = exclusion_violation_demo(config, reps=10, seed=3)
        assert first == second

    def test_report_sections(self):
        report = exclusion_violation_demo(DgpConfig(), reps=5, seed=4)
        assert "A. Initial mortality on initial log GDP per capita" in report
        assert "B. GDP per capita growth on initial mortality" in report
        assert "C. Monte Carlo distribution of the 2SLS estimate" in report

    def test_violation_sign_shows_in_part_b(self):
        config = DgpConfig(rho_violation=-0.3, n_countries=200)
        draw = simulate_dgp(config, np.random.SeedSequence((9, 2**33)))
        spec = RegressionSpec(dependent="gdppc", exogenous=("predicted_mortality@1940",),
                              include_intercept=True,
                              transform=TransformKind("growth_rate",
                                                      start_year=1940, end_year=1950))
        fit = fit_ols(spec, draw.panel)
        assert fit.coefficients["predicted_mortality@1940"] < 0

    def test_null_channel_part_b_mostly_insignificant(self):
        config = DgpConfig(rho_violation=0.0)
        spec = RegressionSpec(dependent="gdppc", exogenous=("predicted_mortality@1940",),
                              include_intercept=True, vcov=r_robust(),
                              transform=TransformKind("growth_rate",
                                                      start_year=1940, end_year=1950))
        insignificant = 0
        reps = 40
        for rep in range(reps):
            draw = simulate_dgp(config, replication_seed(101, rep))
            fit = fit_ols(spec, draw.panel)
            if abs(fit.t_statistics["predicted_mortality@1940"]) < 2.0:
                insignificant += 1
        assert insignificant >= 0.9 * reps


def r_robust():
    from paneliv.regress import VcovKind
    return VcovKind("robust_hc1")
