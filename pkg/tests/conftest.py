import numpy as np
import pytest

from paneliv.panel import CountryMeta, CountryYearPanel

FIXTURES = __import__("pathlib").Path(__file__).parent / "fixtures"


@pytest.fixture
def toy_panel() -> CountryYearPanel:
    """4 countries x 3 decades with x, y, and integer weights."""
    rng = np.random.default_rng(11)
    observations = {}
    for i, country in enumerate(["AUS", "BRA", "CHN", "DNK"]):
        for year in (1940, 1950, 1960):
            x = float(rng.normal())
            observations[(country, year)] = {
                "x": x,
                "y": float(2.0 * x + 0.5 * i + 0.01 * (year - 1940) + rng.normal() * 0.3),
                "w": float(rng.integers(1, 6)),
                "pop": float(rng.integers(10, 400)),
            }
    meta = {
        "AUS": CountryMeta("rich"),
        "BRA": CountryMeta("low_middle"),
        "CHN": CountryMeta("low_middle"),
        "DNK": CountryMeta("excluded"),
    }
    return CountryYearPanel(observations, (1940, 1950, 1960), meta)


@pytest.fixture(scope="session")
def fixture_data_dir():
    return FIXTURES / "synthetic"


@pytest.fixture(scope="session")
def golden_dir():
    return FIXTURES / "golden"


def make_random_panel(rng: np.random.Generator, n_countries: int, n_years: int,
                      n_regressors: int) -> CountryYearPanel:
    """Random well-behaved panel with country/year structure in y."""
    years = tuple(1940 + 10 * k for k in range(n_years))
    country_effects = rng.normal(0.0, 1.0, n_countries)
    year_effects = rng.normal(0.0, 0.5, n_years)
    beta = rng.normal(0.0, 1.0, n_regressors)
    observations = {}
    for i in range(n_countries):
        for t, year in enumerate(years):
            x = rng.normal(0.0, 1.0, n_regressors)
            y = float(x @ beta + country_effects[i] + year_effects[t] + rng.normal())
            record = {f"x{j}": float(x[j]) for j in range(n_regressors)}
            record["y"] = y
            observations[(f"C{i:03d}", year)] = record
    return CountryYearPanel(observations, years)
