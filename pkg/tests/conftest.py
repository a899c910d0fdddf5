"""Shared fixtures: simulated series, the bundled snapshot and small configs."""

from pathlib import Path

import numpy as np
import pytest
import yaml

from energy_econometrics.config import bundled_config_path, load_analysis_config
from energy_econometrics.series import Series

DATA_DIR = bundled_config_path().parent
SNAPSHOT = DATA_DIR / "ecuador_energy_1970_2015.csv"
SNAPSHOT_SHA256 = "41407b6930515119ca3fc0cb118ce6ebdd9f3ef2f0eacc666e2fe4d4d46cea67"


def pytest_addoption(parser):
    parser.addoption("--run-slow", action="store_true", default=False, help="run Monte Carlo tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow"):
        return
    skip = pytest.mark.skip(reason="needs --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def random_walk(nobs: int = 120, seed: int = 0, drift: float = 0.0, name: str = "y", start: int = 1900) -> Series:
    rng = np.random.default_rng(seed)
    return Series(name, start, np.cumsum(drift + rng.standard_normal(nobs)))


def stationary_ar(nobs: int = 120, rho: float = 0.3, seed: int = 0, name: str = "y", start: int = 1900) -> Series:
    rng = np.random.default_rng(seed)
    e = rng.standard_normal(nobs)
    y = np.zeros(nobs)
    for t in range(1, nobs):
        y[t] = rho * y[t - 1] + e[t]
    return Series(name, start, y)


@pytest.fixture
def walk() -> Series:
    return random_walk()


@pytest.fixture
def replication_config():
    return load_analysis_config(bundled_config_path())


def small_config_doc(data_path: Path) -> dict:
    """A quick analysis over the snapshot: one test per family plus one VAR and one DOLS model."""
    return {
        "name": "small",
        "seed": 7,
        "data": {
            "path": str(data_path),
            "columns": {"E": "energy_pc", "Y": "gdp_pc", "I": "industry", "P": "oil_price"},
        },
        "variables": {"response": "E", "regressors": ["Y", "P", "I"], "labels": {"Y": "income"}},
        "unit-root": [
            {"test": "adf", "series": ["lnE", "lnP"], "deterministic": "c", "max-lag": 2},
            {"test": "pp", "series": ["lnE"], "deterministic": "ct"},
            {
                "test": "zivot-andrews",
                "series": ["lnE"],
                "deterministic": "ct",
                "kind": "trend",
                "style": "AO",
                "max-lag": 1,
                "selection": "fixed:1",
            },
        ],
        "cointegration": {
            "max-lag": 2,
            "configurations": [{"name": "break-1983", "breaks": [1983]}],
        },
        "dols": {"models": [{"name": "model-1", "breaks": [{"year": 1983}]}]},
        "output": {"directory": "out", "formats": ["json"]},
    }


@pytest.fixture
def write_config(tmp_path):
    """Write an analysis YAML into ``tmp_path`` and return its path."""

    def write(doc: dict, name: str = "analysis.yml") -> Path:
        path = tmp_path / name
        path.write_text(yaml.safe_dump(doc, sort_keys=False), encoding="utf-8")
        return path

    return write


@pytest.fixture
def small_config_path(write_config):
    return write_config(small_config_doc(SNAPSHOT))
