"""Shared fixtures for tests."""

from __future__ import annotations

from pathlib import Path

import pytest

from forkcheck.history.recorder import HistoryRecorder
from forkcheck.models import (
    BOTTOM,
    History,
    RegisterSpec,
    ScenarioParams,
    SearchBudget,
    data,
)
from forkcheck.scenarios.executions import generate_alpha, generate_beta, generate_gamma

DATA_DIR = Path(__file__).parent / "data"
CONFIG_DIR = Path(__file__).parent.parent / "data" / "configs"


def pytest_addoption(parser):
    parser.addoption(
        "--runslow", action="store_true", default=False,
        help="run the exhaustive oracle and 1,000-seed simulator suites",
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def config_dir() -> Path:
    return CONFIG_DIR


@pytest.fixture
def spec() -> RegisterSpec:
    """C1 writes X1, C2 writes X2."""
    return RegisterSpec.default()


@pytest.fixture
def budget() -> SearchBudget:
    return SearchBudget()


@pytest.fixture
def params() -> ScenarioParams:
    return ScenarioParams(z=4, l=1)


@pytest.fixture
def alpha(params) -> History:
    return generate_alpha(params)


@pytest.fixture
def beta(params) -> History:
    return generate_beta(params)


@pytest.fixture
def gamma(params) -> History:
    return generate_gamma(params)


@pytest.fixture
def recorder() -> HistoryRecorder:
    return HistoryRecorder()


@pytest.fixture
def crossed_reads() -> History:
    """Each client writes its register, then reads ⊥ from the other's.

    No single order explains both reads, but two disjoint views do.
    """
    rec = HistoryRecorder()
    rec.write(1, "X1", data("a"))
    rec.write(2, "X2", data("b"))
    rec.read(1, "X2", BOTTOM)
    rec.read(2, "X1", BOTTOM)
    return rec.history()
