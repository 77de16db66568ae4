import numpy as np
import pytest

from curvetail import Curve, Dataset


@pytest.fixture
def flat_curve():
    return Curve([0.0, 0.0, 0.0, 0.0, 0.0], identifier="flat")


@pytest.fixture
def toy_dataset():
    # four curves, pairwise distances driven by their second differences
    curves = [
        Curve([0.0, 0.0, 0.0], identifier="a"),
        Curve([0.0, 0.0, 1.0], identifier="b"),
        Curve([0.0, 0.0, 3.0], identifier="c"),
        Curve([0.0, 0.0, 7.0], identifier="d"),
    ]
    responses = [
        np.array([3.0, 1.0, 2.0]),
        np.array([5.0]),
        np.array([4.0, 6.0]),
        np.array([8.0, 9.0, 10.0]),
    ]
    return Dataset(curves, responses)


def pytest_addoption(parser):
    parser.addoption(
        "--skip-slow", action="store_true", default=False,
        help="skip the Monte Carlo heavy tests",
    )


def pytest_collection_modifyitems(config, items):
    if not config.getoption("--skip-slow"):
        return
    marker = pytest.mark.skip(reason="--skip-slow given")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(marker)


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: Monte Carlo heavy test")
