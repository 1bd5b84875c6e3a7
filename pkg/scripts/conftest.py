"""conftest.py

Shared Fixtures and the --runslow Switch for Full-Size Runs

"""
import numpy as np
import pytest
from scipy import sparse

from latent_witness.phase_space import (
    ContextSet,
    ForwardMatrix,
    LatentGrid,
    OutcomeBinning,
    StatVector,
    build_forward_matrix,
)


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run full-size tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def toy_forward():
    """Two Binary Contexts Whose Latent Points Always Agree"""
    columns = np.array([[1.0, 0.0, 1.0, 0.0], [0.0, 1.0, 0.0, 1.0]]).T
    return ForwardMatrix(sparse.csc_matrix(columns), 2, 2)


@pytest.fixture
def toy_anticorrelated():
    """Perfectly Anti-Correlated Statistics, Outside the Toy Polytope"""
    return StatVector(np.array([1.0, 0.0, 0.0, 1.0]), 2, 2, {"tag": "toy"})


@pytest.fixture
def toy_interior():
    return StatVector(np.array([0.8, 0.2, 0.2, 0.8]), 2, 2, {"tag": "toy-interior"})


@pytest.fixture
def small_setup():
    grid = LatentGrid(4.0, 12)
    contexts = ContextSet(3)
    binning = OutcomeBinning.for_grid(grid, 6)
    return grid, contexts, binning, build_forward_matrix(grid, contexts, binning)


@pytest.fixture
def full_setup():
    grid = LatentGrid(4.0, 100)
    contexts = ContextSet(25)
    binning = OutcomeBinning.for_grid(grid, 100)
    return grid, contexts, binning, build_forward_matrix(grid, contexts, binning)
