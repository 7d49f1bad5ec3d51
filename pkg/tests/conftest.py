import os
import sys

import numpy as np
import pytest
from hypothesis import settings

sys.path.append(os.path.abspath("."))

from src.frames.core import mercedes_benz  # noqa: E402
from src.frames.models import FrameMatrix  # noqa: E402


def pytest_addoption(parser):
    parser.addoption(
        "--property-count",
        type=int,
        default=25,
        help="Random instances per property test (default: 25)",
    )


def pytest_configure(config):
    settings.register_profile("framekit", max_examples=config.getoption("--property-count"), deadline=None)
    settings.load_profile("framekit")


@pytest.fixture(scope="session")
def property_count(request):
    """Number of seeded instances each property loop draws."""
    return request.config.getoption("--property-count")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def unit_mercedes():
    return mercedes_benz()


@pytest.fixture
def parseval_mercedes():
    return mercedes_benz(np.sqrt(2.0 / 3.0))


@pytest.fixture
def orthonormal_pair_frame():
    """{e_1, e_2, (1, 1)/sqrt(2)} in R^2."""
    return FrameMatrix.from_vectors([[1.0, 0.0], [0.0, 1.0], [1.0 / np.sqrt(2.0), 1.0 / np.sqrt(2.0)]])


@pytest.fixture
def tetrahedral_frame():
    """Four unit vectors in R^3 with pairwise cosine -1/3."""
    return FrameMatrix.from_vectors(
        np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float) / np.sqrt(3.0)
    )
