# Test Configuration
# File: conftest.py
# Author: Transport Toolkit Team
# Date: 2026-10-12
# Purpose: Pytest configuration and fixtures for the transport toolkit tests

import os

import numpy as np
import pytest

# Set test environment variables
os.environ["ENVIRONMENT"] = "test"
os.environ["LOG_LEVEL"] = "WARNING"
os.environ["LOG_TO_FILE"] = "False"

# Import after setting environment
from app.core.config import settings  # noqa: E402
from app.heisenberg.group import Point  # noqa: E402
from app.measures.atomic import AtomicMeasure  # noqa: E402
from app.services.pipeline_service import default_source, default_target  # noqa: E402
from app.solvers.sequence import run_approximation_sequence  # noqa: E402


@pytest.fixture
def rng():
    """Seeded generator shared by randomised tests"""
    return np.random.default_rng(settings.DEFAULT_SEED)


@pytest.fixture
def origin():
    return Point.origin(1)


@pytest.fixture
def sample_points(rng):
    """Twenty random points of H^1 as an array"""
    return rng.normal(size=(20, 3))


@pytest.fixture
def small_measures(rng):
    """Two equal-weight measures on six random atoms each"""
    mu = AtomicMeasure.from_arrays(rng.normal(size=(6, 3)))
    nu = AtomicMeasure.from_arrays(rng.normal(size=(6, 3)))
    return mu, nu


@pytest.fixture
def weighted_measures(rng):
    """Measures of different sizes with random weights"""
    mu = AtomicMeasure.from_arrays(rng.normal(size=(7, 3)), rng.uniform(0.1, 1.0, 7), normalize=True)
    nu = AtomicMeasure.from_arrays(rng.normal(size=(4, 3)), rng.uniform(0.1, 1.0, 4), normalize=True)
    return mu, nu


@pytest.fixture
def temp_output_dir(tmp_path):
    """Temporary run directory"""
    out = tmp_path / "run"
    out.mkdir()
    return out


@pytest.fixture(scope="session")
def pipeline_run():
    """
    One epsilon sequence on the default instance, shared across tests:
    uniform mu on the unit box, N = 400 samples, a 5-atom nu cluster.
    """
    source = default_source(1)
    nu = default_target(1, seed=settings.DEFAULT_SEED)
    result = run_approximation_sequence(
        source.to_sampled(),
        nu,
        epsilons=[0.5, 0.2, 0.1, 0.05, 0.02],
        N=400,
        seed=settings.DEFAULT_SEED,
        box=source.box(),
    )
    return source, nu, result


# Pytest configuration
def pytest_configure(config):
    """Configure pytest with custom markers"""
    config.addinivalue_line("markers", "unit: mark test as a unit test")
    config.addinivalue_line("markers", "integration: mark test as an integration test")
    config.addinivalue_line("markers", "slow: mark test as slow running")


def pytest_collection_modifyitems(config, items):
    """Tests under unit/ are unit tests; the rest are integration tests"""
    for item in items:
        if f"{os.sep}unit{os.sep}" in str(item.fspath):
            item.add_marker(pytest.mark.unit)
        else:
            item.add_marker(pytest.mark.integration)
