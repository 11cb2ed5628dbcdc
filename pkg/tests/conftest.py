import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from swipebench.features.extract import build_feature_table
from swipebench.synthetic import SyntheticSpec, generate_synthetic

settings.register_profile(
    "suite", deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("suite")


@pytest.fixture(scope="session")
def small_table():
    """Feature table of a small separable synthetic dataset, shared by the
    protocol and experiment tests (read-only)."""
    spec = SyntheticSpec(users=5, sessions_per_user=3, swipes_per_session=12,
                         separability=4.0, seed=913)
    return build_feature_table(generate_synthetic(spec))


@pytest.fixture
def rng():
    return np.random.default_rng(20260822)
