import numpy as np
import pytest

from calderon_states.calderon import build_pair
from calderon_states.discretize import build_domain
from calderon_states.geometry import MetricFamily


class Baseline:
    """A built pair together with everything it was built from."""

    def __init__(self, family, T, M=200, N=16):
        self.family = family
        self.domain = build_domain(T, M, N, family)
        self.pair, self.real, self.traces, self.mats = build_pair(self.domain, family)


@pytest.fixture(scope="session")
def ultra():
    return Baseline(MetricFamily.ultrastatic(), 1.0)


@pytest.fixture(scope="session")
def ultra_fine():
    return Baseline(MetricFamily.ultrastatic(), 1.0, M=400)


@pytest.fixture(scope="session")
def expo():
    return Baseline(MetricFamily.exponential(0.2), 2.0)


@pytest.fixture(scope="session")
def expo_fine():
    return Baseline(MetricFamily.exponential(0.2), 2.0, M=400)


@pytest.fixture(scope="session")
def variable():
    """Ultrastatic with non-constant metric and potential."""
    return Baseline(MetricFamily.ultrastatic(h0=(1.0, 0.3), V=(0.0, 0.5)), 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(0x5EED)
