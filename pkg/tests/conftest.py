import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from sparse_saddle.problems import (
    build_global_parametrization,
    build_local_parametrization,
    build_mixed_diffusion_1d,
)

settings.register_profile("repo", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


@pytest.fixture(scope="session")
def a1_param():
    return build_global_parametrization(4, 2.0, 0.3, 1.0)


@pytest.fixture(scope="session")
def a1_system(a1_param):
    """Diffusion 1D, n = 64, four sine modes with amplitudes 0.3 j^-2."""
    return build_mixed_diffusion_1d(64, a1_param)


@pytest.fixture(scope="session")
def local_system():
    w = [0.4 / j for j in range(1, 9)]
    return build_mixed_diffusion_1d(64, build_local_parametrization(8, w, 1.0))


@pytest.fixture
def rng():
    return np.random.default_rng(20240701)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance")
        for line in RESULTS:
            terminalreporter.write_line(line)
