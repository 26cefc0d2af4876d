import os

import pytest
from hypothesis import HealthCheck, settings

from bkapprox.model import ModelParams

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def pytest_configure(config):
    config.addinivalue_line("markers", "property: property-based and structural checks timed by the acceptance suite")
    config.addinivalue_line("markers", "acceptance: full-size reproduction checks")


@pytest.fixture
def base_params():
    """r0 = 3%, b = 0.1, sigma = 25%, reverting to 3%."""
    return ModelParams.with_mean_level(0.25, 0.1, 0.03, 0.03)


@pytest.fixture
def tiny_vol_params():
    return ModelParams.with_mean_level(1e-12, 0.1, 0.03, 0.03)


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture(scope="session")
def acceptance_log(request):
    """Collects one verdict line per acceptance criterion for the terminal summary."""
    return request.config.stash.setdefault(_ACCEPTANCE, [])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
