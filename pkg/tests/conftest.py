import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from kalman_spectral import KalmanProblem

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def scalar_problem():
    """p = r = h = 1, so K* = 0.5 and P_K = (1 - K)^2 + K^2."""
    return KalmanProblem(np.eye(1), np.eye(1), np.eye(1))


ACCEPTANCE_LINES = pytest.StashKey[dict]()


@pytest.fixture(scope="session")
def acceptance_log(request):
    """Criterion number -> one-line verdict, echoed in the terminal summary."""
    return request.config.stash.setdefault(ACCEPTANCE_LINES, {})


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE_LINES, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for key in sorted(lines):
            terminalreporter.write_line(lines[key])
