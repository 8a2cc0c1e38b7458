import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from paretoflow._accel import HAVE_NUMBA, set_backend
from paretoflow.pareto import PointSet

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

# the four points of the local-order dilemma, ids 1..4
DILEMMA_POINTS = np.array([[1.0, 1.0], [2.0, 1.2], [3.0, 1.4], [1.5, 2.0]])


@pytest.fixture
def dilemma_set():
    return PointSet(DILEMMA_POINTS.copy(), np.array([1, 2, 3, 4]))


@pytest.fixture(params=["numpy", "numba"] if HAVE_NUMBA else ["numpy"])
def backend(request):
    prev = set_backend(request.param)
    yield request.param
    set_backend(prev)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("tests.test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.RESULTS, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
