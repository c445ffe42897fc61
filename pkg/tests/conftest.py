import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hapticad import haptics  # noqa: E402


@pytest.fixture(scope="session")
def actuator():
    return haptics.ActuatorModel()


@pytest.fixture(scope="session")
def trained(actuator):
    """Default-grid network, seed 42, plus its wall-clock training time."""
    data = haptics.generate_training_set(actuator)
    t0 = time.perf_counter()
    mlp = haptics.train_inverse_mlp(data, actuator, haptics.TrainConfig(seed=42))
    return mlp, time.perf_counter() - t0


@pytest.fixture(scope="session")
def mlp(trained):
    return trained[0]


# one PASS/FAIL line per acceptance criterion in the terminal summary
_acceptance = []


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    _acceptance.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {name}")
