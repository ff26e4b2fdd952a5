import pytest

from gigcontract import ModelParams

# filled by test_acceptance.py, printed at the end of the run
ACCEPTANCE_LINES = []


@pytest.fixture
def base():
    """Baseline noiseless parameters: c=1, beta=delta=0.8."""
    return ModelParams(c=1.0, gamma=1.0, beta=0.8, delta=0.8, sigma=0.0)


@pytest.fixture
def noisy():
    return ModelParams(c=1.0, gamma=1.0, beta=0.8, delta=0.8, sigma=0.1)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
