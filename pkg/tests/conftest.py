import numpy as np
import pytest

from steadyfront.gas import GasModel, GasState

# criterion number -> (status, detail), filled by the acceptance tests
ACCEPTANCE: dict[int, tuple[str, str]] = {}


@pytest.fixture(scope="session")
def model():
    return GasModel()


@pytest.fixture(scope="session")
def ubar():
    return GasState(2.0, 0.0, 1.0, 1.0)


def ball_state(rng, center: GasState, radius: float) -> GasState:
    return GasState.from_array(center.as_array() + rng.uniform(-radius, radius, 4))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        status, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {status}  {detail}")
