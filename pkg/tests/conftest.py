import warnings

import numpy as np
import pytest

from wavecat import optics
from wavecat.scenario import ScenarioConfig

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def cfg():
    return ScenarioConfig(alpha=np.pi / 4, phi1=np.pi / 3)


@pytest.fixture
def quiet_unequal_phases():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", optics.UnequalPhaseWarning)
        yield


@pytest.fixture
def record_acceptance():
    def record(number: int, passed: bool, text: str):
        ACCEPTANCE_LINES.append(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {text}")

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
