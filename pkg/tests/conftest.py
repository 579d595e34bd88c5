import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from dplab.geometry import AnalyticPhi, MonotoneCurve

settings.register_profile("dplab", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("dplab")

ACCEPTANCE_LINES = []


def unit_semicircle() -> MonotoneCurve:
    """Upper half of the circle of radius 1 centred at (1, 0), seen from the origin."""
    return MonotoneCurve((0.0, 0.0), 2.0, AnalyticPhi(lambda r: np.arccos(r / 2.0),
                                                      lambda r: -1.0 / np.sqrt(4.0 - r * r),
                                                      "semicircle"))


@pytest.fixture
def semicircle():
    return unit_semicircle()


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
