import math

import pytest
from hypothesis import HealthCheck, settings

from hardylab.funcspace import AngularPattern, MixedFunction, RadialProfile

settings.register_profile(
    "hardylab",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
    derandomize=True,
)
settings.load_profile("hardylab")

# acceptance verdicts, filled by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail}")


@pytest.fixture
def two_piece():
    """r^-0.3 on (0, 1), 2 r^-2.5 beyond."""
    prof = RadialProfile.from_segments([0, 1, math.inf], [[(1.0, -0.3, 0)], [(2.0, -2.5, 0)]])
    return MixedFunction(prof, AngularPattern())
