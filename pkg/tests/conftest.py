import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from symcone.cone import ConeParams

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

ALL_CONES = [
    ConeParams.line(),
    ConeParams.realsym(2),
    ConeParams.realsym(3),
    ConeParams.complexherm(2),
    ConeParams.complexherm(3),
    ConeParams.lorentz(3),
    ConeParams.lorentz(5),
]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def cone_id(c):
    return str(c)


def pytest_terminal_summary(terminalreporter):
    from .test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        ok, detail = RESULTS[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}")
