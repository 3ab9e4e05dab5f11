from fractions import Fraction as F

import pytest
from hypothesis import HealthCheck, settings

from flatlab.constructions import LTableParams, ZTableParams, l_table, z_table
from flatlab.exactfield import sqrt_d

settings.register_profile(
    "flatlab",
    derandomize=True,
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("flatlab")

R2 = sqrt_d(2)


def lm_fixture_params(h3=F(1, 2)) -> ZTableParams:
    """Z-table with w=(1, sqrt2), s=(sqrt2, 1), tau=0: the Q(sqrt2) eigenform example."""
    return ZTableParams(1, R2, R2 - h3, 1 - h3, h3)


def rotate_quarter(p: ZTableParams):
    """The Z-table turned by R=((0,1),(-1,0)) so its vertical cylinders become horizontal."""
    from flatlab.surface import apply_sl2

    return apply_sl2(z_table(p), ((0, 1), (-1, 0)))


@pytest.fixture
def lm_surface():
    return z_table(lm_fixture_params())


@pytest.fixture
def unit_z():
    return z_table(ZTableParams(1, 1, 1, 1, 1))


@pytest.fixture
def two_tori_fixture():
    """Degenerates at -1/2 into two tori and at +1/2 hits a double collapse."""
    return rotate_quarter(ZTableParams(1, 1, F(1, 2), F(1, 2), F(1, 2)))


@pytest.fixture
def ltable_fixture():
    """Interval (-1/2, 1/3); the right end closes up into H(2)."""
    return rotate_quarter(ZTableParams(1, 1, F(1, 3), F(1, 2), F(1, 2)))


@pytest.fixture
def ltable22():
    return l_table(LTableParams(2, 2))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        status, title, secs, note = results[n]
        terminalreporter.write_line(f"criterion {n:2d}: {status}  {title} ({secs:.1f}s) {note}")
