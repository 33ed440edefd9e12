import os
import warnings

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from inghamlab.numerics import SampledRadialFunction, make_grid, smooth_bump

settings.register_profile(
    "inghamlab", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile(
    "ci", max_examples=200, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "inghamlab"))


@pytest.fixture(autouse=True)
def _quiet_numba():
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", module="numba")
        yield


def bump_profile(lo=1.0, hi=2.0, panels=100, order=10):
    g = make_grid(hi, panels, order, r_min=lo)
    return SampledRadialFunction.from_callable(g, smooth_bump(lo, hi), (lo, hi))


def gaussian_profile(r_max=12.0, panels=150, order=10, refine_origin=40):
    g = make_grid(r_max, panels, order, refine_origin=refine_origin)
    return SampledRadialFunction.from_callable(g, lambda r: np.exp(-0.5 * r * r))


@pytest.fixture
def bump():
    return bump_profile()


@pytest.fixture
def gaussian():
    return gaussian_profile()


# ---------------------------------------------------- acceptance reporting
_CRITERIA = {}


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion."""

    def record(k, ok, detail):
        line = f"CRITERION {k}: {'PASS' if ok else 'FAIL'} {detail}"
        _CRITERIA[k] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        terminalreporter.write_line(_CRITERIA[k])
