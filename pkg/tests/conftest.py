import time

import pytest

from gaitsurface.planner import BIAS_ETA, bias_gait, reference_gait
from gaitsurface.solver import sweep_grid


@pytest.fixture(scope="session")
def atlas_timed():
    t0 = time.perf_counter()
    atlas = sweep_grid()
    return atlas, time.perf_counter() - t0


@pytest.fixture(scope="session")
def atlas(atlas_timed):
    return atlas_timed[0]


@pytest.fixture(scope="session")
def gaits():
    return {name: reference_gait(name) for name in ("gait1", "gait2", "gait3", "gait4")}


@pytest.fixture(scope="session")
def biased(gaits):
    return {name: bias_gait(g, BIAS_ETA[name]) for name, g in gaits.items()}


# one pass/fail line per acceptance criterion

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n, title = marker.args
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        prev = _criteria.get(n, (title, True))
        _criteria[n] = (title, prev[1] and rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        title, ok = _criteria[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {n:>2}: {title}")
