import warnings

import pytest
from hypothesis import settings

from modspace.gabor import NyquistTailWarning
from modspace.grid import GridSpec
from modspace.windows import WindowSpec, make_window_pair

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(autouse=True)
def _quiet_tail_warning():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NyquistTailWarning)
        yield


@pytest.fixture(scope="session")
def grid16():
    return GridSpec(1, 16, 32)


@pytest.fixture(scope="session")
def pair16(grid16):
    return make_window_pair(WindowSpec(2.0, grid16))


@pytest.fixture(scope="session")
def coarse():
    return GridSpec(1, 8, 16)


@pytest.fixture(scope="session")
def coarse_pair(coarse):
    return make_window_pair(WindowSpec(2.0, coarse))


_CRITERIA: dict[str, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        detail = dict(report.user_properties).get("detail", "")
        _CRITERIA[name] = ("PASS" if report.outcome == "passed" else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA):
        status, detail = _CRITERIA[name]
        number = int(name.split("_")[2])
        label = " ".join(name.split("_")[3:])
        terminalreporter.write_line(f"criterion {number:2d} {status}  {label}  {detail}".rstrip())
