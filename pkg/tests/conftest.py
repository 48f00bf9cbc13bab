import sys

import pytest

from cfmm import SinhSdamm, catalog


@pytest.fixture(params=catalog(), ids=str)
def model(request):
    return request.param


@pytest.fixture
def sinh08():
    return SinhSdamm(C=1.0, q=0.8)


@pytest.fixture
def sinh1():
    return SinhSdamm(C=1.0, q=1.0)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
