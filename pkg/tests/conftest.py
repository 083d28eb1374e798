import sys

import pytest

from smoothzeros.constructions import EvalContext

if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)


@pytest.fixture
def ec():
    return EvalContext()


@pytest.fixture
def mp(ec):
    return ec.mp


# one pass/fail line per acceptance criterion, aggregated over parametrized cases
_CRITERIA: dict = {}


def pytest_runtest_logreport(report):
    marker = "test_acceptance.py::test_criterion_"
    if marker not in report.nodeid:
        return
    if report.when != "call" and not report.failed:
        return
    n = int(report.nodeid.split(marker)[1].split("_")[0].split("[")[0])
    ok = report.passed and _CRITERIA.get(n, True)
    _CRITERIA[n] = ok


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        terminalreporter.write_line(f"criterion {n}: {'PASS' if _CRITERIA[n] else 'FAIL'}")
