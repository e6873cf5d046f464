"""Shared fixtures and the acceptance-criterion summary printer."""

import numpy as np
import pytest

_ACCEPTANCE_REPORTS = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240809)


def pytest_runtest_logreport(report):
    if "test_acceptance" not in report.nodeid:
        return
    if report.when != "call":
        return
    if hasattr(report, "wasxfail"):
        outcome = "BLOCKED (expected failure, see decisions ledger)"
    elif report.passed:
        outcome = "PASS"
    elif report.failed:
        outcome = "FAIL"
    else:
        outcome = report.outcome.upper()
    _ACCEPTANCE_REPORTS[report.nodeid.split("::")[-1]] = outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_REPORTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name in sorted(_ACCEPTANCE_REPORTS):
        terminalreporter.write_line(f"{name}: {_ACCEPTANCE_REPORTS[name]}")
