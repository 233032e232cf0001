"""Shared fixtures and the acceptance-criteria summary.

Tests marked ``@pytest.mark.criterion("AC-n")`` are collected into a
one-line-per-criterion PASS/FAIL report at the end of the session.  A
criterion with several tests passes only if all of them pass.
"""
import re
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    name = marker.args[0]
    if report.when == "call" or (report.when == "setup" and not report.passed):
        entry = _RESULTS.setdefault(name, {"passed": True, "tests": []})
        entry["passed"] &= report.passed
        entry["tests"].append((item.name, report.outcome))


def _ac_key(name):
    m = re.match(r"AC-(\d+)", name)
    return int(m.group(1)) if m else 10**6


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for name in sorted(_RESULTS, key=_ac_key):
        entry = _RESULTS[name]
        status = "PASS" if entry["passed"] else "FAIL"
        failing = [t for t, o in entry["tests"] if o != "passed"]
        detail = f" (failing: {', '.join(failing)})" if failing else ""
        tr.write_line(f"{name} {status}{detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
