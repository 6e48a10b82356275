"""Shared fixtures and the acceptance-summary reporter.

Tests named test_criterion_NN_* are the acceptance gate; one PASS/FAIL line
per criterion is printed at the end of the run.
"""

from __future__ import annotations

import re
from fractions import Fraction

import pytest

from tmqc.tmcore import QuasicrystalParams

_CRITERION_RE = re.compile(r"test_criterion_(\d+)[a-z]?_?")
_results: dict = {}


@pytest.fixture(scope="session")
def params21() -> QuasicrystalParams:
    return QuasicrystalParams(Fraction(2), Fraction(1))


def pytest_runtest_makereport(item, call):
    if call.when != "call":
        return
    m = _CRITERION_RE.match(item.name)
    if not m:
        return
    doc = (item.function.__doc__ or "").strip().splitlines()
    label = doc[0] if doc else item.name
    key = (m.group(1), item.name)
    _results[key] = (label, call.excinfo is None)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _results:
        return
    tw = terminalreporter
    tw.section("acceptance criteria")
    for (num, name), (label, ok) in sorted(_results.items()):
        status = "PASS" if ok else "FAIL"
        tw.write_line(f"ACCEPTANCE {num} {status:4s} {label}")
