"""Acceptance gate: every advertised criterion at its stated tolerance.

Run with `pytest -s tests/test_acceptance.py` to see one line per
criterion, or `wm verify --all` for the same suites from the CLI.
"""

import pytest

from wiltonmoments import verify

CRITERIA = [
    "calibration",
    "a1-closed-form",
    "small-lambda-expansion",
    "functional-equation",
    "decomposition",
    "route-crosscheck",
    "contraction",
    "measure-invariance",
    "gamma-ratio-trend",
    "cotangent-antisymmetry",
    "distribution-link",
    "g-antisymmetry",
]


def test_suite_registry_complete():
    assert list(verify.SUITES) == CRITERIA


@pytest.mark.parametrize("name", CRITERIA)
def test_criterion(name):
    result = verify.run_suite(name)
    print(f"{'PASS' if result.passed else 'FAIL'}  {name}  [{result.seconds:.1f}s]  {result.detail}")
    assert result.passed, f"{name}: {result.detail}"
