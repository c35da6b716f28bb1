"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v -s`` or through the CLI
with ``banach2d verify-theorems``.
"""

import json

import pytest

from banach2d.verify import CRITERIA, run_suite


@pytest.mark.slow
@pytest.mark.parametrize("crit", CRITERIA, ids=lambda c: f"{c.number:02d}-{c.tag}")
def test_criterion(crit, capsys):
    (res,) = run_suite(str(crit.number), seed=0)
    line = (f"criterion {res.number:>2} {res.tag:<17} {'PASS' if res.passed else 'FAIL'}"
            f"  {res.elapsed_s:7.2f}s / {res.limit_s:g}s")
    with capsys.disabled():
        print(f"\n{line}")
    assert res.passed, json.dumps(res.details, default=str)[:2000]
