"""The full acceptance suite at its pinned tolerances, one PASS/FAIL line per criterion.

Run with ``pytest -s tests/test_acceptance.py`` to see the lines live; they
also appear in the terminal summary.
"""

import pytest

from fvanish.acceptance import CRITERIA, run_criterion

_lines = []


@pytest.mark.parametrize("cid", list(CRITERIA))
def test_criterion(cid):
    rep = run_criterion(cid)
    failed = [f"{f.name}={f.value!r} (tol {f.tolerance!r})" for f in rep.flags if not f.passed]
    line = f"{'PASS' if rep.passed else 'FAIL'} {cid}: {CRITERIA[cid][0]} [{rep.elapsed:.2f} s]"
    if failed:
        line += " failed " + "; ".join(failed)
    _lines.append(line)
    print(line)
    assert rep.passed, line


def pytest_terminal_summary_lines():
    return list(_lines)
