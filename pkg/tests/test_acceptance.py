"""Acceptance criteria at full size; prints one PASS/FAIL line per criterion.

Run alone with ``pytest -s tests/test_acceptance.py`` or ``python tests/test_acceptance.py``.
"""
import sys

import pytest

from restrictlab.acceptance import CRITERIA, run_criterion


@pytest.mark.slow
@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion{c.number}" for c in CRITERIA])
def test_criterion(criterion, capsys, tmp_path):
    result = run_criterion(criterion, out_dir=tmp_path)
    with capsys.disabled():
        print("\n" + result.line(), flush=True)
    assert result.within_budget, result.line()
    assert result.passed, result.line()


if __name__ == "__main__":
    ok = True
    for c in CRITERIA:
        r = run_criterion(c)
        print(r.line(), flush=True)
        ok &= r.passed
    sys.exit(0 if ok else 1)
