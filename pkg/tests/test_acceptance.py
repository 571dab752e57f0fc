"""Acceptance suite: one PASS/FAIL line per criterion.

Runs under pytest (lines are printed even with output capture on) or
directly: ``python3 tests/test_acceptance.py [--seed N]``.
"""

import sys

import pytest

from popmatch.selftest import CRITERIA, run_all

SEED = 0


@pytest.mark.parametrize("number", [c[0] for c in CRITERIA], ids=[f"criterion_{c[0]:02d}" for c in CRITERIA])
def test_criterion(number, capsys):
    (result,) = run_all(SEED, only={number})
    with capsys.disabled():
        print("\n" + result.line())
    assert result.ok, result.detail


if __name__ == "__main__":
    seed = int(sys.argv[sys.argv.index("--seed") + 1]) if "--seed" in sys.argv else SEED
    results = run_all(seed)
    for r in results:
        print(r.line())
    sys.exit(0 if all(r.ok for r in results) else 1)
