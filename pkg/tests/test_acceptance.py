"""Acceptance criteria, one test each.

Each test prints a single ``criterion N: PASS|FAIL`` line (visible without -s)
followed by the failing checks, if any.
"""
import inspect
import os

import pytest

from hyperell.verify import CRITERIA

TITLES = {
    1: "decomposition goldens",
    2: "odd-characteristic formulas g=0..10",
    3: "a6 case formula g=0..23 and seed values",
    4: "even characteristic formulas and parity differences",
    5: "parity independence for weight <= 5",
    6: "brute-force oracle agreement",
    7: "genus-1 table re-derivation",
    8: "recursion certificates",
    9: "even-characteristic class structure",
    10: "equivariant integrality",
    11: "b/c statistics",
    12: "odd-weight vanishing",
}

JOBS = max(1, min(8, os.cpu_count() or 1))


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, engine, capsys):
    fn = CRITERIA[number]
    kwargs = {"jobs": JOBS} if "jobs" in inspect.signature(fn).parameters else {}
    checks = fn(engine, **kwargs)
    failed = [c for c in checks if not c.ok]
    seconds = sum(c.seconds for c in checks)
    status = "PASS" if checks and not failed else "FAIL"
    with capsys.disabled():
        print(f"\ncriterion {number}: {status}  {TITLES[number]} ({len(checks) - len(failed)}/{len(checks)} checks, {seconds:.1f}s)")
        for c in failed:
            print(f"    FAIL {c.name}: {c.detail}")
    assert checks
    assert not failed, "; ".join(f"{c.name}: {c.detail}" for c in failed)
