"""Shared fixtures and the acceptance summary printed at the end of the run."""
from __future__ import annotations

import pytest

# criterion id -> (passed, detail); filled by tests/test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def record_criterion():
    def rec(cid: int, passed: bool, detail: str):
        ACCEPTANCE[cid] = (bool(passed), detail)
        print(f"criterion {cid}: {'PASS' if passed else 'FAIL'} | {detail}")
        return passed
    return rec


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[cid]
        tr.write_line(f"criterion {cid:2d}: {'PASS' if ok else 'FAIL'} | {detail}")
    npass = sum(ok for ok, _ in ACCEPTANCE.values())
    tr.write_line(f"{npass}/{len(ACCEPTANCE)} criteria pass")
