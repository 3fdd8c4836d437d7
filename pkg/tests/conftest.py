from __future__ import annotations

import sys
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_verdicts = pytest.StashKey[dict]()


@dataclass
class Verdict:
    title: str
    passed: bool = False
    detail: str = ""


@pytest.fixture
def criterion(request):
    """Record the outcome of one acceptance criterion for the end-of-run summary."""
    table = request.config.stash.setdefault(_verdicts, {})

    @contextmanager
    def record(number: int, title: str):
        v = Verdict(title)
        table[number] = v
        try:
            yield v
        except BaseException as err:
            v.passed = False
            reason = str(err).strip().splitlines()[0] if str(err).strip() else type(err).__name__
            v.detail = f"{v.detail}; {reason}" if v.detail else reason
            raise
        v.passed = True

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    table = config.stash.get(_verdicts, {})
    if not table:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(table):
        v = table[n]
        status = "PASS" if v.passed else "FAIL"
        terminalreporter.write_line(f"CRITERION {n} {status} {v.title}" + (f" ({v.detail})" if v.detail else ""))
