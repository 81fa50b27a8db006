from __future__ import annotations

from typing import List

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("cyclift", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("cyclift")

_ACCEPTANCE: List[str] = []


@pytest.fixture
def accept():
    """Record one acceptance line: checks plus a wall-clock budget."""

    def record(n: int, name: str, checks: dict, elapsed: float, limit: float = None) -> None:
        failed = [k for k, v in checks.items() if not v]
        in_time = limit is None or elapsed < limit
        ok = not failed and in_time
        budget = f" (limit {limit:g} s)" if limit is not None else ""
        line = f"criterion {n:2d} {'PASS' if ok else 'FAIL'}: {name} [{elapsed:.2f} s{budget}]"
        if failed:
            line += " failed: " + ", ".join(failed)
        if not in_time:
            line += " over time budget"
        _ACCEPTANCE.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)
