from __future__ import annotations

from collections import defaultdict

import pytest

_CRITERIA: dict[int, list[tuple[str, bool, str]]] = defaultdict(list)


class AcceptanceLog:
    """Collects per-part outcomes so each criterion gets one summary line."""

    def check(self, criterion: int, part: str, ok: bool, detail: str = "") -> None:
        ok = bool(ok)
        _CRITERIA[criterion].append((part, ok, detail))
        print(f"criterion {criterion} [{part}]: {'PASS' if ok else 'FAIL'} {detail}")
        assert ok, f"criterion {criterion} [{part}] failed: {detail}"


@pytest.fixture(scope="session")
def acceptance():
    return AcceptanceLog()


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for c in sorted(_CRITERIA):
        parts = _CRITERIA[c]
        status = "PASS" if all(ok for _, ok, _ in parts) else "FAIL"
        failed = [name for name, ok, _ in parts if not ok]
        note = f" (failed parts: {', '.join(failed)})" if failed else ""
        terminalreporter.write_line(f"criterion {c:2d}: {status}{note}")
