import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_criteria: dict[str, list[tuple[bool, str]]] = {}


class CriterionLog:
    """Collects per-criterion outcomes for the end-of-run summary."""

    def check(self, criterion: str, ok: bool, detail: str) -> None:
        _criteria.setdefault(criterion, []).append((bool(ok), detail))
        assert ok, f"{criterion}: {detail}"


@pytest.fixture(scope="session")
def criteria() -> CriterionLog:
    return CriterionLog()


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criteria, key=lambda s: int(s.split()[0][2:])):
        results = _criteria[name]
        ok = all(r for r, _ in results)
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}")
        for r, detail in results:
            terminalreporter.write_line(f"    {'ok ' if r else 'BAD'} {detail}")
