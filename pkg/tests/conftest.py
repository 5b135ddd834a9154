import itertools

import pytest

from kpa.perm import Permutation

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def s4():
    return [Permutation(p) for p in itertools.permutations(range(4))]


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion; printed in the terminal summary."""

    def report(number: int, name: str, ok: bool, detail: str) -> bool:
        line = f"criterion {number} ({name}): {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
