import math

import pytest

SUITE_N = (15, 21, 33, 35)
FACTORS = {15: (3, 5), 21: (3, 7), 33: (3, 11), 35: (5, 7)}


def suite_pairs(include_one: bool = True):
    for N in SUITE_N:
        for y in range(1 if include_one else 2, N):
            if math.gcd(y, N) == 1:
                yield N, y


# filled by test_acceptance, printed once at the end of the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])


@pytest.fixture(scope="session")
def suite():
    return list(suite_pairs())
