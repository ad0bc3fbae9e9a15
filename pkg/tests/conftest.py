import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tcg.enumeration import find_equilibria  # noqa: E402
from tcg.tree import RootedProfile  # noqa: E402

# Two size-5 branches (a node over two 2-chains) and one size-6 branch
# (a node over a 3-chain and a 2-chain); agent 2 is the mover.
FIG1_CHOICE = (0, 1, 2, 1, 4, 0, 6, 7, 6, 9, 0, 11, 12, 13, 11, 15)


def branches(specs) -> RootedProfile:
    """Root children given as lists of chain lengths hanging below each child."""
    parents = [-1]
    for chains in specs:
        parents.append(0)
        top = len(parents) - 1
        for k in chains:
            prev = top
            for _ in range(k):
                parents.append(prev)
                prev = len(parents) - 1
    return RootedProfile.from_parents(parents)


@pytest.fixture
def fig1():
    return RootedProfile(FIG1_CHOICE)


@pytest.fixture(scope="session")
def catalogue():
    """Every stable tree for n = 1..19, keyed by n."""
    return {n: find_equilibria(n) for n in range(1, 20)}


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
