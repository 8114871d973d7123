import random

import pytest

from ahg.game import CoalitionStructure, example1_game
from ahg.graph import build_graph

A, B, C, D, E = range(5)

# filled by the acceptance tests, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_graph(rng: random.Random, n: int, p: float = 0.5):
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return build_graph(n, edges)


def random_partition(rng: random.Random, n: int) -> CoalitionStructure:
    labels = [rng.randrange(max(1, n)) for _ in range(n)]
    groups = {}
    for i, lab in enumerate(labels):
        groups.setdefault(lab, []).append(i)
    return CoalitionStructure.of(n, groups.values())


@pytest.fixture
def ex1():
    return example1_game()


@pytest.fixture
def grand5():
    return CoalitionStructure.grand(5)
