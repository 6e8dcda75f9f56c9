import numpy as np
import pytest
from hypothesis import strategies as st

from progeny.families import descending_chain_example, tail_path_example, three_trees_example
from progeny.forest import Forest


@st.composite
def forests(draw, min_n=1, max_n=9):
    """Random labeled forest: vertices join in a random order and attach to an earlier one or to nothing."""
    n = draw(st.integers(min_n, max_n))
    order = draw(st.permutations(range(n)))
    parent = [None] * n
    for pos, v in enumerate(order):
        choice = draw(st.integers(-1, pos - 1))
        parent[v] = None if choice < 0 else order[choice]
    return Forest(tuple(parent))


def random_forest(rng: np.random.Generator, n: int) -> Forest:
    order = rng.permutation(n)
    parent = [None] * n
    for pos, v in enumerate(order):
        choice = int(rng.integers(-1, pos)) if pos else -1
        parent[int(v)] = None if choice < 0 else int(order[choice])
    return Forest(tuple(parent))


@pytest.fixture
def tail_path():
    return tail_path_example()


@pytest.fixture
def descending():
    return descending_chain_example()


@pytest.fixture
def three_trees():
    return three_trees_example()


# acceptance result lines, echoed in the terminal summary so they survive output capture
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
