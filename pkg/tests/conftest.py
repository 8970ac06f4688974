"""Shared fixtures: the paper's figures, the slowly-synchronizing family,
a large completely reachable analogue, and a seeded random-instance suite."""

import pytest

from creach.cli import cerny, generate, random_automaton
from creach.core import Automaton


FIG2A = [10, 1, 2, 8, 4, 5, 10, 9, 3, 7, 6, 11]


def embed(n: int) -> Automaton:
    """A completely reachable n-state analogue of the 12-state figure:
    letter a acts as that figure's a-letter on states 0..11 and fixes the
    rest; letter b is the full n-cycle."""
    if n < 12:
        raise ValueError("embed requires n >= 12")
    a = list(range(n))
    a[:12] = FIG2A
    b = [(i + 1) % n for i in range(n)]
    return Automaton([a, b])


def random_suite():
    """500 seeded random instances with n in [2,10], k in [1,3]."""
    out = []
    for i in range(500):
        n = 2 + i % 9
        k = 1 + (i // 9) % 3
        out.append(random_automaton(n, k, i))
    return out


@pytest.fixture(scope="session")
def fig1():
    return generate("fig1")


@pytest.fixture(scope="session")
def fig2():
    return generate("fig2")


@pytest.fixture(scope="session")
def cerny4():
    return cerny(4)


@pytest.fixture(scope="session")
def suite500():
    return random_suite()
