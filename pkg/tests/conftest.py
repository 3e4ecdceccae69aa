from fractions import Fraction

import pytest

from intervaldyn.exactset import ClosedInterval
from intervaldyn.mapmodel import builtin, make_plmap

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def ex31():
    return builtin("example-3-1")


@pytest.fixture(scope="session")
def ex32():
    return builtin("example-3-2")


@pytest.fixture(scope="session")
def tent():
    return builtin("tent")


@pytest.fixture(scope="session")
def identity():
    return builtin("identity")


@pytest.fixture(scope="session")
def const_half():
    return builtin("constant", "1/2")


def corpus():
    return [
        builtin("tent"),
        builtin("example-3-1"),
        builtin("example-3-2"),
        builtin("identity"),
        builtin("constant", "1/2"),
    ]


def random_rational(rng, lo=Fraction(0), hi=Fraction(1), den=64):
    a = (lo * den).__ceil__()
    b = (hi * den).__floor__()
    return Fraction(rng.randint(a, b), den)


def random_plmap(rng, max_pieces=8, den=12):
    n = rng.randint(1, max_pieces)
    xs = sorted(rng.sample(range(1, den), min(n - 1, den - 1)))
    xs = [Fraction(0)] + [Fraction(x, den) for x in xs] + [Fraction(1)]
    ys = [Fraction(rng.randint(0, den), den) for _ in xs]
    return make_plmap(ClosedInterval(Fraction(0), Fraction(1)), list(zip(xs, ys)), "random")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
