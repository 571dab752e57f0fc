import random

import pytest

from popmatch import Matching, PreferenceSystem
from popmatch.generate import random_instance


def make(side_a, side_b, prefs):
    return PreferenceSystem(tuple(side_a), tuple(side_b), {v: tuple(p.split()) for v, p in prefs.items()})


@pytest.fixture
def i2x2():
    return make(["a1", "a2"], ["b1", "b2"], {"a1": "b1", "a2": "b1 b2", "b1": "a2 a1", "b2": "a2"})


@pytest.fixture
def irot():
    return make(
        ["a1", "a2"],
        ["b1", "b2"],
        {"a1": "b1 b2", "a2": "b2 b1", "b1": "a2 a1", "b2": "a1 a2"},
    )


@pytest.fixture
def single():
    return make(["a"], ["b"], {"a": "b", "b": "a"})


@pytest.fixture
def p3():
    return make(["a1", "a2"], ["b1"], {"a1": "b1", "a2": "b1", "b1": "a1 a2"})


@pytest.fixture
def S():
    return Matching([("a2", "b1")])


@pytest.fixture
def D():
    return Matching([("a1", "b1"), ("a2", "b2")])


def instances(seed, count, size=4, edges=12, min_side=2):
    rng = random.Random(seed)
    return [random_instance(rng, size, size, edges, min_side=min_side) for _ in range(count)]
