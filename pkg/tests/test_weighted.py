import random
from fractions import Fraction

import pytest

from popmatch import Matching, oracle
from popmatch.constrained import HardCaseError
from popmatch.core import matching_weight
from popmatch.dominant import DominantStructure
from popmatch.generate import random_node_weights, random_weights
from popmatch.stable import enumerate_rotations
from popmatch.weighted import (
    NegativeWeightError,
    miwp_exact,
    mwp_exact,
    mwp_half_approx,
    node_weighted_opt,
)

from conftest import instances

UNIT = {("a1", "b1"): 1, ("a2", "b2"): 1, ("a2", "b1"): 1}


def test_half_approx_examples(i2x2, S, D):
    res = mwp_half_approx(i2x2, UNIT)
    assert res.value == 2 and res.matching == D
    assert res.certificate == (1, 2)
    res = mwp_half_approx(i2x2, {("a2", "b1"): 5})
    assert res.value == 5 and res.matching == S
    assert mwp_half_approx(i2x2, None).value == 0


def test_negative_weights_rejected(i2x2):
    with pytest.raises(NegativeWeightError):
        mwp_half_approx(i2x2, {("a1", "b1"): -1})
    with pytest.raises(NegativeWeightError):
        node_weighted_opt(i2x2, {"a1": -1})


def test_exact_examples(i2x2, D, single):
    assert mwp_exact(i2x2, UNIT, allow_exponential=True)[1] == 2
    assert miwp_exact(i2x2, {("a2", "b1"): 1}, allow_exponential=True) == (D, 0)
    for solve in (mwp_exact, miwp_exact):
        assert solve(single, {("a", "b"): Fraction(7, 2)}, allow_exponential=True)[1] == Fraction(7, 2)
    with pytest.raises(HardCaseError):
        mwp_exact(i2x2, UNIT)


def test_node_weighted_examples(i2x2, S, D):
    assert node_weighted_opt(i2x2, {"a1": 1}, "max") == (D, 1)
    assert node_weighted_opt(i2x2, {"a1": 1}, "min") == (S, 0)
    for direction in ("min", "max"):
        assert node_weighted_opt(i2x2, {}, direction)[1] == 0
    with pytest.raises(ValueError):
        node_weighted_opt(i2x2, {}, "sideways")


def test_half_bound_where_it_is_not_tight():
    # larger instances have popular matchings that are neither stable nor
    # dominant, so the approximation can fall short of the optimum there
    rng = random.Random(7)
    worst = Fraction(1)
    for ps in instances(3, 400, size=6, edges=16, min_side=4):
        rep = oracle.popular_set(ps)
        poset, ds = enumerate_rotations(ps), DominantStructure.of(ps)
        for _ in range(20):
            w = random_weights(rng, ps)
            res = mwp_half_approx(ps, w, poset, ds)
            best, opt = mwp_exact(ps, w, allow_exponential=True, edge_limit=None)
            assert res.matching in rep.popular
            assert 2 * res.value >= opt
            assert opt == max(matching_weight(w, m) for m in rep.popular)
            if opt:
                worst = min(worst, res.value / opt)
    assert worst < 1


def test_node_weighted_against_oracle():
    rng = random.Random(8)
    for ps in instances(9, 300):
        popular = oracle.popular_set(ps).popular
        wv = random_node_weights(rng, ps)
        value = lambda m: sum((wv[v] for v in m.covered()), Fraction(0))
        assert node_weighted_opt(ps, wv, "max")[1] == max(map(value, popular))
        assert node_weighted_opt(ps, wv, "min")[1] == min(map(value, popular))


def test_exact_agrees_with_enumeration():
    rng = random.Random(10)
    for ps in instances(11, 100):
        popular = oracle.popular_set(ps).popular
        w = random_weights(rng, ps)
        values = [matching_weight(w, m) for m in popular]
        assert mwp_exact(ps, w, allow_exponential=True)[1] == max(values)
        assert miwp_exact(ps, w, allow_exponential=True)[1] == min(values)
