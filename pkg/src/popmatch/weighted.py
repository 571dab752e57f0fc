"""Weighted popular matchings.

Weights are exact fractions throughout, so the half-approximation bound is
checked without rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .constrained import DEFAULT_EDGE_LIMIT, require_exhaustive
from .core import Matching, PopmatchError, PreferenceSystem, matching_weight, weight_map
from .dominant import DominantStructure, max_weight_dominant, two_level_gale_shapley
from .oracle import DEFAULT_CAP, popular_set
from .stable import RotationPoset, gale_shapley, max_weight_stable


class NegativeWeightError(PopmatchError, ValueError):
    pass


@dataclass(frozen=True)
class ApproxResult:
    matching: Matching
    value: Fraction
    stable_value: Fraction
    dominant_value: Fraction

    @property
    def certificate(self) -> tuple[Fraction, Fraction]:
        return self.stable_value, self.dominant_value


def _nonnegative(values, what: str) -> None:
    if any(x < 0 for x in values):
        raise NegativeWeightError(f"{what} must be nonnegative")


def mwp_half_approx(
    ps: PreferenceSystem,
    w: Mapping | None = None,
    poset: RotationPoset | None = None,
    structure: DominantStructure | None = None,
) -> ApproxResult:
    """The heavier of a max-weight stable and a max-weight dominant matching.

    Every popular matching weighs at most twice the returned value.  Pass
    ``poset`` and ``structure`` to reuse them across weight vectors.
    """
    wm = weight_map(ps, w)
    _nonnegative(wm.values(), "edge weights")
    s, sv = max_weight_stable(ps, wm, poset)
    d, dv = max_weight_dominant(ps, wm, structure)
    best, value = (s, sv) if sv >= dv else (d, dv)
    return ApproxResult(best, value, sv, dv)


def _exact(ps, w, allow_exponential, edge_limit, cap, pick):
    require_exhaustive(ps, allow_exponential, edge_limit)
    wm = weight_map(ps, w)
    rep = popular_set(ps, cap)
    m = pick(rep.popular, key=lambda m: matching_weight(wm, m))
    return m, matching_weight(wm, m)


def mwp_exact(
    ps: PreferenceSystem,
    w: Mapping | None = None,
    allow_exponential: bool = False,
    edge_limit: int | None = DEFAULT_EDGE_LIMIT,
    cap: int = DEFAULT_CAP,
) -> tuple[Matching, Fraction]:
    """Maximum weight over all popular matchings, by exhaustive enumeration."""
    return _exact(ps, w, allow_exponential, edge_limit, cap, max)


def miwp_exact(
    ps: PreferenceSystem,
    w: Mapping | None = None,
    allow_exponential: bool = False,
    edge_limit: int | None = DEFAULT_EDGE_LIMIT,
    cap: int = DEFAULT_CAP,
) -> tuple[Matching, Fraction]:
    """Minimum weight over all popular matchings, by exhaustive enumeration."""
    return _exact(ps, w, allow_exponential, edge_limit, cap, min)


def node_weighted_opt(
    ps: PreferenceSystem, wv: Mapping[str, object], direction: str = "max"
) -> tuple[Matching, Fraction]:
    """Optimize the total weight of covered vertices over popular matchings.

    With nonnegative weights the minimum sits at any stable matching and the
    maximum at any dominant one, since their covered sets bound every other.
    """
    weights = {v: Fraction(0) for v in ps.vertices}
    for v, x in wv.items():
        if not ps.has_vertex(v):
            raise PopmatchError(f"unknown vertex {v!r}")
        weights[v] = Fraction(x)
    _nonnegative(weights.values(), "node weights")
    if direction == "min":
        m = gale_shapley(ps)
    elif direction == "max":
        m = two_level_gale_shapley(ps)
    else:
        raise ValueError("direction must be 'min' or 'max'")
    return m, sum((weights[v] for v in m.covered()), Fraction(0))
