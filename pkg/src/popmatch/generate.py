"""Random instances, weights and formulas for tests and benchmarks."""

from __future__ import annotations

import random
from fractions import Fraction

from .core import Edge, PreferenceSystem


def random_instance(
    rng: random.Random,
    max_a: int = 4,
    max_b: int = 4,
    max_edges: int = 12,
    density: float | None = None,
    min_side: int = 1,
) -> PreferenceSystem:
    """A random instance without isolated vertices.

    Sides have between ``min_side`` and ``max_a`` / ``max_b`` vertices.  Vertices left
    isolated by the sampled edge set are dropped.
    """
    while True:
        na = rng.randint(min(min_side, max_a), max_a)
        nb = rng.randint(min(min_side, max_b), max_b)
        p = density if density is not None else rng.uniform(0.3, 1.0)
        pairs = [(i, j) for i in range(na) for j in range(nb) if rng.random() < p]
        if len(pairs) > max_edges:
            pairs = rng.sample(pairs, max_edges)
        if pairs:
            break
    a_used = sorted({i for i, _ in pairs})
    b_used = sorted({j for _, j in pairs})
    side_a = [f"a{i + 1}" for i in a_used]
    side_b = [f"b{j + 1}" for j in b_used]
    adj: dict[str, list[str]] = {v: [] for v in side_a + side_b}
    for i, j in pairs:
        adj[f"a{i + 1}"].append(f"b{j + 1}")
        adj[f"b{j + 1}"].append(f"a{i + 1}")
    for lst in adj.values():
        rng.shuffle(lst)
    return PreferenceSystem(side_a, side_b, {v: tuple(lst) for v, lst in adj.items()})


def random_weights(rng: random.Random, ps: PreferenceSystem, hi: int = 10) -> dict[Edge, Fraction]:
    return {e: Fraction(rng.randint(0, hi)) for e in ps.edges}


def random_node_weights(rng: random.Random, ps: PreferenceSystem, hi: int = 10) -> dict[str, Fraction]:
    return {v: Fraction(rng.randint(0, hi)) for v in ps.vertices}
