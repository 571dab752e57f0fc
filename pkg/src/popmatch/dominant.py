"""Dominant matchings through the two-level instance G'.

Every A-vertex ``a`` gets a level-0 copy, a level-1 copy and a dummy
partner ``d(a)`` placed on the B side.  B-vertices rank all level-1 copies
above all level-0 copies.  Stable matchings of G' project onto dominant
matchings of the original instance by dropping dummy edges and levels.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping

from .core import Edge, Matching, PreferenceSystem, weight_map
from .stable import RotationPoset, enumerate_rotations, gale_shapley, max_weight_stable


@dataclass(frozen=True)
class LevelledInstance:
    """G' together with the map back to the original vertices.

    ``origin[v]`` is ``(a, 0)``, ``(a, 1)`` or ``(a, "dummy")`` for the
    vertices derived from ``a``, and ``(b, None)`` for original B-vertices.
    """

    base: PreferenceSystem
    gprime: PreferenceSystem
    origin: dict[str, tuple[str, object]] = field(repr=False)
    copies: dict[str, tuple[str, str, str]] = field(repr=False)

    def copy(self, a: str, level: int) -> str:
        return self.copies[a][level]

    def dummy(self, a: str) -> str:
        return self.copies[a][2]

    def lift_edge(self, e: tuple[str, str]) -> tuple[Edge, Edge]:
        a, b = self.base.edge(*e)
        return (self.copy(a, 0), b), (self.copy(a, 1), b)

    def sigma(self, m: Matching) -> Matching:
        out = []
        for x, y in m.edges:
            a = self.origin[x][0]
            if self.origin[y][1] == "dummy":
                continue
            out.append((a, y))
        return Matching(out)


def _fresh(name: str, taken: set[str]) -> str:
    while name in taken:
        name += "_"
    taken.add(name)
    return name


def build_levelled_instance(ps: PreferenceSystem) -> LevelledInstance:
    taken = set(ps.vertices)
    copies = {
        a: (_fresh(f"{a}_0", taken), _fresh(f"{a}_1", taken), _fresh(f"d_{a}", taken))
        for a in ps.side_a
    }
    origin: dict[str, tuple[str, object]] = {b: (b, None) for b in ps.side_b}
    prefs: dict[str, tuple[str, ...]] = {}
    for a, (a0, a1, d) in copies.items():
        origin[a0], origin[a1], origin[d] = (a, 0), (a, 1), (a, "dummy")
        prefs[a0] = ps.prefs[a] + (d,)
        prefs[a1] = (d,) + ps.prefs[a]
        prefs[d] = (a0, a1)
    for b in ps.side_b:
        lst = ps.prefs[b]
        prefs[b] = tuple(copies[a][1] for a in lst) + tuple(copies[a][0] for a in lst)
    side_a = [x for a in ps.side_a for x in copies[a][:2]]
    side_b = list(ps.side_b) + [copies[a][2] for a in ps.side_a]
    gp = PreferenceSystem(side_a, side_b, prefs)
    return LevelledInstance(ps, gp, origin, copies)


def two_level_gale_shapley(ps: PreferenceSystem) -> Matching:
    """Deferred acceptance with a single promotion per A-vertex.

    A proposer that runs through its whole list at level 0 starts over at
    level 1; B-vertices prefer any level-1 proposer to any level-0 one.
    """
    rank = ps._rank
    level = {a: 0 for a in ps.side_a}
    nxt = {a: 0 for a in ps.side_a}
    held: dict[str, str] = {}
    free = deque(ps.side_a)
    while free:
        a = free.popleft()
        lst = ps.prefs[a]
        if nxt[a] >= len(lst):
            if level[a] == 1:
                continue
            level[a], nxt[a] = 1, 0
        b = lst[nxt[a]]
        nxt[a] += 1
        cur = held.get(b)
        if cur is None:
            held[b] = a
        elif (-level[a], rank[b][a]) < (-level[cur], rank[b][cur]):
            held[b] = a
            free.append(cur)
        else:
            free.append(a)
    return Matching((a, b) for b, a in held.items())


def dominant_node_set(ps: PreferenceSystem) -> frozenset[str]:
    return two_level_gale_shapley(ps).covered()


@dataclass
class DominantStructure:
    """G' with its rotation poset, built once and queried repeatedly."""

    li: LevelledInstance
    poset: RotationPoset

    @classmethod
    def of(cls, ps: PreferenceSystem) -> "DominantStructure":
        li = build_levelled_instance(ps)
        return cls(li, enumerate_rotations(li.gprime))

    def matching_for(
        self, contain: Iterable[tuple[str, str]] = (), avoid: Iterable[tuple[str, str]] = ()
    ) -> Matching | None:
        """A dominant matching containing ``contain`` and avoiding ``avoid``."""
        lifted_avoid = [c for e in avoid for c in self.li.lift_edge(e)]
        choices = [self.li.lift_edge(e) for e in contain]
        for picks in product(*choices):
            ideal = self.poset.ideal_for(picks, lifted_avoid)
            if ideal is not None:
                return self.li.sigma(self.poset.matching(ideal))
        return None

    def is_pair(self, e: tuple[str, str]) -> bool:
        return any(c in self.poset.m0 or c in self.poset.added_by for c in self.li.lift_edge(e))

    def is_avoided(self, e: tuple[str, str]) -> bool:
        return self.poset.ideal_for((), self.li.lift_edge(e)) is not None


def is_dominant_pair(ps: PreferenceSystem, e: tuple[str, str]) -> bool:
    return DominantStructure.of(ps).is_pair(e)


def avoided_by_some_dominant(ps: PreferenceSystem, e: tuple[str, str]) -> bool:
    return DominantStructure.of(ps).is_avoided(e)


def all_dominant_matchings(ps: PreferenceSystem, cap: int = 100_000) -> list[Matching]:
    """Projections of every stable matching of G', without duplicates."""
    ds = DominantStructure.of(ps)
    seen: dict[Matching, None] = {}
    for ideal in ds.poset.ideals(cap):
        seen.setdefault(ds.li.sigma(ds.poset.matching(ideal)))
    return list(seen)


def max_weight_dominant(
    ps: PreferenceSystem, w: Mapping | None = None, structure: DominantStructure | None = None
) -> tuple[Matching, Fraction]:
    """Lift the weights to both copies of each edge and solve on G'."""
    wm = weight_map(ps, w)
    ds = structure or DominantStructure.of(ps)
    lifted = {}
    for e, x in wm.items():
        for c in ds.li.lift_edge(e):
            lifted[c] = x
    m, _ = max_weight_stable(ds.li.gprime, lifted, ds.poset)
    d = ds.li.sigma(m)
    return d, sum((wm[e] for e in d), Fraction(0))


def gprime_stable(ps: PreferenceSystem) -> tuple[LevelledInstance, Matching]:
    li = build_levelled_instance(ps)
    return li, gale_shapley(li.gprime, "A")
