"""Stable matchings: deferred acceptance and the rotation poset.

Rotations are found by repeatedly exposing and eliminating them in the
reduced preference table, starting from the A-optimal matching.  Along the
way every table pair records the rotation that removed it, which gives both
the precedence relation and the stable-pair queries for free.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import lcm
from typing import Iterable, Iterator, Mapping

import networkx as nx

from .core import Edge, Matching, PopmatchError, PreferenceSystem, weight_map


class StableCapExceededError(PopmatchError, RuntimeError):
    pass


def gale_shapley(ps: PreferenceSystem, side: str = "A") -> Matching:
    """Proposing-side-optimal stable matching.

    Proposers act in instance order; the result does not depend on it.
    """
    if side not in ("A", "B"):
        raise ValueError("side must be 'A' or 'B'")
    proposers = ps.side_a if side == "A" else ps.side_b
    rank = ps._rank
    nxt = {p: 0 for p in proposers}
    held: dict[str, str] = {}
    free = deque(proposers)
    while free:
        p = free.popleft()
        lst = ps.prefs[p]
        if nxt[p] >= len(lst):
            continue
        r = lst[nxt[p]]
        nxt[p] += 1
        cur = held.get(r)
        if cur is None:
            held[r] = p
        elif rank[r][p] < rank[r][cur]:
            held[r] = p
            free.append(cur)
        else:
            free.append(p)
    return Matching(ps.edge(p, r) for r, p in held.items())


def stable_node_set(ps: PreferenceSystem) -> frozenset[str]:
    return gale_shapley(ps).covered()


@dataclass(frozen=True)
class Rotation:
    """Cyclic exchange: ``cycle[i][0]`` leaves ``cycle[i][1]`` for ``cycle[i+1][1]``."""

    cycle: tuple[Edge, ...]

    @property
    def removed_edges(self) -> frozenset[Edge]:
        return frozenset(self.cycle)

    @property
    def added_edges(self) -> frozenset[Edge]:
        k = len(self.cycle)
        return frozenset((self.cycle[i][0], self.cycle[(i + 1) % k][1]) for i in range(k))

    def apply(self, m: Matching) -> Matching:
        if not self.removed_edges <= m.edges:
            raise ValueError("rotation is not exposed in this matching")
        return Matching((m.edges - self.removed_edges) | self.added_edges)


@dataclass
class RotationPoset:
    """All rotations of an instance with their precedence.

    Rotations are stored in elimination order, which is a linear extension
    of the precedence.  ``preds[i]`` holds the direct predecessors of
    rotation ``i`` (not transitively closed).
    """

    ps: PreferenceSystem
    m0: Matching
    rotations: list[Rotation]
    preds: list[frozenset[int]]
    added_by: dict[Edge, int] = field(repr=False)
    removed_by: dict[Edge, int] = field(repr=False)

    def __len__(self) -> int:
        return len(self.rotations)

    @property
    def precedence(self) -> set[tuple[int, int]]:
        return {(p, i) for i, ps_ in enumerate(self.preds) for p in ps_}

    def _closure(self, start: Iterable[int], down: bool) -> set[int]:
        if down:
            step = self.preds
        else:
            step = [set() for _ in self.rotations]
            for i, ps_ in enumerate(self.preds):
                for p in ps_:
                    step[p].add(i)
        seen = set(start)
        todo = list(seen)
        while todo:
            for j in step[todo.pop()]:
                if j not in seen:
                    seen.add(j)
                    todo.append(j)
        return seen

    def down_closure(self, rots: Iterable[int]) -> set[int]:
        return self._closure(rots, True)

    def up_closure(self, rots: Iterable[int]) -> set[int]:
        return self._closure(rots, False)

    def is_closed(self, ideal: Iterable[int]) -> bool:
        s = set(ideal)
        return all(self.preds[i] <= s for i in s)

    def matching(self, ideal: Iterable[int]) -> Matching:
        m = self.m0
        for i in sorted(ideal):
            m = self.rotations[i].apply(m)
        return m

    def ideal_with(self, include: Iterable[int] = (), exclude: Iterable[int] = ()) -> set[int] | None:
        """Smallest closed set containing ``include`` and disjoint from ``exclude``."""
        down = self.down_closure(include)
        if down & self.up_closure(exclude):
            return None
        return down

    def _contain_options(self, e: Edge) -> list[tuple[set[int], set[int]]]:
        inc, exc = set(), set()
        if e not in self.m0:
            if e not in self.added_by:
                return []
            inc.add(self.added_by[e])
        if e in self.removed_by:
            exc.add(self.removed_by[e])
        return [(inc, exc)]

    def _avoid_options(self, e: Edge) -> list[tuple[set[int], set[int]]]:
        opts = []
        if e not in self.m0:
            opts.append((set(), {self.added_by[e]} if e in self.added_by else set()))
        if e in self.removed_by:
            opts.append(({self.removed_by[e]}, set()))
        return opts

    def ideal_for(self, contain: Iterable[Edge] = (), avoid: Iterable[Edge] = ()) -> set[int] | None:
        """A closed set whose matching contains and avoids the given edges, if any."""
        groups = [self._contain_options(e) for e in contain]
        groups += [self._avoid_options(e) for e in avoid]
        for combo in product(*groups):
            inc = set().union(*(c[0] for c in combo))
            exc = set().union(*(c[1] for c in combo))
            ideal = self.ideal_with(inc, exc)
            if ideal is not None:
                return ideal
        return None

    def ideals(self, cap: int | None = None) -> Iterator[frozenset[int]]:
        """Every closed set, each once."""
        n = len(self.rotations)
        chosen: list[int] = []
        inside = [False] * n
        count = 0

        def rec(i: int) -> Iterator[frozenset[int]]:
            nonlocal count
            if i == n:
                count += 1
                if cap is not None and count > cap:
                    raise StableCapExceededError(f"more than {cap} stable matchings")
                yield frozenset(chosen)
                return
            yield from rec(i + 1)
            if all(inside[p] for p in self.preds[i]):
                inside[i] = True
                chosen.append(i)
                yield from rec(i + 1)
                chosen.pop()
                inside[i] = False

        yield from rec(0)


class _Table:
    """Reduced preference lists, kept symmetric.

    A pair survives when it lies between the A-optimal and B-optimal
    partners on both of its lists.
    """

    def __init__(self, ps: PreferenceSystem, m0: Matching, mz: Matching):
        rank = ps._rank
        self.a = {a: [] for a in ps.side_a}
        self.b = {b: [] for b in ps.side_b}
        for a in ps.side_a:
            pa, za = m0.partner(a), mz.partner(a)
            if pa is None:
                continue
            for b in ps.prefs[a]:
                pb, zb = m0.partner(b), mz.partner(b)
                if pb is None or not rank[a][pa] <= rank[a][b] <= rank[a][za]:
                    continue
                if rank[b][zb] <= rank[b][a] <= rank[b][pb]:
                    self.a[a].append(b)
        for b in ps.side_b:
            for a in ps.prefs[b]:
                if b in self.a[a]:
                    self.b[b].append(a)

    def remove(self, a: str, b: str) -> None:
        self.a[a].remove(b)
        self.b[b].remove(a)


def enumerate_rotations(ps: PreferenceSystem) -> RotationPoset:
    m0 = gale_shapley(ps, "A")
    table = _Table(ps, m0, gale_shapley(ps, "B"))
    rank = ps._rank
    rotations: list[Rotation] = []
    preds: list[frozenset[int]] = []
    added_by: dict[Edge, int] = {}
    removed_by: dict[Edge, int] = {}
    while True:
        start = next((a for a in ps.side_a if len(table.a[a]) > 1), None)
        if start is None:
            break
        order: dict[str, int] = {}
        walk: list[str] = []
        a = start
        while a not in order:
            order[a] = len(walk)
            walk.append(a)
            a = table.b[table.a[a][1]][-1]
        cyc = walk[order[a]:]
        rho = Rotation(tuple((x, table.a[x][0]) for x in cyc))
        idx = len(rotations)
        before: set[int] = set()
        for x, bx in rho.cycle:
            if (x, bx) in added_by:
                before.add(added_by[(x, bx)])
            target = table.a[x][1]
            lo, hi = rank[x][bx], rank[x][target]
            for w in ps.prefs[x][lo : hi - 1]:
                if (x, w) in removed_by:
                    before.add(removed_by[(x, w)])
        seconds = [table.a[x][1] for x in cyc]
        for x, target in zip(cyc, seconds):
            lst = table.b[target]
            for y in lst[lst.index(x) + 1 :]:
                removed_by[(y, target)] = idx
                table.remove(y, target)
            added_by[(x, target)] = idx
        rotations.append(rho)
        preds.append(frozenset(before))
    return RotationPoset(ps, m0, rotations, preds, added_by, removed_by)


def all_stable_matchings(ps: PreferenceSystem, cap: int = 100_000) -> list[Matching]:
    poset = enumerate_rotations(ps)
    return [poset.matching(i) for i in poset.ideals(cap)]


def is_stable_pair(ps: PreferenceSystem, e: tuple[str, str]) -> bool:
    e = ps.edge(*e)
    poset = enumerate_rotations(ps)
    return e in poset.m0 or e in poset.added_by


def avoided_by_some_stable(ps: PreferenceSystem, e: tuple[str, str]) -> bool:
    e = ps.edge(*e)
    poset = enumerate_rotations(ps)
    return e not in poset.m0 or e in poset.removed_by


def stable_matching_for(
    ps: PreferenceSystem,
    contain: Iterable[tuple[str, str]] = (),
    avoid: Iterable[tuple[str, str]] = (),
    poset: RotationPoset | None = None,
) -> Matching | None:
    """A stable matching containing every edge of ``contain`` and none of ``avoid``."""
    poset = poset or enumerate_rotations(ps)
    ideal = poset.ideal_for([ps.edge(*e) for e in contain], [ps.edge(*e) for e in avoid])
    return None if ideal is None else poset.matching(ideal)


def rotation_weights(poset: RotationPoset, w: Mapping[Edge, Fraction]) -> list[Fraction]:
    return [
        sum((w.get(e, Fraction(0)) for e in r.added_edges), Fraction(0))
        - sum((w.get(e, Fraction(0)) for e in r.removed_edges), Fraction(0))
        for r in poset.rotations
    ]


def max_weight_ideal(poset: RotationPoset, rw: list[Fraction]) -> set[int]:
    """Maximum-weight closed set, via a minimum cut."""
    if not any(x > 0 for x in rw):
        return set()
    scale = lcm(*(x.denominator for x in rw))
    iw = [int(x * scale) for x in rw]
    big = sum(abs(x) for x in iw) + 1
    g = nx.DiGraph()
    g.add_nodes_from(["s", "t"])
    for i, x in enumerate(iw):
        if x > 0:
            g.add_edge("s", i, capacity=x)
        elif x < 0:
            g.add_edge(i, "t", capacity=-x)
        for p in poset.preds[i]:
            g.add_edge(i, p, capacity=big)
    _, (src_side, _) = nx.minimum_cut(g, "s", "t")
    return {v for v in src_side if v != "s"}


def max_weight_stable(
    ps: PreferenceSystem, w: Mapping | None = None, poset: RotationPoset | None = None
) -> tuple[Matching, Fraction]:
    wm = weight_map(ps, w)
    poset = poset or enumerate_rotations(ps)
    ideal = max_weight_ideal(poset, rotation_weights(poset, wm))
    m = poset.matching(ideal)
    return m, sum((wm[e] for e in m), Fraction(0))
