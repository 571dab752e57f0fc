"""Vote labels, the graph G_M, and popularity / dominance verification.

Popularity is decided through the forbidden-structure characterization: a
matching M is popular iff G_M (the graph without (-,-) edges) contains no
M-alternating cycle through a (+,+) edge, no alternating path through two
(+,+) edges, and no alternating path from an exposed vertex through a (+,+)
edge.

All three searches run on the traversal digraph whose arcs are
``x -> partner(y)`` for every non-matching G_M edge ``xy`` with ``y`` matched.
In a bipartite graph a directed path there maps to a simple alternating
path.  When a search closes onto itself the overlap is an alternating cycle
through a (+,+) edge, which is reported as condition (i).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

from .core import Edge, Matching, PopmatchError, PreferenceSystem


class NotPopularError(PopmatchError, ValueError):
    """Raised when an operation requires a popular matching."""


class EdgeLabel(Enum):
    PLUS_PLUS = "(+,+)"
    PLUS_MINUS = "(+,-)"
    MINUS_PLUS = "(-,+)"
    MINUS_MINUS = "(-,-)"

    @classmethod
    def from_votes(cls, first: bool, second: bool) -> "EdgeLabel":
        return {
            (True, True): cls.PLUS_PLUS,
            (True, False): cls.PLUS_MINUS,
            (False, True): cls.MINUS_PLUS,
            (False, False): cls.MINUS_MINUS,
        }[(first, second)]

    def flipped(self) -> "EdgeLabel":
        return {
            EdgeLabel.PLUS_MINUS: EdgeLabel.MINUS_PLUS,
            EdgeLabel.MINUS_PLUS: EdgeLabel.PLUS_MINUS,
        }.get(self, self)

    def __str__(self) -> str:
        return self.value


def _votes_for(ps: PreferenceSystem, m: Matching, u: str, v: str) -> bool:
    p = m.partner(u)
    return p is None or ps.rank(u, v) < ps.rank(u, p)


@dataclass(frozen=True)
class LabeledGraph:
    """A preference system together with the vote labels induced by a matching.

    ``label`` is keyed by canonical ``(a, b)`` edges and oriented that way;
    use :meth:`label_of` for an arbitrary orientation.
    """

    base: PreferenceSystem
    matching: Matching
    label: dict[Edge, EdgeLabel] = field(repr=False)

    def label_of(self, u: str, v: str) -> EdgeLabel:
        e = self.base.edge(u, v)
        lab = self.label[e]
        return lab if e == (u, v) else lab.flipped()

    def vote(self, u: str, v: str) -> bool:
        """Does ``u`` prefer ``v`` to its partner in the matching?"""
        return _votes_for(self.base, self.matching, u, v)

    def in_gm(self, u: str, v: str) -> bool:
        e = self.base.edge(u, v)
        return e in self.matching or self.label[e] is not EdgeLabel.MINUS_MINUS

    @property
    def gm_edges(self) -> frozenset[Edge]:
        return frozenset(self.matching.edges) | frozenset(
            e for e, lab in self.label.items() if lab is not EdgeLabel.MINUS_MINUS
        )

    @property
    def plus_plus_edges(self) -> list[Edge]:
        return [e for e in self.base.edges if self.label.get(e) is EdgeLabel.PLUS_PLUS]


def label_edges(ps: PreferenceSystem, m: Matching) -> LabeledGraph:
    m.validate(ps)
    labels = {}
    for a, b in ps.edges:
        if (a, b) in m:
            continue
        labels[(a, b)] = EdgeLabel.from_votes(
            _votes_for(ps, m, a, b), _votes_for(ps, m, b, a)
        )
    return LabeledGraph(ps, m, labels)


@dataclass(frozen=True)
class PopularityCertificate:
    """Verdict of :func:`is_popular`.

    When ``verdict`` is false, ``witness`` is an ordered vertex list forming
    an alternating path (conditions ``"ii"``, ``"iii"``) or cycle
    (condition ``"i"``, closing edge implied) inside G_M, and
    ``plus_plus`` lists the (+,+) edges it traverses.
    """

    verdict: bool
    witness: tuple[str, ...] | None = None
    condition: str | None = None
    plus_plus: tuple[Edge, ...] = ()

    def __bool__(self) -> bool:
        return self.verdict

    @property
    def is_cycle(self) -> bool:
        return self.condition == "i"


@dataclass(frozen=True)
class DominanceCertificate:
    verdict: bool
    witness: tuple[str, ...] | None = None

    def __bool__(self) -> bool:
        return self.verdict


class _Search:
    """Scratch state shared by the popularity and dominance searches.

    ``partner`` maps every vertex taking part to its partner or None.  A
    partial map restricts the search to the induced subgraph, which is how
    the constrained search prunes half-built matchings.
    """

    def __init__(self, ps: PreferenceSystem, partner: dict[str, str | None]):
        self.ps = ps
        self.partner = partner
        rank = ps._rank
        # adjacency of G_M restricted to non-matching edges
        gm: dict[str, list[str]] = {v: [] for v in partner}
        pp: list[Edge] = []
        for a, b in ps.edges:
            if a not in partner or b not in partner:
                continue
            pa, pb = partner[a], partner[b]
            if pa == b:
                continue
            va = pa is None or rank[a][b] < rank[a][pa]
            vb = pb is None or rank[b][a] < rank[b][pb]
            if va or vb:
                gm[a].append(b)
                gm[b].append(a)
                if va and vb:
                    pp.append((a, b))
        self.gm = gm
        self.pp = pp

    @classmethod
    def of(cls, ps: PreferenceSystem, m: Matching) -> "_Search":
        return cls(ps, {v: m.partner(v) for v in ps.vertices})

    def traverse(self, sources: Iterable[str]) -> dict[str, tuple[str, str] | None]:
        parent: dict[str, tuple[str, str] | None] = {}
        queue = deque()
        for s in sources:
            if s not in parent:
                parent[s] = None
                queue.append(s)
        partner, gm = self.partner, self.gm
        while queue:
            x = queue.popleft()
            for y in gm[x]:
                z = partner[y]
                if z is None or z in parent:
                    continue
                parent[z] = (x, y)
                queue.append(z)
        return parent

    @staticmethod
    def chain(parent: dict, node: str) -> list[str]:
        out = [node]
        while parent[node] is not None:
            prev, via = parent[node]
            out.append(via)
            out.append(prev)
            node = prev
        out.reverse()
        return out


def _close(path: list[str], start: int, plus_plus: Edge) -> PopularityCertificate:
    cycle = tuple(path[start:])
    return PopularityCertificate(False, cycle, "i", (plus_plus,))


def is_popular(ps: PreferenceSystem, m: Matching) -> PopularityCertificate:
    """Decide popularity of ``m``; unpopular verdicts carry a witness."""
    m.validate(ps)
    return _certify(_Search.of(ps, m))


def partial_violation(ps: PreferenceSystem, partner: dict[str, str | None]) -> PopularityCertificate:
    """Look for a forbidden structure among the vertices of ``partner`` only.

    Labels inside that vertex set do not depend on how the rest is matched,
    so a structure found here survives in every completion.
    """
    return _certify(_Search(ps, partner))


def _certify(s: _Search) -> PopularityCertificate:
    if not s.pp:
        return PopularityCertificate(True)
    ps, partner = s.ps, s.partner

    # (iii) from exposed vertices on either side
    for side, own in ((ps.side_a, 0), (ps.side_b, 1)):
        exposed = [v for v in side if v in partner and partner[v] is None]
        if not exposed:
            continue
        parent = s.traverse(exposed)
        for e in s.pp:
            x, y = e[own], e[1 - own]
            if x not in parent:
                continue
            path = s.chain(parent, x)
            if y in path:
                return _close(path, path.index(y), e)
            return PopularityCertificate(False, tuple(path + [y]), "iii", (e,))

    # (i) / (ii): from the far side of one (+,+) edge to the near side of another
    origin: dict[str, Edge] = {}
    for e in s.pp:
        z = partner[e[1]]
        if z is not None and z not in origin:
            origin[z] = e
    parent = s.traverse(origin)
    for e2 in s.pp:
        x2, y2 = e2
        if x2 not in parent:
            continue
        chain = s.chain(parent, x2)
        e1 = origin[chain[0]]
        x1, y1 = e1
        path = [x1, y1] + chain
        if x1 in chain:
            return _close(path[: 2 + chain.index(x1)], 0, e1)
        if y2 == y1:
            return _close(path, 1, e2)
        if y2 in chain:
            return _close(path, path.index(y2), e2)
        return PopularityCertificate(False, tuple(path + [y2]), "ii", (e1, e2))
    return PopularityCertificate(True)


def is_dominant(ps: PreferenceSystem, m: Matching) -> DominanceCertificate:
    """True iff the popular matching ``m`` admits no augmenting path in G_M."""
    if not is_popular(ps, m):
        raise NotPopularError("dominance is only defined for popular matchings")
    s = _Search.of(ps, m)
    partner = s.partner
    exposed = [a for a in ps.side_a if partner[a] is None]
    parent = s.traverse(exposed)
    for x in sorted(parent, key=ps.index):
        for y in s.gm[x]:
            if partner[y] is None:
                return DominanceCertificate(False, tuple(s.chain(parent, x) + [y]))
    return DominanceCertificate(True)


def alternating_reachability(
    lg: LabeledGraph, sources: Iterable[str], require_exposed: bool = True
) -> set[tuple[str, int]]:
    """States ``(vertex, parity)`` reachable by alternating walks in G_M.

    Walks start with a non-matching edge at a source (only exposed sources
    unless ``require_exposed`` is false).  Parity 1 means the state was
    entered through a non-matching edge, 0 through a matching edge.
    """
    ps, m = lg.base, lg.matching
    seen: set[tuple[str, int]] = set()
    queue: deque[tuple[str, int]] = deque()

    def push_nonmatching(x: str) -> None:
        px = m.partner(x)
        for y in ps.prefs[x]:
            if y != px and lg.in_gm(x, y) and (y, 1) not in seen:
                seen.add((y, 1))
                queue.append((y, 1))

    for src in sources:
        if require_exposed and m.covers(src):
            continue
        push_nonmatching(src)
    while queue:
        v, parity = queue.popleft()
        if parity == 1:
            p = m.partner(v)
            if p is not None and (p, 0) not in seen:
                seen.add((p, 0))
                queue.append((p, 0))
        else:
            push_nonmatching(v)
    return seen


# ------------------------------------------------------------ witness tools


def witness_edges(cert: PopularityCertificate) -> list[tuple[str, str]]:
    """Consecutive vertex pairs of the witness, including a cycle's closing edge."""
    w = list(cert.witness or ())
    pairs = list(zip(w, w[1:]))
    if cert.is_cycle and len(w) > 2:
        pairs.append((w[-1], w[0]))
    return pairs


def check_witness(ps: PreferenceSystem, m: Matching, cert: PopularityCertificate) -> list[str]:
    """Replay a witness; returns a list of problems (empty when sound)."""
    problems: list[str] = []
    if cert.verdict or not cert.witness:
        return ["no witness to check"]
    w = cert.witness
    if len(set(w)) != len(w):
        problems.append("witness repeats a vertex")
    lg = label_edges(ps, m)
    pairs = witness_edges(cert)
    in_m = []
    for u, v in pairs:
        if not ps.has_edge(u, v):
            problems.append(f"{u}-{v} is not an edge")
            return problems
        in_m.append(ps.edge(u, v) in m)
        if not lg.in_gm(u, v):
            problems.append(f"{u}-{v} is a (-,-) edge")
    for i in range(1, len(in_m)):
        if in_m[i] == in_m[i - 1]:
            problems.append(f"not alternating at {pairs[i]}")
    if cert.is_cycle and in_m and in_m[0] == in_m[-1]:
        problems.append("cycle does not alternate at its closing edge")
    covered = {ps.edge(u, v) for u, v in pairs}
    for e in cert.plus_plus:
        if e not in covered:
            problems.append(f"claimed edge {e} not on the witness")
        elif lg.label[e] is not EdgeLabel.PLUS_PLUS:
            problems.append(f"claimed edge {e} is not (+,+)")
    if cert.condition == "iii" and m.covers(w[0]):
        problems.append("condition (iii) witness does not start at an exposed vertex")
    if cert.condition == "ii" and len(set(cert.plus_plus)) < 2:
        problems.append("condition (ii) needs two distinct (+,+) edges")
    return problems


def flip_witness(ps: PreferenceSystem, m: Matching, cert: PopularityCertificate) -> Matching:
    """Switch ``m`` along the witness: drop matched edges touching it, add its other edges."""
    pairs = [ps.edge(u, v) for u, v in witness_edges(cert)]
    touched = set(cert.witness or ())
    kept = [e for e in m.edges if e[0] not in touched and e[1] not in touched]
    added = [e for e in pairs if e not in m]
    return Matching(kept + added)
