"""Popular matchings under forced and forbidden vertices and edges.

The polynomial cases are answered through stable matchings of G and of the
two-level instance.  Everything else goes to an exhaustive search that is
refused unless explicitly allowed.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable

from .core import ConstraintSet, Edge, Matching, PopmatchError, PreferenceSystem
from .dominant import DominantStructure, dominant_node_set, two_level_gale_shapley
from .popularity import is_popular, partial_violation
from .stable import enumerate_rotations, gale_shapley, stable_matching_for, stable_node_set

DEFAULT_EDGE_LIMIT = 40


class HardCaseError(PopmatchError, RuntimeError):
    """The instance falls in an NP-hard regime and exhaustive search was not allowed."""


@dataclass(frozen=True)
class EdgeClassification:
    in_some_stable: bool
    in_some_dominant: bool
    avoided_by_some_stable: bool
    avoided_by_some_dominant: bool

    @property
    def in_some_popular(self) -> bool:
        return self.in_some_stable or self.in_some_dominant

    @property
    def avoided_by_some_popular(self) -> bool:
        return self.avoided_by_some_stable or self.avoided_by_some_dominant


@dataclass(frozen=True)
class PmffeOutcome:
    """Result of a constrained query.

    ``case`` names the dispatch branch; ``fallback`` is true when the
    exhaustive search produced the answer.
    """

    matching: Matching | None
    case: str
    fallback: bool = False

    @property
    def found(self) -> bool:
        return self.matching is not None

    @property
    def status(self) -> str:
        if self.fallback:
            return "HardFallbackUsed"
        return "Found" if self.found else "Infeasible"

    def __bool__(self) -> bool:
        return self.found


class EdgeOracle:
    """Stable and dominant structures of one instance, for repeated edge queries."""

    def __init__(self, ps: PreferenceSystem):
        self.ps = ps
        self.poset = enumerate_rotations(ps)
        self.dom = DominantStructure.of(ps)

    def classify(self, e: tuple[str, str]) -> EdgeClassification:
        e = self.ps.edge(*e)
        p = self.poset
        return EdgeClassification(
            in_some_stable=e in p.m0 or e in p.added_by,
            in_some_dominant=self.dom.is_pair(e),
            avoided_by_some_stable=e not in p.m0 or e in p.removed_by,
            avoided_by_some_dominant=self.dom.is_avoided(e),
        )

    def containing(self, e: tuple[str, str]) -> Matching | None:
        m = stable_matching_for(self.ps, [e], poset=self.poset)
        return m if m is not None else self.dom.matching_for([e])

    def avoiding(self, e: tuple[str, str]) -> Matching | None:
        m = stable_matching_for(self.ps, avoid=[e], poset=self.poset)
        return m if m is not None else self.dom.matching_for(avoid=[e])


def classify_edge(ps: PreferenceSystem, e: tuple[str, str]) -> EdgeClassification:
    return EdgeOracle(ps).classify(e)


def require_exhaustive(ps: PreferenceSystem, allow_exponential: bool, edge_limit: int | None) -> None:
    if not allow_exponential:
        raise HardCaseError("NP-hard constraint pattern; exhaustive search not allowed")
    if edge_limit is not None and len(ps.edges) > edge_limit:
        raise HardCaseError(
            f"instance has {len(ps.edges)} edges, above the exhaustive-search limit {edge_limit}"
        )


def _bfs_order(ps: PreferenceSystem) -> list[str]:
    # keeps the decided region connected so that partial checks bite early
    order: list[str] = []
    seen: set[str] = set()
    for root in ps.vertices:
        if root in seen:
            continue
        seen.add(root)
        queue = deque([root])
        while queue:
            x = queue.popleft()
            order.append(x)
            for y in ps.prefs[x]:
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
    return order


def search_popular(
    ps: PreferenceSystem,
    cs: ConstraintSet = ConstraintSet(),
    accept: Callable[[Matching], bool] | None = None,
    budget: tuple[frozenset[Edge], int] | None = None,
) -> Matching | None:
    """Depth-first search for a popular matching satisfying ``cs``.

    Vertices are decided in breadth-first order, each either matched to a later
    neighbor (in its preference order) or left exposed; matching comes
    before exposure, so larger matchings tend to be met first.  Branches are
    cut when they break a constraint, leave a stable-covered vertex exposed,
    cover a vertex no dominant matching covers, use an edge that lies in no
    popular matching or skip one that lies in all of them.  They are also cut as
    soon as the decided vertices alone contain a structure that rules out
    popularity, since later choices cannot change labels among them.
    ``budget`` bounds how many edges of a given set may be used.
    """
    verts = _bfs_order(ps)
    rank = ps._rank
    must = set(cs.forced_nodes) | set(stable_node_set(ps))
    for a, b in cs.forced_edges:
        must.update((a, b))
    never = set(cs.forbidden_nodes) | (set(verts) - dominant_node_set(ps))
    if must & never:
        return None
    # edges outside every popular matching are useless, edges inside every
    # one are mandatory; both sets come from the polynomial edge tests
    eo = EdgeOracle(ps)
    marks = {e: eo.classify(e) for e in ps.edges}
    banned = set(cs.forbidden_edges) | {e for e, c in marks.items() if not c.in_some_popular}
    required = set(cs.forced_edges) | {e for e, c in marks.items() if not c.avoided_by_some_popular}
    if required & banned:
        return None
    forced_of: dict[str, str] = {}
    for a, b in required:
        if a in forced_of or b in forced_of or a in never or b in never:
            return None
        forced_of[a], forced_of[b] = b, a
        must.update((a, b))
    limit_set, limit = budget if budget else (frozenset(), len(ps.edges))
    pos = {v: i for i, v in enumerate(verts)}
    partner: dict[str, str | None] = {}
    used = 0

    def wants(x: str, v: str) -> bool:
        # does x, already decided, prefer the exposed v to its lot?
        p = partner[x]
        return p is None or rank[x][v] < rank[x][p]

    def can_match(v: str, u: str) -> bool:
        for x, other in ((v, u), (u, v)):
            for y in ps.prefs[x]:
                if y == other:
                    break
                if y in partner and partner[y] is None:
                    return False
        return True

    def can_expose(v: str) -> bool:
        return all(not (x in partner and wants(x, v)) for x in ps.prefs[v])

    def rec(i: int) -> Matching | None:
        nonlocal used
        while i < len(verts) and verts[i] in partner:
            i += 1
        if i == len(verts):
            m = Matching(ps.edge(v, p) for v, p in partner.items() if p is not None)
            if (accept is None or accept(m)) and is_popular(ps, m):
                return m
            return None
        v = verts[i]
        if v in never:
            options: list[str | None] = [None]
        elif v in forced_of:
            options = [forced_of[v]]
        else:
            options = [u for u in ps.prefs[v] if pos[u] > i and u not in partner]
            options = [u for u in options if u not in never and u not in forced_of]
            options = [u for u in options if ps.edge(v, u) not in banned]
            if v not in must:
                options.append(None)
        for u in options:
            if u is None:
                if not can_expose(v):
                    continue
                partner[v] = None
                found = rec(i + 1) if partial_violation(ps, partner) else None
                del partner[v]
            else:
                if u in partner or not can_match(v, u):
                    continue
                cost = ps.edge(v, u) in limit_set
                if used + cost > limit:
                    continue
                used += cost
                partner[v], partner[u] = u, v
                found = rec(i + 1) if partial_violation(ps, partner) else None
                del partner[v], partner[u]
                used -= cost
            if found is not None:
                return found
        return None

    return rec(0)


def _cheap_witnesses(ps: PreferenceSystem) -> list[Matching]:
    return [gale_shapley(ps, "A"), gale_shapley(ps, "B"), two_level_gale_shapley(ps)]


def _hard(
    ps: PreferenceSystem,
    cs: ConstraintSet,
    allow_exponential: bool,
    edge_limit: int | None,
    case: str = "f",
    accept: Callable[[Matching], bool] | None = None,
    budget: tuple[frozenset[Edge], int] | None = None,
) -> PmffeOutcome:
    ok = accept or (lambda m: True)
    for m in _cheap_witnesses(ps):
        if cs.satisfied_by(m) and ok(m):
            return PmffeOutcome(m, case)
    require_exhaustive(ps, allow_exponential, edge_limit)
    return PmffeOutcome(search_popular(ps, cs, accept, budget), case, fallback=True)


def solve_pmffe(
    ps: PreferenceSystem,
    cs: ConstraintSet,
    allow_exponential: bool = False,
    edge_limit: int | None = DEFAULT_EDGE_LIMIT,
) -> PmffeOutcome:
    """Find a popular matching meeting ``cs`` or report that none exists.

    Polynomial patterns are answered directly.  Other patterns first try
    the stable and dominant matchings at hand; failing that they need
    ``allow_exponential`` and at most ``edge_limit`` edges (``None`` lifts
    the limit), else :class:`HardCaseError` is raised.
    """
    cs.validate(ps)
    uin, uout = cs.forced_nodes, cs.forbidden_nodes
    fin, fout = cs.forced_edges, cs.forbidden_edges
    single = cs.total() == 1
    if not (uin or fin or fout):
        s = gale_shapley(ps)
        ok = not (uout & s.covered())
        return PmffeOutcome(s if ok else None, "e" if single else "a")
    if not (uout or fin or fout):
        d = two_level_gale_shapley(ps)
        ok = uin <= d.covered()
        return PmffeOutcome(d if ok else None, "e" if single else "b")
    if single and fin:
        (e,) = fin
        return PmffeOutcome(EdgeOracle(ps).containing(e), "c")
    if single and fout:
        (e,) = fout
        return PmffeOutcome(EdgeOracle(ps).avoiding(e), "d")
    return _hard(ps, cs, allow_exponential, edge_limit)


def exclusive_popular_set(
    ps: PreferenceSystem,
    nodes: Iterable[str],
    allow_exponential: bool = False,
    edge_limit: int | None = DEFAULT_EDGE_LIMIT,
) -> PmffeOutcome:
    """A popular matching covering exactly ``nodes``."""
    u = frozenset(nodes)
    for v in u:
        if not ps.has_vertex(v):
            raise PopmatchError(f"unknown vertex {v!r}")
    if not stable_node_set(ps) <= u <= dominant_node_set(ps):
        return PmffeOutcome(None, "exclusive")
    cs = ConstraintSet(forced_nodes=u, forbidden_nodes=frozenset(ps.vertices) - u)
    return _hard(ps, cs, allow_exponential, edge_limit, "exclusive")


def bounded_forbidden(
    ps: PreferenceSystem,
    edges: Iterable[tuple[str, str]],
    q: int,
    allow_exponential: bool = False,
    edge_limit: int | None = DEFAULT_EDGE_LIMIT,
) -> PmffeOutcome:
    """A popular matching using at most ``q`` edges of ``edges``."""
    f = frozenset(ps.edge(*e) for e in edges)
    if q < 0:
        raise ValueError("q must be nonnegative")
    if q >= len(f):
        return PmffeOutcome(gale_shapley(ps), "bounded")
    if q == 0:
        cs = ConstraintSet(forbidden_edges=f)
        if len(f) == 1:
            return solve_pmffe(ps, cs)
        return _hard(ps, cs, allow_exponential, edge_limit, "bounded")
    return _hard(
        ps,
        ConstraintSet(),
        allow_exponential,
        edge_limit,
        "bounded",
        accept=lambda m: len(m.edges & f) <= q,
        budget=(f, q),
    )
