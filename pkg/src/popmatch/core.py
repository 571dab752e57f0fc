"""Instance and matching data model, head-to-head votes, and text I/O.

Edges are always stored in canonical orientation ``(a, b)`` with ``a`` on
side A and ``b`` on side B.  Preference lists are kept as tuples; the rank of
a neighbor is its 1-based position in the owner's list.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

Edge = tuple[str, str]

HEADER = "popmatch-instance v1"


class PopmatchError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(PopmatchError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InstanceError(PopmatchError, ValueError):
    """The preference system violates a structural invariant."""


class NotAnEdgeError(PopmatchError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "not an edge"


class MatchingError(PopmatchError, ValueError):
    """A set of pairs is not a matching of the instance."""


def _check_name(name: str) -> None:
    if not name or any(ch.isspace() for ch in name) or ":" in name or "#" in name:
        raise InstanceError(f"invalid vertex name {name!r}")


@dataclass(frozen=True, eq=False)
class PreferenceSystem:
    """Bipartite graph with a strict preference order per vertex.

    Parameters
    ----------
    side_a, side_b
        Vertex names of the two sides, in instance order.
    prefs
        Map from every vertex to its neighbors, most preferred first.
    """

    side_a: tuple[str, ...]
    side_b: tuple[str, ...]
    prefs: Mapping[str, tuple[str, ...]]
    _rank: dict = field(init=False, repr=False)
    _index: dict = field(init=False, repr=False)
    _edges: tuple = field(init=False, repr=False)

    def __post_init__(self) -> None:
        side_a = tuple(self.side_a)
        side_b = tuple(self.side_b)
        object.__setattr__(self, "side_a", side_a)
        object.__setattr__(self, "side_b", side_b)
        if not side_a or not side_b:
            raise InstanceError("both sides must be nonempty")
        names = side_a + side_b
        for name in names:
            _check_name(name)
        if len(set(names)) != len(names):
            seen: set[str] = set()
            dup = next(n for n in names if n in seen or seen.add(n))
            raise InstanceError(f"duplicate vertex name {dup!r}")
        in_a = set(side_a)
        nameset = set(names)
        index = {v: i for i, v in enumerate(names)}
        prefs = {}
        for v in names:
            lst = tuple(self.prefs.get(v, ()))
            if not lst:
                raise InstanceError(f"vertex {v!r} has no neighbors")
            if len(set(lst)) != len(lst):
                raise InstanceError(f"duplicate entry in preference list of {v!r}")
            for u in lst:
                if u not in nameset:
                    raise InstanceError(f"{v!r} lists unknown vertex {u!r}")
                if (u in in_a) == (v in in_a):
                    raise InstanceError(f"same-side adjacency {v!r} - {u!r}")
            prefs[v] = lst
        extra = set(self.prefs) - set(names)
        if extra:
            raise InstanceError(f"preference lists for unknown vertices {sorted(extra)}")
        rank = {v: {u: i + 1 for i, u in enumerate(lst)} for v, lst in prefs.items()}
        for v, r in rank.items():
            for u in r:
                if v not in rank[u]:
                    raise InstanceError(
                        f"asymmetric preference: {v!r} lists {u!r} but not vice versa"
                    )
        object.__setattr__(self, "prefs", prefs)
        object.__setattr__(self, "_rank", rank)
        object.__setattr__(self, "_index", index)
        edges = tuple((a, b) for a in side_a for b in sorted(prefs[a], key=index.__getitem__))
        object.__setattr__(self, "_edges", edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PreferenceSystem):
            return NotImplemented
        return (
            self.side_a == other.side_a
            and self.side_b == other.side_b
            and dict(self.prefs) == dict(other.prefs)
        )

    __hash__ = None  # type: ignore[assignment]

    @property
    def vertices(self) -> tuple[str, ...]:
        return self.side_a + self.side_b

    @property
    def edges(self) -> tuple[Edge, ...]:
        """All edges, sorted by (A index, B index)."""
        return self._edges

    def index(self, v: str) -> int:
        return self._index[v]

    def in_a(self, v: str) -> bool:
        return self._index[v] < len(self.side_a)

    def has_vertex(self, v: str) -> bool:
        return v in self._index

    def has_edge(self, u: str, v: str) -> bool:
        r = self._rank.get(u)
        return r is not None and v in r

    def edge(self, u: str, v: str) -> Edge:
        """Canonical ``(a, b)`` form of the edge ``uv``."""
        if not self.has_edge(u, v):
            raise NotAnEdgeError(f"{u}-{v} is not an edge")
        return (u, v) if self.in_a(u) else (v, u)

    def neighbors(self, v: str) -> tuple[str, ...]:
        return self.prefs[v]

    def degree(self, v: str) -> int:
        return len(self.prefs[v])

    def rank(self, u: str, v: str) -> int:
        try:
            return self._rank[u][v]
        except KeyError:
            raise NotAnEdgeError(f"{u}-{v} is not an edge") from None

    def prefers(self, v: str, x: str | None, y: str | None) -> bool:
        """True if ``v`` strictly prefers partner ``x`` to ``y`` (None = unmatched)."""
        if x is None:
            return False
        if y is None:
            return True
        r = self._rank[v]
        return r[x] < r[y]

    def matching(self, pairs: Iterable[tuple[str, str]]) -> "Matching":
        """Build a validated matching from pairs given in any orientation."""
        return Matching(self.edge(u, v) for u, v in pairs)

    def __repr__(self) -> str:
        return (
            f"PreferenceSystem(|A|={len(self.side_a)}, |B|={len(self.side_b)}, "
            f"|E|={len(self._edges)})"
        )


def rank(ps: PreferenceSystem, u: str, v: str) -> int:
    """1-based position of ``v`` in ``u``'s preference list."""
    return ps.rank(u, v)


class Matching:
    """An immutable set of disjoint edges in canonical ``(a, b)`` form."""

    __slots__ = ("_edges", "_partner", "_hash")

    def __init__(self, edges: Iterable[Edge] = ()):
        es = frozenset(edges)
        partner: dict[str, str] = {}
        for a, b in es:
            if a in partner or b in partner:
                raise MatchingError(f"vertex shared by two edges at {a}-{b}")
            partner[a] = b
            partner[b] = a
        self._edges = es
        self._partner = partner
        self._hash = hash(es)

    @property
    def edges(self) -> frozenset[Edge]:
        return self._edges

    def partner(self, v: str) -> str | None:
        return self._partner.get(v)

    def covers(self, v: str) -> bool:
        return v in self._partner

    def covered(self) -> frozenset[str]:
        """V(M), the set of matched vertices."""
        return frozenset(self._partner)

    def validate(self, ps: PreferenceSystem) -> None:
        for a, b in self._edges:
            if not (ps.has_edge(a, b) and ps.in_a(a)):
                raise MatchingError(f"{a}-{b} is not an edge of the instance")

    def sorted_edges(self, ps: PreferenceSystem | None = None) -> list[Edge]:
        if ps is None:
            return sorted(self._edges)
        return sorted(self._edges, key=lambda e: (ps.index(e[0]), ps.index(e[1])))

    def __contains__(self, e: object) -> bool:
        return e in self._edges

    def __iter__(self) -> Iterator[Edge]:
        return iter(sorted(self._edges))

    def __len__(self) -> int:
        return len(self._edges)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Matching):
            return self._edges == other._edges
        return NotImplemented

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return "Matching({" + ", ".join(f"{a}{b}" for a, b in sorted(self._edges)) + "})"


@dataclass(frozen=True)
class ConstraintSet:
    """Forced and forbidden vertices and edges for the constrained problem."""

    forced_nodes: frozenset[str] = frozenset()
    forbidden_nodes: frozenset[str] = frozenset()
    forced_edges: frozenset[Edge] = frozenset()
    forbidden_edges: frozenset[Edge] = frozenset()

    @classmethod
    def build(
        cls,
        ps: PreferenceSystem,
        forced_nodes: Iterable[str] = (),
        forbidden_nodes: Iterable[str] = (),
        forced_edges: Iterable[tuple[str, str]] = (),
        forbidden_edges: Iterable[tuple[str, str]] = (),
    ) -> "ConstraintSet":
        cs = cls(
            frozenset(forced_nodes),
            frozenset(forbidden_nodes),
            frozenset(ps.edge(u, v) for u, v in forced_edges),
            frozenset(ps.edge(u, v) for u, v in forbidden_edges),
        )
        cs.validate(ps)
        return cs

    def validate(self, ps: PreferenceSystem) -> None:
        for v in self.forced_nodes | self.forbidden_nodes:
            if not ps.has_vertex(v):
                raise InstanceError(f"unknown vertex {v!r} in constraints")
        for a, b in self.forced_edges | self.forbidden_edges:
            ps.edge(a, b)
        if self.forced_nodes & self.forbidden_nodes:
            raise InstanceError("a vertex is both forced and forbidden")
        if self.forced_edges & self.forbidden_edges:
            raise InstanceError("an edge is both forced and forbidden")
        nodes = self.forced_nodes | self.forbidden_nodes
        for a, b in self.forced_edges | self.forbidden_edges:
            if a in nodes or b in nodes:
                raise InstanceError(f"edge {a}-{b} touches a node constraint")

    def total(self) -> int:
        return (
            len(self.forced_nodes)
            + len(self.forbidden_nodes)
            + len(self.forced_edges)
            + len(self.forbidden_edges)
        )

    def satisfied_by(self, m: Matching) -> bool:
        cov = m.covered()
        return (
            self.forced_nodes <= cov
            and not (self.forbidden_nodes & cov)
            and self.forced_edges <= m.edges
            and not (self.forbidden_edges & m.edges)
        )


# ---------------------------------------------------------------- votes


def _check_matching(ps: PreferenceSystem, m: Matching) -> None:
    m.validate(ps)


def phi(ps: PreferenceSystem, m: Matching, m2: Matching) -> int:
    """Number of vertices that prefer ``m`` to ``m2``."""
    _check_matching(ps, m)
    _check_matching(ps, m2)
    count = 0
    for v in ps.vertices:
        if ps.prefers(v, m.partner(v), m2.partner(v)):
            count += 1
    return count


def is_more_popular(ps: PreferenceSystem, m: Matching, m2: Matching) -> bool:
    return phi(ps, m, m2) > phi(ps, m2, m)


def defeats(ps: PreferenceSystem, m: Matching, m2: Matching) -> bool:
    """``m`` is more popular than ``m2``, or ties with it while being larger."""
    forward, backward = phi(ps, m, m2), phi(ps, m2, m)
    return forward > backward or (forward == backward and len(m) > len(m2))


def blocking_pairs(ps: PreferenceSystem, m: Matching) -> list[Edge]:
    return [
        (a, b)
        for a, b in ps.edges
        if (a, b) not in m
        and ps.prefers(a, b, m.partner(a))
        and ps.prefers(b, a, m.partner(b))
    ]


def is_stable(ps: PreferenceSystem, m: Matching) -> bool:
    return not blocking_pairs(ps, m)


# ---------------------------------------------------------------- weights


def weight_map(ps: PreferenceSystem, weights: Mapping[tuple[str, str], object] | None = None) -> dict[Edge, Fraction]:
    """Complete a partial weight assignment; missing edges weigh zero.

    Values are converted to :class:`fractions.Fraction` so that comparisons
    are exact.
    """
    out = {e: Fraction(0) for e in ps.edges}
    for (u, v), w in (weights or {}).items():
        out[ps.edge(u, v)] = Fraction(w) if not isinstance(w, str) else Fraction(w.strip())
    return out


def matching_weight(w: Mapping[Edge, Fraction], m: Matching) -> Fraction:
    return sum((w[e] for e in m.edges), Fraction(0))


# ---------------------------------------------------------------- text I/O


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_instance(text: str | bytes) -> PreferenceSystem:
    """Parse the ``popmatch-instance v1`` text format."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"not valid UTF-8: {exc}") from None
    side_a: list[str] | None = None
    side_b: list[str] | None = None
    prefs: dict[str, tuple[str, ...]] = {}
    header_seen = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        if not header_seen:
            if line != HEADER:
                raise ParseError(f"expected header {HEADER!r}", lineno)
            header_seen = True
            continue
        if line.startswith("A:") or line.startswith("B:"):
            names = line[2:].split()
            if line[0] == "A":
                if side_a is not None:
                    raise ParseError("side A declared twice", lineno)
                side_a = names
            else:
                if side_b is not None:
                    raise ParseError("side B declared twice", lineno)
                side_b = names
            continue
        if line.startswith("pref") and len(line) > 4 and line[4].isspace():
            head, sep, tail = line[4:].partition(":")
            if not sep:
                raise ParseError("missing ':' in pref line", lineno)
            owner = head.strip()
            if not owner or len(owner.split()) != 1:
                raise ParseError("pref line must name exactly one vertex", lineno)
            if side_a is None or side_b is None:
                raise ParseError("pref line before both sides are declared", lineno)
            if owner not in side_a and owner not in side_b:
                raise ParseError(f"pref line for undeclared vertex {owner!r}", lineno)
            if owner in prefs:
                raise ParseError(f"duplicate pref line for {owner!r}", lineno)
            prefs[owner] = tuple(tail.split())
            continue
        raise ParseError(f"unrecognized line {line!r}", lineno)
    if not header_seen:
        raise ParseError("empty input")
    if side_a is None or side_b is None:
        raise ParseError("both 'A:' and 'B:' lines are required")
    return PreferenceSystem(tuple(side_a), tuple(side_b), prefs)


def render_instance(ps: PreferenceSystem) -> str:
    lines = [HEADER, "A: " + " ".join(ps.side_a), "B: " + " ".join(ps.side_b)]
    for v in ps.vertices:
        lines.append(f"pref {v}: " + " ".join(ps.prefs[v]))
    return "\n".join(lines) + "\n"


def _pairs(text: str | bytes, width: int) -> Iterator[tuple[int, list[str]]]:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        parts = line.split()
        if len(parts) != width:
            raise ParseError(f"expected {width} fields, got {len(parts)}", lineno)
        yield lineno, parts


def parse_matching(ps: PreferenceSystem, text: str | bytes) -> Matching:
    edges = []
    for lineno, (u, v) in _pairs(text, 2):
        if not ps.has_edge(u, v):
            raise ParseError(f"{u}-{v} is not an edge", lineno)
        edges.append(ps.edge(u, v))
    try:
        return Matching(edges)
    except MatchingError as exc:
        raise ParseError(str(exc)) from None


def render_matching(ps: PreferenceSystem, m: Matching) -> str:
    return "".join(f"{a} {b}\n" for a, b in m.sorted_edges(ps))


def parse_weights(ps: PreferenceSystem, text: str | bytes) -> dict[Edge, Fraction]:
    raw: dict[tuple[str, str], Fraction] = {}
    for lineno, (u, v, value) in _pairs(text, 3):
        if not ps.has_edge(u, v):
            raise ParseError(f"{u}-{v} is not an edge", lineno)
        try:
            raw[(u, v)] = Fraction(value)
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"bad decimal {value!r}", lineno) from None
    return weight_map(ps, raw)


def parse_node_weights(ps: PreferenceSystem, text: str | bytes) -> dict[str, Fraction]:
    out = {v: Fraction(0) for v in ps.vertices}
    for lineno, (v, value) in _pairs(text, 2):
        if not ps.has_vertex(v):
            raise ParseError(f"unknown vertex {v!r}", lineno)
        try:
            out[v] = Fraction(value)
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"bad decimal {value!r}", lineno) from None
    return out


def format_number(x: Fraction) -> str:
    """Render an exact number as an integer or a terminating/fractional decimal."""
    if x.denominator == 1:
        return str(x.numerator)
    d = x.denominator
    while d % 2 == 0:
        d //= 2
    while d % 5 == 0:
        d //= 5
    if d == 1:
        s = f"{float(x):.12f}".rstrip("0")
        if Fraction(s) == x:
            return s
    return f"{x.numerator}/{x.denominator}"
