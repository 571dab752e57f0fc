"""Monotone 3-SAT to popular matching: formulas, gadgets and the graph G(psi).

Each literal occurrence gets a gadget.  The gadgets of a clause are chained
apex to gateway, starting at ``u`` and ending at ``v``; positive and
negative occurrences of a variable are tied by consistency edges between
their ``c`` vertices.  Special vertices ``s t u v w x y`` close the chain.
With ``F = {st, wx}``, a popular matching avoiding ``F`` exists iff the
formula is satisfiable.

Gadget vertices are named ``"b(2.3)"`` for vertex ``b`` of the third
literal of the second clause (both 1-based).  The apex of the first literal
of a clause is ``u``; later apexes are the previous gateways.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping

from .core import ConstraintSet, Edge, Matching, PopmatchError, PreferenceSystem

Literal = tuple[str, bool]  # (variable, positive)

SPECIAL_A = ("s", "u", "w", "y")
SPECIAL_B = ("t", "v", "x")
FORBIDDEN = (("s", "t"), ("w", "x"))

# Gadget members by side, apex excluded.
POS_A, POS_B = ("c", "d", "g"), ("b", "e", "f")
NEG_A, NEG_B = ("d", "e", "g"), ("b", "c", "f", "h")


class FormulaError(PopmatchError, ValueError):
    pass


# ---------------------------------------------------------------- formulas


@dataclass(frozen=True)
class CnfFormula:
    variables: tuple[str, ...]
    clauses: tuple[tuple[Literal, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        known = set(self.variables)
        if len(known) != len(self.variables):
            raise FormulaError("duplicate variable")
        for c in self.clauses:
            if not c:
                raise FormulaError("empty clause")
            if len(c) > 3:
                raise FormulaError("clause with more than 3 literals")
            names = [v for v, _ in c]
            if len(set(names)) != len(names):
                raise FormulaError(f"variable repeated within clause {c}")
            for v in names:
                if v not in known:
                    raise FormulaError(f"unknown variable {v!r}")

    @classmethod
    def of(cls, clauses: Iterable[Iterable[int]], names: Iterable[str] | None = None) -> "CnfFormula":
        """From signed integers, DIMACS style: ``[[1, -2], [2]]``."""
        clauses = [list(c) for c in clauses]
        n = max((abs(x) for c in clauses for x in c), default=0)
        names = list(names) if names is not None else [f"x{i}" for i in range(1, n + 1)]
        return cls(names, [[(names[abs(x) - 1], x > 0) for x in c] for c in clauses])

    def is_monotone(self) -> bool:
        return all(len({p for _, p in c}) == 1 for c in self.clauses)

    def is_normalized(self) -> bool:
        """Monotone, with clauses of both kinds and every variable in both polarities."""
        if not self.is_monotone():
            return False
        kinds = {c[0][1] for c in self.clauses}
        if kinds != {True, False}:
            return False
        pol = _polarities(self)
        return all(pol.get(v, set()) in (set(), {True, False}) for v in self.variables)

    def evaluate(self, assignment: Mapping[str, bool]) -> bool:
        return all(any(assignment[v] == p for v, p in c) for c in self.clauses)

    def __str__(self) -> str:
        def lit(v, p):
            return v if p else "~" + v

        return " & ".join("(" + " | ".join(lit(v, p) for v, p in c) + ")" for c in self.clauses) or "true"


def _polarities(f: CnfFormula) -> dict[str, set[bool]]:
    pol: dict[str, set[bool]] = {}
    for c in f.clauses:
        for v, p in c:
            pol.setdefault(v, set()).add(p)
    return pol


def brute_force_sat(f: CnfFormula) -> dict[str, bool] | None:
    for bits in product((True, False), repeat=len(f.variables)):
        a = dict(zip(f.variables, bits))
        if f.evaluate(a):
            return a
    return None


def parse_dimacs(text: str | bytes) -> CnfFormula:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    nvars = nclauses = None
    ints: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise FormulaError(f"line {lineno}: bad problem line")
            try:
                nvars, nclauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise FormulaError(f"line {lineno}: bad problem line") from None
            continue
        if nvars is None:
            raise FormulaError(f"line {lineno}: clause before problem line")
        try:
            ints.extend(int(tok) for tok in line.split())
        except ValueError:
            raise FormulaError(f"line {lineno}: non-integer token") from None
    if nvars is None:
        raise FormulaError("missing problem line")
    clauses, cur = [], []
    for x in ints:
        if x == 0:
            clauses.append(cur)
            cur = []
        elif abs(x) > nvars:
            raise FormulaError(f"literal {x} exceeds declared variable count")
        else:
            cur.append(x)
    if cur:
        clauses.append(cur)
    if len(clauses) != nclauses:
        raise FormulaError(f"expected {nclauses} clauses, found {len(clauses)}")
    return CnfFormula.of(clauses, [f"x{i}" for i in range(1, nvars + 1)])


def render_dimacs(f: CnfFormula) -> str:
    idx = {v: i + 1 for i, v in enumerate(f.variables)}
    lines = [f"p cnf {len(f.variables)} {len(f.clauses)}"]
    for c in f.clauses:
        lines.append(" ".join(str(idx[v] if p else -idx[v]) for v, p in c) + " 0")
    return "\n".join(lines) + "\n"


def _fresh_var(base: str, taken: set[str]) -> str:
    i = 1
    while f"{base}{i}" in taken:
        i += 1
    taken.add(f"{base}{i}")
    return f"{base}{i}"


def to_monotone(f: CnfFormula) -> CnfFormula:
    """Split every mixed clause with a fresh variable.

    ``(x1 | ~x2 | ~x3)`` becomes ``(x1 | z) & (~z | ~x2 | ~x3)``.
    """
    taken = set(f.variables)
    variables = list(f.variables)
    clauses: list[tuple[Literal, ...]] = []
    for c in f.clauses:
        pos = [lit for lit in c if lit[1]]
        neg = [lit for lit in c if not lit[1]]
        if pos and neg:
            z = _fresh_var("xc", taken)
            variables.append(z)
            clauses.append(tuple(pos) + ((z, True),))
            clauses.append(((z, False),) + tuple(neg))
        else:
            clauses.append(c)
    return CnfFormula(variables, clauses)


def normalize_monotone(f: CnfFormula) -> CnfFormula:
    """Make both clause kinds and both polarities of every variable occur.

    Adds fresh ``p, q`` with ``(p | q)`` and ``(~p | ~q)``, which force
    exactly one of them true, then ``(~x | ~p | ~q)`` for a variable seen
    only positively and ``(x | p | q)`` for one seen only negatively.  Those
    clauses always hold, so satisfiability is unchanged.
    """
    if not f.is_monotone():
        raise FormulaError("formula is not monotone")
    if f.is_normalized():
        return f
    taken = set(f.variables)
    p, q = _fresh_var("p", taken), _fresh_var("q", taken)
    clauses = list(f.clauses) + [((p, True), (q, True)), ((p, False), (q, False))]
    pol = _polarities(f)
    for v in f.variables:
        if pol.get(v) == {True}:
            clauses.append(((v, False), (p, False), (q, False)))
        elif pol.get(v) == {False}:
            clauses.append(((v, True), (p, True), (q, True)))
    return CnfFormula(list(f.variables) + [p, q], clauses)


# ---------------------------------------------------------------- gadgets


@dataclass(frozen=True)
class Occurrence:
    clause: int
    position: int
    variable: str
    positive: bool
    nodes: dict[str, str] = field(repr=False, compare=False)

    def node(self, role: str) -> str:
        return self.nodes[role]

    @property
    def true_edges(self) -> tuple[Edge, ...]:
        n = self.nodes
        if self.positive:
            return ((n["c"], n["b"]), (n["d"], n["e"]))
        return ((n["e"], n["c"]), (n["d"], n["b"]))

    @property
    def false_edges(self) -> tuple[Edge, ...]:
        n = self.nodes
        if self.positive:
            return ((n["d"], n["b"]), (n["c"], n["e"]))
        return ((n["d"], n["c"]), (n["e"], n["b"]))

    @property
    def evicted_edge(self) -> Edge | None:
        return None if self.positive else (self.nodes["e"], self.nodes["h"])


@dataclass(frozen=True)
class GadgetMap:
    formula: CnfFormula
    occurrences: tuple[Occurrence, ...]
    consistency_edges: tuple[Edge, ...]
    forbidden: tuple[Edge, ...] = FORBIDDEN

    @property
    def evicted_edges(self) -> tuple[Edge, ...]:
        return tuple(o.evicted_edge for o in self.occurrences if not o.positive)

    def apexes(self) -> list[str]:
        return [o.node("a") for o in self.occurrences]

    def gateways(self) -> list[str]:
        return [o.node("g") for o in self.occurrences]

    def to_json(self) -> str:
        return json.dumps(
            {
                "formula": {
                    "variables": list(self.formula.variables),
                    "clauses": [[[v, p] for v, p in c] for c in self.formula.clauses],
                },
                "special": {"A": list(SPECIAL_A), "B": list(SPECIAL_B)},
                "occurrences": [
                    {
                        "clause": o.clause,
                        "position": o.position,
                        "variable": o.variable,
                        "positive": o.positive,
                        "nodes": o.nodes,
                    }
                    for o in self.occurrences
                ],
                "consistency_edges": [list(e) for e in self.consistency_edges],
                "evicted_edges": [list(e) for e in self.evicted_edges],
                "forbidden": [list(e) for e in self.forbidden],
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "GadgetMap":
        d = json.loads(text)
        f = CnfFormula(d["formula"]["variables"], [[(v, p) for v, p in c] for c in d["formula"]["clauses"]])
        occ = tuple(
            Occurrence(o["clause"], o["position"], o["variable"], o["positive"], dict(o["nodes"]))
            for o in d["occurrences"]
        )
        return cls(
            f,
            occ,
            tuple(tuple(e) for e in d["consistency_edges"]),
            tuple(tuple(e) for e in d["forbidden"]),
        )


def _name(role: str, i: int, j: int) -> str:
    return f"{role}({i}.{j})"


_NAME_RE = re.compile(r"^([a-h])\((\d+)\.(\d+)\)$")


def build_graph(f: CnfFormula, strict: bool = False) -> tuple[PreferenceSystem, GadgetMap]:
    """The instance G(psi) with its preference lists.

    The formula must be monotone.  With ``strict`` it must also be
    normalized; otherwise a variable with one polarity simply gets no
    consistency edges.
    """
    if not f.is_monotone():
        raise FormulaError("formula is not monotone")
    if strict and not f.is_normalized():
        raise FormulaError("formula is not normalized")

    occs: list[Occurrence] = []
    side_a: list[str] = list(SPECIAL_A)
    side_b: list[str] = list(SPECIAL_B)
    for i, clause in enumerate(f.clauses, 1):
        prev_g = "u"
        for j, (var, positive) in enumerate(clause, 1):
            nodes = {"a": prev_g}
            roles_a, roles_b = (POS_A, POS_B) if positive else (NEG_A, NEG_B)
            for r in roles_a:
                nodes[r] = _name(r, i, j)
                side_a.append(nodes[r])
            for r in roles_b:
                nodes[r] = _name(r, i, j)
                side_b.append(nodes[r])
            occs.append(Occurrence(i, j, var, positive, nodes))
            prev_g = nodes["g"]

    by_var_pos: dict[str, list[Occurrence]] = {}
    by_var_neg: dict[str, list[Occurrence]] = {}
    for o in occs:
        (by_var_pos if o.positive else by_var_neg).setdefault(o.variable, []).append(o)
    consistency = [
        (p.node("c"), n.node("c"))
        for var in f.variables
        for p in by_var_pos.get(var, [])
        for n in by_var_neg.get(var, [])
    ]
    cons_of: dict[str, list[str]] = {}
    for x, y in consistency:
        cons_of.setdefault(x, []).append(y)
        cons_of.setdefault(y, []).append(x)

    prefs: dict[str, list[str]] = {
        "s": ["t"],
        "t": ["u", "s"],
        "u": ["t"],
        "v": [],
        "w": ["x", "v"],
        "x": ["w", "y"],
        "y": ["x"],
    }

    def entry(o: Occurrence) -> list[str]:
        # how an apex lists the gadget hanging below it
        n = o.nodes
        return [n["b"]] if o.positive else [n["c"], n["b"]]

    last_of_clause = {}
    for o in occs:
        last_of_clause[o.clause] = o
    for o in occs:
        n = o.nodes
        cons = cons_of.get(n["c"], [])
        if o.position == 1:
            prefs["u"].extend(entry(o))
        else:
            prefs[n["a"]].extend(entry(o))
        if o.positive:
            prefs[n["b"]] = [n["c"], n["a"], n["d"]]
            prefs[n["c"]] = [n["e"], *cons, n["b"]]
            prefs[n["d"]] = [n["b"], n["e"], n["f"]]
            prefs[n["e"]] = [n["d"], n["c"]]
        else:
            prefs[n["b"]] = [n["a"], n["e"], n["d"]]
            prefs[n["c"]] = [*_NEG_C_HEAD(n), *cons, n["e"]]
            prefs[n["d"]] = [n["b"], n["c"]]
            prefs[n["e"]] = [n["c"], n["f"], n["b"], n["h"]]
            prefs[n["h"]] = [n["e"]]
        prefs[n["f"]] = [n["d"], n["g"]] if o.positive else [n["g"], n["e"]]
        prefs[n["g"]] = [n["f"]]
        if last_of_clause[o.clause] is o:
            prefs[n["g"]].append("v")
            prefs["v"].append(n["g"])
    prefs["v"].append("w")
    ps = PreferenceSystem(side_a, side_b, {k: tuple(v) for k, v in prefs.items()})
    return ps, GadgetMap(f, tuple(occs), tuple(consistency))


def _NEG_C_HEAD(n: Mapping[str, str]) -> tuple[str, str]:
    # the two in-gadget entries at the top of a negative c-list
    return (n["a"], n["d"])


def is_bipartite_by_coloring(ps: PreferenceSystem) -> bool:
    """Two-color the graph by search, ignoring the declared sides."""
    color: dict[str, int] = {}
    for root in ps.vertices:
        if root in color:
            continue
        color[root] = 0
        stack = [root]
        while stack:
            x = stack.pop()
            for y in ps.prefs[x]:
                if y not in color:
                    color[y] = 1 - color[x]
                    stack.append(y)
                elif color[y] == color[x]:
                    return False
    return True


# ---------------------------------------------------------------- assignments


def assignment_to_matching(gm: GadgetMap, assignment: Mapping[str, bool]) -> Matching:
    missing = [v for v in gm.formula.variables if v not in assignment]
    if missing:
        raise FormulaError(f"assignment misses {missing}")
    edges: list[Edge] = [("u", "t"), ("w", "v"), ("y", "x")]
    for o in gm.occurrences:
        edges.append((o.node("g"), o.node("f")))
        literal_true = assignment[o.variable] == o.positive
        edges.extend(o.true_edges if literal_true else o.false_edges)
    return Matching(edges)


def matching_to_assignment(
    ps: PreferenceSystem, gm: GadgetMap, m: Matching, check: bool = True
) -> dict[str, bool]:
    """Read an assignment off a popular matching avoiding ``st`` and ``wx``.

    A variable is true when some positive occurrence has its true pair set
    in ``m`` and false when some negative one does.  Otherwise every gadget
    of the variable holds its false pair; a variable seen only positively
    then reads false, one seen only negatively reads true, and a variable
    with both kinds defaults to true.
    """
    from .popularity import is_popular

    if any(ps.edge(*e) in m for e in gm.forbidden):
        raise FormulaError("matching uses a forbidden edge")
    if check and not is_popular(ps, m):
        raise FormulaError("matching is not popular")
    out: dict[str, bool] = {}
    kinds: dict[str, set[bool]] = {}
    for o in gm.occurrences:
        kinds.setdefault(o.variable, set()).add(o.positive)
        if all(ps.edge(*e) in m for e in o.true_edges):
            value = o.positive
            if out.get(o.variable, value) != value:
                raise FormulaError(f"variable {o.variable} read as both true and false")
            out[o.variable] = value
    for v in gm.formula.variables:
        if v not in out:
            k = kinds.get(v, set())
            out[v] = not (k == {True})
    return {v: out[v] for v in gm.formula.variables}


# ---------------------------------------------------------------- padding


@dataclass(frozen=True)
class Padding:
    ps: PreferenceSystem
    forced_edges: tuple[Edge, ...]
    forbidden_edges: tuple[Edge, ...]

    def constraints(self, base: Iterable[Edge] = FORBIDDEN) -> ConstraintSet:
        return ConstraintSet.build(
            self.ps,
            forced_edges=self.forced_edges,
            forbidden_edges=tuple(base) + self.forbidden_edges,
        )


def pad_constraints(ps: PreferenceSystem, gm: GadgetMap, k_in: int = 0, k_out: int = 0) -> Padding:
    """Grow the constraint sets without changing the answer.

    Each of the ``k_in`` pendant pairs ``z, k`` hangs off a gateway, with
    ``z`` and ``k`` each other's first choice, so ``zk`` is in every popular
    matching.  The ``k_out`` forbidden edges are evicted edges, which no
    popular matching containing ``tu`` uses.  Only edges are added: a node
    constraint touching an edge constraint would be rejected.
    """
    if k_in < 0 or k_out < 0:
        raise ValueError("padding counts must be nonnegative")
    negatives = [o for o in gm.occurrences if not o.positive]
    if k_out > len(negatives):
        raise FormulaError(f"only {len(negatives)} negative gadgets, {k_out} requested")
    prefs = {v: list(lst) for v, lst in ps.prefs.items()}
    side_a, side_b = list(ps.side_a), list(ps.side_b)
    gates = gm.gateways()
    taken = set(ps.vertices)
    forced = []
    for i in range(k_in):
        z, k = _fresh_var("z", taken), _fresh_var("k", taken)
        g = gates[i % len(gates)]
        side_a.append(z)
        side_b.append(k)
        prefs[z] = [k]
        prefs[k] = [z, g]
        prefs[g].append(k)
        forced.append((z, k))
    out = PreferenceSystem(side_a, side_b, prefs)
    evicted = tuple(o.evicted_edge for o in negatives[:k_out])
    return Padding(out, tuple(forced), evicted)


# ---------------------------------------------------------------- decision


def decide_sat(
    f: CnfFormula, allow_exponential: bool = False, edge_limit: int | None = None
) -> bool:
    """Satisfiability of ``f`` through a constrained popular matching search.

    The formula is made monotone and normalized, ``G(psi)`` is built, and a
    popular matching avoiding ``st`` and ``wx`` is searched for.  The search
    is exponential, hence ``allow_exponential``; no edge limit by default
    because even two-clause formulas exceed the usual one.
    """
    from .constrained import solve_pmffe

    if not f.clauses:
        return True
    g = normalize_monotone(to_monotone(f))
    ps, gm = build_graph(g)
    cs = ConstraintSet.build(ps, forbidden_edges=gm.forbidden)
    return solve_pmffe(ps, cs, allow_exponential, edge_limit).found


def parse_node(name: str) -> tuple[str, int, int] | None:
    """``"c(2.3)"`` -> ``("c", 2, 3)``; None for special vertices."""
    m = _NAME_RE.match(name)
    return (m.group(1), int(m.group(2)), int(m.group(3))) if m else None
