import itertools
import random

import pytest

from popmatch import is_popular, label_edges, oracle
from popmatch.constrained import solve_pmffe
from popmatch.reduction import (
    FORBIDDEN,
    CnfFormula,
    FormulaError,
    GadgetMap,
    assignment_to_matching,
    brute_force_sat,
    build_graph,
    decide_sat,
    is_bipartite_by_coloring,
    matching_to_assignment,
    normalize_monotone,
    pad_constraints,
    parse_dimacs,
    parse_node,
    render_dimacs,
    to_monotone,
)
from popmatch.selftest import (
    WORKED_ASSIGNMENT,
    WORKED_PSI,
    random_monotone_formula,
    gadget_structure_holds,
)

UNSAT = CnfFormula.of([[1], [-1]])
XOR = CnfFormula.of([[1, 2], [-1, -2]])


def test_to_monotone_examples():
    f = to_monotone(CnfFormula.of([[1, -2, -3]]))
    assert str(f) == "(x1 | xc1) & (~xc1 | ~x2 | ~x3)"
    f = to_monotone(CnfFormula.of([[1, 2, -3]]))
    assert str(f) == "(x1 | x2 | xc1) & (~xc1 | ~x3)"
    g = CnfFormula.of([[1, 2]])
    assert to_monotone(g) == g


def test_normalize_examples():
    f = normalize_monotone(CnfFormula.of([[1]]))
    assert str(f) == "(x1) & (p1 | q1) & (~p1 | ~q1) & (~x1 | ~p1 | ~q1)"
    assert f.is_normalized()
    assert brute_force_sat(f) is not None
    assert normalize_monotone(UNSAT) == UNSAT
    assert normalize_monotone(XOR) == XOR
    with pytest.raises(FormulaError):
        normalize_monotone(CnfFormula.of([[1, -2]]))


def test_normalize_preserves_satisfiability():
    rng = random.Random(1)
    for _ in range(200):
        f = random_monotone_formula(rng, 3, 3)
        g = normalize_monotone(f)
        assert g.is_normalized()
        assert (brute_force_sat(f) is None) == (brute_force_sat(g) is None)


def test_formula_validation():
    for bad in ([[]], [[1, 2, 3, 4]], [[1, -1]]):
        with pytest.raises(FormulaError):
            CnfFormula.of(bad)


def test_dimacs_round_trip():
    text = "c comment\np cnf 3 2\n1 -2 0\n2 3\n-1 0\n"
    f = parse_dimacs(text)
    assert str(f) == "(x1 | ~x2) & (x2 | x3 | ~x1)"
    assert parse_dimacs(render_dimacs(f)) == f


@pytest.mark.parametrize(
    "text",
    ["1 0\n", "p cnf 1 1\n2 0\n", "p cnf 1 2\n1 0\n", "p dnf 1 1\n1 0\n", "p cnf 1 1\nx 0\n", ""],
)
def test_dimacs_errors(text):
    with pytest.raises(FormulaError):
        parse_dimacs(text)


def test_single_clause_size():
    ps, gm = build_graph(CnfFormula.of([[1, 2]]))
    assert len(ps.vertices) == 19
    assert gm.apexes() == ["u", "g(1.1)"]


def test_strict_build_rejects_unnormalized():
    with pytest.raises(FormulaError):
        build_graph(CnfFormula.of([[1, 2]]), strict=True)
    with pytest.raises(FormulaError):
        build_graph(CnfFormula.of([[1, -2]]))


def test_worked_formula_shape():
    ps, gm = build_graph(WORKED_PSI)
    assert len(gm.occurrences) == 9
    assert is_bipartite_by_coloring(ps)
    # one consistency edge per (positive, negative) pair of occurrences:
    # x1 gives 1x1, x2 gives 2x1, x4 gives 1x1
    assert len(gm.consistency_edges) == 4
    assert len(gm.evicted_edges) == 3


def _expected_counts(f, gm):
    pos = sum(o.positive for o in gm.occurrences)
    neg = len(gm.occurrences) - pos
    verts = 7 + 6 * pos + 7 * neg
    edges = 5 + 7 * pos + 9 * neg + len(f.clauses) + len(gm.consistency_edges)
    return verts, edges


def test_vertex_and_edge_counts_follow_gadget_shapes():
    rng = random.Random(2)
    for _ in range(100):
        f = normalize_monotone(random_monotone_formula(rng))
        ps, gm = build_graph(f, strict=True)
        assert (len(ps.vertices), len(ps.edges)) == _expected_counts(f, gm)
        assert is_bipartite_by_coloring(ps)


def test_special_preferences():
    ps, _ = build_graph(WORKED_PSI)
    r = ps.rank
    assert r("s", "t") == 1 and r("t", "s") == 2
    assert r("u", "t") == 1 and r("t", "u") == 1
    assert r("v", "w") == len(ps.prefs["v"]) and r("w", "v") == 2
    assert r("w", "x") == 1 and r("x", "w") == 1
    assert r("x", "y") == 2 and r("y", "x") == 1
    for g in (f"g({i}.{j})" for i in (1, 2, 3) for j in (1, 2, 3)):
        assert ps.prefs[g][0].startswith("f(")


def test_worked_assignment():
    ps, gm = build_graph(WORKED_PSI)
    m = assignment_to_matching(gm, WORKED_ASSIGNMENT)
    assert all(ps.edge(*e) in m for e in (("t", "u"), ("v", "w"), ("x", "y")))
    assert not any(ps.edge(*e) in m for e in FORBIDDEN)
    assert is_popular(ps, m)
    assert label_edges(ps, m).plus_plus_edges == [("w", "x")]
    h_nodes = {o.node("h") for o in gm.occurrences if not o.positive}
    assert set(ps.vertices) - m.covered() == {"s"} | h_nodes
    back = matching_to_assignment(ps, gm, m)
    assert back["x1"] and not back["x2"] and not back["x3"]
    assert WORKED_PSI.evaluate(back)


def test_assignment_needs_every_variable():
    _, gm = build_graph(WORKED_PSI)
    with pytest.raises(FormulaError):
        assignment_to_matching(gm, {"x1": True})


def test_matching_to_assignment_guards():
    ps, gm = build_graph(XOR)
    with pytest.raises(FormulaError):
        matching_to_assignment(ps, gm, assignment_to_matching(gm, {"x1": True, "x2": True}))


def test_satisfying_assignments_give_popular_matchings():
    rng = random.Random(3)
    for _ in range(60):
        f = normalize_monotone(random_monotone_formula(rng, 3, 3))
        ps, gm = build_graph(f, strict=True)
        a = brute_force_sat(f)
        if a is None:
            continue
        m = assignment_to_matching(gm, a)
        assert is_popular(ps, m)
        assert f.evaluate(matching_to_assignment(ps, gm, m))


def test_unsat_has_no_feasible_matching():
    ps, gm = build_graph(UNSAT)
    rep = oracle.popular_set(ps)
    feasible = [m for m in rep.popular if not any(ps.edge(*e) in m for e in FORBIDDEN)]
    assert feasible == []


@pytest.mark.parametrize("f", [UNSAT, CnfFormula.of([[1, 2]])], ids=str)
def test_gadget_structure_by_oracle(f):
    ps, gm = build_graph(f)
    rep = oracle.popular_set(ps)
    tu, st, wx, xy = (ps.edge(*e) for e in (("t", "u"), ("s", "t"), ("w", "x"), ("x", "y")))
    with_tu = [m for m in rep.popular if tu in m]
    assert with_tu
    for m in with_tu:
        assert gadget_structure_holds(ps, gm, m)
    for m in rep.popular:
        a = st not in m and wx not in m
        b = tu in m and xy in m
        c = not m.covers("s") and m.covers("y")
        assert a == b == c


def test_decide_sat_examples():
    assert decide_sat(UNSAT, allow_exponential=True) is False
    assert decide_sat(XOR, allow_exponential=True) is True
    assert decide_sat(CnfFormula([], []))


def _normalized_formulas(max_vars=3, max_clauses=3):
    for nv in range(1, max_vars + 1):
        kinds = []
        for k in range(1, min(3, nv) + 1):
            for vs in itertools.combinations(range(1, nv + 1), k):
                kinds += [list(vs), [-v for v in vs]]
        for nc in range(1, max_clauses + 1):
            for clauses in itertools.combinations_with_replacement(kinds, nc):
                used = {abs(x) for c in clauses for x in c}
                f = CnfFormula.of(clauses, [f"x{i}" for i in range(1, nv + 1)])
                if len(used) == nv and f.is_normalized():
                    yield f


def test_decide_sat_on_every_small_normalized_formula():
    formulas = list(_normalized_formulas())
    assert len(formulas) > 30
    for f in formulas:
        assert decide_sat(f, allow_exponential=True) == (brute_force_sat(f) is not None), str(f)


@pytest.mark.slow
def test_decide_sat_on_general_formulas():
    # mixed clauses are split and normalized first, which grows the graph
    rng = random.Random(4)
    for _ in range(25):
        nv = rng.randint(1, 3)
        clauses = []
        for _ in range(rng.randint(1, 2)):
            vs = rng.sample(range(1, nv + 1), rng.randint(1, nv))
            clauses.append([v if rng.random() < 0.5 else -v for v in vs])
        f = CnfFormula.of(clauses, [f"x{i}" for i in range(1, nv + 1)])
        assert decide_sat(f, allow_exponential=True) == (brute_force_sat(f) is not None), str(f)


def test_padding():
    ps, gm = build_graph(CnfFormula.of([[1, 2]]))
    pad = pad_constraints(ps, gm, 1, 0)
    ((z, k),) = pad.forced_edges
    rep = oracle.popular_set(pad.ps)
    assert all((z, k) in m for m in rep.popular)
    ps0, gm0 = build_graph(UNSAT)
    assert pad_constraints(ps0, gm0, 0, 1).forbidden_edges == (("e(2.1)", "h(2.1)"),)
    same = pad_constraints(ps0, gm0)
    assert same.ps == ps0 and same.forced_edges == () and same.forbidden_edges == ()
    with pytest.raises(FormulaError):
        pad_constraints(ps0, gm0, 0, 2)


def test_padding_keeps_the_answer():
    for f, expected in ((UNSAT, False), (XOR, True)):
        g = normalize_monotone(f)
        ps, gm = build_graph(g)
        pad = pad_constraints(ps, gm, 1, 1)
        res = solve_pmffe(pad.ps, pad.constraints(), allow_exponential=True, edge_limit=None)
        assert res.found == expected


def test_gadget_map_json():
    _, gm = build_graph(WORKED_PSI)
    again = GadgetMap.from_json(gm.to_json())
    assert again.occurrences == gm.occurrences
    assert [o.nodes for o in again.occurrences] == [o.nodes for o in gm.occurrences]
    assert again.consistency_edges == gm.consistency_edges
    assert again.evicted_edges == gm.evicted_edges


def test_parse_node():
    assert parse_node("c(2.3)") == ("c", 2, 3)
    assert parse_node("t") is None
