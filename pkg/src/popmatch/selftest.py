"""Acceptance checks, runnable from the CLI and from the test suite.

Each check returns a :class:`CheckResult`; counts can be scaled down for a
quick run.  Ground truth always comes from the exhaustive oracle or a
brute-force SAT check.
"""

from __future__ import annotations

import inspect
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from . import oracle
from .constrained import EdgeOracle
from .core import Matching, PreferenceSystem, matching_weight
from .dominant import DominantStructure, two_level_gale_shapley
from .generate import random_instance, random_weights
from .popularity import is_popular, label_edges
from .reduction import (
    CnfFormula,
    assignment_to_matching,
    brute_force_sat,
    build_graph,
    decide_sat,
    is_bipartite_by_coloring,
    normalize_monotone,
)
from .stable import all_stable_matchings, enumerate_rotations, max_weight_stable
from .weighted import mwp_half_approx


@dataclass
class CheckResult:
    number: int
    title: str
    ok: bool
    detail: str
    seconds: float

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"[{status}] criterion {self.number}: {self.title} ({self.detail}; {self.seconds:.1f}s)"


I_2X2 = PreferenceSystem(
    ("a1", "a2"),
    ("b1", "b2"),
    {"a1": ("b1",), "a2": ("b1", "b2"), "b1": ("a2", "a1"), "b2": ("a2",)},
)

WORKED_PSI = CnfFormula.of([[1, 2, 3], [-1, -2, -4], [2, 4, 5]])
WORKED_ASSIGNMENT = {"x1": True, "x2": False, "x3": False, "x4": True, "x5": True}


def small_instances(seed: int, count: int) -> list[PreferenceSystem]:
    rng = random.Random(seed)
    return [random_instance(rng, 4, 4, 12, min_side=2) for _ in range(count)]


def check_popularity(seed: int, count: int = 1000) -> tuple[bool, str]:
    mismatches = checked = 0
    for ps in small_instances(seed, count):
        rep = oracle.popular_set(ps)
        pop = set(rep.popular)
        for m in oracle.enumerate_matchings(ps):
            checked += 1
            if bool(is_popular(ps, m)) != (m in pop):
                mismatches += 1
    return mismatches == 0, f"{count} instances, {checked} matchings, {mismatches} mismatches"


def check_node_chain(seed: int, count: int = 500) -> tuple[bool, str]:
    bad = sum(not oracle.check_node_chain(ps) for ps in small_instances(seed + 1, count))
    return bad == 0, f"{count} instances, {bad} violations"


def check_sizes(seed: int, count: int = 500) -> tuple[bool, str]:
    bad = 0
    for ps in small_instances(seed + 2, count):
        rep = oracle.popular_set(ps)
        if any(len(s) != rep.min_popular_size for s in rep.stable):
            bad += 1
        elif len(two_level_gale_shapley(ps)) != rep.max_popular_size:
            bad += 1
    rep = oracle.popular_set(I_2X2)
    ratio_ok = rep.max_popular_size == 2 * rep.min_popular_size
    return bad == 0 and ratio_ok, (
        f"{count} instances, {bad} violations; 2x2 sizes {rep.min_popular_size}/{rep.max_popular_size}"
    )


def check_decompositions(seed: int, count: int = 500) -> tuple[bool, str]:
    bad = edges = 0
    for ps in small_instances(seed + 3, count):
        rep = oracle.popular_set(ps)
        eo = EdgeOracle(ps)
        for e in ps.edges:
            edges += 1
            c = eo.classify(e)
            in_p = any(e in m for m in rep.popular)
            out_p = any(e not in m for m in rep.popular)
            if c.in_some_popular != in_p or c.avoided_by_some_popular != out_p:
                bad += 1
    return bad == 0, f"{count} instances, {edges} edges, {bad} violations"


def check_approximation(seed: int, instances: int = 100, vectors: int = 200) -> tuple[bool, str]:
    rng = random.Random(seed + 4)
    bad = 0
    worst = Fraction(1)
    beyond = 0
    for ps in small_instances(seed + 4, instances):
        rep = oracle.popular_set(ps)
        popular = rep.popular
        # only popular matchings that are neither stable nor dominant can
        # make the approximation fall short of the optimum
        beyond += bool(set(popular) - set(rep.stable) - set(rep.dominant))
        poset, ds = enumerate_rotations(ps), DominantStructure.of(ps)
        for _ in range(vectors):
            w = random_weights(rng, ps)
            res = mwp_half_approx(ps, w, poset, ds)
            opt = max(matching_weight(w, m) for m in popular)
            if 2 * res.value < opt or res.matching not in popular:
                bad += 1
            if opt:
                worst = min(worst, res.value / opt)
    unit = {e: Fraction(1) for e in I_2X2.edges}
    res = mwp_half_approx(I_2X2, unit)
    opt = max(matching_weight(unit, m) for m in oracle.popular_set(I_2X2).popular)
    unit_ok = res.value == opt
    return bad == 0 and unit_ok, (
        f"{instances}x{vectors} runs, {bad} violations, worst ratio {float(worst):.3f}, "
        f"{beyond} instances with popular matchings beyond stable and dominant; "
        f"2x2 unit weights {res.value} vs OPT {opt}"
    )


def check_reduction_completeness() -> tuple[bool, str]:
    ps, gm = build_graph(WORKED_PSI)
    m = assignment_to_matching(gm, WORKED_ASSIGNMENT)
    lg = label_edges(ps, m)
    has = all(ps.edge(*e) in m for e in (("t", "u"), ("v", "w"), ("x", "y")))
    avoids = not any(ps.edge(*e) in m for e in gm.forbidden)
    pp = lg.plus_plus_edges
    popular = bool(is_popular(ps, m))
    ok = has and avoids and popular and pp == [("w", "x")]
    return ok, f"tu,vw,xy in M: {has}; avoids st,wx: {avoids}; popular: {popular}; (+,+) edges {pp}"


def check_decide_sat() -> tuple[bool, str]:
    parts = []
    ok = True
    for clauses in ([[1], [-1]], [[1, 2], [-1, -2]]):
        f = CnfFormula.of(clauses)
        got = decide_sat(f, allow_exponential=True)
        want = brute_force_sat(f) is not None
        ok &= got == want
        parts.append(f"{f}: {got} (brute force {want})")
    return ok, "; ".join(parts)


def check_structure() -> tuple[bool, str]:
    ps, gm = build_graph(CnfFormula.of([[1], [-1]]))
    rep = oracle.popular_set(ps)
    st, wx, tu, xy = (ps.edge(*e) for e in (("s", "t"), ("w", "x"), ("t", "u"), ("x", "y")))
    with_tu = [m for m in rep.popular if tu in m]
    bad = 0
    for m in with_tu:
        bad += not gadget_structure_holds(ps, gm, m)
    for m in rep.popular:
        st_wx_out = st not in m and wx not in m
        tu_xy_in = tu in m and xy in m
        s_y = not m.covers("s") and m.covers("y")
        bad += not (st_wx_out == tu_xy_in == s_y)
    return bad == 0 and bool(with_tu), (
        f"{len(rep.popular)} popular matchings, {len(with_tu)} with tu, {bad} violations"
    )


def gadget_structure_holds(ps: PreferenceSystem, gm, m: Matching) -> bool:
    """Gadget structure forced on a popular matching that contains ``tu``."""
    for o in gm.occurrences:
        for v in (o.node("g"), o.node("a")):
            if m.partner(v) != ps.prefs[v][0]:
                return False
        t_in = all(ps.edge(*e) in m for e in o.true_edges)
        f_in = all(ps.edge(*e) in m for e in o.false_edges)
        if t_in == f_in:
            return False
    extra = set(gm.consistency_edges) | set(gm.evicted_edges)
    if any(ps.edge(*e) in m for e in extra):
        return False
    for x, y in gm.consistency_edges:
        tx = next(o for o in gm.occurrences if o.node("c") == x)
        ty = next(o for o in gm.occurrences if o.node("c") == y)
        if all(ps.edge(*e) in m for e in tx.true_edges + ty.true_edges):
            return False
    return True


def check_stable_machinery(seed: int, count: int = 500, vectors: int = 200) -> tuple[bool, str]:
    bad = 0
    for ps in small_instances(seed + 5, count):
        if set(all_stable_matchings(ps)) != set(oracle.popular_set(ps).stable):
            bad += 1
    rng = random.Random(seed + 6)
    wbad = 0
    pool = small_instances(seed + 7, vectors)
    for ps in pool:
        stable = oracle.popular_set(ps).stable
        w = random_weights(rng, ps)
        _, v = max_weight_stable(ps, w)
        if v != max(matching_weight(w, s) for s in stable):
            wbad += 1
    return bad == 0 and wbad == 0, (
        f"{count} stable sets, {bad} mismatches; {vectors} weight vectors, {wbad} mismatches"
    )


def random_monotone_formula(rng: random.Random, max_vars: int = 5, max_clauses: int = 5) -> CnfFormula:
    nv = rng.randint(1, max_vars)
    clauses = []
    for _ in range(rng.randint(1, max_clauses)):
        k = rng.randint(1, min(3, nv))
        sign = 1 if rng.random() < 0.5 else -1
        clauses.append([sign * v for v in rng.sample(range(1, nv + 1), k)])
    return CnfFormula.of(clauses, [f"x{i}" for i in range(1, nv + 1)])


def check_bipartite(seed: int, count: int = 100) -> tuple[bool, str]:
    rng = random.Random(seed + 8)
    bad = 0
    for _ in range(count):
        f = normalize_monotone(random_monotone_formula(rng))
        ps, _ = build_graph(f, strict=True)
        bad += not is_bipartite_by_coloring(ps)
    return bad == 0, f"{count} formulas, {bad} non-bipartite"


CRITERIA: list[tuple[int, str, Callable[..., tuple[bool, str]], bool]] = [
    (1, "popularity verdicts match the vote-count oracle", check_popularity, True),
    (2, "node containment chain", check_node_chain, True),
    (3, "size dichotomy", check_sizes, True),
    (4, "popular edge decompositions", check_decompositions, True),
    (5, "half approximation", check_approximation, True),
    (6, "reduction completeness on the worked formula", check_reduction_completeness, False),
    (7, "SAT decision through constrained popular matchings", check_decide_sat, False),
    (8, "gadget structure of popular matchings", check_structure, False),
    (9, "rotation machinery", check_stable_machinery, True),
    (10, "bipartite reduction graphs", check_bipartite, True),
]

TIME_LIMITS = {1: 60.0, 6: 10.0, 7: 600.0}


def run_all(seed: int = 0, scale: float = 1.0, only: set[int] | None = None) -> list[CheckResult]:
    """Run every criterion; ``scale`` shrinks the random sample sizes."""
    out = []
    for number, title, fn, seeded in CRITERIA:
        if only and number not in only:
            continue
        kwargs = {}
        if seeded and scale != 1.0:
            for name, p in inspect.signature(fn).parameters.items():
                if name != "seed" and isinstance(p.default, int):
                    kwargs[name] = max(1, int(p.default * scale))
        t0 = time.perf_counter()
        ok, detail = fn(seed, **kwargs) if seeded else fn()
        dt = time.perf_counter() - t0
        limit = TIME_LIMITS.get(number)
        if limit is not None and scale == 1.0 and dt > limit:
            ok = False
            detail += f"; over the {limit:.0f}s budget"
        out.append(CheckResult(number, title, ok, detail, dt))
    return out
