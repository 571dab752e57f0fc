"""Command-line front end.

Commands that produce a matching print it in the matching file format,
with metadata on ``#`` comment lines, so their output can be fed back in
with ``-m``.  Exit codes: 0 found or affirmative, 1 negative or
infeasible, 2 input error, 3 refused (hard case or size cap).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from .constrained import DEFAULT_EDGE_LIMIT, HardCaseError, solve_pmffe
from .core import (
    ConstraintSet,
    Matching,
    PopmatchError,
    PreferenceSystem,
    format_number,
    parse_instance,
    parse_matching,
    parse_node_weights,
    parse_weights,
    render_instance,
    render_matching,
)
from .dominant import build_levelled_instance, max_weight_dominant, two_level_gale_shapley
from .oracle import DEFAULT_CAP, CapExceededError, popular_set
from .popularity import NotPopularError, is_dominant, is_popular
from .reduction import build_graph, normalize_monotone, parse_dimacs, to_monotone
from .stable import StableCapExceededError, all_stable_matchings, gale_shapley, max_weight_stable
from .weighted import miwp_exact, mwp_exact, mwp_half_approx, node_weighted_opt

OK, NEGATIVE, INPUT_ERROR, REFUSED = 0, 1, 2, 3


class UsageError(PopmatchError):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from None


def _edge_arg(text: str) -> tuple[str, str]:
    u, sep, v = text.partition(":")
    if not sep or not u or not v or ":" in v:
        raise argparse.ArgumentTypeError(f"expected u:v, got {text!r}")
    return u, v


def _emit(ps: PreferenceSystem, m: Matching, out: str | None, notes: Sequence[str] = ()) -> None:
    body = render_matching(ps, m)
    if out:
        _write(out, body)
    for n in notes:
        print(f"# {n}")
    sys.stdout.write(body)


# ---------------------------------------------------------------- commands


def cmd_verify(args, ps: PreferenceSystem) -> int:
    m = parse_matching(ps, _read(args.matching))
    cert = is_popular(ps, m)
    if not cert:
        print("NOT POPULAR")
        print(f"WITNESS {cert.condition} " + " ".join(cert.witness or ()))
        if args.dominant:
            print("NOT DOMINANT")
        return NEGATIVE
    print("POPULAR")
    if not args.dominant:
        return OK
    dc = is_dominant(ps, m)
    if dc:
        print("DOMINANT")
        return OK
    print("NOT DOMINANT")
    print("AUGMENTING " + " ".join(dc.witness or ()))
    return NEGATIVE


def cmd_stable(args, ps: PreferenceSystem) -> int:
    if args.list:
        for k, m in enumerate(all_stable_matchings(ps, args.cap), 1):
            if k > 1:
                print()
            print(f"# stable matching {k}")
            sys.stdout.write(render_matching(ps, m))
        return OK
    if args.weights:
        m, value = max_weight_stable(ps, parse_weights(ps, _read(args.weights)))
        _emit(ps, m, args.output, [f"weight {format_number(value)}"])
        return OK
    _emit(ps, gale_shapley(ps, args.side), args.output)
    return OK


def cmd_dominant(args, ps: PreferenceSystem) -> int:
    if args.emit_gprime:
        _write(args.emit_gprime, render_instance(build_levelled_instance(ps).gprime))
    if args.weights:
        m, value = max_weight_dominant(ps, parse_weights(ps, _read(args.weights)))
        _emit(ps, m, args.output, [f"weight {format_number(value)}"])
        return OK
    _emit(ps, two_level_gale_shapley(ps), args.output)
    return OK


def cmd_pmffe(args, ps: PreferenceSystem) -> int:
    cs = ConstraintSet.build(
        ps,
        forced_nodes=args.force_node,
        forbidden_nodes=args.forbid_node,
        forced_edges=[_checked_edge(ps, e) for e in args.force_edge],
        forbidden_edges=[_checked_edge(ps, e) for e in args.forbid_edge],
    )
    res = solve_pmffe(ps, cs, args.allow_exponential, args.edge_limit)
    if res.matching is None:
        print(f"# Infeasible case {res.case}" + (" exhaustive" if res.fallback else ""))
        return NEGATIVE
    notes = [f"{res.status} case {res.case}"]
    _emit(ps, res.matching, args.output, notes)
    return OK


def _checked_edge(ps: PreferenceSystem, e: tuple[str, str]) -> tuple[str, str]:
    if not ps.has_edge(*e):
        raise UsageError(f"{e[0]}:{e[1]} is not an edge")
    return e


def _weighted(args, ps: PreferenceSystem, maximize: bool) -> int:
    if args.node_weights:
        wv = parse_node_weights(ps, _read(args.node_weights))
        m, value = node_weighted_opt(ps, wv, "max" if maximize else "min")
        _emit(ps, m, args.output, [f"node-weight {format_number(value)}"])
        return OK
    w = parse_weights(ps, _read(args.weights))
    if args.exact:
        solve = mwp_exact if maximize else miwp_exact
        m, value = solve(ps, w, args.allow_exponential, args.edge_limit, args.cap)
        _emit(ps, m, args.output, [f"weight {format_number(value)}", "exact"])
        return OK
    if not maximize:
        raise HardCaseError("minimum-weight popular matching needs --exact --allow-exponential")
    res = mwp_half_approx(ps, w)
    notes = [
        f"weight {format_number(res.value)}",
        f"stable {format_number(res.stable_value)}",
        f"dominant {format_number(res.dominant_value)}",
        f"bound {format_number(2 * res.value)}",
    ]
    _emit(ps, res.matching, args.output, notes)
    return OK


def cmd_mwp(args, ps: PreferenceSystem) -> int:
    return _weighted(args, ps, True)


def cmd_miwp(args, ps: PreferenceSystem) -> int:
    return _weighted(args, ps, False)


def cmd_reduce(args) -> int:
    f = parse_dimacs(_read(args.input))
    if args.normalize:
        f = normalize_monotone(to_monotone(f))
    ps, gm = build_graph(f, strict=args.normalize)
    _write(args.output, render_instance(ps))
    if args.map:
        _write(args.map, gm.to_json() + "\n")
    print(f"vertices {len(ps.vertices)}")
    print(f"edges {len(ps.edges)}")
    print("forbidden " + " ".join(f"{a}:{b}" for a, b in gm.forbidden))
    return OK


def cmd_enumerate(args, ps: PreferenceSystem) -> int:
    rep = popular_set(ps, args.cap)
    lines = [
        f"matchings {rep.all_matchings}",
        f"popular {len(rep.popular)}",
        f"stable {len(rep.stable)}",
        f"dominant {len(rep.dominant)}",
        f"min-popular-size {rep.min_popular_size}",
        f"max-popular-size {rep.max_popular_size}",
    ]
    problems = rep.problems()
    lines += [f"problem {p}" for p in problems]
    print("\n".join(lines))
    if args.report:
        detail = list(lines)
        for kind, ms in (("popular", rep.popular), ("stable", rep.stable), ("dominant", rep.dominant)):
            for m in ms:
                detail.append(f"{kind} " + " ".join(f"{a}:{b}" for a, b in m.sorted_edges(ps)))
        _write(args.report, "\n".join(detail) + "\n")
    return NEGATIVE if problems else OK


def cmd_selftest(args) -> int:
    from .selftest import run_all

    only = set(args.only) if args.only else None
    results = run_all(args.seed, args.scale, only)
    for r in results:
        print(r.line())
    return OK if all(r.ok for r in results) else NEGATIVE


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="popmatch", description="Popular matchings in bipartite preference systems.")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    def with_instance(name: str, help: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help)
        sp.add_argument("-i", "--input", required=True, help="instance file")
        return sp

    def with_output(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("-o", "--output", help="also write the matching to this file")

    def with_guard(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--allow-exponential", action="store_true", help="permit exhaustive search")
        sp.add_argument(
            "--edge-limit",
            type=int,
            default=DEFAULT_EDGE_LIMIT,
            help="largest edge count for exhaustive search; 0 for no limit (default %(default)s)",
        )

    sp = with_instance("verify", "check popularity (and dominance) of a matching")
    sp.add_argument("-m", "--matching", required=True)
    sp.add_argument("--dominant", action="store_true")
    sp.set_defaults(run=cmd_verify)

    sp = with_instance("stable", "side-optimal, maximum-weight, or all stable matchings")
    sp.add_argument("--side", choices=("A", "B"), default="A")
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument("--weights", help="edge weight file; requires --max")
    mode.add_argument("--list", action="store_true", help="list every stable matching")
    sp.add_argument("--max", action="store_true", help="maximize total weight")
    sp.add_argument("--cap", type=int, default=100_000)
    with_output(sp)
    sp.set_defaults(run=cmd_stable)

    sp = with_instance("dominant", "a dominant (maximum-size popular) matching")
    sp.add_argument("--weights")
    sp.add_argument("--max", action="store_true")
    sp.add_argument("--emit-gprime", metavar="FILE", help="write the two-level instance")
    with_output(sp)
    sp.set_defaults(run=cmd_dominant)

    sp = with_instance("pmffe", "popular matching with forced and forbidden elements")
    sp.add_argument("--force-node", action="append", default=[], metavar="V")
    sp.add_argument("--forbid-node", action="append", default=[], metavar="V")
    sp.add_argument("--force-edge", action="append", default=[], type=_edge_arg, metavar="U:V")
    sp.add_argument("--forbid-edge", action="append", default=[], type=_edge_arg, metavar="U:V")
    with_guard(sp)
    with_output(sp)
    sp.set_defaults(run=cmd_pmffe)

    for name, maximize in (("mwp", True), ("miwp", False)):
        sp = with_instance(name, f"{'maximum' if maximize else 'minimum'}-weight popular matching")
        src = sp.add_mutually_exclusive_group(required=True)
        src.add_argument("--weights", help="edge weight file")
        src.add_argument("--node-weights", help="vertex weight file")
        sp.add_argument("--exact", action="store_true", help="exhaustive optimum instead of the approximation")
        sp.add_argument("--cap", type=int, default=DEFAULT_CAP)
        with_guard(sp)
        with_output(sp)
        sp.set_defaults(run=cmd_mwp if maximize else cmd_miwp)

    sp = sub.add_parser("reduce", help="build the hardness instance of a CNF formula")
    sp.add_argument("-i", "--input", required=True, help="DIMACS CNF file")
    sp.add_argument("-o", "--output", required=True, help="instance file to write")
    sp.add_argument("--map", help="JSON gadget map to write")
    sp.add_argument("--normalize", action="store_true", help="make the formula monotone and normalized first")
    sp.set_defaults(run=cmd_reduce, raw=True)

    sp = with_instance("enumerate", "classify every matching of a small instance")
    sp.add_argument("--cap", type=int, default=DEFAULT_CAP)
    sp.add_argument("--report", help="write the full classification here")
    sp.set_defaults(run=cmd_enumerate)

    sp = sub.add_parser("selftest", help="run the acceptance checks")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--scale", type=float, default=1.0, help="shrink or grow the random samples")
    sp.add_argument("--only", type=int, action="append", metavar="N", help="run only criterion N")
    sp.set_defaults(run=cmd_selftest, raw=True)
    return p


def _check_flags(p: argparse.ArgumentParser, args) -> None:
    if args.command in ("stable", "dominant") and bool(args.weights) != bool(args.max):
        p.error("--weights and --max go together")
    if args.command in ("mwp", "miwp") and args.node_weights and args.exact:
        p.error("--node-weights is solved exactly; drop --exact")
    if getattr(args, "edge_limit", None) == 0:
        args.edge_limit = None


def main(argv: Sequence[str] | None = None) -> int:
    p = build_parser()
    try:
        args = p.parse_args(argv)
    except SystemExit as exc:
        return INPUT_ERROR if exc.code else OK
    try:
        _check_flags(p, args)
    except SystemExit:
        return INPUT_ERROR
    try:
        if getattr(args, "raw", False):
            return args.run(args)
        ps = parse_instance(_read(args.input))
        return args.run(args, ps)
    except (HardCaseError, CapExceededError, StableCapExceededError) as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return REFUSED
    except NotPopularError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return NEGATIVE
    except (PopmatchError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
