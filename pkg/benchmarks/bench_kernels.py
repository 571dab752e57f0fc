"""Compare the compiled and pure-Python enumeration kernels.

    python3 benchmarks/bench_kernels.py --repeat 3

Each row times a full ``popular_set`` pass (enumerate, rank table,
pairwise votes, stability scan) on one instance and checks that both
backends classify identically.
"""

from __future__ import annotations

import argparse
import random
import time

import numpy as np

from popmatch import kernels
from popmatch.generate import random_instance
from popmatch.oracle import IndexedInstance
from popmatch.reduction import CnfFormula, build_graph


def classify(ix: IndexedInstance, backend: str):
    impl = kernels.get_backend(backend)
    sets = impl.enumerate_matchings(ix.n, ix.eu, ix.ev, 10**7)
    table = impl.rank_table(ix.n, ix.eu, ix.ev, ix.ru, ix.rv, sets)
    sizes = np.array([len(s) for s in sets], dtype=np.int32)
    pop, dom = impl.popular_flags(table, sizes)
    stab = impl.stable_flags(table, ix.eu, ix.ev, ix.ru, ix.rv)
    return len(sets), np.asarray(pop, bool), np.asarray(dom, bool), np.asarray(stab, bool)


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def workloads(seed: int):
    rng = random.Random(seed)
    for size, edges in ((4, 12), (5, 16), (6, 20)):
        ps = random_instance(rng, size, size, edges, density=0.9, min_side=size)
        yield f"random {size}x{size}", ps
    ps, _ = build_graph(CnfFormula.of([[1], [-1]]))
    yield "reduction (x1)&(~x1)", ps


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    if "cython" not in kernels.BACKENDS:
        print("compiled backend not built; only the fallback is timed")
    names = [b for b in ("python", "cython") if b in kernels.BACKENDS]
    header = f"{'workload':<24}{'edges':>6}{'matchings':>11}" + "".join(f"{n:>10}" for n in names)
    if len(names) == 2:
        header += f"{'speedup':>9}"
    print(header)
    for label, ps in workloads(args.seed):
        ix = IndexedInstance.of(ps)
        results = {n: classify(ix, n) for n in names}
        ref = results[names[0]]
        for n in names[1:]:
            other = results[n]
            if ref[0] != other[0] or any((x != y).any() for x, y in zip(ref[1:], other[1:])):
                raise SystemExit(f"backends disagree on {label}")
        secs = {n: best_of(lambda n=n: classify(ix, n), args.repeat) for n in names}
        row = f"{label:<24}{len(ps.edges):>6}{ref[0]:>11}" + "".join(f"{secs[n]:>9.3f}s" for n in names)
        if len(names) == 2:
            row += f"{secs['python'] / secs['cython']:>8.1f}x"
        print(row)
    print(f"times are the best of {args.repeat} runs")


if __name__ == "__main__":
    main()
