"""Exhaustive ground truth for desk-scale instances.

Every matching is enumerated and compared against every other one by a
direct vote count, with no structural shortcuts.  Other modules are tested
against these reports.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import kernels
from .core import Matching, PopmatchError, PreferenceSystem

DEFAULT_CAP = 1_000_000


class CapExceededError(PopmatchError, RuntimeError):
    pass


@dataclass(frozen=True)
class IndexedInstance:
    """Integer encoding of a preference system for the kernels."""

    ps: PreferenceSystem
    n: int
    eu: np.ndarray
    ev: np.ndarray
    ru: np.ndarray
    rv: np.ndarray

    @classmethod
    def of(cls, ps: PreferenceSystem) -> "IndexedInstance":
        edges = ps.edges
        eu = np.array([ps.index(a) for a, _ in edges], dtype=np.int32)
        ev = np.array([ps.index(b) for _, b in edges], dtype=np.int32)
        ru = np.array([ps.rank(a, b) for a, b in edges], dtype=np.int32)
        rv = np.array([ps.rank(b, a) for a, b in edges], dtype=np.int32)
        return cls(ps, len(ps.vertices), eu, ev, ru, rv)

    def matching(self, edge_ids) -> Matching:
        edges = self.ps.edges
        return Matching(edges[k] for k in edge_ids)


def _edge_sets(ix: IndexedInstance, cap: int, backend: str | None) -> list[tuple[int, ...]]:
    impl = kernels.get_backend(backend)
    try:
        return impl.enumerate_matchings(ix.n, ix.eu, ix.ev, cap)
    except OverflowError:
        raise CapExceededError(f"more than {cap} matchings") from None


def enumerate_matchings(
    ps: PreferenceSystem, cap: int = DEFAULT_CAP, backend: str | None = None
) -> Iterator[Matching]:
    """Every matching exactly once, in increasing order of the edge bitmask.

    Bit ``k`` of the mask stands for ``ps.edges[k]``.
    """
    ix = IndexedInstance.of(ps)
    for ids in _edge_sets(ix, cap, backend):
        yield ix.matching(ids)


@dataclass(frozen=True)
class EnumerationReport:
    all_matchings: int
    popular: list[Matching]
    stable: list[Matching]
    dominant: list[Matching]
    min_popular_size: int
    max_popular_size: int

    def problems(self) -> list[str]:
        out = []
        pop = set(self.popular)
        if not set(self.stable) <= pop:
            out.append("a stable matching is not popular")
        if not set(self.dominant) <= pop:
            out.append("a dominant matching is not popular")
        if any(len(s) != self.min_popular_size for s in self.stable):
            out.append("a stable matching is not of minimum popular size")
        if any(len(d) != self.max_popular_size for d in self.dominant):
            out.append("a dominant matching is not of maximum popular size")
        if not self.stable or not self.dominant:
            out.append("missing stable or dominant matchings")
        return out


def popular_set(
    ps: PreferenceSystem, cap: int = DEFAULT_CAP, backend: str | None = None
) -> EnumerationReport:
    """Classify all matchings by pairwise vote counts."""
    impl = kernels.get_backend(backend)
    ix = IndexedInstance.of(ps)
    sets = _edge_sets(ix, cap, backend)
    table = impl.rank_table(ix.n, ix.eu, ix.ev, ix.ru, ix.rv, sets)
    sizes = np.array([len(s) for s in sets], dtype=np.int32)
    pop, dom = impl.popular_flags(table, sizes)
    stab = impl.stable_flags(table, ix.eu, ix.ev, ix.ru, ix.rv)
    popular = [ix.matching(sets[i]) for i in np.flatnonzero(pop)]
    stable = [ix.matching(sets[i]) for i in np.flatnonzero(stab)]
    dominant = [ix.matching(sets[i]) for i in np.flatnonzero(dom)]
    psizes = [len(m) for m in popular]
    return EnumerationReport(
        all_matchings=len(sets),
        popular=popular,
        stable=stable,
        dominant=dominant,
        min_popular_size=min(psizes),
        max_popular_size=max(psizes),
    )


def check_node_chain(
    ps: PreferenceSystem,
    cap: int = DEFAULT_CAP,
    report: EnumerationReport | None = None,
) -> bool:
    """Node containment: V(S) within V(M) within V(D) for every popular M."""
    report = report or popular_set(ps, cap)
    covers = [m.covered() for m in report.popular]
    small = [c for c, m in zip(covers, report.popular) if len(m) == report.min_popular_size]
    large = [c for c, m in zip(covers, report.popular) if len(m) == report.max_popular_size]
    return frozenset().union(*small) <= frozenset.intersection(*covers) and frozenset().union(
        *covers
    ) <= frozenset.intersection(*large)
