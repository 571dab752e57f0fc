"""Pure-Python/numpy versions of the enumeration kernels.

Used when the compiled ``_kernels`` extension is unavailable.  Both
implementations share one calling convention:

* vertices are integers ``0..n-1``; edge ``k`` joins ``eu[k]`` and ``ev[k]``;
  ``ru[k]`` is the rank of ``ev[k]`` in ``eu[k]``'s list and ``rv[k]`` the
  converse;
* a rank table row holds, per vertex, the rank of its partner or
  ``UNMATCHED`` (larger than any rank), so "v prefers M to M'" is simply
  ``R[M, v] < R[M', v]``.
"""

import numpy as np

UNMATCHED = 1 << 20


def enumerate_matchings(n, eu, ev, cap):
    """All matchings as tuples of edge indices, in increasing bitmask order.

    Raises OverflowError once more than ``cap`` matchings exist.
    """
    m = len(eu)
    used = [False] * n
    stack = []
    out = []

    def rec(k):
        if k < 0:
            if len(out) >= cap:
                raise OverflowError(cap)
            out.append(tuple(sorted(stack)))
            return
        rec(k - 1)
        u, v = eu[k], ev[k]
        if not used[u] and not used[v]:
            used[u] = used[v] = True
            stack.append(k)
            rec(k - 1)
            stack.pop()
            used[u] = used[v] = False

    rec(m - 1)
    return out


def rank_table(n, eu, ev, ru, rv, matchings):
    table = np.full((len(matchings), n), UNMATCHED, dtype=np.int32)
    for i, edges in enumerate(matchings):
        row = table[i]
        for k in edges:
            row[eu[k]] = ru[k]
            row[ev[k]] = rv[k]
    return table


def popular_flags(table, sizes, chunk=512):
    """Per row: (is popular, is never defeated).

    Rows are compared against the table in chunks so that an unpopular row
    usually stops after the first chunk.
    """
    table = np.asarray(table)
    sizes = np.asarray(sizes)
    k = table.shape[0]
    popular = np.zeros(k, dtype=np.uint8)
    dominant = np.zeros(k, dtype=np.uint8)
    for i in range(k):
        row = table[i]
        undefeated = True
        for lo in range(0, k, chunk):
            block = table[lo : lo + chunk]
            fw = (block < row).sum(axis=1)
            bw = (block > row).sum(axis=1)
            if np.any(fw > bw):
                break
            if undefeated and np.any((fw == bw) & (sizes[lo : lo + chunk] > sizes[i])):
                undefeated = False
        else:
            popular[i] = 1
            dominant[i] = undefeated
    return popular, dominant


def stable_flags(table, eu, ev, ru, rv):
    table = np.asarray(table)
    eu, ev = np.asarray(eu), np.asarray(ev)
    ru, rv = np.asarray(ru), np.asarray(rv)
    if len(eu) == 0:
        return np.ones(table.shape[0], dtype=np.uint8)
    blocking = (ru[None, :] < table[:, eu]) & (rv[None, :] < table[:, ev])
    return (~blocking.any(axis=1)).astype(np.uint8)
