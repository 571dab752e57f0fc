import numpy as np
import pytest

from popmatch import kernels
from popmatch.oracle import IndexedInstance, popular_set
from popmatch.reduction import CnfFormula, build_graph

from conftest import instances

needs_compiled = pytest.mark.skipif("cython" not in kernels.BACKENDS, reason="extension not built")


def test_backend_selection():
    assert kernels.get_backend("python") is kernels.BACKENDS["python"]
    assert kernels.DEFAULT in kernels.BACKENDS
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


def test_python_enumeration_order(i2x2):
    ix = IndexedInstance.of(i2x2)
    sets = kernels.get_backend("python").enumerate_matchings(ix.n, ix.eu, ix.ev, 100)
    assert sets == sorted(sets, key=lambda s: sum(1 << k for k in s))
    with pytest.raises(OverflowError):
        kernels.get_backend("python").enumerate_matchings(ix.n, ix.eu, ix.ev, 4)


@needs_compiled
def test_backends_agree_on_random_instances():
    for ps in instances(61, 150, size=5, edges=14):
        a = popular_set(ps, backend="python")
        b = popular_set(ps, backend="cython")
        assert a == b


@needs_compiled
def test_backends_agree_on_raw_kernels():
    ps, _ = build_graph(CnfFormula.of([[1, 2]]))
    ix = IndexedInstance.of(ps)
    out = {}
    for name in ("python", "cython"):
        impl = kernels.get_backend(name)
        sets = impl.enumerate_matchings(ix.n, ix.eu, ix.ev, 10**6)
        table = impl.rank_table(ix.n, ix.eu, ix.ev, ix.ru, ix.rv, sets)
        sizes = np.array([len(s) for s in sets], dtype=np.int32)
        pop, dom = impl.popular_flags(table, sizes)
        stab = impl.stable_flags(table, ix.eu, ix.ev, ix.ru, ix.rv)
        out[name] = (sets, np.asarray(table), np.asarray(pop, bool), np.asarray(dom, bool), np.asarray(stab, bool))
    p, c = out["python"], out["cython"]
    assert [tuple(s) for s in p[0]] == [tuple(s) for s in c[0]]
    for x, y in zip(p[1:], c[1:]):
        assert np.array_equal(x, y)


def test_small_chunks_give_the_same_flags():
    impl = kernels.get_backend("python")
    for ps in instances(62, 40, size=4, edges=10):
        ix = IndexedInstance.of(ps)
        sets = impl.enumerate_matchings(ix.n, ix.eu, ix.ev, 10**6)
        table = impl.rank_table(ix.n, ix.eu, ix.ev, ix.ru, ix.rv, sets)
        sizes = np.array([len(s) for s in sets], dtype=np.int32)
        whole = impl.popular_flags(table, sizes)
        tiny = impl.popular_flags(table, sizes, chunk=3)
        assert all(np.array_equal(x, y) for x, y in zip(whole, tiny))
