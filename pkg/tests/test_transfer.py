import itertools

import pytest

from purespan.grading import TruncationWindow
from purespan.homology import vadd, vsub
from purespan.linfty import multisets, check_homotopy_jacobi
from purespan.multiplets import T1, T2, SuperTranslation, pure_spinor_functor, oy_module, component_fields
from purespan.transfer import (
    enumerate_trees, tree_shape, leaf_order, evaluate_tree, identity_retract, transfer_linfty,
    set_partitions, compositions,
)
from purespan.span import SpanContext, koszul_dual_transfer

W4 = TruncationWindow(-4, 2, 4)


@pytest.mark.parametrize("n,count", [(2, 1), (3, 3), (4, 11), (5, 45)])
def test_planar_tree_count(n, count):
    # small Schroeder numbers
    assert len(enumerate_trees(n, "planar")) == count


@pytest.mark.parametrize("n,count", [(2, 1), (3, 4), (4, 26), (5, 236)])
def test_rooted_tree_count(n, count):
    # total partitions of an n-set
    assert len(enumerate_trees(n, "rooted")) == count


def test_set_partitions_and_compositions():
    # Bell numbers
    assert [len(list(set_partitions(range(n)))) for n in range(6)] == [1, 1, 2, 5, 15, 52]
    assert len(list(compositions(5, 3))) == 6


def test_trees_have_no_unary_vertices():
    for t in enumerate_trees(2, "ocha", p=2, q=2):
        assert all(c + o >= 2 for c, o in tree_shape(t))
        assert sorted(leaf_order(t, 2)) == [0, 1, 2, 3]


def test_identity_transfer_is_the_source():
    t = SuperTranslation(T2())
    tr = transfer_linfty(identity_retract(t), t, 3)
    for k in (1, 2, 3):
        for key in multisets(t.basis, k):
            assert tr.bracket(key) == t.bracket(key)


@pytest.fixture(scope="module")
def t1_fields():
    g = T1()
    mult = pure_spinor_functor(g, oy_module(g))
    r, o = component_fields(mult, W4, arity_max=3)
    return mult, r, o


def test_recursion_matches_tree_sum_open_closed(t1_fields):
    mult, r, o = t1_fields
    big = mult.ocha(W4)
    closed = identity_retract(mult.t)
    small = o.open_basis
    checked = 0
    for p, q in [(0, 2), (0, 3), (1, 1), (1, 2), (2, 1)]:
        for cs in itertools.combinations_with_replacement(mult.t.basis, p):
            for os_ in itertools.product(small, repeat=q):
                if sum(o.open_weight[x] for x in os_) > 4:
                    continue
                total = {}
                for tree in enumerate_trees(None, "ocha", p=p, q=q):
                    vadd(total, evaluate_tree(tree, closed, r, big, list(cs), list(os_)))
                assert not vsub(o.transfer.open_op(list(cs), list(os_)), total), (cs, os_)
                checked += 1
    assert checked > 100


@pytest.fixture(scope="module")
def t2_ctx():
    return SpanContext(T2(), None, TruncationWindow(-7, 2, 6))


def test_koszul_dual_transfer_reproduces_n(t2_ctx):
    tr, rep = koszul_dual_transfer(t2_ctx, 3)
    assert rep["passed"], rep["differences"]
    assert rep["representatives"]
    assert rep["nonzero"] == 3
    assert check_homotopy_jacobi(tr, 3)["passed"]


def test_recursion_matches_tree_sum_closed(t2_ctx):
    tr, _ = koszul_dual_transfer(t2_ctx, 3)
    r = tr.transfer.rc
    g = tr.transfer.L
    nonzero = 0
    for k in (2, 3):
        trees = enumerate_trees(k, "rooted")
        for key in multisets(r.small_basis, k, r.small_weight, 6):
            total = {}
            for tree in trees:
                vadd(total, evaluate_tree(tree, r, None, g, list(key), []))
            assert not vsub(tr.bracket(key), total)
            nonzero += bool(total)
    # l_2 on the three products of stage-2 classes
    assert nonzero == 3
