import itertools

import pytest
from hypothesis import given, settings, strategies as st

from purespan.grading import QQ, TruncationWindow
from purespan.linfty import (
    LInftyAlgebra, OCHA, MCError, ce_to_brackets, brackets_to_ce, check_homotopy_jacobi, mc_residual,
    twist_linfty, twist_ocha, check_ocha_coherence, check_ainfty, check_module, sorted_with_sign,
    unshuffle_sign, qstr,
)
from purespan.multiplets import T1, T2, T3, SuperTranslation, ce_of_t, pure_spinor_functor, oy_module, t_duals
from purespan.tate import tate_resolve, t_tilde


def test_supertranslation_bracket():
    t = SuperTranslation(T2())
    # l_2(d_a, d_b) = 2 Gamma^m_ab e_m
    assert t.bracket(("d1", "d1")) == {"e1": 2}
    assert t.bracket(("d1", "d2")) == {"e2": 1}
    assert t.bracket(("d2", "d1")) == {"e2": 1}
    assert t.bracket(("d1", "e1")) == {}
    assert check_homotopy_jacobi(t, 3)["passed"]


def test_ce_dictionary_on_supertranslation():
    gamma = T1()
    alg, d = ce_of_t(gamma)
    L = ce_to_brackets(alg, d, dual_name=t_duals(alg))
    t = SuperTranslation(gamma)
    for key in itertools.combinations_with_replacement(t.basis, 2):
        assert L.bracket(key) == t.bracket(key)


def test_ce_round_trip():
    st = tate_resolve(T2(), 5, 4, -5, 2)
    L = t_tilde(st)
    alg, D = brackets_to_ce(L, gen_name=L.generator_of.get)
    L2 = ce_to_brackets(alg, D, dual_name=t_duals(alg))
    assert L.to_table() == L2.to_table()
    for k, img in D.images.items():
        name = alg.gens[k].name
        assert img.terms == {alg.embed_mono(m): c for m, c in st.d.images[st.alg.index[name]].terms.items()}


def test_t_tilde_jacobi():
    st = tate_resolve(T3(), 5, 5, -6, 2)
    assert check_homotopy_jacobi(t_tilde(st), 4)["passed"]


def test_broken_bracket_fails_jacobi():
    t = SuperTranslation(T2())
    table = t.to_table()
    # a nonzero l_3 that is not compensated
    table[3] = {("d1", "d1", "d1"): {"d2": QQ(1)}}
    L = LInftyAlgebra(t.basis, t.degree, t.weight, table)
    assert not check_homotopy_jacobi(L, 4)["passed"]


def test_bracket_symmetry_signs():
    # shifted degrees: d_a even, e_m odd
    t = SuperTranslation(T2())
    assert sorted_with_sign(("e2", "e1"), t.sdeg, t.pos) == (("e1", "e2"), -1)
    assert sorted_with_sign(("e1", "e1"), t.sdeg, t.pos)[1] == 0
    assert sorted_with_sign(("d2", "d1"), t.sdeg, t.pos) == (("d1", "d2"), 1)
    assert unshuffle_sign([1, 1, 0], [1], [0, 2]) == -1


@settings(max_examples=30, deadline=None)
@given(st.permutations([0, 1, 2, 3]))
def test_sorting_sign_is_koszul(perm):
    sdeg = {"a": 1, "b": 0, "c": 1, "d": 1}
    pos = {"a": 0, "b": 1, "c": 2, "d": 3}
    names = ["a", "b", "c", "d"]
    shuffled = [names[i] for i in perm]
    key, s = sorted_with_sign(shuffled, sdeg, pos)
    assert key == tuple(names)
    # moving two adjacent odd elements past each other flips the sign
    for i in range(3):
        sw = list(shuffled)
        sw[i], sw[i + 1] = sw[i + 1], sw[i]
        _, s2 = sorted_with_sign(sw, sdeg, pos)
        odd = sdeg[shuffled[i]] % 2 and sdeg[shuffled[i + 1]] % 2
        assert s2 == (-s if odd else s)


def test_mc_residual_and_twist():
    t = SuperTranslation(T1())
    assert mc_residual(t, {"d1": QQ(1)}) == {}
    # T2 at (1, 0): 1/2 l_2(Q, Q) = Gamma^1_11 e_1
    t2 = SuperTranslation(T2())
    assert mc_residual(t2, {"d1": QQ(1)}) == {"e1": 1}
    with pytest.raises(MCError):
        twist_linfty(t2, {"d1": QQ(1)})
    tq = twist_linfty(SuperTranslation(T3()), {"d2": QQ(1)})
    # l_1^Q(d_1) = l_2(Q, d_1) = 2 Gamma^1_21 e_1
    assert tq.bracket(("d1",)) == {"e1": 1}
    assert tq.bracket(("d3",)) == {}
    assert check_homotopy_jacobi(tq, 3)["passed"]


def test_twisted_curvature_vanishes_for_mc():
    tq = twist_linfty(SuperTranslation(T3()), {"d2": QQ(3), "d3": QQ(-2)})
    assert tq.curvature == {}


@pytest.mark.parametrize("fixture", [T1, T2, T3])
def test_strict_ocha_coherence(fixture):
    gamma = fixture()
    mult = pure_spinor_functor(gamma, oy_module(gamma))
    o = mult.ocha(TruncationWindow(-4, 2, 3))
    rep = check_ocha_coherence(o, 3, 3)
    assert rep["passed"], rep["violations"][:1]
    assert rep["checked"] > 0


def test_twisted_ocha_coherence():
    gamma = T3()
    mult = pure_spinor_functor(gamma, oy_module(gamma))
    o = twist_ocha(mult.ocha(TruncationWindow(-4, 2, 3)), {"d2": QQ(1)})
    assert check_ocha_coherence(o, 3, 3)["passed"]
    assert check_module(o, 2, 3)["passed"]
    assert check_ainfty(o, 3, 3)["passed"]


def test_corrupted_action_breaks_coherence():
    gamma = T2()
    mult = pure_spinor_functor(gamma, oy_module(gamma))
    o = mult.ocha(TruncationWindow(-4, 2, 3))
    good = o.ops[(1, 1)]
    ops = dict(o.ops)
    ops[(1, 1)] = lambda cs, os_: {k: 2 * c for k, c in good(cs, os_).items()}
    bad = OCHA(o.closed, o.open_basis, o.open_degree, ops, o.open_weight)
    # scaling rho by 2 keeps [D, rho] = 0 but breaks rho([a, b]) = [rho(a), rho(b)]
    assert check_ocha_coherence(bad, 2, 3)["passed"]
    assert not check_ocha_coherence(bad, 3, 3)["passed"]


def test_qstr():
    assert qstr(QQ(3, 6)) == "1/2"
    assert qstr(-2) == "-2/1"
