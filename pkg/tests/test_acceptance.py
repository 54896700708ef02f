"""The ten acceptance criteria; each prints one PASS/FAIL line (see conftest)."""

import contextlib
import json
import os
import time

import pytest

from conftest import ACCEPTANCE
from oracles import dense_dims
from purespan.cli import main
from purespan.grading import QQ, TruncationWindow, square_zero_check
from purespan.homology import verify_retract, vadd, vsub
from purespan.linfty import brackets_to_ce, check_homotopy_jacobi, check_ainfty, multisets, tuples
from purespan.multiplets import (
    T1, T2, T3, ce_of_t, pure_spinor_functor, oy_module, twist_multiplet, component_fields, tate_module,
)
from purespan.tate import tate_resolve, extract_n
from purespan.span import (
    SpanContext, verify_span, build_right_leg, build_left_leg, compare_dnQ_vs_twisted_ideal,
    curvature_check, koszul_dual_transfer,
)

SPECS = os.path.join(os.path.dirname(__file__), "..", "specs")
WIN = TruncationWindow(-4, 2, 6)
TWISTS = {"T1": (1, 0), "T2": None, "T3": (0, 1, 0)}


def win(W):
    return TruncationWindow(-W - 1, 2, W)


@contextlib.contextmanager
def criterion(n, title, part="all", budget=None):
    t = time.time()
    try:
        yield
    except BaseException as e:
        ACCEPTANCE.setdefault(n, []).append((part, False, str(e).splitlines()[0][:120] if str(e) else type(e).__name__, title))
        print("criterion %d %s: FAIL" % (n, title))
        raise
    dt = time.time() - t
    ok = budget is None or dt < budget
    ACCEPTANCE.setdefault(n, []).append((part, ok, "took %.0f s, budget %d s" % (dt, budget or 0), title))
    print("criterion %d %s: %s (%.1f s)" % (n, title, "PASS" if ok else "FAIL", dt))
    assert ok, "over the time budget"


def violations(rep):
    return [k for k, v in rep.items() if isinstance(v, dict) and v.get("violations")]


# ---------------------------------------------------------------- 1

def test_criterion_1_differentials_square_to_zero():
    with criterion(1, "differential soundness", budget=30):
        for g in (T1(), T2(), T3()):
            Q = TWISTS[g.name]
            _, dt = ce_of_t(g)
            assert square_zero_check(dt, WIN)["passed"], (g.name, "d_t")
            mult = pure_spinor_functor(g, oy_module(g))
            assert mult.square_zero()["passed"], (g.name, "D")
            if Q:
                assert twist_multiplet(mult, Q).square_zero()["passed"], (g.name, "D_Q")
            st = tate_resolve(g, 6, 4, -4, 2)
            assert square_zero_check(st.d, WIN)["passed"], (g.name, "d_t~")
            tilde = pure_spinor_functor(g, tate_module(st))
            assert tilde.square_zero()["passed"], (g.name, "D~")
            if Q:
                assert twist_multiplet(tilde, Q).square_zero()["passed"], (g.name, "D~_Q")
            # n needs the resolution past stage 4 to see its brackets at weight 6
            ctx = SpanContext(g, None, win(6))
            n = extract_n(ctx.state, check_ideal=False)
            alg, dn = brackets_to_ce(n)
            assert square_zero_check(dn)["passed"], (g.name, "d_n")
            leg = build_right_leg(SpanContext(g, Q, win(6), ctx.state), check_products=False)
            assert leg.report["d_n^Q square zero"]["passed"], (g.name, "d_n^Q")
            assert square_zero_check(leg.Dn)["passed"], (g.name, "d_n^Q")


# ---------------------------------------------------------------- 2

@pytest.fixture(scope="module")
def legs():
    out = []
    for g, Q, W in ((T1(), None, 5), (T1(), (1, 0), 5), (T2(), None, 5), (T3(), (0, 1, 0), 4)):
        ctx = SpanContext(g, Q, win(W))
        out.append((ctx, build_left_leg(ctx), build_right_leg(ctx)))
    return out


def test_criterion_2_retract_identities(legs):
    with criterion(2, "retract identities", "identities", budget=60):
        for ctx, left, right in legs:
            tag = (ctx.gamma.name, ctx.Q)
            for r in (left.base, left.retract, left.base.resolution, right.base, right.retract):
                rep = verify_retract(r)
                assert rep["passed"], (tag, r.name, violations(rep))
            for key in ("resolution retract", "base retract", "perturbed retract"):
                assert left.report[key]["passed"], (tag, key)
            for key in ("base retract", "multiplicative", "perturbed retract", "perturbed algebra maps"):
                assert right.report[key]["passed"], (tag, key)
        g = T2()
        r, _ = component_fields(pure_spinor_functor(g, oy_module(g)), WIN, arity_max=2)
        assert verify_retract(r)["passed"]


@pytest.mark.xfail(strict=True, raises=AssertionError, reason="no homotopy of the Koszul retract is an (ip,id)-derivation")
def test_criterion_2_homotopy_is_a_derivation(legs):
    with criterion(2, "retract identities", "(ip,id)-derivation"):
        for ctx, _, right in legs:
            bad = right.derivation_check["violations"]
            assert not bad, "h is not an (ip,id)-derivation on %d pairs for %s" % (bad, ctx.gamma.name)


# ---------------------------------------------------------------- 3

def test_criterion_3_tate_correctness():
    with criterion(3, "Tate resolution", budget=60):
        st = tate_resolve(T2(), 6, 4, -4, 2)
        c = st.complex()
        dims = dense_dims(c)
        assert [dims.get((0, w), 0) for w in range(7)] == [1, 2, 0, 0, 0, 0, 0]
        for (deg, w), n in dims.items():
            if deg in (-1, -2, -3):
                assert c.trusted((deg, w)) and n == 0, (deg, w)
        assert st.cohomology_table()[0] == dims
        st1 = tate_resolve(T1(), 6, 4, -4, 2)
        assert st1.closed and st1.stage == 1
        assert extract_n(st1).basis == []


# ---------------------------------------------------------------- 4, 5

@pytest.fixture(scope="module")
def untwisted():
    return {name: verify_span(g(), None, win(6)) for name, g in (("T1", T1), ("T2", T2))}


def test_criterion_4_untwisted_span(untwisted):
    with criterion(4, "untwisted span", budget=180):
        for name, rep in untwisted.items():
            for side in ("left", "right"):
                assert rep[side]["cohomology"]["passed"], (name, side)
                assert rep[side]["coherence"]["passed"], (name, side)
                assert rep[side]["coherence"]["checked"] > 0
            tr = rep["left"]["transferred"]
            for item in ("closed part unchanged", "A-infinity part is D_Q and the product",
                         "action is the strict action", "no mixed operations"):
                assert tr[item]["passed"], (name, item, tr[item]["violations"])
            assert rep["passed"], (name, [k for k, v in rep["clauses"].items() if not v])


@pytest.fixture(scope="module")
def t3_twisted():
    return verify_span(T3(), (0, 1, 0), win(4))


def test_criterion_5_vanishing_corrections(untwisted, t3_twisted):
    with criterion(5, "vanishing corrections", budget=120):
        for name, rep in list(untwisted.items()) + [("T3 twisted", t3_twisted)]:
            left = rep["left"]
            assert left["p corrections"]["passed"], (name, left["p corrections"]["violations"])
            ft = left["transferred"]["forbidden trees"]
            assert ft["passed"] and ft["trees"] > 0, (name, ft["violations"])
            for key in ("image of h in (v, w) ideal", "action and product preserve w2", "p kills w2 >= 1",
                        "D~_Q shifts w2 by 0 or 1"):
                assert left[key]["passed"], (name, key, left[key]["violations"])
        assert t3_twisted["passed"]


# ---------------------------------------------------------------- 6

def test_criterion_6_twisted_corollary():
    with criterion(6, "d_n^Q equals d_(n_Q)", budget=180):
        ctx = SpanContext(T3(), (0, 1, 0), win(5))
        leg = build_right_leg(ctx, check_products=False)
        rep = compare_dnQ_vs_twisted_ideal(ctx, leg)
        assert rep["passed"], rep["differences"]
        assert rep["generators"] == len([g for g in ctx.state.generators(2) if g.weight <= 5])
        assert rep["nonzero"] >= 1
        cf = leg.report["closed form"]
        assert cf["passed"], cf["mismatch"]
        assert cf["keys_with_Q_corrections"] >= 1


# ---------------------------------------------------------------- 7

def test_criterion_7_curvature():
    with criterion(7, "curvature", budget=10):
        for g, Q, want in ((T1(), (1, 0), {"d1[-1]": "1/1"}), (T3(), (0, 1, 0), {"d2[-1]": "1/1"})):
            rep = curvature_check(SpanContext(g, Q, win(4)))
            assert rep["curvature"] == want, (g.name, rep)


# ---------------------------------------------------------------- 8

def test_criterion_8_transfer_coherence():
    with criterion(8, "transfer coherence", budget=180):
        ctx = SpanContext(T2(), None, win(6))
        tr, rep = koszul_dual_transfer(ctx, 4)
        assert rep["passed"], rep["differences"]
        assert rep["nonzero"] > 0
        jac = check_homotopy_jacobi(tr, 4)
        assert jac["passed"] and jac["checked"] > 0
        leg = build_right_leg(ctx, check_products=False)
        assert check_homotopy_jacobi(leg.brackets, 4)["passed"]

        g = T2()
        mult = pure_spinor_functor(g, oy_module(g))
        r, o = component_fields(mult, WIN, arity_max=4)
        ain = check_ainfty(o, 4, 6)
        assert ain["passed"] and ain["checked"] > 0, ain["violations"][:1]
        big = mult.ocha(WIN)
        small = o.open_basis
        pairs = 0
        for a, b in tuples(small, 2, o.open_weight, 6):
            want = r.p(big.op_vec([], [r.i.on_key(a), r.i.on_key(b)]))
            assert not vsub(o.op((), (a, b)), want), (a, b)
            pairs += 1
        assert pairs > 0


# ---------------------------------------------------------------- 9

def _cli(capsys, *argv):
    code = main(list(argv))
    out, _ = capsys.readouterr()
    return code, out


def test_criterion_9_zero_twist(capsys):
    with criterion(9, "Q=0 degeneration", budget=60):
        runs = [("t1.json", "0,0", "span", "6"), ("t1.json", "0,0", "cohomology", "6"),
                ("t2.json", "0,0", "span", "5"), ("t2.json", "0,0", "cohomology", "6")]
        for spec, zero, cmd, W in runs:
            path = os.path.join(SPECS, spec)
            c1, plain = _cli(capsys, cmd, "--spec", path, "--max-weight", W)
            c2, twisted = _cli(capsys, cmd, "--spec", path, "--max-weight", W, "--twist", zero)
            assert c1 == c2 == 0
            assert plain == twisted, (spec, cmd)


# ---------------------------------------------------------------- 10

def test_criterion_10_negative_controls(capsys):
    with criterion(10, "negative controls", budget=10):
        code = main(["verify", "--spec", os.path.join(SPECS, "corrupted.json"), "--max-weight", "3"])
        out, err = capsys.readouterr()
        assert code == 1
        assert "module axiom violated" in json.dumps(json.loads(out)["details"])
        code = main(["resolve", "--spec", os.path.join(SPECS, "asymmetric.json")])
        out, err = capsys.readouterr()
        assert code == 2 and "gamma entry" in err and "alpha=2, beta=1" in err
        code = main(["span", "--spec", os.path.join(SPECS, "t2.json"), "--twist", "1,0"])
        out, err = capsys.readouterr()
        assert code == 2 and "not Maurer-Cartan" in err and "residual" in err
