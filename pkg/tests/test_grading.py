import itertools

import pytest
from hypothesis import given, settings, strategies as st

from purespan.grading import (
    QQ, Bidegree, Generator, FreeSCAlgebra, Poly, Derivation, TruncationWindow,
    koszul_sign, multiply, apply_derivation, window_basis, square_zero_check,
)


def small_alg():
    return FreeSCAlgebra([
        Generator("l1", 0, 1), Generator("l2", 0, 1),
        Generator("t1", -1, 1), Generator("t2", -1, 1),
        Generator("v", -1, 2), Generator("x", -2, 2),
    ])


def test_bidegree_addition_and_parity():
    assert Bidegree(1, -1) + Bidegree(2, -2) == Bidegree(3, -3)
    assert Bidegree(1, 5) + Bidegree(0, 0) == Bidegree(1, 5)
    assert Bidegree(-1, 4).parity == 1
    assert Bidegree(-2, 3).parity == 0


def test_koszul_sign_examples():
    assert koszul_sign([1, 2, 3], [1, 0, 1]) == 1
    assert koszul_sign([2, 1], [1, 1]) == -1
    assert koszul_sign([2, 3, 1], [1, 1, 1]) == 1
    assert koszul_sign([2, 1], [1, 2]) == 1
    with pytest.raises(ValueError):
        koszul_sign([1, 2], [1])


def compose(p, q):
    # (p . q)[i] = q[p[i]], 0-based
    return [q[i] for i in p]


def test_koszul_sign_is_homomorphism_on_s3():
    degs = [1, 1, 0]
    for p in itertools.permutations(range(3)):
        for q in itertools.permutations(range(3)):
            # permuting by q, then by p, of the already permuted degrees
            qd = [degs[i] for i in q]
            lhs = koszul_sign(compose(p, q), degs)
            rhs = koszul_sign(list(q), degs) * koszul_sign(list(p), qd)
            assert lhs == rhs


@given(st.permutations(list(range(5))), st.permutations(list(range(5))),
       st.lists(st.integers(-3, 3), min_size=5, max_size=5))
def test_koszul_sign_is_homomorphism_on_s5(p, q, degs):
    qd = [degs[i] for i in q]
    assert koszul_sign(compose(p, q), degs) == koszul_sign(q, degs) * koszul_sign(p, qd)


def test_multiply_examples():
    A = small_alg()
    l1, l2, t1, t2 = A.gen("l1"), A.gen("l2"), A.gen("t1"), A.gen("t2")
    assert not multiply(t1, t1)
    assert multiply(t1, t2) == -multiply(t2, t1)
    assert multiply(l1 + l2, l1 - l2) == l1 * l1 - l2 * l2


def test_multiply_rejects_mixed_algebras():
    A = small_alg()
    B = FreeSCAlgebra([Generator("y", 0, 1)])
    with pytest.raises(ValueError):
        multiply(A.gen("l1"), B.gen("y"))


def basis_polys(A, wmax):
    return [Poly(A, {m: QQ(1)}) for m in window_basis(A, TruncationWindow(weight_max=wmax))]


def deg(p):
    (b,) = p.bidegrees()
    return b.degree


def test_multiply_associative_and_supercommutative_on_window():
    A = small_alg()
    basis = basis_polys(A, 3)
    for a in basis:
        for b in basis:
            assert multiply(a, b) == (-1) ** (deg(a) * deg(b)) * multiply(b, a)
    small = basis_polys(A, 2)
    for a, b, c in itertools.product(small, repeat=3):
        assert multiply(multiply(a, b), c) == multiply(a, multiply(b, c))


def koszul_d(A):
    return Derivation(A, {"t1": A.gen("l1"), "t2": A.gen("l2"), "v": A.gen("l1") * A.gen("l2"),
                          "x": A.gen("v") - A.gen("l1") * A.gen("t2")}, 1, 0)


def test_apply_derivation_examples():
    A = small_alg()
    D = Derivation(A, {"t1": A.gen("l1")}, 1, 0)
    assert D(A.gen("t1") * A.gen("t2")) == A.gen("l1") * A.gen("t2")
    assert not D(A.unit())
    B = FreeSCAlgebra([Generator("l1", 0, 1), Generator("l2", 0, 1), Generator("v", -1, 2)])
    dt = Derivation(B, {"v": B.gen("l1") * B.gen("l2")}, 1, 0)
    assert dt(B.gen("v")) == B.gen("l1") * B.gen("l2")


def test_derivation_image_must_be_homogeneous():
    A = small_alg()
    with pytest.raises(ValueError):
        Derivation(A, {"t1": A.gen("l1") * A.gen("l1")}, 1, 0)


def test_leibniz_on_window_pairs():
    A = small_alg()
    D = koszul_d(A)
    for a in basis_polys(A, 3):
        for b in basis_polys(A, 2):
            lhs = D(multiply(a, b))
            rhs = multiply(D(a), b) + (-1) ** deg(a) * multiply(a, D(b))
            assert lhs == rhs


def test_weight_is_additive():
    A = small_alg()
    D = koszul_d(A)
    for a in basis_polys(A, 2):
        for b in basis_polys(A, 2):
            ab = multiply(a, b)
            for bd in ab.bidegrees():
                assert bd == a.bidegrees().pop() + b.bidegrees().pop()
        for bd in D(a).bidegrees():
            assert bd == a.bidegrees().pop() + Bidegree(1, 0)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 1), st.integers(0, 1),
                          st.integers(-3, 3)), min_size=1, max_size=4),
       st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 1), st.integers(0, 1),
                          st.integers(-3, 3)), min_size=1, max_size=4))
def test_leibniz_random_polys(ta, tb):
    A = small_alg()
    D = koszul_d(A)

    def poly(ts, parity):
        # homogeneous parity so the sign (-1)^|a| is well defined
        return Poly(A, {(a, b, c, d, 0, 0): QQ(k) for a, b, c, d, k in ts if (c + d) % 2 == parity})

    a, b = poly(ta, 0), poly(tb, 1)
    assert D(a * b) == D(a) * b + a * D(b)
    a, b = poly(ta, 1), poly(tb, 0)
    assert D(a * b) == D(a) * b - a * D(b)


def test_window_basis_examples():
    A = FreeSCAlgebra([Generator("l1", 0, 1), Generator("l2", 0, 1)])
    got = [A.mono_str(m) for m in window_basis(A, TruncationWindow(0, 0, 2))]
    assert got == ["1", "l1", "l2", "l1^2", "l1*l2", "l2^2"]
    E = FreeSCAlgebra([Generator("t1", -1, 1), Generator("t2", -1, 1)])
    for w in (2, 3, 7):
        assert len(window_basis(E, TruncationWindow(weight_max=w))) == 4
    C = FreeSCAlgebra([Generator("l1", 0, 1), Generator("l2", 0, 1), Generator("v", -1, 2)])
    got = {C.mono_str(m) for m in window_basis(C, TruncationWindow(-1, 0, 2))}
    assert got == {"1", "l1", "l2", "l1^2", "l1*l2", "l2^2", "v"}


def test_window_basis_is_deterministic_and_complete():
    A = small_alg()
    w = TruncationWindow(-3, 0, 4)
    b1 = window_basis(A, w)
    assert b1 == window_basis(A, w)
    # brute force over an exponent box
    brute = []
    for m in itertools.product(range(5), range(5), range(2), range(2), range(2), range(3)):
        if w.contains(A.mono_bidegree(m)):
            brute.append(m)
    assert sorted(b1) == sorted(brute)


def test_window_refuses_weight_zero_even_generator():
    A = FreeSCAlgebra([Generator("s", 0, 0)])
    with pytest.raises(ValueError, match="infinite window"):
        window_basis(A, TruncationWindow(weight_max=3))


def test_empty_algebra():
    A = FreeSCAlgebra([])
    assert window_basis(A, TruncationWindow(weight_max=3)) == [()]


def test_square_zero_check():
    C = FreeSCAlgebra([Generator("l1", 0, 1), Generator("l2", 0, 1), Generator("v", -1, 2)])
    dt = Derivation(C, {"v": C.gen("l1") * C.gen("l2")}, 1, 0)
    assert square_zero_check(dt)["passed"]
    A = small_alg()
    assert square_zero_check(koszul_d(A))["passed"]
    bad = Derivation(A, {"t1": A.gen("l1"), "x": A.gen("t1")}, 1, None, check=False)
    # d(x) = t1 of the wrong degree is still a linear map; d^2 x = l1 != 0
    rep = square_zero_check(bad)
    assert not rep["passed"]
    assert rep["violations"][0][0] == "x"
