"""Supertranslation algebras, pure spinor rings and the pure spinor functor.

Generator names: l<a> (pure spinor coordinates, bidegree (0,1)), v<m> (-1,2),
th<a> (-1,1), x<m> (-2,2).  Duals in the supertranslation algebra are d<a>
(degree 1, weight -1) and e<m> (degree 2, weight -2).
"""

from .grading import QQ, Generator, FreeSCAlgebra, Poly, Derivation, TruncationWindow, window_basis
from .homology import (
    Echelon, LinMap, vadd, vscale, complex_from_derivation, build_strong_retract,
    perturb_retract, Perturbation,
)
from .linfty import LInftyAlgebra, OCHA, MCError, mc_residual, ce_to_brackets, vec_str


class GammaError(ValueError):
    pass


class GammaSpec:
    """Gamma^mu_{alpha beta}, symmetric in alpha, beta; indices are 1-based."""

    def __init__(self, n_odd, n_even, gamma, name=""):
        self.n_odd = n_odd
        self.n_even = n_even
        self.name = name
        g = {}
        for (mu, a, b), c in gamma.items():
            c = QQ(c)
            if not (1 <= mu <= n_even and 1 <= a <= n_odd and 1 <= b <= n_odd):
                raise GammaError("gamma index out of range: mu=%d alpha=%d beta=%d" % (mu, a, b))
            if c:
                g[(mu, a, b)] = c
        for (mu, a, b), c in g.items():
            if g.get((mu, b, a), 0) != c:
                raise GammaError("gamma not symmetric: entry mu=%d alpha=%d beta=%d is %s but mu=%d alpha=%d beta=%d is %s"
                                 % (mu, a, b, c, mu, b, a, g.get((mu, b, a), 0)))
        self.gamma = g

    def __call__(self, mu, a, b):
        return self.gamma.get((mu, a, b), 0)

    @classmethod
    def from_entries(cls, n_odd, n_even, entries, name=""):
        """Entries {alpha, beta, mu, coeff}; (a,b) implies (b,a), conflicting entries are rejected."""
        g = {}
        for k, e in enumerate(entries):
            a, b, mu, c = int(e["alpha"]), int(e["beta"]), int(e["mu"]), QQ(e["coeff"])
            for key in ((mu, a, b), (mu, b, a)):
                if key in g and g[key] != c:
                    raise GammaError("gamma entry %d (alpha=%d, beta=%d, mu=%d) conflicts with an earlier entry"
                                     % (k, a, b, mu))
                g[key] = c
        return cls(n_odd, n_even, g, name)

    def quadric_terms(self, mu):
        """{(a, b): coeff} of lambda Gamma^mu lambda with a <= b."""
        out = {}
        for (m, a, b), c in self.gamma.items():
            if m == mu:
                key = (min(a, b), max(a, b))
                out[key] = out.get(key, 0) + c
        return {k: c for k, c in out.items() if c}


def T1():
    return GammaSpec(2, 1, {(1, 1, 2): QQ(1, 2), (1, 2, 1): QQ(1, 2)}, "T1")


def T2():
    h = QQ(1, 2)
    return GammaSpec(2, 3, {(1, 1, 1): 1, (2, 1, 2): h, (2, 2, 1): h, (3, 2, 2): 1}, "T2")


def T3():
    h = QQ(1, 2)
    return GammaSpec(3, 2, {(1, 1, 2): h, (1, 2, 1): h, (2, 1, 3): h, (2, 3, 1): h}, "T3")


FIXTURES = {"T1": T1, "T2": T2, "T3": T3}


def lam(a):
    return "l%d" % a


def vee(m):
    return "v%d" % m


def th(a):
    return "th%d" % a


def ex(m):
    return "x%d" % m


# ---------------------------------------------------------------- supertranslations

class SuperTranslation(LInftyAlgebra):
    """t = t1 + t2 with l_2(d_a, d_b) = 2 Gamma^m_ab e_m (shifted convention)."""

    def __init__(self, gamma):
        basis = ["d%d" % a for a in range(1, gamma.n_odd + 1)] + ["e%d" % m for m in range(1, gamma.n_even + 1)]
        degree = {b: (1 if b[0] == "d" else 2) for b in basis}
        weight = {b: -degree[b] for b in basis}
        table = {}
        for a in range(1, gamma.n_odd + 1):
            for b in range(a, gamma.n_odd + 1):
                out = {}
                for m in range(1, gamma.n_even + 1):
                    c = 2 * gamma(m, a, b)
                    if c:
                        out["e%d" % m] = c
                if out:
                    table.setdefault(2, {})[("d%d" % a, "d%d" % b)] = out
        super().__init__(basis, degree, weight, table, name="t")
        self.gamma = gamma


def build_supertranslation(gamma):
    return SuperTranslation(gamma)


class SuperPoincare:
    """t extended by a finite algebra g0 acting through degree-0 derivations.

    g0_brackets: {(i, j): {k: c}}; action: {i: {t-basis: {t-basis: c}}}.
    """

    def __init__(self, t, g0_basis=(), g0_brackets=None, action=None):
        self.t = t
        self.g0_basis = list(g0_basis)
        self.g0_brackets = g0_brackets or {}
        self.action = action or {}

    def check(self):
        """Each g0 element acts as a derivation of the bracket of t."""
        bad = []
        t = self.t
        for g in self.g0_basis:
            act = self.action.get(g, {})
            f = lambda v: _lin(act, v)
            for a in t.basis:
                for b in t.basis:
                    lhs = f(t.bracket((a, b)))
                    rhs = t.bracket_vec([f({a: 1}), {b: 1}])
                    vadd(rhs, t.bracket_vec([{a: 1}, f({b: 1})]))
                    if vadd(dict(lhs), rhs, -1):
                        bad.append((g, a, b))
        return {"passed": not bad, "violations": bad}


def _lin(table, v):
    out = {}
    for k, c in v.items():
        vadd(out, table.get(k, {}), c)
    return out


def ce_of_t(t_or_gamma):
    """C(t) = (C[l, v], d v^m = l Gamma^m l)."""
    gamma = t_or_gamma.gamma if isinstance(t_or_gamma, SuperTranslation) else t_or_gamma
    gens = [Generator(lam(a), 0, 1) for a in range(1, gamma.n_odd + 1)]
    gens += [Generator(vee(m), -1, 2) for m in range(1, gamma.n_even + 1)] if any(gamma.gamma) else []
    alg = FreeSCAlgebra(gens)
    imgs = {}
    if any(gamma.gamma):
        for m in range(1, gamma.n_even + 1):
            imgs[vee(m)] = quadric(alg, gamma, m)
    return alg, Derivation(alg, imgs, 1, 0)


def quadric(alg, gamma, m, shift=None):
    """lambda Gamma^m lambda as a Poly in alg (lambda -> lambda + shift if given)."""
    out = alg.zero()
    for (mu, a, b), c in gamma.gamma.items():
        if mu != m:
            continue
        la = alg.gen(lam(a))
        lb = alg.gen(lam(b))
        out = out + c * la * lb
    return out


def t_duals(alg):
    """Dual names of C(t)-type generators: l<a> -> d<a>, v<m> -> e<m>, th<a> -> d<a>[-1], x<m> -> e<m>[-1]."""
    def name(g):
        if g.startswith("l"):
            return "d" + g[1:]
        if g.startswith("v"):
            return "e" + g[1:]
        if g.startswith("th"):
            return "d" + g[2:] + "[-1]"
        if g.startswith("x"):
            return "e" + g[1:] + "[-1]"
        return g + "^"
    return name


# ---------------------------------------------------------------- pure spinor ring

class QuotientRing:
    """C[l]/(ideal) with normal forms from per-weight echelon forms."""

    def __init__(self, gamma):
        self.gamma = gamma
        gens = [Generator(lam(a), 0, 1) for a in range(1, gamma.n_odd + 1)]
        self.alg = FreeSCAlgebra(gens)
        self.quadrics = [quadric(self.alg, gamma, m) for m in range(1, gamma.n_even + 1)]
        self.quadrics = [q for q in self.quadrics if q]
        self._ech = {}
        self._nf = {}

    def monomials(self, w):
        return window_basis(self.alg, TruncationWindow(None, None, w, w))

    def echelon(self, w):
        e = self._ech.get(w)
        if e is None:
            # pivots on the lexicographically largest monomials
            order = lambda m: tuple(-x for x in m)
            e = Echelon(order, track=False)
            if w >= 2:
                for m in self.monomials(w - 2):
                    for q in self.quadrics:
                        prod = Poly(self.alg, {m: QQ(1)}) * q
                        e.add(prod.terms)
            self._ech[w] = e
        return e

    def normal_form(self, m):
        hit = self._nf.get(m)
        if hit is None:
            r, _ = self.echelon(sum(m)).reduce({m: QQ(1)})
            hit = r
            self._nf[m] = hit
        return hit

    def standard_monomials(self, w):
        e = self.echelon(w)
        return [m for m in self.monomials(w) if m not in e.rows]

    def hilbert_function(self, weight_max):
        return [len(self.monomials(w)) - self.echelon(w).rank() for w in range(weight_max + 1)]


def pure_spinor_ring(gamma, weight_max=6):
    ring = QuotientRing(gamma)
    return ring, ring.hilbert_function(weight_max)


def hilbert_function(ring, weight_max):
    return ring.hilbert_function(weight_max)


# ---------------------------------------------------------------- modules and multiplets

class ModulePresentation:
    """A C(t)-module given as a (possibly quotient) free algebra.

    ``lam_gens``/``v_gens`` name the generators by which l^a and v^m act (None: acts by 0).
    ``ring`` is a QuotientRing whose lambda generators are reduced in normal form.
    """

    def __init__(self, kind, gens=(), d_images=None, lam_gens=None, v_gens=None, ring=None, algebra=True):
        self.kind = kind
        self.gens = list(gens)
        self.d_images = d_images or {}
        self.lam_gens = lam_gens or {}
        self.v_gens = v_gens or {}
        self.ring = ring
        self.algebra = algebra


def trivial_module():
    return ModulePresentation("trivial")


def oy_module(gamma):
    ring = QuotientRing(gamma)
    gens = [Generator(lam(a), 0, 1) for a in range(1, gamma.n_odd + 1)]
    return ModulePresentation("pure_spinor_ring", gens, {}, {a: lam(a) for a in range(1, gamma.n_odd + 1)},
                              {}, ring)


def free_lambda_module(gamma):
    gens = [Generator(lam(a), 0, 1) for a in range(1, gamma.n_odd + 1)]
    return ModulePresentation("free", gens, {}, {a: lam(a) for a in range(1, gamma.n_odd + 1)}, {})


def tate_module(state):
    """C(t~) from a Tate resolution state."""
    alg, d = state.alg, state.d
    imgs = {g.name: d.images[k] for k, g in enumerate(alg.gens)}
    gamma = state.gamma
    v_gens = {m: vee(m) for m in range(1, gamma.n_even + 1) if vee(m) in alg.index}
    mod = ModulePresentation("tate", alg.gens, imgs, {a: lam(a) for a in range(1, gamma.n_odd + 1)}, v_gens)
    mod.state = state
    return mod


class Multiplet:
    """A(M) = C[x, th] (x) M with its differential and the strict action rho of t."""

    def __init__(self, gamma, module, alg, D, reducer, rho, parts, twist=None):
        self.gamma = gamma
        self.module = module
        self.alg = alg
        self.D = D
        self.reducer = reducer
        self.rho = rho
        self.parts = parts
        self.twist = twist or {}
        self.t = SuperTranslation(gamma)

    def reduce_vec(self, v):
        if self.reducer is None:
            return {m: c for m, c in v.items() if c}
        out = {}
        for m, c in v.items():
            vadd(out, self.reducer(m), c)
        return out

    def mul(self, a, b):
        s, m = self.alg.mono_mul(a, b)
        if not s:
            return {}
        return self.reduce_vec({m: QQ(s)})

    def apply(self, D, v):
        return self.reduce_vec(D.apply_terms(v))

    def complex(self, window, D=None, name="A"):
        return complex_from_derivation(D or self.D, window, name, self.reducer)

    def square_zero(self):
        """D^2 on every generator, computed in normal form."""
        bad = []
        for k, g in enumerate(self.alg.gens):
            img = self.reduce_vec(self.D.images[k].terms)
            twice = self.reduce_vec(self.D.apply_terms(img))
            if twice:
                bad.append((g.name, repr(Poly(self.alg, twice))))
        return {"passed": not bad, "violations": bad}

    def rho_of(self, vec):
        """Derivation rho(sum c_b b) for a closed element of t."""
        out = None
        for b, c in vec.items():
            term = scale_derivation(self.rho[b], c)
            out = term if out is None else out + term
        return out

    def ocha(self, window):
        """Strict OCHA on t + A(M) over the window basis of A(M)."""
        c = self.complex(window)
        basis = c.keys()
        deg = {m: self.alg.mono_degree(m) for m in basis}
        wt = {m: self.alg.mono_weight(m) for m in basis}
        t = self.t
        D = self.D
        mult = self

        def b1(cs, os_):
            return mult.reduce_vec(D.apply_mono(os_[0]))

        def b2(cs, os_):
            x, y = os_
            sign = -1 if (deg[x] - 1) % 2 else 1
            return vscale(mult.mul(x, y), sign)

        def n11(cs, os_):
            g = cs[0]
            sign = -1 if t.sdeg[g] % 2 else 1
            return vscale(mult.reduce_vec(mult.rho[g].apply_mono(os_[0])), sign)

        ops = {(0, 1): b1, (1, 1): n11}
        if self.module.algebra:
            ops[(0, 2)] = b2
        o = OCHA(t, basis, deg, ops, wt, "t+A")
        o.multiplet = self
        return o


def scale_derivation(D, c):
    return Derivation(D.alg, {k: c * v for k, v in D.images.items()}, D.degree, D.weight, check=False)


def _multiplet_algebra(gamma, module):
    gens = [Generator(ex(m), -2, 2) for m in range(1, gamma.n_even + 1)]
    gens += [Generator(th(a), -1, 1) for a in range(1, gamma.n_odd + 1)]
    gens += list(module.gens)
    return FreeSCAlgebra(gens)


def pure_spinor_functor(gamma, module, check=True):
    """A(M) with D = l d/dth - l Gamma th d/dx + v d/dx + d_M."""
    alg = _multiplet_algebra(gamma, module)
    zero = alg.zero()

    def lam_el(a):
        g = module.lam_gens.get(a)
        return alg.gen(g) if g else zero

    imgs = {}
    for a in range(1, gamma.n_odd + 1):
        imgs[th(a)] = lam_el(a)
    for m in range(1, gamma.n_even + 1):
        img = zero
        g = module.v_gens.get(m)
        if g:
            img = img + alg.gen(g)
        for (mu, a, b), c in gamma.gamma.items():
            if mu == m:
                img = img - c * lam_el(a) * alg.gen(th(b))
        imgs[ex(m)] = img
    for name, img in module.d_images.items():
        if isinstance(img, Poly):
            img = Poly(alg, {alg.embed_mono(_lift(module, alg, mm)): cc for mm, cc in img.terms.items()})
        imgs[name] = img
    D = Derivation(alg, imgs, 1, 0)
    reducer = None
    if module.ring is not None:
        reducer = _ring_reducer(alg, module.ring)
    rho = action_derivations(alg, gamma)
    parts = {"D0": Derivation(alg, {th(a): imgs[th(a)] for a in range(1, gamma.n_odd + 1)}, 1, 0),
             "D1": Derivation(alg, {ex(m): imgs[ex(m)] - (alg.gen(module.v_gens[m]) if module.v_gens.get(m) else zero)
                                    for m in range(1, gamma.n_even + 1)}, 1, 0)}
    mult = Multiplet(gamma, module, alg, D, reducer, rho, parts)
    if check:
        rep = mult.square_zero()
        if not rep["passed"]:
            raise ValueError("module axiom violated: D^2 != 0 on %s" % ", ".join(v[0] for v in rep["violations"]))
    return mult


def _lift(module, alg, m):
    """Monomial of the module algebra -> monomial of C[x, th] (x) M (module generators last)."""
    off = alg.n - len(module.gens)
    return (0,) * off + tuple(m)


def _ring_reducer(alg, ring):
    idx = [alg.index[g.name] for g in ring.alg.gens]
    cache = {}

    def reducer(m):
        hit = cache.get(m)
        if hit is None:
            lm = tuple(m[i] for i in idx)
            hit = {}
            for nm, c in ring.normal_form(lm).items():
                mm = list(m)
                for i, e in zip(idx, nm):
                    mm[i] = e
                hit[tuple(mm)] = c
            cache[m] = hit
        return hit
    return reducer


def action_derivations(alg, gamma):
    """rho(d_a) = d/dth^a + Gamma^m_ab th^b d/dx^m,  rho(e_m) = d/dx^m."""
    rho = {}
    for a in range(1, gamma.n_odd + 1):
        imgs = {th(a): alg.unit()}
        for m in range(1, gamma.n_even + 1):
            img = alg.zero()
            for b in range(1, gamma.n_odd + 1):
                c = gamma(m, a, b)
                if c:
                    img = img + c * alg.gen(th(b))
            if img:
                imgs[ex(m)] = img
        rho["d%d" % a] = Derivation(alg, imgs, 1, -1)
    for m in range(1, gamma.n_even + 1):
        rho["e%d" % m] = Derivation(alg, {ex(m): alg.unit()}, 2, -2)
    return rho


def check_twist(gamma, Q):
    """Raise MCError unless Q Gamma Q = 0."""
    t = SuperTranslation(gamma)
    Qv = {"d%d" % (a + 1): QQ(c) for a, c in enumerate(Q) if c}
    res = mc_residual(t, Qv)
    if res:
        raise MCError("twist %s is not Maurer-Cartan: residual %s" % (",".join(str(QQ(c)) for c in Q), vec_str(res)), res)
    return Qv


def twist_derivation(alg, gamma, Q):
    """rho(Q) = Q^a d/dth^a + Q^a Gamma^m_ab th^b d/dx^m (weight-lowering)."""
    imgs = {}
    for a, q in enumerate(Q, start=1):
        if q:
            imgs[th(a)] = alg.const(QQ(q))
    for m in range(1, gamma.n_even + 1):
        img = alg.zero()
        for a, q in enumerate(Q, start=1):
            for b in range(1, gamma.n_odd + 1):
                c = gamma(m, a, b)
                if q and c:
                    img = img + QQ(q) * c * alg.gen(th(b))
        if img:
            imgs[ex(m)] = img
    return Derivation(alg, imgs, 1, None, check=False)


def twist_multiplet(mult, Q):
    check_twist(mult.gamma, Q)
    if not any(Q):
        return mult
    DQ = mult.D + twist_derivation(mult.alg, mult.gamma, Q)
    DQ.weight = None
    out = Multiplet(mult.gamma, mult.module, mult.alg, DQ, mult.reducer, mult.rho, mult.parts,
                    {a + 1: QQ(q) for a, q in enumerate(Q) if q})
    rep = out.square_zero()
    if not rep["passed"]:
        raise ValueError("twisted differential does not square to zero: %s" % rep["violations"])
    return out


# ---------------------------------------------------------------- component fields

def component_fields(mult, window, arity_max=3, wmax=None):
    """Minimal model of A(M) along the th-direction, with transferred structures.

    D = D0 + D1 with D0 = l d/dth; strong retract of (A, D0) then perturbation by D1.
    Returns (perturbed retract, transferred OCHA).
    """
    from .transfer import transfer_ocha, identity_retract
    if any(g.degree != 0 for g in mult.module.gens):
        raise NotImplementedError("component fields are only supported for modules concentrated in degree 0")
    D0 = mult.parts["D0"]
    c0 = mult.complex(window, D0, "A,D0")
    base = build_strong_retract(c0)
    D1 = mult.D - D0
    x = LinMap(lambda m: mult.reduce_vec(D1.apply_mono(m)), 1, "D1")
    r = perturb_retract(base, Perturbation(x, filtration="x-degree"), cap=window.weight_max + 2)
    o = mult.ocha(window)
    closed_id = identity_retract(mult.t)
    transferred = transfer_ocha(closed_id, r, o, arity_max, wmax=wmax)
    return r, transferred
