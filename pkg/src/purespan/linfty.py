"""L-infinity, A-infinity and open-closed homotopy algebras over finite bases.

Conventions.  Everything is stored in the shifted (bar) convention: on the
suspension s g the brackets l_k are graded *symmetric* of degree +1, and the
open operations b_k (resp. n_{p,q}) have degree +1 on the shifted open space.
``degree`` dicts hold the unshifted degrees; shifted degree = degree - 1.
All relations are the components of D^2 = 0 for the coderivation D on
S(closed) (x) T(open), so every sign below is a plain Koszul sign.

Vectors are dicts name -> rational.
"""

import itertools
import json
import math

from .grading import QQ, Generator, FreeSCAlgebra, Poly, Derivation, partial
from .homology import vadd, vscale


class MCError(ValueError):
    def __init__(self, msg, residual):
        super().__init__(msg)
        self.residual = residual


# ---------------------------------------------------------------- helpers

def unshuffle_sign(degs, first, second):
    """Koszul sign of reordering a sequence into (first positions, second positions)."""
    s = 0
    for a in second:
        if degs[a] % 2:
            for b in first:
                if b > a and degs[b] % 2:
                    s += 1
    return -1 if s % 2 else 1


def sorted_with_sign(names, sdeg, pos):
    """Sort names by basis position; sign from odd swaps (shifted degrees), 0 on odd repeats."""
    items = list(names)
    sign = 1
    for a in range(1, len(items)):
        b = a
        while b > 0 and pos[items[b - 1]] > pos[items[b]]:
            if sdeg[items[b - 1]] % 2 and sdeg[items[b]] % 2:
                sign = -sign
            items[b - 1], items[b] = items[b], items[b - 1]
            b -= 1
    for a in range(1, len(items)):
        if items[a] == items[a - 1] and sdeg[items[a]] % 2:
            return tuple(items), 0
    return tuple(items), sign


def expand(vectors):
    """Yield (basis tuple, coefficient) for the tensor product of sparse vectors."""
    if not vectors:
        yield (), QQ(1)
        return
    for combo in itertools.product(*[list(v.items()) for v in vectors]):
        c = QQ(1)
        for _, x in combo:
            c *= x
        yield tuple(k for k, _ in combo), c


def multisets(basis, k, weight=None, wmax=None):
    """Sorted k-multisets of basis names (by basis order), optionally with total weight <= wmax."""
    for combo in itertools.combinations_with_replacement(basis, k):
        if wmax is not None and sum(weight[c] for c in combo) > wmax:
            continue
        yield combo


def tuples(basis, k, weight=None, wmax=None):
    for combo in itertools.product(basis, repeat=k):
        if wmax is not None and sum(weight[c] for c in combo) > wmax:
            continue
        yield combo


def qstr(c):
    c = QQ(c)
    return "%d/%d" % (c.numerator, c.denominator)


# ---------------------------------------------------------------- L-infinity

class LInftyAlgebra:
    """Brackets l_k on a finite graded basis, given by a table or lazily by a function.

    table: k -> {sorted name tuple: vector}; fn(sorted tuple) -> vector.
    ``arity_max`` bounds the nonzero arities (needed for twisting sums).
    """

    def __init__(self, basis, degree, weight=None, table=None, fn=None, arity_max=None, name=""):
        self.basis = list(basis)
        self.degree = dict(degree)
        self.weight = dict(weight) if weight else {b: 0 for b in self.basis}
        self.sdeg = {b: d - 1 for b, d in self.degree.items()}
        self.pos = {b: k for k, b in enumerate(self.basis)}
        self.table = {k: dict(v) for k, v in (table or {}).items()}
        self.fn = fn
        if arity_max is None:
            arity_max = max([k for k, v in self.table.items() if v], default=0)
        self.arity_max = arity_max
        self.name = name
        self._cache = {}
        self.ce = None

    def bracket(self, names):
        """l_k on basis names in any order."""
        key, sign = sorted_with_sign(names, self.sdeg, self.pos)
        if not sign:
            return {}
        val = self._cache.get(key)
        if val is None:
            if self.fn is not None:
                val = self.fn(key)
            else:
                val = self.table.get(len(key), {}).get(key, {})
            val = {b: c for b, c in val.items() if c}
            self._cache[key] = val
        return vscale(val, sign) if sign != 1 else val

    def bracket_vec(self, vectors):
        out = {}
        for names, c in expand(vectors):
            vadd(out, self.bracket(names), c)
        return out

    @property
    def curvature(self):
        return self.bracket(())

    def vec_degree(self, v):
        ds = {self.degree[b] for b in v}
        return ds.pop() if len(ds) == 1 else None

    def to_table(self, arity_max=None, wmax=None):
        """Materialize all nonzero brackets up to the given arity."""
        arity_max = self.arity_max if arity_max is None else arity_max
        out = {}
        for k in range(0, arity_max + 1):
            for key in multisets(self.basis, k, self.weight, wmax):
                v = self.bracket(key)
                if v:
                    out.setdefault(k, {})[key] = v
        return out

    def restricted(self, basis):
        """Sub-algebra on a subset of the basis (caller asserts closure)."""
        basis = [b for b in self.basis if b in set(basis)]
        keep = set(basis)
        parent = self

        def fn(key):
            return parent.bracket(key)

        sub = LInftyAlgebra(basis, {b: self.degree[b] for b in basis}, {b: self.weight[b] for b in basis},
                            fn=fn, arity_max=self.arity_max, name=self.name + "|sub")
        sub.keep = keep
        return sub


def linfty_relation(L, names):
    """sum over unshuffles I|J of eps * l(l(c_I), c_J); includes the curvature term."""
    n = len(names)
    degs = [L.sdeg[c] for c in names]
    out = {}
    for mask in range(1 << n):
        I = [k for k in range(n) if mask >> k & 1]
        J = [k for k in range(n) if not mask >> k & 1]
        if not I and not L.curvature:
            continue
        s = unshuffle_sign(degs, I, J)
        inner = L.bracket([names[k] for k in I])
        rest = tuple(names[k] for k in J)
        for y, cy in inner.items():
            vadd(out, L.bracket((y,) + rest), s * cy)
    return out


def check_homotopy_jacobi(L, arity_max, wmax=None, basis=None):
    """Evaluate the homotopy Jacobi identities on all multisets up to arity_max."""
    basis = L.basis if basis is None else basis
    violations = []
    checked = 0
    start = 0 if L.curvature else 1
    for n in range(start, arity_max + 1):
        for key in multisets(basis, n, L.weight, wmax):
            _, sign = sorted_with_sign(key, L.sdeg, L.pos)
            if not sign:
                continue
            checked += 1
            r = linfty_relation(L, key)
            if r:
                violations.append({"arity": n, "inputs": list(key), "residual": r})
    return {"passed": not violations, "checked": checked, "violations": violations[:10],
            "n_violations": len(violations)}


# ---------------------------------------------------------------- CE dictionary

def dual_name_default(g):
    return g + "^"


def derivative_factor(alg, m):
    """(d_{a_k} ... d_{a_1} xi^m)(0) for the sorted generator sequence a of m; and that sequence."""
    seq = []
    for k, e in enumerate(m):
        seq.extend([k] * e)
    p = Poly(alg, {m: QQ(1)})
    for k in seq:
        p = partial(alg, alg.gens[k].name)(p)
    return p.terms.get(alg.one, 0), seq


def ce_sign(shifted):
    k = len(shifted)
    s = k + sum(shifted)
    for a in range(k):
        for b in range(a + 1, k):
            s += shifted[a] * shifted[b]
    return -1 if s % 2 else 1


def ce_to_brackets(alg, D, arity_max=None, dual_name=None, generators=None):
    """Read shifted brackets off a CE differential.

    l_k(e_{a_1},..,e_{a_k})^c = (-1)^{k + sum|a| + sum_{i<j}|a_i||a_j|} (d_{a_k}..d_{a_1} D xi^c)(0)
    with |a| = -deg(xi^a) the shifted degree of the dual basis element.  A
    constant term in D xi^c is curvature l_0.
    """
    dual_name = dual_name or dual_name_default
    gens = generators or [g.name for g in alg.gens]
    names = {g: dual_name(g) for g in gens}
    basis = [names[g] for g in gens]
    degree = {names[g]: 1 - alg.gens[alg.index[g]].degree for g in gens}
    weight = {names[g]: -alg.gens[alg.index[g]].weight for g in gens}
    table = {}
    for g in gens:
        c = names[g]
        img = D.images[alg.index[g]]
        for m, coef in img.terms.items():
            factor, seq = derivative_factor(alg, m)
            if arity_max is not None and len(seq) > arity_max:
                continue
            if any(alg.gens[k].name not in names for k in seq):
                continue
            key = tuple(names[alg.gens[k].name] for k in seq)
            shifted = [-alg.gens[k].degree for k in seq]
            val = ce_sign(shifted) * factor * coef
            slot = table.setdefault(len(key), {}).setdefault(key, {})
            vadd(slot, {c: val})
    L = LInftyAlgebra(basis, degree, weight, table, name="CE")
    L.ce = (alg, D)
    L.generator_of = {v: k for k, v in names.items()}
    return L


def brackets_to_ce(L, gen_name=None, weight_check=True):
    """Inverse dictionary: a free algebra on the duals and its CE differential."""
    gen_name = gen_name or (lambda b: b[:-1] if b.endswith("^") else b + "*")
    gens = [Generator(gen_name(b), 1 - L.degree[b], -L.weight[b]) for b in L.basis]
    alg = FreeSCAlgebra(gens)
    gname = {b: gen_name(b) for b in L.basis}
    images = {gname[b]: {} for b in L.basis}
    for k, entries in L.to_table().items():
        for key, vec in entries.items():
            exps = {}
            for b in key:
                exps[gname[b]] = exps.get(gname[b], 0) + 1
            m = alg.mono(exps)
            factor, seq = derivative_factor(alg, m)
            if not factor:
                continue
            shifted = [-alg.gens[j].degree for j in seq]
            s = ce_sign(shifted)
            for c, val in vec.items():
                vadd(images[gname[c]], {m: val * s / factor})
    D = Derivation(alg, {g: Poly(alg, t) for g, t in images.items()}, 1,
                   0 if weight_check else None, check=weight_check)
    return alg, D


# ---------------------------------------------------------------- twisting

def mc_residual(L, Q):
    """sum_i 1/i! l_i(Q, ..., Q) for Q of shifted degree 0."""
    out = {}
    for i in range(0, L.arity_max + 1):
        vadd(out, L.bracket_vec([Q] * i), QQ(1, math.factorial(i)))
    return out


def twist_linfty(L, Q, check_mc=True):
    """l^Q_k(x) = sum_i 1/i! l_{i+k}(Q^i, x), lazily evaluated."""
    if check_mc:
        res = mc_residual(L, Q)
        if res:
            raise MCError("not a Maurer-Cartan element: residual %s" % vec_str(res), res)
    Q = {b: QQ(c) for b, c in Q.items() if c}
    if not Q:
        return L

    def fn(key):
        out = {}
        for i in range(0, L.arity_max - len(key) + 1):
            vecs = [Q] * i + [{b: QQ(1)} for b in key]
            vadd(out, L.bracket_vec(vecs), QQ(1, math.factorial(i)))
        return out

    T = LInftyAlgebra(L.basis, L.degree, L.weight, fn=fn, arity_max=L.arity_max, name=L.name + "_Q")
    T.twist = Q
    return T


def vec_str(v):
    return " + ".join("%s*%s" % (qstr(c), b) for b, c in sorted(v.items(), key=lambda t: str(t[0]))) or "0"


# ---------------------------------------------------------------- OCHA

class OCHA:
    """Closed L-infinity algebra acting on an open space through n_{p,q}.

    ``ops`` maps (p, q) to a function (sorted closed tuple, open tuple) -> vector
    or to a table {(closed tuple, open tuple): vector}.  Only q >= 1 is stored;
    the q = 0 part is the closed algebra itself.
    """

    def __init__(self, closed, open_basis, open_degree, ops, open_weight=None, name=""):
        self.closed = closed
        self.open_basis = list(open_basis)
        self.open_degree = dict(open_degree)
        self.osdeg = {b: d - 1 for b, d in self.open_degree.items()}
        self.open_weight = dict(open_weight) if open_weight else {b: 0 for b in self.open_basis}
        self.ops = {}
        for pq, v in ops.items():
            self.ops[pq] = v
        self._cache = {}
        self.name = name

    def arities(self):
        return sorted(self.ops)

    def op(self, p_names, o_names):
        """n_{p,q}(c; o) on basis names (closed names in any order)."""
        L = self.closed
        key, sign = sorted_with_sign(p_names, L.sdeg, L.pos)
        if not sign:
            return {}
        pq = (len(key), len(o_names))
        f = self.ops.get(pq)
        if f is None:
            return {}
        ck = (key, tuple(o_names))
        val = self._cache.get(ck)
        if val is None:
            val = f(key, tuple(o_names)) if callable(f) else f.get(ck, {})
            val = {b: c for b, c in val.items() if c}
            self._cache[ck] = val
        return vscale(val, sign) if sign != 1 else val

    def op_vec(self, cvecs, ovecs):
        out = {}
        for cs, c in expand(cvecs):
            for os_, c2 in expand(ovecs):
                vadd(out, self.op(cs, os_), c * c2)
        return out

    def max_closed_arity(self):
        return max([p for p, q in self.ops], default=0)


def ocha_relation(o, cs, os_):
    """Component (cs; os) of the square of the OCHA coderivation."""
    L = o.closed
    p, q = len(cs), len(os_)
    cd = [L.sdeg[c] for c in cs]
    od = [o.osdeg[x] for x in os_]
    out = {}
    # closed bracket feeding an open operation
    for mask in range(1, 1 << p):
        I = [k for k in range(p) if mask >> k & 1]
        J = [k for k in range(p) if not mask >> k & 1]
        s = unshuffle_sign(cd, I, J)
        inner = L.bracket([cs[k] for k in I])
        rest = tuple(cs[k] for k in J)
        for y, cy in inner.items():
            vadd(out, o.op((y,) + rest, os_), s * cy)
    # open operation nested inside an open operation
    for mask in range(1 << p):
        I = [k for k in range(p) if mask >> k & 1]
        J = [k for k in range(p) if not mask >> k & 1]
        s0 = unshuffle_sign(cd, J, I)
        dI = sum(cd[k] for k in I)
        dJ = sum(cd[k] for k in J)
        cI = tuple(cs[k] for k in I)
        cJ = tuple(cs[k] for k in J)
        if (len(cI), 1) not in o.ops and not any((len(cI), j) in o.ops for j in range(1, q + 1)):
            continue
        for j in range(1, q + 1):
            if (len(cI), j) not in o.ops:
                continue
            for r in range(0, q - j + 1):
                if (len(cJ), q - j + 1) not in o.ops:
                    continue
                dpre = sum(od[:r])
                s = s0 * (-1) ** ((dI * dpre + dJ + dpre) % 2)
                inner = o.op(cI, os_[r:r + j])
                for y, cy in inner.items():
                    vadd(out, o.op(cJ, os_[:r] + (y,) + os_[r + j:]), s * cy)
    return out


def check_ocha_coherence(o, total_arity_max, wmax=None, closed_basis=None, open_basis=None,
                         q_min=1, p_max=None, q_max=None):
    """All relations with 1 <= q and p + q <= total_arity_max on window tuples."""
    L = o.closed
    cb = L.basis if closed_basis is None else closed_basis
    ob = o.open_basis if open_basis is None else open_basis
    violations = []
    checked = 0
    for total in range(1, total_arity_max + 1):
        for q in range(max(q_min, 1), total + 1):
            p = total - q
            if p_max is not None and p > p_max:
                continue
            if q_max is not None and q > q_max:
                continue
            for cs in multisets(cb, p):
                _, sign = sorted_with_sign(cs, L.sdeg, L.pos)
                if not sign:
                    continue
                # closed inputs only lower weight, so bound the open inputs alone
                for os_ in tuples(ob, q):
                    if wmax is not None and sum(o.open_weight[x] for x in os_) > wmax:
                        continue
                    checked += 1
                    r = ocha_relation(o, cs, os_)
                    if r:
                        violations.append({"p": p, "q": q, "closed": list(cs), "open": list(os_),
                                           "residual": r})
    return {"passed": not violations, "checked": checked, "violations": violations[:10],
            "n_violations": len(violations)}


def ainfty_part(o):
    """The A-infinity algebra n_{0,q} as an OCHA with trivial closed sector."""
    empty = LInftyAlgebra([], {}, name="0")
    ops = {pq: f for pq, f in o.ops.items() if pq[0] == 0}
    return OCHA(empty, o.open_basis, o.open_degree, ops, o.open_weight, o.name + "|A")


def module_part(o):
    """The L-infinity module n_{p,1}."""
    ops = {pq: f for pq, f in o.ops.items() if pq[1] == 1}
    return OCHA(o.closed, o.open_basis, o.open_degree, ops, o.open_weight, o.name + "|M")


def check_ainfty(o, arity_max, wmax=None, open_basis=None):
    return check_ocha_coherence(ainfty_part(o), arity_max, wmax, open_basis=open_basis)


def check_module(o, arity_max, wmax=None, closed_basis=None, open_basis=None):
    return check_ocha_coherence(module_part(o), arity_max, wmax, closed_basis, open_basis, q_max=1)


def twist_ocha(o, Q, check_mc=True):
    """n^Q_{p,q}(c; o) = sum_i 1/i! n_{p+i,q}(Q^i, c; o); the closed part is twisted too."""
    Q = {b: QQ(c) for b, c in Q.items() if c}
    if not Q:
        return o
    closed = twist_linfty(o.closed, Q, check_mc)
    pmax = o.max_closed_arity()
    qs = sorted({q for p, q in o.ops})
    ops = {}
    for q in qs:
        for p in range(0, pmax + 1):
            if not any((p + i, q) in o.ops for i in range(0, pmax - p + 1)):
                continue

            def fn(key, os_, p=p, q=q):
                out = {}
                for i in range(0, pmax - p + 1):
                    if (p + i, q) not in o.ops:
                        continue
                    vecs = [Q] * i + [{b: QQ(1)} for b in key]
                    vadd(out, o.op_vec(vecs, [{x: QQ(1)} for x in os_]), QQ(1, math.factorial(i)))
                return out
            ops[(p, q)] = fn
    T = OCHA(closed, o.open_basis, o.open_degree, ops, o.open_weight, o.name + "_Q")
    T.twist = Q
    return T


def twist_module(o, Q, check_mc=True):
    return module_part(twist_ocha(module_part(o), Q, check_mc))


def ocha_mc_residual(o, Qc, Qo):
    """(closed residual, open residual) of the pair (Qc, Qo)."""
    closed = mc_residual(o.closed, Qc)
    out = {}
    Qc = {b: QQ(c) for b, c in Qc.items() if c}
    Qo = {b: QQ(c) for b, c in Qo.items() if c}
    if Qo:
        for (p, q) in o.ops:
            vadd(out, o.op_vec([Qc] * p, [Qo] * q), QQ(1, math.factorial(p)))
    return closed, out


# ---------------------------------------------------------------- dumps

def dump_structure(L=None, o=None, arity_max=4, wmax=None, open_tuples=None):
    """JSON-ready list of {inputs, output, coeff} entries, sorted."""
    rows = []
    if L is not None:
        for k, entries in sorted(L.to_table(arity_max, wmax).items()):
            for key, vec in entries.items():
                for b, c in vec.items():
                    rows.append({"arity": [k, 0], "inputs": list(key), "output": b, "coeff": qstr(c)})
    if o is not None and open_tuples is not None:
        for (cs, os_) in open_tuples:
            for b, c in o.op(cs, os_).items():
                rows.append({"arity": [len(cs), len(os_)], "inputs": list(cs) + ["|"] + [str(x) for x in os_],
                             "output": str(b), "coeff": qstr(c)})
    rows.sort(key=lambda r: json.dumps(r, sort_keys=True))
    return rows
