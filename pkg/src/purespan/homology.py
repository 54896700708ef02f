"""Exact cohomology, strong deformation retracts and the perturbation lemma.

Vectors are dicts key -> rational; keys are basis labels of a window complex.
All retracts use the convention id - ip = dh + hd, so the perturbation
series carry the homotopy with a minus sign.
"""

from .grading import QQ


class NotSmallError(RuntimeError):
    pass


# ---------------------------------------------------------------- vectors

def vadd(acc, v, c=1):
    for k, x in v.items():
        y = acc.get(k, 0) + c * x
        if y:
            acc[k] = y
        else:
            acc.pop(k, None)
    return acc


def vscale(v, c):
    return {k: c * x for k, x in v.items()} if c else {}


def vsub(a, b):
    return vadd(dict(a), b, -1)


class LinMap:
    """Linear map given on basis keys, extended linearly; results are cached."""

    def __init__(self, fn, degree=0, name=""):
        self.fn = fn
        self.degree = degree
        self.name = name
        self._cache = {}

    @classmethod
    def from_table(cls, table, degree=0, name=""):
        return cls(lambda k: table.get(k, {}), degree, name)

    @classmethod
    def zero(cls, degree=0):
        return cls(lambda k: {}, degree, "0")

    def on_key(self, k):
        hit = self._cache.get(k)
        if hit is None:
            hit = {kk: c for kk, c in self.fn(k).items() if c}
            self._cache[k] = hit
        return hit

    def __call__(self, v):
        out = {}
        for k, c in v.items():
            img = self.on_key(k)
            if img:
                vadd(out, img, c)
        return out


def compose(*maps):
    """compose(f, g, h)(v) = f(g(h(v)))."""
    def fn(k):
        v = {k: QQ(1)}
        for f in reversed(maps):
            v = f(v)
            if not v:
                break
        return v
    return LinMap(fn, sum(f.degree for f in maps))


# ---------------------------------------------------------------- echelon

class Echelon:
    """Fully reduced echelon form with optional tracking of combinations.

    After add(v, tag) the rows span the added vectors; reduce(v) returns the
    residual and the coefficients c_tag with v = residual + sum c_tag * v_tag.
    Pivots are the smallest index (under ``order``) of the residual.
    """

    def __init__(self, order=None, track=True):
        self.order = order
        self.track = track
        self.rows = {}  # pivot -> (vec, combo)
        self.tags = []

    def __len__(self):
        return len(self.rows)

    def reduce(self, v):
        r = dict(v)
        combo = {}
        for k in list(r):
            c = r.get(k)
            if not c or k not in self.rows:
                continue
            vec, cmb = self.rows[k]
            vadd(r, vec, -c)
            if self.track:
                vadd(combo, cmb, c)
        return r, combo

    def add(self, v, tag=None):
        r, combo = self.reduce(v)
        if not r:
            return False, combo
        piv = min(r, key=self.order) if self.order else min(r)
        c = r[piv]
        inv = 1 / QQ(c)
        r = {k: x * inv for k, x in r.items()}
        cmb = {}
        if self.track:
            cmb = vscale(combo, -inv)
            cmb[tag] = cmb.get(tag, 0) + inv
        # keep the form fully reduced
        for p, (vec, vc) in list(self.rows.items()):
            x = vec.get(piv)
            if x:
                vec = vadd(dict(vec), r, -x)
                if self.track:
                    vc = vadd(dict(vc), cmb, -x)
                self.rows[p] = (vec, vc)
        self.rows[piv] = (r, cmb)
        self.tags.append(tag)
        return True, None

    def rank(self):
        return len(self.rows)


def rank_of(vectors, order=None):
    e = Echelon(order, track=False)
    for v in vectors:
        e.add(v)
    return e.rank()


# ---------------------------------------------------------------- complexes

class WindowComplex:
    """A finite complex: basis per block and a degree +1 differential.

    ``blocks`` maps a block label (degree, weight) to an ordered key list.  When
    the differential preserves weight (``d_weight == 0``) cohomology is taken
    per bidegree; otherwise blocks of equal degree are merged.
    ``trusted`` is a predicate on block labels (False inside the margin).
    """

    def __init__(self, blocks, d, d_weight=0, trusted=None, name=""):
        self.blocks = {b: list(keys) for b, keys in blocks.items() if keys}
        self.d = d if isinstance(d, LinMap) else LinMap(d, 1, "d")
        self.d_weight = d_weight
        self.trusted = trusted or (lambda b: True)
        self.name = name
        self.block_of = {}
        for b, keys in self.blocks.items():
            for k in keys:
                self.block_of[k] = b

    def keys(self):
        out = []
        for b in sorted(self.blocks):
            out.extend(self.blocks[b])
        return out

    def degree_blocks(self):
        """Blocks on which cohomology is computed."""
        if self.d_weight == 0:
            return {b: keys for b, keys in self.blocks.items()}
        merged = {}
        for (deg, w), keys in sorted(self.blocks.items()):
            merged.setdefault((deg, None), []).extend(keys)
        return merged

    def dims(self):
        return {b: len(k) for b, k in self.blocks.items()}


def _next_block(b, d_weight):
    deg, w = b
    if d_weight == 0:
        return (deg + 1, w)
    return (deg + 1, None)


class CohomologyData:
    def __init__(self, complex_, reps, i, p, h, dims):
        self.complex = complex_
        self.reps = reps  # block -> list of (key, cocycle vector)
        self.i = i
        self.p = p
        self.h = h
        self.dims = dims  # block -> dim H


def cohomology(c, prefer=None):
    """Cohomology with representatives and a strong retract onto it.

    Decomposes each block as B + H + S where S are pivot basis vectors of d,
    B = d(S of the previous block) and H is spanned by chosen cocycles.
    Cocycles whose key satisfies ``prefer`` are tried first as representatives.
    """
    blocks = c.degree_blocks()
    order = {}
    for b, keys in blocks.items():
        for pos, k in enumerate(keys):
            order[k] = pos

    def okey(k):
        pos = order.get(k)
        return (0, pos, ()) if pos is not None else (1, 0, k)

    image_ech = {}   # block -> Echelon of d(S) inside next block, tagged by S keys
    pivots = {}      # block -> list of S keys
    kernel = {}      # block -> list of (key, cocycle)
    for b, keys in blocks.items():
        ech = Echelon(okey)
        S, Z = [], []
        for k in keys:
            dk = c.d.on_key(k)
            added, combo = ech.add(dk, k)
            if added:
                S.append(k)
            else:
                z = {k: QQ(1)}
                vadd(z, combo, -1)
                Z.append((k, z))
        image_ech[b] = ech
        pivots[b] = S
        kernel[b] = Z

    prev = {}
    for b in blocks:
        prev[_next_block(b, c.d_weight)] = b

    reps, split, dims = {}, {}, {}
    for b, keys in blocks.items():
        f = Echelon(okey)
        pb = prev.get(b)
        if pb is not None:
            for s in pivots[pb]:
                f.add(c.d.on_key(s), ("B", s))
        H = []
        cands = kernel[b]
        if prefer is not None:
            cands = [kz for kz in cands if prefer(kz[0])] + [kz for kz in cands if not prefer(kz[0])]
        for k, z in cands:
            added, _ = f.add(z, ("H", k))
            if added:
                H.append((k, z))
        reps[b] = H
        split[b] = f
        dims[b] = len(H)

    rep_vec = {k: z for b in reps for k, z in reps[b]}
    small_block = {k: b for b in reps for k, _ in reps[b]}

    def decompose(key):
        b = c.block_of[key]
        if c.d_weight != 0:
            b = (b[0], None)
        v = {key: QQ(1)}
        dv = c.d.on_key(key)
        s_part = {}
        if dv:
            r, combo = image_ech[b].reduce(dv)
            if r:
                raise ArithmeticError("d(%r) not in span of pivot images" % (key,))
            s_part = combo
        z = vadd(dict(v), s_part, -1)
        r, combo = split[b].reduce(z)
        if r:
            raise ArithmeticError("cocycle %r not decomposed" % (key,))
        hp = {}
        bp = {}
        for (kind, lab), x in combo.items():
            if kind == "H":
                hp[lab] = x
            else:
                bp[lab] = x
        return hp, bp

    cache = {}

    def dec(key):
        hit = cache.get(key)
        if hit is None:
            hit = decompose(key)
            cache[key] = hit
        return hit

    p = LinMap(lambda k: dec(k)[0], 0, "p")
    h = LinMap(lambda k: dec(k)[1], -1, "h")
    i = LinMap(lambda k: rep_vec.get(k, {}), 0, "i")
    data = CohomologyData(c, reps, i, p, h, dims)
    data.small_block = small_block
    return data


class Retract:
    """Strong deformation retract (big, small, i, p, h) with id - ip = dh + hd."""

    def __init__(self, big, small, i, p, h, multiplicative=None, name=""):
        self.big = big
        self.small = small
        self.i = i
        self.p = p
        self.h = h
        self.multiplicative = multiplicative  # (product_big, product_small) or None
        self.name = name
        self.corrections = None


def build_strong_retract(c, prefer=None):
    data = cohomology(c, prefer)
    blocks = {}
    for b, H in data.reps.items():
        for k, _ in H:
            blk = c.block_of[k]
            blocks.setdefault(blk, []).append(k)
    small = WindowComplex(blocks, LinMap.zero(1), c.d_weight, c.trusted, c.name + "/H")
    r = Retract(c, small, data.i, data.p, data.h, name="cohomology")
    r.cohomology = data
    return r


def verify_retract(r, keys_big=None, keys_small=None, products=None):
    """Check pi = id, id - ip = dh + hd, hh = 0, hi = 0, ph = 0 exactly.

    ``products``: optional (mul_big, mul_small, pairs_big, pairs_small); when given,
    also checks that i, p are algebra maps and h is an (ip, id)-derivation.
    Returns a report with per-identity violation counts and examples.
    """
    big, small = r.big, r.small
    keys_big = big.keys() if keys_big is None else keys_big
    keys_small = small.keys() if keys_small is None else keys_small
    d, ds = big.d, small.d
    i, p, h = r.i, r.p, r.h
    fails = {"pi=id": [], "id-ip=dh+hd": [], "hh=0": [], "hi=0": [], "ph=0": [],
             "i chain": [], "p chain": []}
    for k in keys_small:
        ik = i.on_key(k)
        if p(ik) != {k: 1}:
            fails["pi=id"].append(k)
        if h(ik):
            fails["hi=0"].append(k)
        if vsub(d(ik), i(ds.on_key(k))):
            fails["i chain"].append(k)
    for k in keys_big:
        hk = h.on_key(k)
        lhs = vsub({k: QQ(1)}, i(p.on_key(k)))
        rhs = vadd(d(hk), h(d.on_key(k)))
        if vsub(lhs, rhs):
            fails["id-ip=dh+hd"].append(k)
        if h(hk):
            fails["hh=0"].append(k)
        if p(hk):
            fails["ph=0"].append(k)
        if vsub(p(d.on_key(k)), ds(p.on_key(k))):
            fails["p chain"].append(k)
    if products is not None:
        mul_big, mul_small, pairs_big, pairs_small = products
        fails.update({"i algebra map": [], "p algebra map": [], "h (ip,id)-derivation": []})
        for a, b in pairs_small:
            if vsub(i(mul_small(a, b)), mul_vec(mul_big, i.on_key(a), i.on_key(b))):
                fails["i algebra map"].append((a, b))
        for a, b in pairs_big:
            ab = mul_big(a, b)
            if vsub(p(ab), mul_vec(mul_small, p.on_key(a), p.on_key(b))):
                fails["p algebra map"].append((a, b))
            lhs = h(ab)
            # h(ab) = h(a) b + (-1)^{|a|} ip(a) h(b)
            sa = (-1) ** (big_degree(big, a) % 2)
            rhs = mul_vec(mul_big, h.on_key(a), {b: QQ(1)})
            vadd(rhs, mul_vec(mul_big, i(p.on_key(a)), h.on_key(b)), sa)
            if vsub(lhs, rhs):
                fails["h (ip,id)-derivation"].append((a, b))
    report = {name: {"violations": len(v), "examples": [repr(x) for x in v[:3]]} for name, v in fails.items()}
    report["passed"] = all(not v for v in fails.values())
    return report


def big_degree(c, key):
    return c.block_of[key][0]


def mul_vec(mul, u, v):
    out = {}
    for a, x in u.items():
        for b, y in v.items():
            vadd(out, mul(a, b), x * y)
    return out


# ---------------------------------------------------------------- perturbation

class Perturbation:
    def __init__(self, x, filtration="weight", direction="lowers"):
        self.x = x if isinstance(x, LinMap) else LinMap(x, 1, "x")
        self.filtration = filtration
        self.direction = direction


def _series(start, step, cap, what):
    """Yield start, step(start), step(step(start)), ... until zero; cap is a hard limit."""
    terms = []
    t = start
    k = 0
    while t:
        terms.append(t)
        if k >= cap:
            raise NotSmallError("perturbation series for %s did not terminate within %d steps" % (what, cap))
        t = step(t)
        k += 1
    return terms


def perturb_retract(r, pert, cap):
    """Homological perturbation lemma (convention id - ip = dh + hd).

    i' = sum (-hx)^k i,  p' = p sum (-xh)^k,  h' = h sum (-xh)^k,
    d'_small = d_small + p sum (-xh)^k x i.
    The per-order corrections to d'_small are kept in ``corrections``.
    """
    if not isinstance(pert, Perturbation):
        pert = Perturbation(pert)
    x = pert.x
    h, i, p = r.h, r.i, r.p
    what = "filtration %s" % pert.filtration

    def neg_hx(v):
        return vscale(h(x(v)), -1)

    def neg_xh(v):
        return vscale(x(h(v)), -1)

    def i_new(k):
        out = {}
        for t in _series(i.on_key(k), neg_hx, cap, what):
            vadd(out, t)
        return out

    def p_new(k):
        out = {}
        for t in _series({k: QQ(1)}, neg_xh, cap, what):
            vadd(out, p(t))
        return out

    def h_new(k):
        out = {}
        for t in _series({k: QQ(1)}, neg_xh, cap, what):
            vadd(out, h(t))
        return out

    corr = {}

    def d_small_new(k):
        out = dict(r.small.d.on_key(k))
        orders = []
        for t in _series(x(i.on_key(k)), neg_xh, cap, what):
            pt = p(t)
            orders.append(pt)
            vadd(out, pt)
        corr[k] = orders
        return out

    d_big = LinMap(lambda k: vadd(dict(r.big.d.on_key(k)), x.on_key(k)), 1, "d+x")
    big = WindowComplex(r.big.blocks, d_big, None if pert.direction == "lowers" else r.big.d_weight,
                        r.big.trusted, r.big.name + "+x")
    ds = LinMap(d_small_new, 1, "d'")
    small = WindowComplex(r.small.blocks, ds, big.d_weight, r.small.trusted, r.small.name + "'")
    out = Retract(big, small, LinMap(i_new, 0, "i'"), LinMap(p_new, 0, "p'"), LinMap(h_new, -1, "h'"),
                  r.multiplicative, r.name + "'")
    out.corrections = corr
    out.base = r
    out.perturbation = pert
    return out


# ---------------------------------------------------------------- from algebras

def complex_from_derivation(D, window, name="", reducer=None):
    """Window complex on all monomials of weight <= window.weight_max.

    The full weight-truncated space is finite and closed under weight-preserving
    or weight-lowering differentials, so no margin is needed in the weight
    direction; only degrees strictly inside the degree window are trusted.
    ``reducer`` (monomial -> dict) applies a normal form for quotient algebras.
    """
    from .grading import TruncationWindow, window_basis
    alg = D.alg
    full = TruncationWindow(None, None, window.weight_max, window.weight_min)
    basis = window_basis(alg, full)
    if reducer is not None:
        basis = [m for m in basis if reducer(m) == {m: 1}]
    blocks = {}
    for m in basis:
        blocks.setdefault(alg.mono_bidegree(m), []).append(m)

    if reducer is None:
        fn = D.apply_mono
    else:
        def fn(m):
            out = {}
            for mm, c in D.apply_mono(m).items():
                vadd(out, reducer(mm), c)
            return out

    lo, hi = window.degree_min, window.degree_max

    def trusted(b):
        deg = b[0]
        return (lo is None or deg > lo) and (hi is None or deg < hi)

    return WindowComplex(blocks, LinMap(fn, 1, name or "d"), D.weight, trusted, name)
