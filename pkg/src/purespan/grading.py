"""Bigraded free supercommutative polynomial algebras over the rationals.

Elements are sparse maps from monomials (exponent tuples in a fixed global
generator order) to exact rational coefficients.  Only the parity of the
cohomological degree produces signs; weights are bookkeeping.
"""

from fractions import Fraction
from typing import NamedTuple

QQ = Fraction


class Bidegree(NamedTuple):
    degree: int
    weight: int

    def __add__(self, other):
        return Bidegree(self.degree + other[0], self.weight + other[1])

    def __sub__(self, other):
        return Bidegree(self.degree - other[0], self.weight - other[1])

    @property
    def parity(self):
        return self.degree % 2


class Generator(NamedTuple):
    name: str
    degree: int
    weight: int
    aux: tuple = ()  # ((weight name, value), ...)

    @property
    def bidegree(self):
        return Bidegree(self.degree, self.weight)

    @property
    def parity(self):
        return self.degree % 2

    def aux_weight(self, key):
        return dict(self.aux).get(key, 0)


def koszul_sign(permutation, degrees):
    """Sign of reordering homogeneous elements v_1..v_n into v_perm(1)..v_perm(n).

    Accepts one-line notation, either 1-based or 0-based.
    """
    n = len(permutation)
    if len(degrees) != n:
        raise ValueError("permutation and degrees have different lengths")
    perm = list(permutation)
    if sorted(perm) == list(range(1, n + 1)):
        perm = [k - 1 for k in perm]
    elif sorted(perm) != list(range(n)):
        raise ValueError("not a permutation: %r" % (permutation,))
    odd = [degrees[k] % 2 for k in perm]
    sign = 1
    for a in range(n):
        if not odd[a]:
            continue
        for b in range(a + 1, n):
            if odd[b] and perm[a] > perm[b]:
                sign = -sign
    return sign


def sort_with_sign(items, degree_of, key=None):
    """Stable-sort items, returning (sorted tuple, Koszul sign).

    Returns sign 0 when an odd element is repeated (graded symmetry kills it).
    """
    key = key or (lambda x: x)
    items = list(items)
    sign = 1
    # insertion sort keeps track of every transposition
    for a in range(1, len(items)):
        b = a
        while b > 0 and key(items[b - 1]) > key(items[b]):
            if degree_of(items[b - 1]) % 2 and degree_of(items[b]) % 2:
                sign = -sign
            items[b - 1], items[b] = items[b], items[b - 1]
            b -= 1
    for a in range(1, len(items)):
        if items[a] == items[a - 1] and degree_of(items[a]) % 2:
            return tuple(items), 0
    return tuple(items), sign


def mono_key(m):
    """Degree-lex sort key: total exponent first, then lexicographically descending."""
    return (sum(m), tuple(-e for e in m))


class FreeSCAlgebra:
    """Free graded-commutative algebra on a list of generators."""

    def __init__(self, generators):
        generators = [g if isinstance(g, Generator) else Generator(*g) for g in generators]
        names = [g.name for g in generators]
        if len(set(names)) != len(names):
            raise ValueError("generator names must be unique")
        self.gens = tuple(generators)
        self.n = len(generators)
        self.index = {g.name: k for k, g in enumerate(generators)}
        self.odd = tuple(g.degree % 2 for g in generators)
        self.deg = tuple(g.degree for g in generators)
        self.wt = tuple(g.weight for g in generators)
        self.one = (0,) * self.n
        self._mul_cache = {}

    def __repr__(self):
        return "FreeSCAlgebra(%s)" % ", ".join(g.name for g in self.gens)

    def __eq__(self, other):
        return isinstance(other, FreeSCAlgebra) and self.gens == other.gens

    def __hash__(self):
        return hash(self.gens)

    def extended(self, new_generators):
        return FreeSCAlgebra(list(self.gens) + list(new_generators))

    def embed_mono(self, m):
        return tuple(m) + (0,) * (self.n - len(m))

    def gen(self, name):
        m = [0] * self.n
        m[self.index[name]] = 1
        return Poly(self, {tuple(m): QQ(1)})

    def unit(self):
        return Poly(self, {self.one: QQ(1)})

    def zero(self):
        return Poly(self, {})

    def const(self, c):
        return Poly(self, {self.one: QQ(c)})

    def mono(self, exps):
        """Monomial from a dict {name: exponent}."""
        m = [0] * self.n
        for name, e in exps.items():
            k = self.index[name]
            if self.odd[k] and e > 1:
                return None
            m[k] = e
        return tuple(m)

    def mono_degree(self, m):
        return sum(e * d for e, d in zip(m, self.deg))

    def mono_weight(self, m):
        return sum(e * w for e, w in zip(m, self.wt))

    def mono_bidegree(self, m):
        return Bidegree(self.mono_degree(m), self.mono_weight(m))

    def mono_aux(self, m, key):
        return sum(e * g.aux_weight(key) for e, g in zip(m, self.gens))

    def mono_mul(self, a, b):
        """Product of two monomials as (sign, monomial); sign 0 means the product vanishes."""
        key = (a, b)
        hit = self._mul_cache.get(key)
        if hit is not None:
            return hit
        odd = self.odd
        sign = 1
        odd_after = 0  # odd generators of a strictly after position j
        for j in range(self.n - 1, -1, -1):
            if odd[j]:
                if b[j]:
                    if a[j]:
                        self._mul_cache[key] = (0, None)
                        return 0, None
                    if odd_after % 2:
                        sign = -sign
                if a[j]:
                    odd_after += 1
        res = (sign, tuple(x + y for x, y in zip(a, b)))
        self._mul_cache[key] = res
        return res

    def mono_str(self, m):
        if not any(m):
            return "1"
        parts = []
        for g, e in zip(self.gens, m):
            if e == 1:
                parts.append(g.name)
            elif e > 1:
                parts.append("%s^%d" % (g.name, e))
        return "*".join(parts)

    def parse_mono(self, text):
        """Inverse of mono_str."""
        exps = {}
        if text.strip() != "1":
            for factor in text.split("*"):
                name, _, e = factor.strip().partition("^")
                if name not in self.index:
                    raise KeyError("unknown generator %r" % name)
                exps[name] = exps.get(name, 0) + (int(e) if e else 1)
        return self.mono(exps)


class Poly:
    """Sparse element of a FreeSCAlgebra; never stores zero coefficients."""

    __slots__ = ("alg", "terms")

    def __init__(self, alg, terms=None):
        self.alg = alg
        self.terms = {m: c for m, c in (terms or {}).items() if c}

    def _check(self, other):
        if isinstance(other, Poly) and other.alg is not self.alg and other.alg != self.alg:
            raise ValueError("polynomials from different algebras")

    def __add__(self, other):
        self._check(other)
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = t.get(m, 0) + c
        return Poly(self.alg, t)

    def __sub__(self, other):
        self._check(other)
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = t.get(m, 0) - c
        return Poly(self.alg, t)

    def __neg__(self):
        return Poly(self.alg, {m: -c for m, c in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = QQ(other)
            return Poly(self.alg, {m: c * v for m, v in self.terms.items()})
        return multiply(self, other)

    def __rmul__(self, other):
        c = QQ(other)
        return Poly(self.alg, {m: c * v for m, v in self.terms.items()})

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms.items())

    def coeff(self, m):
        return self.terms.get(m, QQ(0))

    def bidegrees(self):
        return {self.alg.mono_bidegree(m) for m in self.terms}

    def is_homogeneous(self):
        return len(self.bidegrees()) <= 1

    def homogeneous_parts(self):
        parts = {}
        for m, c in self.terms.items():
            parts.setdefault(self.alg.mono_bidegree(m), {})[m] = c
        return {b: Poly(self.alg, t) for b, t in parts.items()}

    def __repr__(self):
        if not self.terms:
            return "0"
        out = ""
        for m in sorted(self.terms, key=mono_key):
            c = self.terms[m]
            name = self.alg.mono_str(m)
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if name == "1":
                body = str(a)
            elif a == 1:
                body = name
            else:
                body = "%s*%s" % (a, name)
            if not out:
                out = ("-" if c < 0 else "") + body
            else:
                out += " %s %s" % (sign, body)
        return out


def multiply(a, b):
    """Supercommutative product with Koszul signs."""
    if a.alg is not b.alg and a.alg != b.alg:
        raise ValueError("polynomials from different algebras")
    alg = a.alg
    out = {}
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            s, m = alg.mono_mul(ma, mb)
            if s:
                out[m] = out.get(m, 0) + s * ca * cb
    return Poly(alg, out)


class Derivation:
    """Graded derivation determined by its images on generators.

    ``weight`` may be None for derivations that are only weight-filtered
    (twisted differentials, where the twist parameter is bookkept at weight one).
    """

    def __init__(self, alg, images, degree, weight=0, zero_elsewhere=True, check=True):
        self.alg = alg
        self.degree = degree
        self.weight = weight
        imgs = {}
        for key, img in images.items():
            k = alg.index[key] if isinstance(key, str) else key
            if not isinstance(img, Poly):
                img = alg.const(img)
            imgs[k] = img
        if zero_elsewhere:
            for k in range(alg.n):
                imgs.setdefault(k, alg.zero())
        self.images = imgs
        self._cache = {}
        if check:
            for k, img in imgs.items():
                g = alg.gens[k]
                for m in img.terms:
                    bd = alg.mono_bidegree(m)
                    if bd.degree != g.degree + degree:
                        raise ValueError("image of %s is not of degree %d" % (g.name, g.degree + degree))
                    if weight is not None and bd.weight != g.weight + weight:
                        raise ValueError("image of %s is not of weight %d" % (g.name, g.weight + weight))

    @property
    def bidegree(self):
        return Bidegree(self.degree, self.weight)

    def image(self, name):
        return self.images[self.alg.index[name]]

    def __add__(self, other):
        if other.degree != self.degree:
            raise ValueError("cannot add derivations of different degree")
        w = self.weight if self.weight == other.weight else None
        keys = set(self.images) | set(other.images)
        zero = self.alg.zero()
        imgs = {k: self.images.get(k, zero) + other.images.get(k, zero) for k in keys}
        return Derivation(self.alg, imgs, self.degree, w, check=False)

    def __neg__(self):
        return Derivation(self.alg, {k: -v for k, v in self.images.items()}, self.degree, self.weight, check=False)

    def __sub__(self, other):
        return self + (-other)

    def restricted(self, keep):
        """Derivation keeping only the image terms m of each generator with keep(k, m) true."""
        imgs = {}
        for k, img in self.images.items():
            imgs[k] = Poly(self.alg, {m: c for m, c in img.terms.items() if keep(k, m)})
        return Derivation(self.alg, imgs, self.degree, self.weight, check=False)

    def apply_mono(self, m):
        hit = self._cache.get(m)
        if hit is not None:
            return hit
        alg = self.alg
        out = {}
        prefix_odd = 0
        odd_d = self.degree % 2
        n = alg.n
        for k in range(n):
            e = m[k]
            if not e:
                continue
            if k not in self.images:
                raise KeyError("derivation has no image for generator %s" % alg.gens[k].name)
            img = self.images[k]
            if img.terms:
                sign = -1 if (odd_d and prefix_odd % 2) else 1
                coef = sign * (1 if alg.odd[k] else e)
                left = list(m[: k + 1]) + [0] * (n - k - 1)
                left[k] -= 1
                left = tuple(left)
                right = (0,) * (k + 1) + tuple(m[k + 1:])
                for mi, ci in img.terms.items():
                    s1, lm = alg.mono_mul(left, mi)
                    if not s1:
                        continue
                    s2, full = alg.mono_mul(lm, right)
                    if not s2:
                        continue
                    out[full] = out.get(full, 0) + coef * s1 * s2 * ci
            if alg.odd[k]:
                prefix_odd += e
        res = {mm: c for mm, c in out.items() if c}
        self._cache[m] = res
        return res

    def apply_terms(self, terms):
        out = {}
        for m, c in terms.items():
            for mm, cc in self.apply_mono(m).items():
                out[mm] = out.get(mm, 0) + c * cc
        return {mm: c for mm, c in out.items() if c}

    def __call__(self, p):
        return apply_derivation(self, p)


def apply_derivation(D, p):
    if p.alg is not D.alg and p.alg != D.alg:
        raise ValueError("derivation and polynomial live in different algebras")
    return Poly(D.alg, D.apply_terms(p.terms))


def partial(alg, name):
    """Left partial derivative with respect to a generator."""
    g = alg.gens[alg.index[name]]
    return Derivation(alg, {name: alg.unit()}, -g.degree, -g.weight, check=False)


class TruncationWindow(NamedTuple):
    degree_min: object = None
    degree_max: object = None
    weight_max: int = 6
    weight_min: object = None

    def contains(self, bideg):
        d, w = bideg
        if self.degree_min is not None and d < self.degree_min:
            return False
        if self.degree_max is not None and d > self.degree_max:
            return False
        if self.weight_min is not None and w < self.weight_min:
            return False
        return w <= self.weight_max


def check_window_finite(alg):
    bad = [g.name for g in alg.gens if not g.parity and g.weight < 1]
    if bad:
        raise ValueError("infinite window: even generators of weight < 1 (%s)" % ", ".join(bad))


def window_basis(alg, window):
    """All monomials whose bidegree lies in the window, in degree-lex order."""
    check_window_finite(alg)
    wmax = window.weight_max
    gens = alg.gens
    n = alg.n
    # slack from odd generators of negative weight still to come
    neg_tail = [0] * (n + 1)
    for k in range(n - 1, -1, -1):
        neg_tail[k] = neg_tail[k + 1] + min(0, gens[k].weight if gens[k].parity else 0)
    out = []
    cur = [0] * n

    def rec(k, w):
        if k == n:
            m = tuple(cur)
            if window.contains(alg.mono_bidegree(m)):
                out.append(m)
            return
        g = gens[k]
        top = 1 if g.parity else (wmax - w - neg_tail[k + 1]) // g.weight
        for e in range(0, max(top, 0) + 1):
            if w + e * g.weight + neg_tail[k + 1] > wmax:
                break
            cur[k] = e
            rec(k + 1, w + e * g.weight)
        cur[k] = 0

    rec(0, 0)
    out.sort(key=mono_key)
    return out


def square_zero_check(D, window=None):
    """Apply D twice to every generator; D^2 = 0 on generators implies D^2 = 0 (D odd)."""
    violations = []
    for k, g in enumerate(D.alg.gens):
        if window is not None and not window.contains(g.bidegree):
            continue
        twice = D.apply_terms(D.images[k].terms)
        if twice:
            violations.append((g.name, repr(Poly(D.alg, twice))))
    return {"passed": not violations, "violations": violations}
