"""Homotopy transfer of L-infinity, A-infinity and open-closed structures.

In the shifted convention leaves carry i, internal edges carry -h (the minus
sign belongs to the retract convention id - ip = dh + hd), the root carries
p, and every vertex is a source operation of arity >= 2.  The only sign is the
Koszul sign of rearranging the inputs into the order in which the tree reads
them.

Two routes are provided: a memoized recursion (used for the transferred
structures) and explicit tree enumeration with tree-by-tree evaluation.
"""

import itertools

from .grading import QQ, koszul_sign
from .homology import LinMap, vadd, vscale
from .linfty import LInftyAlgebra, OCHA, ainfty_part


# ---------------------------------------------------------------- retract views

class BasisRetract:
    """The data transfer needs from a retract: maps plus the small basis with gradings."""

    def __init__(self, i, p, h, small_basis, small_degree, small_weight, small_d=None, h_zero=False):
        self.i = i
        self.p = p
        self.h = h
        self.small_basis = list(small_basis)
        self.small_degree = dict(small_degree)
        self.small_weight = dict(small_weight)
        self.small_d = small_d
        self.h_zero = h_zero


def identity_retract(L):
    ident = LinMap(lambda k: {k: QQ(1)}, 0, "id")
    return BasisRetract(ident, ident, LinMap.zero(-1), L.basis, L.degree, L.weight, None, True)


def view(r):
    """BasisRetract from a homology Retract (keys of the small complex, degree/weight from blocks)."""
    if isinstance(r, BasisRetract):
        return r
    keys = r.small.keys()
    deg = {k: r.small.block_of[k][0] for k in keys}
    wt = {k: r.small.block_of[k][1] for k in keys}
    return BasisRetract(r.i, r.p, r.h, keys, deg, wt, r.small.d, False)


# ---------------------------------------------------------------- combinatorics

def set_partitions(items):
    """All set partitions of a list (blocks keep the input order)."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for k in range(len(part)):
            yield part[:k] + [[first] + part[k]] + part[k + 1:]


def compositions(q, k):
    """Cut points splitting range(q) into k consecutive nonempty blocks."""
    for cuts in itertools.combinations(range(1, q), k - 1):
        bounds = (0,) + cuts + (q,)
        yield [list(range(bounds[j], bounds[j + 1])) for j in range(k)]


# ---------------------------------------------------------------- recursion route

class Transfer:
    """Memoized tree sums for an OCHA along (closed retract, open retract)."""

    def __init__(self, rc, ro, source):
        self.rc = view(rc) if rc is not None else None
        self.ro = view(ro) if ro is not None else None
        self.src = source
        self.L = source.closed if isinstance(source, OCHA) else source
        self._tc = {}
        self._to = {}

    # closed side: inputs are small closed basis names
    def csdeg(self, c):
        return self.rc.small_degree[c] - 1

    def osdeg(self, o):
        return self.ro.small_degree[o] - 1

    def closed_tree(self, cs):
        """Sum over rooted trees with leaves cs of the big-side value (before p or -h)."""
        key = tuple(cs)
        hit = self._tc.get(key)
        if hit is not None:
            return hit
        out = {}
        n = len(cs)
        degs = [self.csdeg(c) for c in cs]
        for part in set_partitions(range(n)):
            if len(part) < 2:
                continue
            children = [self.closed_child([cs[k] for k in b]) for b in part]
            if any(not ch for ch in children):
                continue
            perm = [k for b in part for k in b]
            s = koszul_sign(perm, degs)
            vadd(out, self.L.bracket_vec(children), s)
        self._tc[key] = out
        return out

    def closed_child(self, block):
        if len(block) == 1:
            return self.rc.i.on_key(block[0])
        if self.rc.h_zero:
            return {}
        return vscale(self.rc.h(self.closed_tree(block)), -1)

    def open_tree(self, cs, os_):
        """Sum over open-closed trees with closed leaves cs and open leaves os_ (root excluded from (0,1))."""
        key = (tuple(cs), tuple(os_))
        hit = self._to.get(key)
        if hit is not None:
            return hit
        out = {}
        p, q = len(cs), len(os_)
        degs = [self.csdeg(c) for c in cs] + [self.osdeg(o) for o in os_]
        src = self.src
        for k in range(1, q + 1):
            for oblocks in compositions(q, k):
                for assign in itertools.product(range(k + 1), repeat=p):
                    root = [a for a in range(p) if assign[a] == 0]
                    if not root and k == 1:
                        continue
                    cblocks_open = [[a for a in range(p) if assign[a] == b + 1] for b in range(k)]
                    open_children = []
                    ok = True
                    for b in range(k):
                        ch = self.open_child([cs[a] for a in cblocks_open[b]], [os_[j] for j in oblocks[b]])
                        if not ch:
                            ok = False
                            break
                        open_children.append(ch)
                    if not ok:
                        continue
                    for part in set_partitions(root):
                        if (len(part), k) == (0, 1) or (len(part), k) not in src.ops:
                            continue
                        closed_children = [self.closed_child([cs[a] for a in b]) for b in part]
                        if any(not ch for ch in closed_children):
                            continue
                        perm = [a for b in part for a in b]
                        for b in range(k):
                            perm += cblocks_open[b] + [p + j for j in oblocks[b]]
                        s = koszul_sign(perm, degs)
                        vadd(out, src.op_vec(closed_children, open_children), s)
        self._to[key] = out
        return out

    def open_child(self, cblock, oblock):
        if not cblock and len(oblock) == 1:
            return self.ro.i.on_key(oblock[0])
        return vscale(self.ro.h(self.open_tree(cblock, oblock)), -1)

    # transferred operations
    def closed_op(self, cs):
        if len(cs) == 1:
            if self.rc.small_d is None:
                return self.rc.p(self.L.bracket_vec([self.rc.i.on_key(cs[0])]))
            return self.rc.small_d.on_key(cs[0])
        return self.rc.p(self.closed_tree(cs))

    def open_op(self, cs, os_):
        if not cs and len(os_) == 1:
            return self.ro.small_d.on_key(os_[0])
        return self.ro.p(self.open_tree(cs, os_))


def transfer_linfty(r, L, arity_max, name=""):
    """Transferred brackets l'_k, k <= arity_max, on the small side of r."""
    empty = OCHA(L, [], {}, {})
    tr = Transfer(r, None, empty)
    rc = tr.rc

    def fn(key):
        if len(key) == 0 or len(key) > arity_max:
            return {}
        return tr.closed_op(list(key))

    out = LInftyAlgebra(rc.small_basis, rc.small_degree, rc.small_weight, fn=fn, arity_max=arity_max,
                        name=name or "transferred")
    out.transfer = tr
    return out


def transfer_ocha(rc, ro, source, total_arity_max, wmax=None, name=""):
    """Transferred OCHA; the closed part is transferred along rc (identity_retract for none)."""
    if rc is None:
        rc = identity_retract(source.closed)
    tr = Transfer(rc, ro, source)
    rcv, rov = tr.rc, tr.ro
    if rcv.h_zero and rcv.small_basis == source.closed.basis:
        closed = source.closed
    else:
        def cfn(key):
            if len(key) == 0 or len(key) > total_arity_max:
                return {}
            return tr.closed_op(list(key))
        closed = LInftyAlgebra(rcv.small_basis, rcv.small_degree, rcv.small_weight, fn=cfn,
                               arity_max=total_arity_max, name="closed'")
    ops = {}
    pmax = total_arity_max
    for p in range(0, pmax + 1):
        for q in range(1, total_arity_max - p + 1):
            def fn(cs, os_, p=p, q=q):
                return tr.open_op(list(cs), list(os_))
            ops[(p, q)] = fn
    out = OCHA(closed, rov.small_basis, rov.small_degree, ops, rov.small_weight, name or "transferred")
    out.transfer = tr
    return out


def transfer_ainfty(r, source, arity_max, name=""):
    """A-infinity transfer: the open part of an OCHA (or an A-infinity OCHA) along r."""
    a = ainfty_part(source)
    return transfer_ocha(identity_retract(a.closed), r, a, arity_max, name=name or "A'")


# ---------------------------------------------------------------- explicit trees

def enumerate_trees(arity, flavor="planar", p=None, q=None):
    """Trees as nested tuples.

    ("c", i) / ("o", j) are leaves; ("C", children) is a closed vertex;
    ("O", closed_children, open_children) an open vertex.  flavor "planar"
    gives A-infinity trees with ``arity`` open leaves, "rooted" gives L-infinity
    trees on ``arity`` labelled leaves, "ocha" gives trees with p closed and q
    open leaves.
    """
    if flavor == "planar":
        return list(_open_trees((), tuple(range(arity)), True))
    if flavor == "rooted":
        return list(_closed_trees(tuple(range(arity)), True))
    if flavor == "ocha":
        return list(_open_trees(tuple(range(p)), tuple(range(q)), True))
    raise ValueError("unknown tree flavor %r" % flavor)


def _closed_trees(leaves, root=False):
    if len(leaves) == 1:
        yield ("c", leaves[0])
        return
    for part in set_partitions(leaves):
        if len(part) < 2:
            continue
        for kids in itertools.product(*[list(_closed_trees(tuple(b))) for b in part]):
            yield ("C", tuple(kids))


def _open_trees(cleaves, oleaves, root=False):
    if not cleaves and len(oleaves) == 1 and not root:
        yield ("o", oleaves[0])
        return
    p, q = len(cleaves), len(oleaves)
    for k in range(1, q + 1):
        for oblocks in compositions(q, k):
            for assign in itertools.product(range(k + 1), repeat=p):
                rootc = [cleaves[a] for a in range(p) if assign[a] == 0]
                cb = [tuple(cleaves[a] for a in range(p) if assign[a] == b + 1) for b in range(k)]
                open_sets = []
                for b in range(k):
                    ob = tuple(oleaves[j] for j in oblocks[b])
                    if (cb[b], ob) == (cleaves, oleaves):
                        open_sets = None
                        break
                    open_sets.append(list(_open_trees(cb[b], ob)))
                if open_sets is None:
                    continue
                for part in set_partitions(rootc):
                    if (len(part), k) == (0, 1):
                        continue
                    csets = [list(_closed_trees(tuple(b))) for b in part]
                    for ckids in itertools.product(*csets):
                        for okids in itertools.product(*open_sets):
                            yield ("O", tuple(ckids), tuple(okids))


def tree_shape(tree):
    """(closed children, open children) of every vertex, root first."""
    out = []

    def walk(t):
        if t[0] == "C":
            out.append((len(t[1]), 0))
            for k in t[1]:
                walk(k)
        elif t[0] == "O":
            out.append((len(t[1]), len(t[2])))
            for k in t[1] + t[2]:
                walk(k)
    walk(tree)
    return out


def leaf_order(tree, p):
    """Input positions in reading order; open leaf j is position p + j."""
    if tree[0] == "c":
        return [tree[1]]
    if tree[0] == "o":
        return [p + tree[1]]
    if tree[0] == "C":
        return [x for k in tree[1] for x in leaf_order(k, p)]
    return [x for k in tree[1] + tree[2] for x in leaf_order(k, p)]


def evaluate_tree(tree, rc, ro, source, cs, os_):
    """Value of one decorated tree on small inputs (closed names cs, open names os_)."""
    rc = view(rc) if rc is not None else None
    ro = view(ro) if ro is not None else None
    L = source.closed if isinstance(source, OCHA) else source
    p = len(cs)

    def ev(t, root):
        if t[0] == "c":
            return rc.i.on_key(cs[t[1]])
        if t[0] == "o":
            return ro.i.on_key(os_[t[1]])
        if t[0] == "C":
            v = L.bracket_vec([ev(k, False) for k in t[1]])
            return rc.p(v) if root else vscale(rc.h(v), -1)
        v = source.op_vec([ev(k, False) for k in t[1]], [ev(k, False) for k in t[2]])
        return ro.p(v) if root else vscale(ro.h(v), -1)

    degs = [rc.small_degree[c] - 1 for c in cs] + ([ro.small_degree[o] - 1 for o in os_] if ro else [])
    s = koszul_sign(leaf_order(tree, p), degs)
    return vscale(ev(tree, True), s)
