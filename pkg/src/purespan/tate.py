"""Tate resolution of the pure spinor ring, and the L-infinity ideal it defines.

Stage 0 is C[l], stage 1 is C(t).  Stage k >= 2 adjoins generators of
bidegree (-k, w) killing H^{-k+1} weight by weight; the weight of a new
generator equals the weight of the class it kills.
"""

from .grading import QQ, Generator, FreeSCAlgebra, Poly, Derivation, TruncationWindow, window_basis
from .homology import WindowComplex, LinMap, cohomology, complex_from_derivation
from .linfty import ce_to_brackets, check_homotopy_jacobi, multisets, sorted_with_sign
from .multiplets import ce_of_t, t_duals, QuotientRing


class WindowExhausted(RuntimeError):
    pass


class MinimalityError(RuntimeError):
    pass


class TateState:
    def __init__(self, gamma, alg, d, stage, log, window):
        self.gamma = gamma
        self.alg = alg
        self.d = d
        self.stage = stage
        self.log = log  # list of {"stage": k, "generators": [(bidegree, count)]}
        self.window = window
        self.closed = False

    def stage_of(self, name):
        if name.startswith("l"):
            return 0
        if name.startswith("v"):
            return 1
        return int(name[1:].split("_")[0])

    def generators(self, stage_min=0):
        return [g for g in self.alg.gens if self.stage_of(g.name) >= stage_min]

    def complex(self, window=None):
        return complex_from_derivation(self.d, window or self.window, "C(t~)")

    def cohomology_table(self, window=None):
        """{(degree, weight): dim H} over the weight window."""
        data = cohomology(self.complex(window))
        return {b: n for b, n in data.dims.items()}, data

    def stage_log(self):
        return [{"stage": e["stage"],
                 "generators": [{"bidegree": list(b), "count": n} for b, n in e["generators"]]}
                for e in self.log]


def _block_cohomology(alg, d, deg, w):
    """Representatives of H^deg at weight w (needs degrees deg-1, deg, deg+1 at weight w)."""
    win = TruncationWindow(deg - 1, deg + 1, w, w)
    basis = window_basis(alg, win)
    blocks = {}
    for m in basis:
        blocks.setdefault(alg.mono_bidegree(m), []).append(m)
    c = WindowComplex(blocks, LinMap(d.apply_mono, 1), 0)
    data = cohomology(c)
    return [z for _, z in data.reps.get((deg, w), [])]


def tate_resolve(gamma, weight_max=6, stage_max=4, degree_min=-4, degree_max=2):
    window = TruncationWindow(degree_min, degree_max, weight_max)
    alg, d = ce_of_t(gamma)
    log = [{"stage": 0, "generators": [((0, 1), gamma.n_odd)]}]
    nv = sum(1 for g in alg.gens if g.name.startswith("v"))
    log.append({"stage": 1, "generators": [((-1, 2), nv)] if nv else []})
    state = TateState(gamma, alg, d, 1, log, window)
    for k in range(2, stage_max + 1):
        if _closed(state):
            state.closed = True
            log.append({"stage": k, "generators": []})
            break
        added = {}
        for w in range(1, weight_max + 1):
            reps = _block_cohomology(state.alg, state.d, -k + 1, w)
            if not reps:
                continue
            if -k < degree_min:
                raise WindowExhausted("stage %d needs generators of bidegree (%d,%d) below degree_min %d"
                                      % (k, -k, w, degree_min))
            start = len([g for g in state.alg.gens if g.name.startswith("w%d_" % k)])
            new = [Generator("w%d_%d" % (k, start + j + 1), -k, w) for j in range(len(reps))]
            alg2 = state.alg.extended(new)
            imgs = {}
            for idx, img in state.d.images.items():
                imgs[idx] = Poly(alg2, {alg2.embed_mono(m): c for m, c in img.terms.items()})
            for g, z in zip(new, reps):
                imgs[g.name] = Poly(alg2, {alg2.embed_mono(m): c for m, c in z.items()})
            state.alg = alg2
            state.d = Derivation(alg2, imgs, 1, 0)
            added[(-k, w)] = len(reps)
        state.stage = k
        state.log.append({"stage": k, "generators": sorted(added.items())})
    else:
        state.closed = _closed(state)
    return state


def _closed(state):
    """No negative-degree cohomology left in the weight window."""
    dims, _ = state.cohomology_table()
    return all(n == 0 for (deg, w), n in dims.items() if deg < 0)


def hilbert_function(gamma, weight_max):
    return QuotientRing(gamma).hilbert_function(weight_max)


def t_tilde(state, arity_max=None):
    """The L-infinity algebra Koszul dual to C(t~), in the shifted convention."""
    return ce_to_brackets(state.alg, state.d, arity_max, dual_name=t_duals(state.alg))


def extract_n(state, arity_max=4, wmax=None, check_ideal=True):
    """Restriction of t~ to the duals of stage >= 2 generators."""
    L = t_tilde(state)
    name = t_duals(state.alg)
    nbasis = [name(g.name) for g in state.generators(2)]
    n = L.restricted(nbasis)
    for b in nbasis:
        lin = L.bracket((b,))
        if lin:
            raise MinimalityError("l_1 does not vanish on %s" % b)
    report = {"minimal": True, "basis": nbasis}
    if check_ideal:
        bad = []
        keep = set(nbasis)
        for k in range(1, arity_max + 1):
            for key in multisets(L.basis, k, L.weight, wmax):
                if not keep.intersection(key):
                    continue
                out = L.bracket(key)
                if any(b not in keep for b in out):
                    bad.append(list(key))
        report["ideal"] = not bad
        report["ideal_violations"] = bad[:5]
    n.report = report
    n.parent = L
    return n


def degree_statement(state):
    """Compare the stage-based description of n with the degree-based one (t~ degree >= 3)."""
    name = t_duals(state.alg)
    L = t_tilde(state)
    by_stage = {name(g.name) for g in state.generators(2)}
    by_degree = {b for b in L.basis if L.degree[b] >= 3}
    return {"agree": by_stage == by_degree, "stage_only": sorted(by_stage - by_degree),
            "degree_only": sorted(by_degree - by_stage)}
