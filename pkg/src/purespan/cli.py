"""Command line: resolve | cohomology | span | verify, with JSON reports.

Exit codes: 0 pass, 1 verification failure, 2 input error, 3 window exhausted.
"""

import argparse
import json
import sys

from .grading import QQ, Generator, FreeSCAlgebra, Poly, TruncationWindow, square_zero_check
from .homology import cohomology, complex_from_derivation
from .linfty import MCError, qstr
from .multiplets import (GammaSpec, GammaError, SuperTranslation, SuperPoincare, ModulePresentation,
                         QuotientRing, ce_of_t, check_twist, oy_module, pure_spinor_functor, twist_multiplet,
                         tate_module, lam)
from .tate import WindowExhausted, MinimalityError, tate_resolve

EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_WINDOW = 0, 1, 2, 3


class InputError(ValueError):
    pass


# ---------------------------------------------------------------- spec files

def load_spec(path):
    try:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise InputError("cannot read spec %s: %s" % (path, e.strerror))
    if not text.strip():
        raise InputError("%s: spec file is empty" % path)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError("%s:%d:%d: %s" % (path, e.lineno, e.colno, e.msg))
    if not isinstance(data, dict) or not data:
        raise InputError("%s: spec must be a non-empty JSON object" % path)
    return parse_spec(data, path)


def _need(data, key, path):
    if key not in data:
        raise InputError("%s: missing field %r" % (path, key))
    return data[key]


def _rational(text, where):
    try:
        return QQ(str(text))
    except (ValueError, ZeroDivisionError):
        raise InputError("%s: not a rational number: %r" % (where, text))


def parse_spec(data, path="<spec>"):
    name = str(data.get("name", "unnamed"))
    try:
        n_odd = int(_need(data, "n_odd", path))
        n_even = int(_need(data, "n_even", path))
    except (TypeError, ValueError):
        raise InputError("%s: n_odd and n_even must be integers" % path)
    entries = _need(data, "gamma", path)
    if not isinstance(entries, list):
        raise InputError("%s: gamma must be a list of {alpha, beta, mu, coeff}" % path)
    clean = []
    for k, e in enumerate(entries):
        where = "%s: gamma[%d]" % (path, k)
        try:
            clean.append({"alpha": int(e["alpha"]), "beta": int(e["beta"]), "mu": int(e["mu"]),
                          "coeff": _rational(e["coeff"], where)})
        except (KeyError, TypeError, ValueError) as err:
            if isinstance(err, InputError):
                raise
            raise InputError("%s: needs integer alpha, beta, mu and a coeff string" % where)
    try:
        gamma = GammaSpec.from_entries(n_odd, n_even, clean, name)
    except GammaError as e:
        raise InputError("%s: %s" % (path, e))
    spec = {"name": name, "gamma": gamma, "modules": [], "g0": None}
    for k, m in enumerate(data.get("modules", [])):
        spec["modules"].append(_parse_module(gamma, m, "%s: modules[%d]" % (path, k)))
    if data.get("g0"):
        spec["g0"] = _parse_g0(gamma, data["g0"], "%s: g0" % path)
    return spec


def _parse_module(gamma, m, where):
    """C[l] (x) C[generators] with a differential given on the new generators."""
    gens = [Generator(lam(a), 0, 1) for a in range(1, gamma.n_odd + 1)]
    try:
        for g in m.get("generators", []):
            gens.append(Generator(str(g["name"]), int(g["degree"]), int(g["weight"])))
    except (KeyError, TypeError, ValueError):
        raise InputError("%s: generators need name, degree, weight" % where)
    alg = FreeSCAlgebra(gens)
    imgs = {}
    for gname, terms in m.get("differential", {}).items():
        if gname not in alg.index:
            raise InputError("%s: differential of unknown generator %r" % (where, gname))
        poly = {}
        for t in terms:
            try:
                mono = alg.parse_mono(t["monomial"])
            except KeyError as e:
                raise InputError("%s: %s" % (where, e))
            poly[mono] = poly.get(mono, 0) + _rational(t["coeff"], where)
        imgs[gname] = Poly(alg, poly)
    mod = ModulePresentation(str(m.get("name", "module")), gens, imgs,
                             {a: lam(a) for a in range(1, gamma.n_odd + 1)}, {})
    return mod


def _parse_g0(gamma, g0, where):
    t = SuperTranslation(gamma)
    basis = list(g0.get("basis", []))
    action = {}
    for g, table in g0.get("action", {}).items():
        action[g] = {a: {b: _rational(c, where) for b, c in row.items()} for a, row in table.items()}
        for a, row in action[g].items():
            if a not in t.basis or any(b not in t.basis for b in row):
                raise InputError("%s: action of %s uses names outside %s" % (where, g, ", ".join(t.basis)))
    return SuperPoincare(t, basis, g0.get("brackets", {}), action)


def parse_twist(text, gamma):
    if not text:
        return None
    parts = [p.strip() for p in text.split(",")]
    Q = [_rational(p, "--twist") for p in parts]
    if len(Q) != gamma.n_odd:
        raise InputError("--twist has %d components, expected n_odd = %d" % (len(Q), gamma.n_odd))
    return Q


def window_of(args):
    if args.max_weight < 0:
        raise InputError("--max-weight must be non-negative")
    if args.degree_min > args.degree_max:
        raise InputError("--degree-min exceeds --degree-max")
    return TruncationWindow(args.degree_min, args.degree_max, args.max_weight)


# ---------------------------------------------------------------- output

def _table(dims, window):
    lo, hi = window.degree_min, window.degree_max
    out = {}
    for (deg, w), n in sorted(dims.items(), key=lambda t: (t[0][0], -1 if t[0][1] is None else t[0][1])):
        key = "%d" % deg if w is None else "%d,%d" % (deg, w)
        out[key] = {"dim": n, "trusted": lo < deg < hi}
    return out


def _window_json(window):
    return {"degree_min": window.degree_min, "degree_max": window.degree_max, "weight_max": window.weight_max}


def emit(obj, out):
    text = json.dumps(obj, sort_keys=True, indent=2, default=_default) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _default(x):
    if isinstance(x, QQ):
        return qstr(x)
    if isinstance(x, tuple):
        return list(x)
    raise TypeError("not serializable: %r" % (x,))


# ---------------------------------------------------------------- commands

def cmd_resolve(spec, args):
    gamma = spec["gamma"]
    window = window_of(args)
    st = tate_resolve(gamma, window.weight_max, args.max_stage, window.degree_min, window.degree_max)
    dims, _ = st.cohomology_table()
    rep = {"command": "resolve", "algebra": spec["name"], "window": _window_json(window),
           "stage_max": args.max_stage, "stages": st.stage_log(), "closed": st.closed,
           "hilbert_function": QuotientRing(gamma).hilbert_function(window.weight_max),
           "cohomology": _table({b: n for b, n in dims.items() if n}, window)}
    return rep, True


def cmd_cohomology(spec, args):
    gamma = spec["gamma"]
    window = window_of(args)
    Q = parse_twist(args.twist, gamma)
    alg, d = ce_of_t(gamma)
    tables = {"C(t)": complex_from_derivation(d, window, "C(t)")}
    mult = pure_spinor_functor(gamma, oy_module(gamma))
    tables["A(O_Y), D0"] = mult.complex(window, mult.parts["D0"], "A,D0")
    tables["A(O_Y)"] = mult.complex(window)
    if Q is not None and any(Q):
        check_twist(gamma, Q)
        tables["A(O_Y)_Q"] = twist_multiplet(mult, Q).complex(window)
    out = {name: _table(cohomology(c).dims, window) for name, c in tables.items()}
    rep = {"command": "cohomology", "algebra": spec["name"], "window": _window_json(window),
           "twist": [qstr(q) for q in (Q or [0] * gamma.n_odd)], "tables": out}
    return rep, True


def cmd_span(spec, args):
    from .span import verify_span
    gamma = spec["gamma"]
    window = window_of(args)
    Q = parse_twist(args.twist, gamma)
    report = verify_span(gamma, Q, window, arity_max=args.arity)
    rep = {"command": "span"}
    rep.update(report)
    return rep, report["passed"]


def cmd_verify(spec, args):
    from .span import verify_span, SpanContext
    gamma = spec["gamma"]
    window = window_of(args)
    Q = parse_twist(args.twist, gamma)
    checks = {}
    details = {}
    alg, d = ce_of_t(gamma)
    checks["d_t square zero"] = square_zero_check(d)["passed"]
    mult = pure_spinor_functor(gamma, oy_module(gamma))
    checks["D square zero"] = mult.square_zero()["passed"]
    if Q is not None and any(Q):
        checks["D_Q square zero"] = twist_multiplet(mult, Q).square_zero()["passed"]
    for mod in spec["modules"]:
        try:
            m = pure_spinor_functor(gamma, mod)
            checks["module %s" % mod.kind] = m.square_zero()["passed"]
        except ValueError as e:
            checks["module %s" % mod.kind] = False
            details["module %s" % mod.kind] = str(e)
    if spec["g0"] is not None:
        r = spec["g0"].check()
        checks["g0 acts by derivations"] = r["passed"]
        if not r["passed"]:
            details["g0 acts by derivations"] = [list(v) for v in r["violations"][:5]]
    st = tate_resolve(gamma, window.weight_max, args.max_stage, window.degree_min, window.degree_max)
    checks["d_t~ square zero"] = square_zero_check(st.d)["passed"]
    dims, _ = st.cohomology_table()
    lo, hi = window.degree_min, window.degree_max
    checks["resolution: no negative cohomology in trusted window"] = all(
        n == 0 for (deg, w), n in dims.items() if deg < 0 and lo < deg < hi)
    hf = QuotientRing(gamma).hilbert_function(window.weight_max)
    h0 = [dims.get((0, w), 0) for w in range(window.weight_max + 1)]
    checks["resolution: H^0 is O_Y"] = h0 == hf
    if all(checks.values()):
        report = verify_span(gamma, Q, window, arity_max=args.arity, state=None)
        ctx = report.ctx
        checks["D~ square zero"] = ctx.tilde.square_zero()["passed"]
        checks["D~_Q square zero"] = ctx.tildeQ.square_zero()["passed"]
        for name, ok in report["clauses"].items():
            checks["span: " + name] = ok
    rep = {"command": "verify", "algebra": spec["name"], "window": _window_json(window),
           "twist": [qstr(q) for q in (Q or [0] * gamma.n_odd)], "checks": checks, "details": details,
           "passed": all(checks.values())}
    return rep, rep["passed"]


COMMANDS = {"resolve": cmd_resolve, "cohomology": cmd_cohomology, "span": cmd_span, "verify": cmd_verify}


def build_parser():
    ap = argparse.ArgumentParser(prog="purespan", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--spec", required=True, help="algebra spec (JSON)")
    ap.add_argument("--degree-min", type=int, default=-4)
    ap.add_argument("--degree-max", type=int, default=2)
    ap.add_argument("--max-weight", type=int, default=6)
    ap.add_argument("--max-stage", type=int, default=4)
    ap.add_argument("--arity", type=int, default=4)
    ap.add_argument("--twist", default="", help='comma separated rationals, e.g. "0,1,0"')
    ap.add_argument("--out", default=None, help="write the JSON report here instead of stdout")
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        spec = load_spec(args.spec)
        rep, ok = COMMANDS[args.command](spec, args)
    except (InputError, MCError) as e:
        sys.stderr.write("error: %s\n" % e)
        return EXIT_INPUT
    except WindowExhausted as e:
        sys.stderr.write("window exhausted: %s\n" % e)
        return EXIT_WINDOW
    except MinimalityError as e:
        sys.stderr.write("verification failed: %s\n" % e)
        return EXIT_FAIL
    emit(rep, args.out)
    if not ok:
        sys.stderr.write("verification failed\n")
    return EXIT_PASS if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
