"""Batch front end: ``ncmotive <command> [<action>] [flags]``.

Every run writes an optional JSON report (``--out``) and CSV table
(``--csv``); exit status is 0 when all checks hold, 1 when a check fails
and 2 on usage errors.  ``--config FILE`` reads ``key = value`` lines whose
keys are flag names; flags given on the command line win.  The thread count
for the parallel loops comes from ``NCMOTIVE_THREADS``.
"""
import argparse
from concurrent.futures import ThreadPoolExecutor
import csv
import json
import math
import os
import random
import sys

import numpy as np

from .errors import CheckFailed, NcMotiveError

THREADS_ENV = "NCMOTIVE_THREADS"


class UsageError(NcMotiveError, ValueError):
    """Bad command line or configuration."""


def _threads():
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be an integer") from None


def _pmap(fn, items):
    """Order-preserving map, threaded when NCMOTIVE_THREADS > 1."""
    n = _threads()
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(n) as pool:
        return list(pool.map(fn, items))


def _floats(text):
    return [float(x) for x in str(text).replace(",", " ").split()]


def _positive(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"{text} is not positive")
    return v


def read_config(path):
    """key = value lines; blank lines and # comments ignored."""
    cfg = {}
    with open(path) as fh:
        for no, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{no}: expected key = value")
            k, v = (x.strip() for x in line.split("=", 1))
            cfg[k.lstrip("-").replace("-", "_")] = v
    return cfg


def _c(z):
    """Complex or real number as a decimal string."""
    z = complex(z)
    return repr(z.real) if z.imag == 0 else f"{z.real!r}{z.imag:+.17g}j"


def _write(args, report, rows=None, header=None):
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    if args.csv and rows is not None:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows(rows)


def _finish(args, report, rows=None, header=None):
    _write(args, report, rows, header)
    if not args.quiet:
        print(json.dumps({k: v for k, v in report.items() if not isinstance(v, (list, dict))},
                         sort_keys=True))
    if not report.get("passed", True):
        raise CheckFailed(f"{args.command} check failed")
    return 0


# commands ------------------------------------------------------------------

def cmd_cyclic(args):
    from .cyclic import algebra_by_name, check_relations
    try:
        alg = algebra_by_name(args.algebra)
    except KeyError as exc:
        raise UsageError(str(exc)) from None
    rep = check_relations(alg, args.degree)
    fams = rep.families()
    rows = [(r.family, r.degree, " ".join(map(str, r.indices)), int(r.passed))
            for r in rep.results]
    report = {"algebra": alg.name, "degree": args.degree, "families": fams,
              "instances": len(rep.results), "passed": rep.all_passed}
    return _finish(args, report, rows, ("family", "degree", "indices", "passed"))


def cmd_artin(args):
    from .artin import Correspondence, check_resolution, compose
    if args.action == "idempotents":
        res = check_resolution(args.modulus)
        report = {"modulus": args.modulus, **res, "passed": all(res.values())}
        return _finish(args, report)
    if not (args.u and args.v):
        raise UsageError("artin compose needs --u and --v")
    with open(args.u) as fu, open(args.v) as fv:
        u, v = Correspondence.from_json(json.load(fu)), Correspondence.from_json(json.load(fv))
    w = compose(u, v)
    report = {"composite": w.to_json(), "passed": w.is_invariant()}
    return _finish(args, report)


def cmd_endo(args):
    from .endomotive import BCPoint, CrossedElement, fabulous_check, random_monomial
    from .exact import units
    if args.action == "mul":
        if not (args.x and args.y):
            raise UsageError("endo mul needs --x and --y")
        with open(args.x) as fx, open(args.y) as fy:
            x, y = CrossedElement.from_json(json.load(fx)), CrossedElement.from_json(json.load(fy))
        report = {"product": (x * y).to_json(), "passed": True}
        return _finish(args, report)
    n = args.modulus
    rng = random.Random(args.seed)
    rows, ok = [], True
    for k in range(args.samples):
        a = random_monomial(rng, max_level=n)
        while n % a.max_level():
            a = random_monomial(rng, max_level=n)
        for c in units(n):
            for alpha in units(n):
                good = fabulous_check(BCPoint(n, c), alpha, a)
                ok &= good
                rows.append((k, c, alpha, int(good)))
    report = {"modulus": n, "checks": len(rows), "passed": bool(ok)}
    return _finish(args, report, rows, ("sample", "c", "alpha", "passed"))


def _load_pairs(path):
    from .endomotive import CrossedElement
    with open(path) as fh:
        data = json.load(fh)
    return [(CrossedElement.from_json(p[0]), CrossedElement.from_json(p[1])) for p in data]


def cmd_thermo(args):
    from .thermo import GnsTruncation, kms_verify, monomial_family, partition_function
    if args.action == "partition":
        rows, ok = [], True
        for beta in _floats(args.beta):
            z, tail = partition_function(beta, args.nmax)
            exact = math.pi ** 2 / 6 if beta == 2 else None
            diff = None if exact is None else abs(z - exact)
            good = diff is None or diff <= tail
            ok &= good
            rows.append((beta, args.nmax, repr(z), repr(tail), "" if diff is None else repr(diff)))
        report = {"rows": rows, "partial_sum": z, "tail_bound": tail, "passed": bool(ok)}
        return _finish(args, report, rows, ("beta", "nmax", "partial_sum", "tail_bound", "diff"))
    if args.pairs:
        pairs = _load_pairs(args.pairs)
    else:
        fam = monomial_family(args.n_bound)
        pairs = [(x, y) for x in fam for y in fam]
    trunc = GnsTruncation(args.nmax)
    ts = _floats(args.t)
    rows, ok, worst = [], True, 0.0
    for beta in _floats(args.beta):
        reports = _pmap(lambda p: kms_verify(p[0], p[1], beta, ts, trunc), pairs)
        for i, rep in enumerate(reports):
            ok &= rep.passed
            for r in rep.rows:
                worst = max(worst, r.residual)
                rows.append((beta, i, r.t, repr(r.residual), repr(r.bound), int(r.passed)))
    report = {"pairs": len(pairs), "nmax": args.nmax, "max_residual": worst, "passed": bool(ok)}
    return _finish(args, report, rows, ("beta", "pair", "t", "residual", "bound", "passed"))


def _zero_table(args, chi=None):
    from .spectral import ZeroTable, l_zeros
    if args.zeros_file:
        table = ZeroTable.from_file(args.zeros_file, chi.modulus if chi else 1,
                                    chi.index if chi else ())
        return table.up_to(args.zeros_to) if args.zeros_to else table
    return l_zeros(chi, args.zeros_to)


def _primitive(modulus, index):
    from .characters import DirichletCharacter, characters
    if modulus == 1:
        return None
    if index is not None:
        chi = DirichletCharacter(modulus, tuple(int(i) for i in _floats(index)))
    else:
        prim = [c for c in characters(modulus) if c.conductor == modulus]
        if not prim:
            raise UsageError(f"no primitive character mod {modulus}")
        chi = prim[-1]
    if chi.conductor != modulus:
        raise UsageError("the character must be primitive")
    return chi


def cmd_spectral(args):
    from . import spectral as sp
    if args.action == "factorize":
        svals = [complex(x) for x in str(args.s).replace(",", " ").split()]
        rows, ok = [], True
        for xi in sp.factorization_family():
            for f in sp.l_factorization(xi, svals):
                err = abs(f.lhs - f.rhs)
                good = err <= args.tol * (1 + abs(f.lhs))
                ok &= good
                rows.append((xi.name, _c(f.s), _c(f.lhs), _c(f.rhs), repr(err), int(good)))
        report = {"rows": len(rows), "passed": bool(ok)}
        return _finish(args, report, rows, ("function", "s", "lhs", "rhs", "error", "passed"))
    chi = _primitive(args.modulus, args.index)
    table = _zero_table(args, chi)
    f0 = None if chi is None else np.array([chi(r) for r in range(args.modulus)])
    xi = sp.TestFunction(sp.alternating(sp.log_gaussian(args.sigma)), args.modulus, f0,
                         lam_max=sp.gaussian_lam_max(args.sigma), name="alternating")
    k = min(args.k_max, len(table.ordinates))
    rep = sp.vanishing_check(xi, table.ordinates, k, tol=args.tol)
    rows = [(repr(g), repr(float(r))) for g, r in zip(rep.ordinates, rep.ratios)]
    report = {"modulus": args.modulus, "zeros": len(table.ordinates), "checked": k,
              "line_scale": rep.line_scale, "max_ratio": float(np.max(rep.ratios, initial=0.0)),
              "passed": rep.passed and k > 0}
    return _finish(args, report, rows, ("ordinate", "ratio"))


def _load_hodge(path):
    from .archfactors import HodgeStructure
    if path in (None, "point"):
        return HodgeStructure.point()
    if path == "elliptic":
        return HodgeStructure.elliptic_h1()
    with open(path) as fh:
        return HodgeStructure.from_json(json.load(fh))


def cmd_arch(args):
    from . import archfactors as af
    if args.action == "pv":
        r = af.pv_f0_over_f1()
        expected = 2 * (math.log(2 * math.pi) + 0.5772156649015329)
        diff = abs(r.value - expected)
        report = {"value": r.value, "expected": expected, "diff": diff,
                  "passed": diff <= args.tol}
        return _finish(args, report)
    h = _load_hodge(args.hodge)
    if args.action == "count":
        from .spectral import zeta_zeros
        rows, ok = [], True
        is_zeta = h == af.HodgeStructure.point() and args.place == "real"
        for e in _floats(args.E):
            avg = af.zero_count_average(h, [args.place], e)
            located = len(zeta_zeros(e).ordinates) if is_zeta else None
            if located is not None:
                ok &= abs(avg - located) <= 1
            rows.append((e, repr(avg), "" if located is None else located))
        return _finish(args, {"passed": bool(ok)}, rows, ("E", "average_count", "located"))
    fn = af.lefschetz_real if args.place == "real" else af.lefschetz_complex
    svals = _floats(args.s_grid)
    res = _pmap(lambda s: fn(h, s, args.scheme), svals)
    rows = [(s, repr(r.lhs), repr(r.rhs), repr(r.diff)) for s, r in zip(svals, res)]
    worst = max((r.diff for r in res), default=0.0)
    report = {"place": args.place, "max_diff": worst, "passed": worst <= args.tol}
    return _finish(args, report, rows, ("s", "lhs", "rhs", "diff"))


def cmd_explicit(args):
    from . import explicit as ex
    from .spectral import zeta_zeros
    zeros = (_zero_table(args) if args.zeros_file else zeta_zeros(args.zeros_to)).ordinates
    if args.action == "positivity":
        rng = np.random.default_rng(args.seed)
        fs = [ex.random_gaussian_mixture(rng) for _ in range(args.count)]
        vals = [ex.weil_positivity(f).real for f in fs]
        spec = [ex.positivity_form(f, zeros, args.tol) for f in fs]
        rows = [(i, repr(v), repr(w)) for i, (v, w) in enumerate(zip(vals, spec))]
        report = {"count": args.count, "min": min(vals),
                  "max_gap": max(abs(v - w) for v, w in zip(vals, spec)),
                  "passed": min(vals) >= -args.tol}
        return _finish(args, report, rows, ("function", "geometric", "spectral"))
    if args.family == "gaussian":
        fam = [ex.gaussian(s) for s in _floats(args.sigma)]
        tol = args.tol if args.tol is not None else 1e-3
    else:
        fam = ex.narrow_family()
        tol = args.tol if args.tol is not None else 1e-6
    reports = _pmap(lambda h: ex.balance(h, zeros, tol), fam)
    rows = [(h.name, _c(r.spectral_side), _c(r.geometric_side), repr(r.residual))
            for h, r in zip(fam, reports)]
    ok = all(r.residual <= tol for r in reports)
    report = {"family": args.family, "zeros": len(zeros),
              "reports": {h.name: r.to_json() for h, r in zip(fam, reports)},
              "max_residual": max(r.residual for r in reports), "passed": ok}
    return _finish(args, report, rows, ("function", "spectral", "geometric", "residual"))


def cmd_zeros(args):
    chi = _primitive(args.modulus, args.index)
    table = _zero_table(args, chi)
    out = args.out or "zeros.txt"
    table.to_file(out)
    args.out = None
    resid = table.validate(args.tol) if table.ordinates else 0.0
    report = {"count": len(table.ordinates), "file": out, "max_residual": resid,
              "passed": True}
    return _finish(args, report, [(repr(g),) for g in table.ordinates], ("ordinate",))


# parser --------------------------------------------------------------------

def _common(p):
    p.add_argument("--config", help="key = value file; flags override it")
    p.add_argument("--out", help="JSON report path")
    p.add_argument("--csv", help="CSV table path")
    p.add_argument("--quiet", action="store_true")
    p.add_argument("--seed", type=int, default=0)


def _zero_flags(p, default_to=100.0):
    p.add_argument("--zeros-to", type=float, default=default_to, help="table height")
    p.add_argument("--zeros-file", help="ingest ordinates from this file instead")


def build_parser():
    parser = argparse.ArgumentParser(prog="ncmotive", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("cyclic", help="cyclic-category relations")
    p.add_argument("action", choices=["check"])
    p.add_argument("--algebra", default="M2")
    p.add_argument("--degree", type=int, default=3)
    _common(p)
    p.set_defaults(func=cmd_cyclic)

    p = sub.add_parser("artin", help="Artin motives and correspondences")
    p.add_argument("action", choices=["idempotents", "compose"])
    p.add_argument("--modulus", type=int, default=12)
    p.add_argument("--u")
    p.add_argument("--v")
    _common(p)
    p.set_defaults(func=cmd_artin)

    p = sub.add_parser("endo", help="the BC endomotive Q[Q/Z] x N")
    p.add_argument("action", choices=["mul", "fabulous"])
    p.add_argument("--x")
    p.add_argument("--y")
    p.add_argument("--modulus", type=int, default=12)
    p.add_argument("--samples", type=int, default=5)
    _common(p)
    p.set_defaults(func=cmd_endo)

    p = sub.add_parser("thermo", help="KMS and partition-function checks")
    p.add_argument("action", choices=["kms", "partition"])
    p.add_argument("--beta", default="2")
    p.add_argument("--nmax", type=int, default=10 ** 5)
    p.add_argument("--t", default="0,1,5")
    p.add_argument("--pairs", help="JSON list of [x, y] element pairs")
    p.add_argument("--n-bound", type=int, default=8)
    _common(p)
    p.set_defaults(func=cmd_thermo)

    p = sub.add_parser("spectral", help="spectral realization")
    p.add_argument("action", choices=["factorize", "vanish"])
    p.add_argument("--s", default="2,3,2+5j")
    p.add_argument("--modulus", type=int, default=1)
    p.add_argument("--index", help="character exponents, e.g. '1' or '1,0'")
    p.add_argument("--sigma", type=_positive, default=0.15)
    p.add_argument("--k-max", type=int, default=5)
    p.add_argument("--tol", type=_positive, default=None)
    _zero_flags(p, 40.0)
    _common(p)
    p.set_defaults(func=cmd_spectral)

    p = sub.add_parser("arch", help="archimedean factors")
    p.add_argument("action", choices=["lefschetz", "pv", "count"])
    p.add_argument("--hodge", help="HodgeStructure JSON, or 'point' / 'elliptic'")
    p.add_argument("--place", choices=["real", "complex"], default="complex")
    p.add_argument("--s-grid", "--s", dest="s_grid", default="0")
    p.add_argument("--scheme", choices=["WeilCutoff", "MinimalSubtraction"],
                   default="WeilCutoff")
    p.add_argument("--E", default="30,50,100")
    p.add_argument("--tol", type=_positive, default=1e-6)
    _common(p)
    p.set_defaults(func=cmd_arch)

    p = sub.add_parser("explicit", help="explicit formula and positivity")
    p.add_argument("action", choices=["balance", "positivity"])
    p.add_argument("--family", choices=["gaussian", "narrow"], default="gaussian")
    p.add_argument("--sigma", default="0.08,0.1,0.15,0.25,0.5")
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--tol", type=_positive, default=None)
    _zero_flags(p, 200.0)
    _common(p)
    p.set_defaults(func=cmd_explicit)

    p = sub.add_parser("zeros", help="locate zeros of zeta or L(s, chi)")
    p.add_argument("--to", dest="zeros_to", type=float, required=True)
    p.add_argument("--modulus", type=int, default=1)
    p.add_argument("--index")
    p.add_argument("--zeros-file", help="validate an existing table instead of locating")
    p.add_argument("--tol", type=_positive, default=1e-6)
    _common(p)
    p.set_defaults(func=cmd_zeros)
    return parser


_TOL_DEFAULTS = {"spectral": {"factorize": 1e-6, "vanish": 1e-4}, "explicit": {"positivity": 1e-6}}


def parse(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        raise UsageError(parser.format_usage())
    if args.config:
        cfg = read_config(args.config)
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest: a for a in sub._actions}
        defaults = {}
        for k, v in cfg.items():
            if k not in known or k in ("config", "action"):
                raise UsageError(f"unknown config key {k!r} for {args.command}")
            act = known[k]
            if act.type is not None:
                try:
                    v = act.type(v)
                except (ValueError, argparse.ArgumentTypeError) as exc:
                    raise UsageError(f"config {k}: {exc}") from None
            elif isinstance(act, argparse._StoreTrueAction):
                v = v.lower() in ("1", "true", "yes")
            defaults[k] = v
        sub.set_defaults(**defaults)
        args = parser.parse_args(argv)
    per = _TOL_DEFAULTS.get(args.command, {})
    if getattr(args, "tol", 0) is None and getattr(args, "action", None) in per:
        args.tol = per[args.action]
    return args


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parse(argv)
        return args.func(args)
    except SystemExit as exc:          # argparse usage errors and --help
        return int(exc.code or 0) if exc.code in (0, None) else 2
    except UsageError as exc:
        print(str(exc).strip(), file=sys.stderr)
        return 2
    except CheckFailed as exc:
        print(f"FAILED: {exc}", file=sys.stderr)
        return 1
    except NcMotiveError as exc:
        print(f"FAILED: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
