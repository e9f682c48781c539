"""Command-line front end: ``lindelof <command> [options]``.

Results go to standard output (aligned text, ``--json`` or ``--csv``); logs go
to standard error.  Exit codes: 0 success, 2 domain or sector error,
3 convergence failure, 4 bad arguments.

The default working precision (bits) may be set with ``LINDELOF_PREC``.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
import time
from fractions import Fraction
from concurrent.futures import ProcessPoolExecutor

import mpmath
import numpy as np

from .coeff_functions import (Algebraic, gamma_plus_one_eq_minus_one_roots, parse_phi)
from .differences import (DifferenceRequest, differences_asymptotic, differences_exact,
                          kind_from_cli)
from .errors import (ConvergenceError, DomainError, LindelofError,
                     UnsupportedParameterError)
from .expansions import (ONE_PLUS_Z, Expansion, ExpansionTerm, algebraic_expansion,
                         polar_expansion)
from .holonomy import classify
from .integral import QuadratureConfig, continue_gf, direct_sum
from .numerics import PrecisionContext, parse_complex
from .saddle_boundary import (abel_taylor_coeff, approx_infinity, approx_minus_one,
                              saddle_expansion)

SCHEMA_VERSION = 1
ENV_PREC = "LINDELOF_PREC"
EXIT_OK, EXIT_DOMAIN, EXIT_CONVERGENCE, EXIT_USAGE = 0, 2, 3, 4

log = logging.getLogger("lindelof")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- helpers ---------------------------------------------------------------------------

def _num(x):
    """JSON-friendly number: float, or [re, im] for non-real complex values."""
    if isinstance(x, (mpmath.mpc, complex)):
        x = complex(x)
        if x.imag == 0:
            return _float(x.real)
        return [_float(x.real), _float(x.imag)]
    return _float(x)


def _float(x):
    if isinstance(x, mpmath.mpf) and not mpmath.isfinite(x):
        return str(x)
    try:
        v = float(x)
    except OverflowError:
        return mpmath.nstr(x, 17)
    return v if math.isfinite(v) else mpmath.nstr(x, 17)


def _fmt(x, digits=15) -> str:
    if isinstance(x, (mpmath.mpf, mpmath.mpc)):
        return mpmath.nstr(x, digits)
    if isinstance(x, float):
        return f"{x:.{digits}g}"
    return str(x)


def _phi(spec, ctx):
    try:
        return parse_phi(spec, ctx)
    except (UnsupportedParameterError, ValueError) as e:
        raise UsageError(f"bad --phi {spec!r}: {e}") from None


def _ctx(args) -> PrecisionContext:
    bits = args.seed_precision or args.prec
    return PrecisionContext(bits=bits, tol=args.tol)


def parse_grid(text: str) -> list:
    """``log:a:b:n`` -> z = exp(L), L geometric in [a, b]; ``lin:a:b:n`` -> real z."""
    try:
        kind, a, b, n = text.split(":")
        a, b, n = float(a), float(b), int(n)
    except ValueError:
        raise UsageError(f"bad grid {text!r}; expected log:a:b:n or lin:a:b:n") from None
    if n < 1:
        raise UsageError("grid needs at least one point")
    if kind == "log":
        if a <= 0 or b <= 0:
            raise UsageError("log grid bounds are values of log z and must be positive")
        return [mpmath.exp(mpmath.mpf(float(L))) for L in np.geomspace(a, b, n)]
    if kind == "lin":
        return [mpmath.mpf(float(x)) for x in np.linspace(a, b, n)]
    raise UsageError(f"unknown grid kind {kind!r}")


def _record(command, inputs, outputs, error_estimate=None) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command, "inputs": inputs,
            "outputs": outputs, "error_estimate": error_estimate}


def _emit(args, rec: dict, text: str, rows: list | None = None):
    if args.timing:
        rec["wall_time"] = time.perf_counter() - args.t0
    if args.json:
        print(json.dumps(rec, sort_keys=True))
    elif args.csv and rows:
        w = csv.writer(sys.stdout)
        w.writerow(list(rows[0].keys()))
        for r in rows:
            w.writerow([json.dumps(v) if isinstance(v, list) else v for v in r.values()])
    else:
        print(text)


# -- continue / sum ----------------------------------------------------------------------

def _continue_point(phi_spec, z, bits, tol, shift, rule, max_height):
    ctx = PrecisionContext(bits=bits, tol=tol)
    f = parse_phi(phi_spec, ctx)
    cfg = QuadratureConfig(ctx=ctx, shift=shift, rule=rule, max_height=max_height)
    r = continue_gf(f, z, cfg)
    return {"z": _num(z), "value": _num(r.value), "error_estimate": r.error,
            "shift": r.shift, "height": r.height}


def _sum_point(phi_spec, z, bits, tol, max_terms):
    ctx = PrecisionContext(bits=bits, tol=tol)
    f = parse_phi(phi_spec, ctx)
    return {"z": _num(z), "value": _num(direct_sum(f, z, ctx, max_terms=max_terms))}


def _map(fn, items, workers):
    """Evaluate independent points; results keep input order."""
    if workers <= 1 or len(items) <= 1:
        return [fn(*it) for it in items]
    # processes, not threads: mpmath keeps its working precision in global state
    with ProcessPoolExecutor(max_workers=workers) as ex:
        futs = [ex.submit(fn, *it) for it in items]
        return [f.result() for f in futs]


def _points(args):
    if args.z_grid:
        return parse_grid(args.z_grid)
    if args.z is None:
        raise UsageError("give --z or --z-grid")
    try:
        return [parse_complex(args.z)]
    except ValueError as e:
        raise UsageError(str(e)) from None


def cmd_continue(args):
    ctx = _ctx(args)
    _phi(args.phi, ctx)            # validate before fanning out
    shift = args.shift if args.shift == "auto" else float(args.shift)
    pts = _points(args)
    rows = _map(_continue_point,
                [(args.phi, z, ctx.bits, ctx.tol, shift, args.rule, args.max_height) for z in pts],
                args.workers)
    inputs = {"phi": args.phi, "bits": ctx.bits, "tol": ctx.tol, "shift": args.shift,
              "rule": args.rule, "z": [r["z"] for r in rows]}
    if len(rows) == 1:
        rec = _record("continue", inputs, {"value": rows[0]["value"]}, rows[0]["error_estimate"])
    else:
        rec = _record("continue", inputs, {"points": rows},
                      max(r["error_estimate"] for r in rows))
    text = "\n".join(f"{_fmt(r['z']):>28}  {_fmt(r['value']):>28}  err~{r['error_estimate']:.2e}"
                     for r in rows)
    _emit(args, rec, text, rows)


def cmd_sum(args):
    ctx = _ctx(args)
    _phi(args.phi, ctx)
    pts = _points(args)
    rows = _map(_sum_point, [(args.phi, z, ctx.bits, ctx.tol, args.max_terms) for z in pts],
                args.workers)
    inputs = {"phi": args.phi, "bits": ctx.bits, "tol": ctx.tol, "z": [r["z"] for r in rows]}
    out = {"value": rows[0]["value"]} if len(rows) == 1 else {"points": rows}
    rec = _record("sum", inputs, out)
    text = "\n".join(f"{_fmt(r['z']):>28}  {_fmt(r['value']):>28}" for r in rows)
    _emit(args, rec, text, rows)


# -- expand ------------------------------------------------------------------------------

def build_expansion(phi_spec: str, at: str, order, ctx) -> Expansion:
    f = parse_phi(phi_spec, ctx)
    if at == "infinity":
        if f.kind == "exp" and f.params[1] < 0 and f.params[0] != 0:
            return saddle_expansion(*f.params)
        if any(isinstance(s, Algebraic) for s in f.catalog):
            return algebraic_expansion(f, 0.5 if order is None else order, ctx)
        return polar_expansion(f, 2.5 if order is None else order, ctx)
    if f.kind != "exp" or not 0 < f.params[1] < 1:
        raise DomainError("expansions at z = -1 are available for exp:c,theta with 0 < theta < 1")
    c, th = f.params
    if c > 0:
        return approx_minus_one(c, th, -0.9).expansion
    k_max = 2 if order is None else int(order)
    terms = [ExpansionTerm(coeff=abel_taylor_coeff(c, th, k, ctx), s0=k, variable=ONE_PLUS_Z,
                           s0_exact=Fraction(k)) for k in range(k_max + 1)]
    err = ExpansionTerm(s0=k_max + 1, variable=ONE_PLUS_Z)
    return Expansion.build(terms, err, f"abel:c={c:g},theta={th:g}", ONE_PLUS_Z,
                           provenance="divergent asymptotic Taylor series", drop_zero=False)


def cmd_expand(args):
    ctx = _ctx(args)
    E = build_expansion(args.phi, args.at, args.order, ctx)
    rec = _record("expand", {"phi": args.phi, "at": args.at, "order": args.order},
                  {"expansion": E.to_json(), "text": E.render()})
    _emit(args, rec, E.render())


# -- diff / roots / classify -------------------------------------------------------------

def cmd_diff(args):
    ctx = _ctx(args)
    kind = kind_from_cli(args.kind)
    exact = differences_exact(DifferenceRequest(kind, args.n, ctx))
    out = {"exact": _num(exact)}
    text = f"D_{args.n} = {mpmath.nstr(exact, 6)}"
    if args.asymptotic:
        asy = differences_asymptotic(kind, args.n)
        out.update(asymptotic=_num(asy), ratio=_num(exact / asy))
        text += f"   asymptotic {mpmath.nstr(asy, 6)}   ratio {mpmath.nstr(exact / asy, 6)}"
    _emit(args, _record("diff", {"kind": args.kind, "n": args.n, "bits": ctx.bits}, out), text)


def cmd_roots(args):
    ctx = _ctx(args)
    roots = gamma_plus_one_eq_minus_one_roots(args.count, ctx)
    out = {"roots": [_num(r) for r in roots]}
    _emit(args, _record("roots", {"count": args.count}, out),
          "\n".join(mpmath.nstr(r, 10) for r in roots))


def cmd_classify(args):
    ctx = _ctx(args)
    if args.expansion:
        with open(args.expansion) as fh:
            data = json.load(fh)
        obj = Expansion.from_json(data.get("expansion", data) if "outputs" not in data
                                  else data["outputs"]["expansion"])
        inputs = {"expansion": args.expansion}
    elif args.phi:
        obj = _phi(args.phi, ctx)
        inputs = {"phi": args.phi}
    else:
        raise UsageError("give --phi or --expansion")
    v = classify(obj)
    text = f"{v.status}" + (f" ({v.clause})" if v.clause else "") + f": {v.note}"
    _emit(args, _record("classify", inputs, v.to_json()), text)


# -- table -------------------------------------------------------------------------------

def _row(label, phi, at_inf, at_m1, inf_text, m1_text):
    return {"coefficients": label, "phi": phi, "infinity_form": inf_text,
            "infinity_check": at_inf, "minus_one_form": m1_text, "minus_one_check": at_m1}


def asympt_table(ctx, log_z_saddle=1e4, log_z_osc=200.0, log_z_alg=200.0, z_m1=-0.999) -> list:
    cfg = QuadratureConfig(ctx=ctx, shift="auto")
    rows = []
    w = 1 + z_m1

    # e^{1/n}
    f = parse_phi("exp:1,-1", ctx)
    z = mpmath.exp(log_z_saddle)
    r = continue_gf(f, z, cfg).value / approx_infinity(1, -1, z)[0]
    m1 = direct_sum(f, z_m1, ctx) * w
    rows.append(_row("e^(1/n)", "exp:1,-1",
                     {"log_z": log_z_saddle, "ratio": _num(r)},
                     {"z": z_m1, "ratio": _num(m1)},
                     "-exp(2 sqrt(log z)) / (2 sqrt(pi) (log z)^(1/4))", "1/(1+z)"))
    # e^{-1/n}
    f = parse_phi("exp:-1,-1", ctx)
    z = mpmath.exp(log_z_osc)
    val = continue_gf(f, z, cfg).value
    appr = approx_infinity(-1, -1, z)[0]
    amp = log_z_osc ** -0.25 / math.sqrt(math.pi)
    m1 = direct_sum(f, z_m1, ctx) * w
    rows.append(_row("e^(-1/n)", "exp:-1,-1",
                     {"log_z": log_z_osc, "value": _num(val), "approx": _num(appr),
                      "scaled_gap": _num(abs(val - appr) / amp)},
                     {"z": z_m1, "ratio": _num(m1)},
                     "-(log z)^(-1/4) cos(2 sqrt(log z) - pi/4) / sqrt(pi)", "1/(1+z)"))
    # e^{sqrt n}
    f = parse_phi("exp:1,0.5", ctx)
    z = mpmath.exp(log_z_alg)
    E = algebraic_expansion(f, 0.5, ctx)
    r = continue_gf(f, z, cfg).value / E.evaluate(z)
    ap = approx_minus_one(1, 0.5, z_m1)
    m1 = direct_sum(f, z_m1, ctx) / ap.one_plus_z_form
    rows.append(_row("e^(sqrt n)", "exp:1,0.5",
                     {"log_z": log_z_alg, "ratio": _num(r)},
                     {"z": z_m1, "ratio": _num(m1)},
                     "-1 - 1/sqrt(pi log z)",
                     "sqrt(pi) e^(-1/8) (1+z)^(-3/2) exp(1/(4(1+z)))"))
    # e^{-sqrt n}
    f = parse_phi("exp:-1,0.5", ctx)
    E = algebraic_expansion(f, 0.5, ctx)
    r = continue_gf(f, z, cfg).value / E.evaluate(z)
    u0, u1 = abel_taylor_coeff(-1, 0.5, 0, ctx), abel_taylor_coeff(-1, 0.5, 1, ctx)
    m1 = direct_sum(f, z_m1, ctx) / (u0 + u1 * w)
    rows.append(_row("e^(-sqrt n)", "exp:-1,0.5",
                     {"log_z": log_z_alg, "ratio": _num(r)},
                     {"z": z_m1, "ratio": _num(m1), "E(1)": u0, "E'(1)": -u1},
                     "-1 + 1/sqrt(pi log z)", "E(1) + E'(1)(1+z)"))
    return rows


def cmd_table(args):
    ctx = _ctx(args)
    if args.figure != "asympt":
        raise UsageError(f"unknown figure {args.figure!r}")
    rows = asympt_table(ctx, args.log_z, args.log_z_osc, args.log_z_alg, args.z_minus_one)
    lines = [f"{'phi(n)':<12} {'z -> oo':<52} {'check':<24} {'z -> -1':<48} check"]
    for r in rows:
        ci = r["infinity_check"]
        inf = (f"ratio {_fmt(ci['ratio'], 8)}" if "ratio" in ci
               else f"gap/amp {_fmt(ci['scaled_gap'], 3)}")
        lines.append(f"{r['coefficients']:<12} {r['infinity_form']:<52} {inf:<24} "
                     f"{r['minus_one_form']:<48} ratio {_fmt(r['minus_one_check']['ratio'], 8)}")
    rec = _record("table", {"figure": args.figure, "bits": ctx.bits, "log_z": args.log_z,
                            "log_z_osc": args.log_z_osc, "log_z_alg": args.log_z_alg,
                            "z_minus_one": args.z_minus_one}, {"rows": rows})
    _emit(args, rec, "\n".join(lines), rows)


# -- parser ------------------------------------------------------------------------------

def _default_prec() -> int:
    raw = os.environ.get(ENV_PREC)
    if raw is None:
        return 53
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{ENV_PREC} must be an integer, got {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--csv", action="store_true", help="CSV rows (sweeps)")
    common.add_argument("--prec", type=int, default=_default_prec(), help="working bits")
    common.add_argument("--seed-precision", type=int, default=None,
                        help="pin the working precision (overrides --prec)")
    common.add_argument("--tol", type=float, default=1e-12)
    common.add_argument("--timing", action="store_true",
                        help="add wall_time to JSON (breaks bit-identical output)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="lindelof", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=fn)
        return sp

    sp = add("continue", cmd_continue, "analytic continuation via the Lindelof integral")
    sp.add_argument("--phi", required=True, help="kind[:p1,p2], e.g. exp:1,-1")
    sp.add_argument("--z", help="re or re,im")
    sp.add_argument("--z-grid", help="log:a:b:n (values of log z) or lin:a:b:n")
    sp.add_argument("--shift", default="0.5", help="contour abscissa in (0,1) or 'auto'")
    sp.add_argument("--rule", default="adaptive-segment",
                    choices=["adaptive-segment", "fixed-step"])
    sp.add_argument("--max-height", type=float, default=400.0)
    sp.add_argument("--workers", type=int, default=1)

    sp = add("sum", cmd_sum, "direct power-series summation")
    sp.add_argument("--phi", required=True)
    sp.add_argument("--z")
    sp.add_argument("--z-grid")
    sp.add_argument("--max-terms", type=int, default=10**7)
    sp.add_argument("--workers", type=int, default=1)

    sp = add("expand", cmd_expand, "asymptotic expansion")
    sp.add_argument("--phi", required=True)
    sp.add_argument("--at", choices=["infinity", "minus-one"], default="infinity")
    sp.add_argument("--order", type=float, default=None,
                    help="K (algebraic), B (polar) or Taylor degree (at -1)")

    sp = add("diff", cmd_diff, "binomial differences")
    sp.add_argument("--kind", required=True, help="expinv+|expinv-|expsqrt+|expsqrt-")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--asymptotic", action="store_true")

    sp = add("roots", cmd_roots, "real roots of Gamma(s) = -1")
    sp.add_argument("--count", type=int, default=8)

    sp = add("classify", cmd_classify, "holonomy structure check")
    sp.add_argument("--phi")
    sp.add_argument("--expansion", help="JSON file from 'expand --json'")

    sp = add("table", cmd_table, "reproduce the table of asymptotic forms")
    sp.add_argument("--figure", default="asympt")
    sp.add_argument("--log-z", type=float, default=1e4, help="log z for the e^(1/n) row")
    sp.add_argument("--log-z-osc", type=float, default=200.0)
    sp.add_argument("--log-z-alg", type=float, default=200.0)
    sp.add_argument("--z-minus-one", type=float, default=-0.999)
    return p


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING,
                        format="lindelof: %(levelname)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
        if args.verbose:
            log.setLevel(logging.INFO)
        args.t0 = time.perf_counter()
        args.func(args)
        log.info("%s finished in %.3f s", args.command, time.perf_counter() - args.t0)
        return EXIT_OK
    except UsageError as e:
        log.error("%s", e)
        return EXIT_USAGE
    except DomainError as e:
        log.error("%s", e)
        return EXIT_DOMAIN
    except ConvergenceError as e:
        log.error("%s", e)
        return EXIT_CONVERGENCE
    except LindelofError as e:
        log.error("%s", e)
        return EXIT_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
