"""Asymptotic expansions of F(z) and their evaluation.

A term has the shape

    coeff * X^s0 * Y^p * exp(q * Y^beta) * cos(r * Y^beta + phase0)

where (X, Y) depends on the variable:

* ``LogZ_at_infinity``:          X = z,     Y = log z      (z -> oo)
* ``OnePlusZ_at_minus_one``:     X = 1 + z, Y = 1 + z      (z -> -1)
* ``NegLogAbsZ_at_minus_one``:   X = 1 + z, Y = -log|z|    (z -> -1)

Exponents may carry exact rational anchors (``Fraction``) used by the
holonomy classifier; floats alone never decide integrality there.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import mpmath

from .coeff_functions import (Algebraic, CoefficientFunction, Essential, Pole,
                              PoleLattice, singularity_to_json)
from .errors import (CatalogIncompleteError, DomainError, HypothesisError)
from .numerics import (DEFAULT, PrecisionContext, ctx_or_default, nearest_integer,
                       recip_sin_pi, sin_expansion_coeffs, taylor_coeffs_numeric,
                       to_mpc)

INFINITY = "LogZ_at_infinity"
ONE_PLUS_Z = "OnePlusZ_at_minus_one"
NEG_LOG_ABS_Z = "NegLogAbsZ_at_minus_one"
VARIABLES = (INFINITY, ONE_PLUS_Z, NEG_LOG_ABS_Z)


class VariableMismatchError(DomainError):
    pass


@dataclass(frozen=True)
class Oscillation:
    r: complex
    phase0: float
    beta: float
    beta_exact: Fraction | None = None


@dataclass(frozen=True)
class ExpansionTerm:
    coeff: complex = 1
    s0: complex = 0
    log_pow: complex = 0
    exp_q: complex = 0
    exp_beta: float | None = None
    osc: Oscillation | None = None
    variable: str = INFINITY
    s0_exact: Fraction | None = None
    log_pow_exact: Fraction | None = None
    exp_beta_exact: Fraction | None = None

    def __post_init__(self):
        if self.variable not in VARIABLES:
            raise DomainError(f"unknown expansion variable {self.variable!r}")
        if not mpmath.isfinite(complex(self.log_pow).real):
            raise DomainError("log power must be finite")
        if self.variable == INFINITY:
            for b in (self.exp_beta, self.osc.beta if self.osc else None):
                if b is not None and not 0 < b < 1:
                    raise DomainError("exponent beta of exp/cos factors must lie in (0, 1)")

    # shape without the coefficient, used for merging
    def shape(self):
        return (self.variable, complex(self.s0), complex(self.log_pow),
                complex(self.exp_q) if self.exp_beta is not None else 0j,
                self.exp_beta, self.osc)

    def dominance_key(self):
        """Larger key = more dominant at the variable's limit."""
        q = complex(self.exp_q).real if self.exp_beta is not None else 0.0
        b = self.exp_beta or 0.0
        if self.variable == INFINITY:
            # Y^beta with beta in (0,1) is below any power of z
            ek = (0, 0.0, 0.0) if q == 0 else ((1, b, q) if q > 0 else (-1, -b, q))
            return (complex(self.s0).real, ek, complex(self.log_pow).real)
        # X, Y -> 0 (Y = v ~ -(1+z) in size); exp(q Y^beta) with beta < 0 dominates
        ek = (0, 0.0, 0.0) if q == 0 else ((1, -b, q) if q > 0 else (-1, b, q))
        return (ek, -complex(self.s0).real - complex(self.log_pow).real,
                -complex(self.s0).real)

    def evaluate(self, z, prec_guard: int = 10) -> mpmath.mpc:
        z = to_mpc(z)
        if self.variable == INFINITY:
            logX = mpmath.log(z)
            Y = logX
        elif self.variable == ONE_PLUS_Z:
            X = 1 + z
            logX = mpmath.log(X)
            Y = X
        else:
            # power of (1+z) times exp(q v^beta), v = -log|z|
            X = 1 + z
            logX = mpmath.log(X)
            Y = -mpmath.log(abs(z))
        s0 = to_mpc(self.s0)
        lp = to_mpc(self.log_pow)
        e = s0 * logX
        if lp != 0:
            e += lp * mpmath.log(Y)
        if self.exp_beta is not None and self.exp_q != 0:
            e += to_mpc(self.exp_q) * mpmath.power(Y, self.exp_beta)
        v = to_mpc(self.coeff) * mpmath.exp(e)
        if self.osc is not None:
            v *= mpmath.cos(to_mpc(self.osc.r) * mpmath.power(Y, self.osc.beta)
                            + self.osc.phase0)
        return v

    def to_json(self) -> dict:
        c = complex(self.coeff)
        s0 = complex(self.s0)
        lp = complex(self.log_pow)
        d = {"coeff_re": c.real, "coeff_im": c.imag, "s0": [s0.real, s0.imag],
             "log_pow": [lp.real, lp.imag], "variable": self.variable}
        if self.exp_beta is not None:
            q = complex(self.exp_q)
            d["exp"] = {"q": [q.real, q.imag], "beta": self.exp_beta}
        if self.osc is not None:
            r = complex(self.osc.r)
            d["osc"] = {"r": [r.real, r.imag], "phase0": self.osc.phase0,
                        "beta": self.osc.beta}
        anchors = {k: str(v) for k, v in (("s0", self.s0_exact),
                                          ("log_pow", self.log_pow_exact),
                                          ("exp_beta", self.exp_beta_exact)) if v is not None}
        if self.osc is not None and self.osc.beta_exact is not None:
            anchors["osc_beta"] = str(self.osc.beta_exact)
        if anchors:
            d["exact"] = anchors
        return d

    @staticmethod
    def from_json(d: dict) -> "ExpansionTerm":
        ex = d.get("exact", {})
        frac = lambda k: Fraction(ex[k]) if k in ex else None  # noqa: E731
        osc = None
        if "osc" in d:
            o = d["osc"]
            osc = Oscillation(complex(*o["r"]), o["phase0"], o["beta"], frac("osc_beta"))
        exp_q, exp_beta = 0j, None
        if "exp" in d:
            exp_q, exp_beta = complex(*d["exp"]["q"]), d["exp"]["beta"]
        return ExpansionTerm(
            coeff=complex(d.get("coeff_re", 1.0), d.get("coeff_im", 0.0)),
            s0=complex(*d.get("s0", [0, 0])), log_pow=complex(*d.get("log_pow", [0, 0])),
            exp_q=exp_q, exp_beta=exp_beta, osc=osc, variable=d.get("variable", INFINITY),
            s0_exact=frac("s0"), log_pow_exact=frac("log_pow"),
            exp_beta_exact=frac("exp_beta"))

    def render(self) -> str:
        parts = []
        c = complex(self.coeff)
        parts.append(mpmath.nstr(c.real, 8) if c.imag == 0 else f"({mpmath.nstr(mpmath.mpc(c), 8)})")
        X, Y = {INFINITY: ("z", "log z"), ONE_PLUS_Z: ("(1+z)", "(1+z)"),
                NEG_LOG_ABS_Z: ("(1+z)", "v")}[self.variable]
        if complex(self.s0) != 0:
            parts.append(f"{X}^({_fmt(self.s0, self.s0_exact)})")
        if complex(self.log_pow) != 0:
            parts.append(f"({Y})^({_fmt(self.log_pow, self.log_pow_exact)})")
        if self.exp_beta is not None and self.exp_q != 0:
            parts.append(f"exp({_fmt(self.exp_q)}*({Y})^({_fmt(self.exp_beta, self.exp_beta_exact)}))")
        if self.osc is not None:
            parts.append(f"cos({_fmt(self.osc.r)}*({Y})^({_fmt(self.osc.beta, self.osc.beta_exact)})"
                         f" + {mpmath.nstr(self.osc.phase0, 8)})")
        return "*".join(parts)


def _fmt(x, exact: Fraction | None = None) -> str:
    if exact is not None:
        return str(exact)
    x = complex(x)
    if x.imag == 0:
        return mpmath.nstr(x.real, 8)
    return mpmath.nstr(mpmath.mpc(x), 8)


@dataclass(frozen=True)
class Expansion:
    terms: tuple
    error_order: ExpansionTerm | None
    source: str
    variable: str = INFINITY
    lattices: tuple = ()
    declarations: frozenset = field(default_factory=frozenset)
    provenance: str = ""

    @staticmethod
    def build(terms, error_order, source, variable=INFINITY, lattices=(),
              declarations=frozenset(), provenance="", drop_zero=True) -> "Expansion":
        for t in terms:
            if t.variable != variable:
                raise VariableMismatchError(f"term variable {t.variable} != {variable}")
        merged = merge(terms, drop_zero=drop_zero)
        return Expansion(tuple(merged), error_order, source, variable, tuple(lattices),
                         frozenset(declarations), provenance)

    def evaluate(self, z, n_terms: int | None = None) -> mpmath.mpc:
        return evaluate_expansion(self, z, n_terms)

    def render(self) -> str:
        body = " + ".join(t.render() for t in self.terms) or "0"
        if self.error_order is not None:
            body += " + O(" + replace(self.error_order, coeff=1).render().removeprefix("1*") + ")"
        return body

    def to_json(self) -> dict:
        return {"schema_version": 1, "source": self.source, "variable": self.variable,
                "terms": [t.to_json() for t in self.terms],
                "error_order": self.error_order.to_json() if self.error_order else None,
                "lattices": [singularity_to_json(l) for l in self.lattices],
                "declarations": sorted(self.declarations),
                "provenance": self.provenance}

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @staticmethod
    def from_json(d: dict | str) -> "Expansion":
        if isinstance(d, str):
            d = json.loads(d)
        terms = [ExpansionTerm.from_json(t) for t in d["terms"]]
        err = ExpansionTerm.from_json(d["error_order"]) if d.get("error_order") else None
        lattices = tuple(PoleLattice(complex(*l["base"]), complex(*l["step"]), l.get("count"),
                                     l.get("two_sided", False), l.get("order", 1),
                                     l.get("step_rational"), l.get("step_text", ""))
                         for l in d.get("lattices", []))
        return Expansion(tuple(terms), err, d.get("source", "json"),
                         d.get("variable", INFINITY), lattices,
                         frozenset(d.get("declarations", [])), d.get("provenance", ""))


def merge(terms, drop_zero: bool = False) -> list:
    """Combine equal-shape terms and sort by descending dominance."""
    out: dict = {}
    for t in terms:
        key = t.shape()
        if key in out:
            prev = out[key]
            out[key] = replace(prev, coeff=complex(prev.coeff) + complex(t.coeff))
        else:
            out[key] = t
    res = [t for t in out.values() if not (drop_zero and complex(t.coeff) == 0)]
    res.sort(key=lambda t: (t.dominance_key(), complex(t.s0).imag), reverse=True)
    return res


def evaluate_expansion(E: Expansion, z, n_terms: int | None = None) -> mpmath.mpc:
    z = to_mpc(z)
    if E.variable == INFINITY:
        if abs(z) <= math.e:
            raise DomainError("expansion at infinity needs |z| > e")
    elif abs(1 + z) >= 0.5:
        raise DomainError("expansion at -1 needs |1 + z| < 1/2")
    terms = E.terms if n_terms is None else E.terms[:n_terms]
    total = mpmath.mpc(0)
    for t in terms:
        if t.variable != E.variable:
            raise VariableMismatchError(f"term variable {t.variable} != {E.variable}")
        total += t.evaluate(z)
    return total


# -- polar case --------------------------------------------------------------------------

def _integer_anchor(s) -> Fraction | None:
    n = nearest_integer(s)
    return Fraction(n) if n is not None else None


def residue_terms(f: CoefficientFunction, pole, ctx: PrecisionContext | None = None,
                  radius: float | None = None, phi_order: int | None = None) -> list:
    """Terms of -Res(phi(s) z^s pi/sin(pi s); s0) as z^s0 * polynomial(log z).

    ``pole`` is a :class:`Pole` of phi, or a bare location (regular point of phi,
    typically a non-positive integer).  The total order adds 1 when s0 is an
    integer.
    """
    ctx = ctx_or_default(ctx)
    if isinstance(pole, Pole):
        s0, order, exact = to_mpc(pole.location), pole.order, pole.exact
    else:
        s0, order, exact = to_mpc(pole), 0, True
    if phi_order is not None:
        order = phi_order
    n = nearest_integer(s0)
    if n is None and abs(s0.imag) == 0 and abs(s0.real - round(float(s0.real))) < 1e-12:
        raise HypothesisError(f"pole {s0} is numerically on an integer; pass it exactly")
    mu = order + (1 if n is not None else 0)
    if mu == 0:
        return []
    if radius is None:
        radius = _safe_radius(f, s0)

    def h(s):
        return f.evaluator(s) * recip_sin_pi(s, pole_threshold=0)

    a, scale = taylor_coeffs_numeric(h, s0, radius, mu, ctx, laurent_order=mu,
                                     return_scale=True)
    anchor = _integer_anchor(s0) if (exact or n is not None) else None
    real = f.real_on_axis and s0.imag == 0
    terms = []
    for m in range(mu):
        ak = a[mu - 1 - m]          # a_{-m-1}
        if abs(ak) * radius ** (-m - 1) <= 10 * ctx.tol * scale:
            continue                # indistinguishable from zero
        coeff = -(ak.real if real else ak) / mpmath.factorial(m)
        terms.append(ExpansionTerm(coeff=complex(coeff), s0=complex(s0), log_pow=m,
                                   s0_exact=anchor, log_pow_exact=Fraction(m)))
    return terms


def _safe_radius(f: CoefficientFunction, s0) -> float:
    s0c = complex(s0)
    d = 0.5
    n = round(s0c.real)
    for k in (n - 1, n, n + 1):
        if abs(s0c - k) > 1e-9:
            d = min(d, abs(s0c - k))
    for p, _ in f.poles(s0c.real - 1, s0c.real + 1, abs(s0c.imag) + 1):
        if abs(p - s0c) > 1e-9:
            d = min(d, abs(p - s0c))
    for sing in f.catalog:
        if isinstance(sing, (Algebraic, Essential)) and abs(complex(sing.location) - s0c) > 1e-9:
            d = min(d, abs(complex(sing.location) - s0c))
    return d / 2


def polar_expansion(f: CoefficientFunction, B: float, ctx: PrecisionContext | None = None,
                    im_cap: float = 40.0, include_right: bool = True) -> Expansion:
    """Expansion at infinity from all poles with -B < Re s < 1/2, error O(z^-B).

    With ``include_right`` the cataloged poles in Re s >= 1/2 (present when phi
    violates the half-plane hypothesis) are added as well, because the
    continuation includes them.
    """
    ctx = ctx_or_default(ctx)
    B = float(B)
    hi = math.inf if include_right else 0.5
    for sing in f.catalog:
        if isinstance(sing, (Essential, Algebraic)):
            loc = complex(sing.location)
            if -B < loc.real:
                kind = "essential" if isinstance(sing, Essential) else "algebraic"
                raise CatalogIncompleteError(
                    f"{kind} singularity at {loc} inside the strip Re s > {-B}; "
                    "the polar expansion does not apply")
        if isinstance(sing, Pole) and abs(complex(sing.location).real + B) < 1e-12:
            raise HypothesisError(f"pole on the line Re s = {-B}")
    if float(B).is_integer():
        raise HypothesisError(f"Re s = {-B} passes through a pole of pi/sin(pi s)")
    poles = f.poles(re_min=-B, re_max=hi, im_cap=im_cap)
    if f.kind == "recip_gamma_plus_one" and include_right:
        poles = f.poles(re_min=-B, re_max=hi, im_cap=math.inf)
    terms: list = []
    lattice_ints = set()
    for p, order in poles:
        n = round(p.real)
        if abs(p - n) < 1e-9:
            lattice_ints.add(n)
            terms += residue_terms(f, Pole(complex(n), order, exact=True), ctx)
        else:
            terms += residue_terms(f, Pole(p, order), ctx)
    for n in range(0, math.ceil(B)):
        if n > B or -n in lattice_ints:
            continue
        terms += residue_terms(f, -n, ctx)
    lattices = tuple(s for s in f.catalog if isinstance(s, PoleLattice))
    right = [p for p, _ in poles if p.real >= 0.5]
    prov = f"poles in {-B} < Re s < {hi}; lattice members with |Im s| <= {im_cap}"
    decl = set(f.declarations)
    if right:
        prov += f"; {len(right)} cataloged poles with Re s >= 1/2 included, catalog truncated"
        decl.add("right-half-plane-poles")
    err = ExpansionTerm(coeff=1, s0=-B, s0_exact=Fraction(B).limit_denominator(10**6) * -1)
    return Expansion.build(terms, err, f"polar:{f.label}", INFINITY, lattices, decl, prov)


# -- algebraic case ----------------------------------------------------------------------

def _b_coeffs(s0, j_max, ctx):
    """b_{-1}, ..., b_{j_max} of pi/sin(pi s) at s0 (b_{-1} = 0 off the integers)."""
    return sin_expansion_coeffs(s0, j_max, ctx)


def algebraic_expansion(f: CoefficientFunction, K: float, ctx: PrecisionContext | None = None,
                        dominant_only: bool = True) -> Expansion:
    """Expansion at infinity from algebraic singularities (Hankel-contour terms).

    Truncation keeps (k, j) with Re(theta k + j) < K; the error term is
    z^{s_1} (log z)^{-K + Re lam - 1}.
    """
    ctx = ctx_or_default(ctx)
    algs = [s for s in f.catalog if isinstance(s, Algebraic)]
    others = [s for s in f.catalog if not isinstance(s, (Algebraic, Pole))]
    if others:
        raise HypothesisError("algebraic expansion needs a catalog of algebraic singularities "
                              "and poles only")
    if not algs:
        raise HypothesisError("no algebraic singularity in the catalog")
    min_sin = min(abs(math.sin(a.cut_angle)) for a in algs)
    for a in algs:
        if a.cut_angle == 0 or not 0 < abs(a.cut_angle) < math.pi / 2:
            raise HypothesisError("branch cut angle must lie in (-pi/2, 0) or (0, pi/2); "
                                  "horizontal cuts are not supported")
    if not f.growth_A < math.pi * min_sin:
        raise HypothesisError(f"growth A = {f.growth_A} is not below pi*min|sin(omega)|")
    re1 = max(complex(a.location).real for a in algs)
    dom = [a for a in algs if abs(complex(a.location).real - re1) < 1e-12]
    poles = [(complex(p), o) for p, o in f.poles(re_min=re1 - 1e-12, re_max=math.inf,
                                                 im_cap=math.inf)]
    terms: list = []
    # first sum over regular integer points
    all_int = all(nearest_integer(a.location) is None for a in dom)
    re1_int = float(re1).is_integer()
    n_max = int(-re1) if (re1_int and all_int) else math.ceil(-re1) - 1
    sing_locs = [complex(a.location) for a in algs] + [p for p, _ in poles]
    for n in range(0, n_max + 1):
        if any(abs(complex(-n) - s) < 1e-12 for s in sing_locs):
            continue
        with ctx.workprec(10):
            v = f.evaluator(mpmath.mpf(-n))
        terms.append(ExpansionTerm(coeff=complex((-1) ** (n + 1) * v), s0=-n,
                                   s0_exact=Fraction(-n), log_pow_exact=Fraction(0)))
    # dominant poles (remark on mixed catalogs)
    for p, order in poles:
        terms += residue_terms(f, Pole(p, order), ctx)
    lam_max = max(complex(a.lam).real for a in dom)
    for a in dom:
        terms += _hankel_terms(a, K, ctx)
    s1 = complex(dom[0].location)
    err = ExpansionTerm(coeff=1, s0=s1, log_pow=-K + lam_max - 1,
                        s0_exact=_integer_anchor(s1),
                        log_pow_exact=_frac(-K + lam_max - 1))
    return Expansion.build(terms, err, f"algebraic:{f.label}:K={K}", INFINITY, (),
                           f.declarations, f"truncation Re(theta k + j) < {K}")


def _frac(x) -> Fraction | None:
    x = complex(x)
    if x.imag != 0:
        return None
    fr = Fraction(x.real).limit_denominator(1000)
    return fr if abs(float(fr) - x.real) < 1e-13 else None


def _hankel_terms(a: Algebraic, K: float, ctx) -> list:
    s0 = to_mpc(a.location)
    th = complex(a.theta)
    lam = complex(a.lam)
    pairs = []
    k = 0
    while (th * k - 1).real < K:
        j = -1
        while (th * k + j).real < K:
            pairs.append((k, j))
            j += 1
        k += 1
    if not pairs:
        return []
    k_need = max(k for k, _ in pairs)
    if k_need >= len(a.psi_coeffs) and not a.psi_finite:
        raise HypothesisError(f"need {k_need + 1} psi coefficients, catalog has "
                              f"{len(a.psi_coeffs)}")
    j_max = max(j for _, j in pairs)
    b = _b_coeffs(s0, j_max, ctx)      # b[j + 1] = b_j
    th_ex, lam_ex = _frac(th), _frac(lam)
    s0_ex = _integer_anchor(s0)
    # s^{-lam} with psi coefficients in powers of s^theta
    terms = []
    with ctx.workprec(10):
        for k, j in sorted(pairs, key=lambda kj: (-(th * kj[0] + kj[1]).real, kj[0]),
                           reverse=True):
            bj = b[j + 1]
            pk = to_mpc(a.psi_coeffs[k]) if k < len(a.psi_coeffs) else mpmath.mpc(0)
            if bj == 0 or pk == 0:
                continue
            arg = -th * k - j + lam
            rg = mpmath.rgamma(arg)
            if rg == 0:
                continue
            coeff = -pk * bj * rg
            lp = arg - 1
            lp_ex = (lam_ex - th_ex * k - j - 1) if (th_ex is not None and lam_ex is not None) else None
            terms.append(ExpansionTerm(coeff=complex(coeff), s0=complex(s0),
                                       log_pow=complex(lp) if complex(lp).imag else complex(lp).real,
                                       s0_exact=s0_ex, log_pow_exact=lp_ex))
    return terms
