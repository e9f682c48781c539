"""Catalog of coefficient functions phi(s) lifting a sequence phi(n).

A :class:`CoefficientFunction` bundles an mpmath evaluator with the data the
engines need: growth constants (A, C) such that |phi(s)| < C exp(A |s|) on
Re s >= 1/2, a half-plane of guaranteed analyticity, and a catalog of known
singularities.  Builtins are created with :func:`make_builtin`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import mpmath
import numpy as np
from scipy import special as sps

from .errors import (ConvergenceError, DomainError, PoleError,
                     UnsupportedParameterError)
from .numerics import PrecisionContext, ctx_or_default, to_mpc

SQRT2 = math.sqrt(2.0)


# -- singularities -------------------------------------------------------------

@dataclass(frozen=True)
class Pole:
    location: complex
    order: int = 1
    exact: bool = False          # location known exactly (e.g. an integer)

    kind = "pole"


@dataclass(frozen=True)
class Algebraic:
    """phi(s) = (s - s0)^(-lam) psi((s - s0)^theta) near s0."""
    location: complex
    lam: complex
    theta: complex
    psi_coeffs: tuple
    cut_angle: float = math.pi / 4
    psi_finite: bool = False     # psi is the polynomial given by psi_coeffs

    kind = "algebraic"

    def __post_init__(self):
        if not complex(self.theta).real > 0:
            raise DomainError("algebraic singularity needs Re(theta) > 0")


@dataclass(frozen=True)
class Essential:
    location: complex
    descriptor: str

    kind = "essential"


@dataclass(frozen=True)
class PoleLattice:
    """Poles at base + k*step for k = 0, 1, ... (and k < 0 if two_sided).

    ``step_rational`` is a structural declaration (True / False / None for
    unknown); it is never inferred from the floating-point step.
    """
    base: complex
    step: complex
    count: int | None = None     # None: unbounded
    two_sided: bool = False
    order: int = 1
    step_rational: bool | None = None
    step_text: str = ""

    kind = "lattice"

    def __post_init__(self):
        if complex(self.step) == 0:
            raise DomainError("lattice step must be non-zero")

    def members(self, re_min: float, re_max: float, im_cap: float) -> list[complex]:
        base, step = complex(self.base), complex(self.step)
        out = []
        kmax = self.count if self.count is not None else 100000
        ks = range(-kmax + 1, kmax) if self.two_sided else range(0, kmax)
        for k in ks:
            s = base + k * step
            if abs(s.imag) > im_cap and step.real == 0:
                continue
            if re_min < s.real < re_max and abs(s.imag) <= im_cap:
                out.append(s)
            # stop early once we moved past the window along the step
            if k > 0 and abs(s - base) > 4 * (abs(re_min) + abs(re_max) + im_cap) + 10:
                break
        return out


Singularity = Pole | Algebraic | Essential | PoleLattice


def singularity_to_json(sing) -> dict:
    def c(x):
        x = complex(x)
        return [x.real, x.imag]
    if isinstance(sing, Pole):
        return {"type": "pole", "location": c(sing.location), "order": sing.order}
    if isinstance(sing, Algebraic):
        return {"type": "algebraic", "location": c(sing.location), "lambda": c(sing.lam),
                "theta": c(sing.theta), "psi_coeffs": [c(p) for p in sing.psi_coeffs[:8]],
                "cut_angle": sing.cut_angle}
    if isinstance(sing, Essential):
        return {"type": "essential", "location": c(sing.location),
                "descriptor": sing.descriptor}
    return {"type": "lattice", "base": c(sing.base), "step": c(sing.step),
            "step_text": sing.step_text, "count": sing.count, "two_sided": sing.two_sided,
            "order": sing.order, "step_rational": sing.step_rational}


# -- coefficient functions -----------------------------------------------------

@dataclass(frozen=True)
class CoefficientFunction:
    label: str
    kind: str
    params: tuple
    evaluator: Callable
    growth_A: float
    growth_C: float = 1.0
    analytic_halfplane: float = 0.0
    catalog: tuple = ()
    log_vectorized: Callable | None = None   # numpy: n -> log phi(n)
    real_on_axis: bool = True
    lindelof_guarantee: bool = True
    declarations: frozenset = field(default_factory=frozenset)
    notes: str = ""

    def __post_init__(self):
        if not 0 <= self.growth_A < math.pi:
            raise DomainError("growth_A must lie in [0, pi)")

    def __call__(self, s, ctx: PrecisionContext | None = None):
        return evaluate(self, s, ctx)

    def poles(self, re_min=-math.inf, re_max=math.inf, im_cap=40.0) -> list[tuple[complex, int]]:
        """(location, order) of cataloged poles in a window, lattices expanded."""
        out = []
        for sing in self.catalog:
            if isinstance(sing, Pole):
                s = complex(sing.location)
                if re_min < s.real < re_max and abs(s.imag) <= im_cap:
                    out.append((s, sing.order))
            elif isinstance(sing, PoleLattice):
                lo = max(re_min, -1e4)
                hi = min(re_max, 1e4)
                out.extend((s, sing.order) for s in sing.members(lo, hi, im_cap))
        return out

    def to_json(self) -> dict:
        return {"kind": self.kind, "params": list(self.params), "label": self.label,
                "growth_A": self.growth_A, "growth_C": self.growth_C,
                "analytic_halfplane": self.analytic_halfplane,
                "lindelof_guarantee": self.lindelof_guarantee,
                "declarations": sorted(self.declarations),
                "singularities": [singularity_to_json(s) for s in self.catalog]}


def evaluate(f: CoefficientFunction, s, ctx: PrecisionContext | None = None,
             threshold: float = 1e-12):
    ctx = ctx_or_default(ctx)
    s = to_mpc(s)
    for sing in f.catalog:
        if isinstance(sing, Pole) and abs(complex(s) - complex(sing.location)) <= threshold:
            raise PoleError(f"{f.label}: pole at {sing.location}")
        if isinstance(sing, PoleLattice):
            step = complex(sing.step)
            k = (complex(s) - complex(sing.base)) / step
            kr = round(k.real)
            in_range = (kr >= 0 or sing.two_sided) and (sing.count is None or abs(kr) < sing.count)
            if in_range and abs(complex(s) - complex(sing.base) - kr * step) <= threshold:
                raise PoleError(f"{f.label}: lattice pole at {complex(sing.base) + kr * step}")
    with ctx.workprec(10):
        v = f.evaluator(s)
    return +v


def from_json(data: dict, ctx: PrecisionContext | None = None) -> CoefficientFunction:
    return make_builtin(data["kind"], *data["params"], ctx=ctx)


# -- roots of Gamma(s) = -1 --------------------------------------------------------

def gamma_plus_one_eq_minus_one_roots(count: int, ctx: PrecisionContext | None = None,
                                      scan_step: float = 1e-3) -> list:
    """The ``count`` largest real roots of Gamma(s) = -1, descending.

    The two roots in (-3, -2) come from a sign-change scan; for k >= 4 the
    root near -k is seeded at -k + (-1)^(k-1)/k!.  Working precision grows
    with k because the root sits within about 1/k! of the integer.
    """
    if count < 1:
        raise DomainError("count must be >= 1")
    ctx = ctx_or_default(ctx)
    roots = []
    with mpmath.workprec(max(ctx.bits, 53) + 20):
        xs = np.arange(-3 + scan_step, -2, scan_step)
        vals = sps.gamma(xs) + 1
        seeds = [xs[i] for i in range(len(xs) - 1) if vals[i] * vals[i + 1] < 0]
        for x0 in sorted(seeds, reverse=True):
            roots.append(_polish_real_root(mpmath.mpf(x0), ctx, 2))
    k = 4
    while len(roots) < count:
        extra = int(math.lgamma(k + 1) / math.log(2)) + 20
        seed_bits = ctx.bits + extra + 20
        with mpmath.workprec(seed_bits):
            seed = -k + mpmath.mpf(-1) ** (k - 1) / mpmath.factorial(k)
        roots.append(_polish_real_root(seed, ctx, extra))
        k += 1
    roots = roots[:count]
    roots.sort(reverse=True)
    return roots


def _polish_real_root(x0, ctx: PrecisionContext, extra_bits: int, max_iter: int = 80):
    bits = ctx.bits + extra_bits + 20
    with mpmath.workprec(bits):
        x = mpmath.mpf(x0)
        for _ in range(max_iter):
            g = mpmath.gamma(x)
            dx = (g + 1) / (g * mpmath.digamma(x))
            x -= dx
            if abs(dx) <= mpmath.mpf(2) ** (-(bits - 10)) * max(abs(x), 1):
                return +x
    raise ConvergenceError(f"Newton for Gamma(s) = -1 did not converge from {x0}")


def _winding(fn, x0, x1, y0, y1, n=512):
    while True:
        edges = np.concatenate([
            np.linspace(x0, x1, n, endpoint=False) + 1j * y0,
            x1 + 1j * np.linspace(y0, y1, n, endpoint=False),
            np.linspace(x1, x0, n, endpoint=False) + 1j * y1,
            x0 + 1j * np.linspace(y1, y0, n + 1)])
        ph = np.angle(fn(edges))
        d = np.diff(ph)
        d = (d + np.pi) % (2 * np.pi) - np.pi
        if np.max(np.abs(d)) < 0.8 or n >= 1 << 15:
            return int(round(np.sum(d) / (2 * np.pi)))
        n *= 4


@lru_cache(maxsize=16)
def gamma_eq_minus_one_complex_roots(re_min: float, re_max: float, im_max: float,
                                     bits: int = 53) -> tuple:
    """Non-real roots s of Gamma(s + 1) = -1 in a box, both half-planes.

    Unit boxes are screened by the argument principle (the function has no
    poles off the real axis) and each detected zero is polished by Newton.
    """
    fn = lambda s: sps.gamma(s + 1) + 1
    out = []
    y_lo = 1e-3
    xs = np.arange(math.floor(re_min), math.ceil(re_max), 1.0)
    ys = np.arange(0.0, math.ceil(im_max), 1.0)
    with mpmath.workprec(bits + 20):
        g = lambda s: mpmath.gamma(s + 1) + 1
        for x0 in xs:
            for y0 in ys:
                w = _winding(fn, x0, x0 + 1, max(y0, y_lo), y0 + 1)
                if w <= 0:
                    continue
                found = _roots_in_box(g, x0, x0 + 1, max(y0, y_lo), y0 + 1, w)
                out.extend(found)
    out.sort(key=lambda s: (s.real, s.imag))
    full = []
    for s in out:
        full.append(s)
        full.append(s.conjugate())
    return tuple(full)


def _roots_in_box(g, x0, x1, y0, y1, w):
    found = []
    grid = [(x0 + (i + 0.5) * (x1 - x0) / 4, y0 + (j + 0.5) * (y1 - y0) / 4)
            for i in range(4) for j in range(4)]
    for gx, gy in grid:
        try:
            r = mpmath.findroot(g, mpmath.mpc(gx, gy), tol=mpmath.mpf(2) ** (-2 * mpmath.mp.prec // 3 * 2))
        except (ValueError, ZeroDivisionError):
            continue
        rc = complex(r)
        if not (x0 <= rc.real < x1 and y0 <= rc.imag < y1):
            continue
        if all(abs(rc - complex(f)) > 1e-8 for f in found):
            found.append(r)
        if len(found) == w:
            break
    if len(found) != w:
        raise ConvergenceError(
            f"located {len(found)} of {w} roots of Gamma(s+1) = -1 in box "
            f"[{x0},{x1}]x[{y0},{y1}]")
    return [complex(r) for r in found]


# -- builtins ------------------------------------------------------------------

def _exp_power(c: float, theta: float, ctx) -> CoefficientFunction:
    if isinstance(c, complex) or isinstance(theta, complex):
        raise UnsupportedParameterError("ExpPower needs real c and theta")
    c, theta = float(c), float(theta)
    if theta > 1 or (theta == 1 and abs(c) >= math.pi):
        raise UnsupportedParameterError(
            "ExpPower(c, theta) violates the growth condition (theta > 1 or |c| >= pi)")
    cc, th = mpmath.mpf(c), mpmath.mpf(theta)

    def ev(s):
        return mpmath.exp(cc * mpmath.power(s, th))

    def logv(n):
        return c * n ** theta + 0j

    catalog: tuple = ()
    if theta <= 0:
        A = 0.0
        C = math.exp(abs(c) * 2.0 ** (-theta)) if theta < 0 else math.exp(c)
        if theta < 0 and c != 0:
            catalog = (Essential(0j, f"exp({c:g} s^{theta:g})"),)
    elif theta < 1:
        if c <= 0:
            # Re s^theta >= 0 on Re s > 0
            A, C = 0.0, 1.0
        else:
            A = 0.05
            # max_x c x^theta - A x
            xs = (theta * c / A) ** (1 / (1 - theta))
            C = math.exp(A * xs * (1 - theta) / theta)
        psi = tuple(mpmath.mpf(c) ** k / mpmath.factorial(k) for k in range(64))
        if c != 0:
            catalog = (Algebraic(0j, 0, theta, psi),)
    else:
        A, C = abs(c), 1.0
    return CoefficientFunction(
        label=f"exp({c:g}*n^{theta:g})", kind="exp", params=(c, theta), evaluator=ev,
        growth_A=A, growth_C=C, catalog=catalog, log_vectorized=logv)


def _recip_gamma_plus_one(ctx, n_real: int = 12, box: float = 30.0) -> CoefficientFunction:
    real_roots = [r - 1 for r in gamma_plus_one_eq_minus_one_roots(n_real, ctx)]
    cplx = gamma_eq_minus_one_complex_roots(-float(n_real) - 3, box, box)
    catalog = tuple(Pole(mpmath.mpc(r)) for r in real_roots) + tuple(Pole(s) for s in cplx)

    def ev(s):
        rg = mpmath.rgamma(s + 1)
        return rg / (rg + 1)

    def logv(n):
        return -np.logaddexp(0.0, sps.gammaln(n + 1)) + 0j

    return CoefficientFunction(
        label="1/(1+Gamma(s+1))", kind="recip_gamma_plus_one", params=(), evaluator=ev,
        growth_A=0.01, growth_C=2.0, catalog=catalog, log_vectorized=logv,
        lindelof_guarantee=False,
        declarations=frozenset({"poles-not-finite-progression-union"}),
        notes=("has infinitely many non-real poles in Re s > 0 (first near "
               "2.394 +/- 2.662i); continuation adds their residues"))


def _recip_two_pow(ctx) -> CoefficientFunction:
    log2 = mpmath.log(2)

    def ev(s):
        return 1 / mpmath.expm1(s * log2)

    def logv(n):
        return -(n * math.log(2) + np.log1p(-np.exp2(-n))) + 0j

    lattice = PoleLattice(0j, 2j * math.pi / math.log(2), None, two_sided=True,
                          step_rational=None, step_text="2*pi*i/log(2)")
    return CoefficientFunction(
        label="1/(2^s-1)", kind="recip_two_pow", params=(), evaluator=ev,
        growth_A=0.01, growth_C=1 / (math.sqrt(2) - 1), catalog=(lattice,),
        log_vectorized=logv)


def _gamma_ratio(ctx, normalized: bool = True) -> CoefficientFunction:
    r2 = mpmath.sqrt(2)
    if normalized:
        def ev(s):
            if s == 0:
                return mpmath.mpc(0)
            return mpmath.gamma(s * r2) * mpmath.rgamma(s) ** 2

        def logv(n):
            return sps.gammaln(n * SQRT2) - 2 * sps.gammaln(n) + 0j
        A = math.pi * (1 - 1 / SQRT2) + 0.05
        label = "Gamma(s*sqrt2)/Gamma(s)^2"
        kind = "gamma_ratio"
        guarantee = True
    else:
        def ev(s):
            return mpmath.gamma(s * r2)

        def logv(n):
            return sps.gammaln(n * SQRT2) + 0j
        A = math.pi - 1e-9
        label = "Gamma(s*sqrt2)"
        kind = "gamma_sqrt2"
        guarantee = False
    lattice = PoleLattice(-1 / SQRT2, -1 / SQRT2, None, step_rational=False,
                          step_text="-1/sqrt(2)")
    return CoefficientFunction(
        label=label, kind=kind, params=(), evaluator=ev, growth_A=A, growth_C=3.0,
        catalog=(lattice,), log_vectorized=logv, lindelof_guarantee=guarantee,
        notes="" if normalized else "no Lindelof guarantee: super-exponential growth")


def _recip_zeta_shift(ctx) -> CoefficientFunction:
    def ev(s):
        return 1 / mpmath.zeta(s + 2)

    def logv(n):
        return -np.log(sps.zeta(n + 2, 1)) + 0j

    catalog = (PoleLattice(-4 + 0j, -2 + 0j, None, order=1, step_rational=True,
                           step_text="-2"),
               Essential(-1.5 + 0j, "nontrivial zeta zeros"))
    return CoefficientFunction(
        label="1/zeta(s+2)", kind="recip_zeta_shift", params=(), evaluator=ev,
        growth_A=0.01, growth_C=1.3, catalog=catalog, log_vectorized=logv,
        declarations=frozenset({"infinitely-many-imaginary-parts"}))


def _power_law(lam: float, ctx) -> CoefficientFunction:
    if isinstance(lam, complex):
        raise UnsupportedParameterError("PowerLaw needs a real exponent")
    lam = float(lam)
    ml = mpmath.mpf(lam)

    def ev(s):
        return mpmath.power(s, -ml)

    def logv(n):
        return -lam * np.log(n) + 0j

    if lam == int(lam):
        catalog = (Pole(0j, int(lam), exact=True),) if lam > 0 else ()
    else:
        catalog = (Algebraic(0j, lam, 1.0, (mpmath.mpf(1),), psi_finite=True),)
    if lam >= 0:
        A, C = 0.0, 2.0 ** lam
    else:
        A = 0.05
        C = (abs(lam) / (math.e * A)) ** abs(lam)
    return CoefficientFunction(
        label=f"s^(-{lam:g})", kind="power", params=(lam,), evaluator=ev,
        growth_A=A, growth_C=C, catalog=catalog, log_vectorized=logv)


def _constant(a: float, ctx) -> CoefficientFunction:
    a = float(a)
    ma = mpmath.mpf(a)
    la = complex(np.log(complex(a))) if a != 0 else -np.inf

    def ev(s):
        return mpmath.mpc(ma)

    def logv(n):
        return np.full(n.shape, la, dtype=complex)

    return CoefficientFunction(
        label=f"{a:g}", kind="const", params=(a,), evaluator=ev, growth_A=0.0,
        growth_C=max(abs(a), 1e-300), log_vectorized=logv)


def _identity(ctx) -> CoefficientFunction:
    def ev(s):
        return mpmath.mpc(s)

    def logv(n):
        return np.log(n) + 0j

    return CoefficientFunction(
        label="s", kind="identity", params=(), evaluator=ev, growth_A=0.05,
        growth_C=1 / (math.e * 0.05), log_vectorized=logv)


_ALIASES = {
    "exp": "exp", "exppower": "exp",
    "recip_gamma_plus_one": "recip_gamma_plus_one", "factorial": "recip_gamma_plus_one",
    "recip_two_pow": "recip_two_pow", "twopow": "recip_two_pow",
    "gamma_ratio": "gamma_ratio", "gamma_sqrt2": "gamma_sqrt2",
    "recip_zeta_shift": "recip_zeta_shift", "zeta": "recip_zeta_shift",
    "power": "power", "powerlaw": "power",
    "const": "const", "constant": "const",
    "identity": "identity", "id": "identity",
}

BUILTIN_KINDS = tuple(sorted(set(_ALIASES.values())))


def make_builtin(kind: str, *params, ctx: PrecisionContext | None = None) -> CoefficientFunction:
    """Construct a builtin coefficient function.

    ``kind`` is one of ``exp`` (c, theta), ``recip_gamma_plus_one``,
    ``recip_two_pow``, ``gamma_ratio``, ``gamma_sqrt2``, ``recip_zeta_shift``,
    ``power`` (lambda), ``const`` (a) or ``identity``.
    """
    ctx = ctx_or_default(ctx)
    key = _ALIASES.get(kind.lower())
    if key is None:
        raise UnsupportedParameterError(f"unknown coefficient function kind {kind!r}")
    nparams = {"exp": 2, "power": 1, "const": 1}.get(key, 0)
    if len(params) != nparams:
        raise UnsupportedParameterError(f"{key} takes {nparams} parameter(s), got {len(params)}")
    if key == "exp":
        return _exp_power(*params, ctx)
    if key == "recip_gamma_plus_one":
        return _recip_gamma_plus_one(ctx)
    if key == "recip_two_pow":
        return _recip_two_pow(ctx)
    if key == "gamma_ratio":
        return _gamma_ratio(ctx, True)
    if key == "gamma_sqrt2":
        return _gamma_ratio(ctx, False)
    if key == "recip_zeta_shift":
        return _recip_zeta_shift(ctx)
    if key == "power":
        return _power_law(params[0], ctx)
    if key == "const":
        return _constant(params[0], ctx)
    return _identity(ctx)


def parse_phi(spec: str, ctx: PrecisionContext | None = None) -> CoefficientFunction:
    """``kind[:p1,p2,...]`` as used on the command line."""
    kind, _, rest = spec.partition(":")
    params = [float(p) for p in rest.split(",")] if rest else []
    return make_builtin(kind, *params, ctx=ctx)
