"""Analytic continuation of F(z) = sum_{n>=1} phi(n) (-z)^n.

Two independent routes:

* :func:`direct_sum` sums the power series (only inside its disc of
  convergence);
* :func:`continue_gf` evaluates the Lindelof integral

      F(z) = -1/(2 pi i) int_{sigma - i oo}^{sigma + i oo} phi(s) z^s pi/sin(pi s) ds

  along a vertical line 0 < sigma < 1, valid in |arg z| < pi - A.

Cataloged poles of phi to the right of the line are accounted for by
subtracting their residues, so the line may sit left of 1/2 (useful near a
saddle point for large |z|) and functions such as 1/(1 + Gamma(s+1)), whose
poles reach into Re s > 0, are still continued correctly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import mpmath
import numpy as np

from .coeff_functions import CoefficientFunction
from .errors import (ConvergenceError, DomainError, HypothesisError, SectorError)
from .numerics import (DEFAULT, PrecisionContext, ctx_or_default,
                       recip_sin_pi, taylor_coeffs_numeric, to_mpc)

DIRECT_SUM_CAP = 10**7


_MAX_TRAPEZOID_NODES = 1 << 18


class HeightCapError(ConvergenceError):
    pass


@dataclass(frozen=True)
class QuadratureConfig:
    ctx: PrecisionContext = DEFAULT
    max_height: float = 400.0
    rule: str = "adaptive-segment"          # or "fixed-step"
    shift: float | str = 0.5                # abscissa, or "auto"
    guard_bits: int = 10
    refine: int = 0                         # each level halves segment length / step

    def __post_init__(self):
        if self.rule not in ("adaptive-segment", "fixed-step"):
            raise DomainError(f"unknown quadrature rule {self.rule!r}")
        if self.shift != "auto" and not 0 < float(self.shift) < 1:
            raise DomainError("contour shift must lie in (0, 1)")
        if not self.max_height > 0:
            raise DomainError("max_height must be positive")
        if int(self.refine) != self.refine or self.refine < 0:
            raise DomainError("refine must be a non-negative integer")


class Continuation(NamedTuple):
    value: mpmath.mpc
    error: float
    shift: float
    height: float
    residue_correction: mpmath.mpc


# -- direct summation ------------------------------------------------------------

def direct_sum(f: CoefficientFunction, z, ctx: PrecisionContext | None = None,
               max_terms: int = DIRECT_SUM_CAP) -> mpmath.mpc:
    """Sum phi(n) (-z)^n until a geometric majorant bounds the tail by tol.

    Terms are handled in log space, so sums as large as exp(2500) (the
    coefficients e^sqrt(n) near z = -1) are representable.
    """
    ctx = ctx_or_default(ctx)
    z = to_mpc(z)
    if z == 0:
        return mpmath.mpc(0)
    if ctx.bits <= 53 and f.log_vectorized is not None:
        return _direct_sum_numpy(f, complex(z), ctx.tol, max_terms)
    return _direct_sum_mp(f, z, ctx, max_terms)


def _certified_tail(log_last: float, ratio: float, log_total: float, tol: float) -> bool:
    if ratio >= 1:
        return False
    log_tail = log_last + math.log(ratio / (1 - ratio)) if ratio > 0 else -math.inf
    return log_tail <= math.log(tol) + log_total - math.log(10)


def _direct_sum_numpy(f, z, tol, max_terms):
    absz = abs(z)
    # real z: apply (-1)^n exactly instead of exp(i pi n)
    flip = z.imag == 0 and z.real > 0
    log_mz = complex(math.log(absz)) if z.imag == 0 else complex(np.log(-z))
    start, chunk = 1, 512
    M = -math.inf                 # running scale: sum = exp(M) * (re + i im)
    re_parts: list[float] = []
    im_parts: list[float] = []
    while True:
        stop = min(start + chunk, max_terms + 1)
        n = np.arange(start, stop, dtype=np.float64)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            lt = np.asarray(f.log_vectorized(n), dtype=complex) + n * log_mz
        lt = np.where(np.isnan(lt), -np.inf, lt)
        finite = np.isfinite(lt.real)
        cmax = float(np.max(lt.real[finite])) if finite.any() else -math.inf
        if cmax > M:
            if M > -math.inf:
                scale = math.exp(M - cmax)
                re_parts = [v * scale for v in re_parts]
                im_parts = [v * scale for v in im_parts]
            M = cmax
        if M > -math.inf:
            terms = np.exp(lt - M)
            terms[~finite] = 0
            if flip:
                terms[(n % 2) == 1] *= -1
            re_parts.append(math.fsum(terms.real))
            im_parts.append(math.fsum(terms.imag))
        total = complex(math.fsum(re_parts), math.fsum(im_parts))
        # ratio certificate from the last quarter of the chunk
        tail = lt.real[finite][-max(2, len(n) // 4):]
        if len(tail) >= 2:
            # phi(n+1)/phi(n) -> 1 for the sub-exponential catalog, so the term
            # ratio tends to |z|; never certify with a majorant below that limit
            ratio = math.exp(float(np.max(np.diff(tail))))
            if absz < 1:
                ratio = max(ratio, absz)
            log_total = M + math.log(abs(total)) if total != 0 else -math.inf
            if log_total == -math.inf:
                if float(tail[-1]) < math.log(tol) - 700:
                    return mpmath.mpc(0)
            elif _certified_tail(float(tail[-1]), ratio, log_total, tol):
                return mpmath.exp(mpmath.mpf(M)) * mpmath.mpc(total)
            if absz >= 1 and ratio >= 1 and stop > 10**4:
                raise DomainError(f"series diverges at |z| = {absz:g}")
        elif not finite.any() and stop > 10**4:
            return mpmath.mpc(0)
        if stop > max_terms:
            raise ConvergenceError(f"direct sum needs more than {max_terms} terms")
        start = stop
        chunk = min(chunk * 2, 1 << 20)


def _direct_sum_mp(f, z, ctx, max_terms):
    with ctx.workprec(20):
        mz = -z
        total = mpmath.mpc(0)
        power = mpmath.mpc(1)
        prev_abs = None
        ratio_max = 0.0
        for n in range(1, max_terms + 1):
            power *= mz
            t = f.evaluator(mpmath.mpf(n)) * power
            total += t
            a = abs(t)
            if prev_abs is not None and prev_abs > 0:
                r = float(a / prev_abs)
                ratio_max = r if n % 64 == 1 else max(ratio_max, r)
                rb = max(ratio_max, float(abs(z))) if abs(z) < 1 else ratio_max
                if n > 16 and rb < 1 and total != 0:
                    if a * rb / (1 - rb) <= ctx.tol * abs(total) / 10:
                        return +total
                if abs(z) >= 1 and n > 10**4 and ratio_max >= 1:
                    raise DomainError(f"series diverges at |z| = {float(abs(z)):g}")
            prev_abs = a
    raise ConvergenceError(f"direct sum needs more than {max_terms} terms")


# -- Lindelof integral ---------------------------------------------------------------

def check_sector(f: CoefficientFunction, z) -> float:
    z = to_mpc(z)
    if z == 0:
        raise DomainError("the Lindelof integral needs z != 0")
    arg = abs(float(mpmath.arg(z)))
    if arg >= math.pi - f.growth_A:
        raise SectorError(
            f"|arg z| = {arg:.6g} is outside the sector |arg z| < pi - A = "
            f"{math.pi - f.growth_A:.6g}")
    return arg


def truncation_height(f: CoefficientFunction, z, ctx: PrecisionContext | None = None,
                      scale: float = 1.0, max_height: float = 400.0) -> float:
    """Smallest T with C e^{AT} e^{-(pi - |arg z|) T} * 100 < tol * scale."""
    ctx = ctx_or_default(ctx)
    arg = check_sector(f, z)
    gap = math.pi - f.growth_A - arg
    if gap <= 1e-9:
        raise HeightCapError("degenerate sector: pi - A - |arg z| is zero")
    T = math.log(100 * max(f.growth_C, 1e-300) / (ctx.tol * scale)) / gap
    T = max(T, 0.0)
    if T > max_height:
        raise HeightCapError(
            f"truncation height {T:.4g} exceeds cap {max_height:g} "
            f"(pi - A - |arg z| = {gap:.3g} too small)")
    return T


def choose_shift(f: CoefficientFunction, z) -> float:
    """Contour abscissa near the real saddle of |phi(s) z^s pi/sin(pi s)|."""
    z = to_mpc(z)
    L = float(mpmath.log(abs(z)))
    lo = max(f.analytic_halfplane, 0.0)
    if L <= 1:
        return 0.5
    if f.kind == "exp" and f.params[1] < 0 and f.params[0] != 0:
        c, th = f.params
        sig = (abs(c * th) / L) ** (1 / (1 - th))
        return float(min(max(sig, lo + 1e-6), 0.5))

    def objective(x):
        s = mpmath.mpf(x)
        return float(mpmath.log(abs(f.evaluator(s))) + s * L
                     + mpmath.log(abs(mpmath.pi / mpmath.sinpi(s))))

    a = max(lo + 1e-6, min(1.0 / L, 0.25))
    grid = np.geomspace(a, 0.5, 40)
    vals = [objective(x) for x in grid]
    return float(grid[int(np.argmin(vals))])


def _residue(g, p, radius, ctx, order, phi=None, rest=None):
    if order == 1 and phi is not None:
        # simple pole: Res phi = 1 / (1/phi)'(p)
        d = mpmath.diff(lambda s: 1 / phi(s), p)
        return rest(p) / d
    coeffs = taylor_coeffs_numeric(g, p, radius, order, ctx, laurent_order=order)
    return coeffs[order - 1]


def _residue_bound(p: complex, z) -> float:
    """Crude size of z^p pi/sin(pi p) (phi's residue assumed O(1))."""
    y = abs(p.imag)
    if y < 1:
        return math.inf
    logz = complex(mpmath.log(z))
    return 2 * math.pi * math.exp(-math.pi * y + p.real * logz.real
                                  + abs(logz.imag) * y) / (1 - math.exp(-2 * math.pi * y))


def _nearest_gap(p: complex, others) -> float:
    d = abs(p - round(p.real)) if abs(p.imag) < 0.5 else 1.0
    for q in others:
        if q != p:
            d = min(d, abs(p - q))
    return max(d, 1e-300)


def pole_correction(f: CoefficientFunction, z, sigma: float, ctx: PrecisionContext,
                    tol_abs: float | None = None) -> tuple[mpmath.mpc, float]:
    """Sum of Res(phi(s) z^s pi/sin(pi s)) over cataloged poles with Re > sigma.

    Returns (sum, size of the outermost included residue).
    """
    z = to_mpc(z)
    poles = f.poles(re_min=sigma, re_max=math.inf, im_cap=math.inf)
    if not poles:
        return mpmath.mpc(0), 0.0
    locs = [p for p, _ in poles]
    logz = mpmath.log(z)

    def rest(s):
        return mpmath.exp(s * logz) * recip_sin_pi(s, pole_threshold=0)

    def integrand(s):
        return f.evaluator(s) * rest(s)

    total = mpmath.mpc(0)
    sizes = []
    skip = ctx.tol * 1e-4
    with ctx.workprec(20):
        for p, order in poles:
            pc = complex(p)
            bound = _residue_bound(pc, z)
            if bound < skip:
                sizes.append((abs(pc), bound))
                continue
            r = _nearest_gap(pc, locs) / 2
            r = min(r, abs(pc.real - sigma) / 2, 0.25)
            res = _residue(integrand, p, r, ctx, order, f.evaluator, rest)
            total += res
            sizes.append((abs(pc), float(abs(res))))
    sizes.sort()
    return +total, sizes[-1][1]


def continue_gf(f: CoefficientFunction, z, cfg: QuadratureConfig | None = None) -> Continuation:
    cfg = cfg or QuadratureConfig()
    ctx = cfg.ctx
    z = to_mpc(z)
    arg = check_sector(f, z)
    sigma = choose_shift(f, z) if cfg.shift == "auto" else float(cfg.shift)
    if sigma <= f.analytic_halfplane:
        raise HypothesisError(
            f"contour abscissa {sigma} is not inside the half-plane of analyticity "
            f"Re s > {f.analytic_halfplane}")
    gap = math.pi - f.growth_A - arg
    with mpmath.workprec(ctx.bits + cfg.guard_bits):
        logz = mpmath.log(z)
        sig = mpmath.mpf(sigma)

        def g(t):
            s = mpmath.mpc(sig, t)
            return f.evaluator(s) * mpmath.exp(s * logz) * recip_sin_pi(s, pole_threshold=0)

        if cfg.rule == "adaptive-segment":
            acc, err, height = _integrate_segments(g, float(logz.real), sigma, gap, ctx, cfg)
        else:
            acc, err, height = _integrate_trapezoid(g, float(logz.real), sigma, gap, ctx, cfg)
        value = -acc / (2 * mpmath.pi)
        err = err / (2 * math.pi)
        corr, outer = pole_correction(f, z, sigma, ctx)
        value -= corr
        if outer > ctx.tol * (1 + float(abs(value))) and f.kind == "recip_gamma_plus_one":
            raise ConvergenceError(
                "cataloged right half-plane poles do not cover z; the outermost "
                f"residue is {outer:.3g}")
    return Continuation(+value, float(err), sigma, height, corr)


def _segment_length(L: float) -> float:
    return min(1.0, 8 * 2 * math.pi / max(abs(L), 1.0))


def _integrate_segments(g, L, sigma, gap, ctx, cfg):
    h = _segment_length(L) / 2 ** cfg.refine
    # geometric refinement towards t = 0, where 1/s-type peaks of width ~sigma live
    pts = [0.0]
    w = min(sigma, h) / 4 / 2 ** cfg.refine
    while w < h:
        pts.append(w)
        w *= 2
    pts.append(h)
    acc = mpmath.mpc(0)
    err = 0.0
    mass = 0.0
    a = 0.0
    idx = 1
    target_floor = ctx.tol
    # a contour close to the imaginary axis sits at a saddle whose width is O(sigma)
    min_height = 1.0 if sigma >= 0.05 else 20 * sigma
    while True:
        b = pts[idx] if idx < len(pts) else a + h
        idx += 1
        v1, e1 = mpmath.quad(g, [a, b], error=True)
        v2, e2 = mpmath.quad(g, [-b, -a], error=True)
        seg = v1 + v2
        acc += seg
        mass += float(abs(v1)) + float(abs(v2))
        err += float(e1) + float(e2)
        a = b
        if b >= min_height:
            env = max(float(abs(g(b))), float(abs(g(-b))))
            scale = 2 * math.pi * (1 + float(abs(acc)) / (2 * math.pi))
            tail = 100 * env / gap
            if tail <= target_floor * scale and float(abs(seg)) <= target_floor * scale:
                # quadrature estimates miss the last few bits; floor at 2^-(bits-8) of the mass
                floor = 2.0 ** (8 - ctx.bits) * mass
                return acc, err + tail / 100 + floor, b
        if b > cfg.max_height:
            raise HeightCapError(f"integrand not negligible below height {cfg.max_height}")


def _integrate_trapezoid(g, L, sigma, gap, ctx, cfg):
    # height from the same envelope test, then step halving until stable
    h_scan = _segment_length(L)
    T = 1.0
    peak = float(abs(g(0)))
    while True:
        env = max(float(abs(g(T))), float(abs(g(-T))))
        if env * 100 / gap <= ctx.tol * max(peak, 1e-300) * 1e-2:
            break
        T += h_scan
        if T > cfg.max_height:
            raise HeightCapError(f"integrand not negligible below height {cfg.max_height}")
    n = max(64, int(4 * T / h_scan * 8)) * 2 ** cfg.refine
    prev = None
    while n <= _MAX_TRAPEZOID_NODES:
        step = 2 * T / n
        if prev is None:
            vals = [g(-T + k * step) for k in range(n + 1)]
            s = (sum(vals[1:-1]) + (vals[0] + vals[-1]) / 2)
        else:
            mids = [g(-T + (k + 0.5) * step * 2) for k in range(n // 2)]
            s = s + sum(mids)
        est = s * step
        if prev is not None and abs(est - prev) <= ctx.tol * (1 + float(abs(est)) / (2 * math.pi)):
            return est, float(abs(est - prev)) + 2.0 ** (8 - ctx.bits) * float(abs(est)), T
        prev = est
        n *= 2
    raise ConvergenceError(
        f"trapezoidal rule did not converge with {_MAX_TRAPEZOID_NODES} nodes")
