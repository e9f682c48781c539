"""Extended-precision complex helpers used by every other module.

All values are mpmath numbers.  Each public function takes an optional
:class:`PrecisionContext`; the computation runs under ``mpmath.workprec`` at
the context's bit count, so callers never need to touch ``mp.prec``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass
from typing import Callable, Sequence

import mpmath
import numpy as np

from .errors import ConvergenceError, DomainError, PoleError

mp = mpmath.mp

Number = complex | float | int | mpmath.mpf | mpmath.mpc


@dataclass(frozen=True)
class PrecisionContext:
    bits: int = 53
    tol: float = 1e-12

    def __post_init__(self):
        if int(self.bits) != self.bits or self.bits < 53:
            raise DomainError(f"bits must be an integer >= 53, got {self.bits}")
        if not self.tol > 0:
            raise DomainError("tol must be positive")
        if self.tol < 2.0 ** (1 - self.bits):
            raise DomainError(
                f"tol={self.tol:g} is below the resolution 2^(1-{self.bits})")

    def workprec(self, guard: int = 0):
        return mpmath.workprec(self.bits + guard)

    def with_bits(self, bits: int) -> "PrecisionContext":
        return PrecisionContext(bits=max(int(bits), self.bits), tol=self.tol)


DEFAULT = PrecisionContext()


def ctx_or_default(ctx: PrecisionContext | None) -> PrecisionContext:
    return DEFAULT if ctx is None else ctx


def to_mpc(x: Number) -> mpmath.mpc:
    return mpmath.mpc(x)


def parse_complex(text: str) -> mpmath.mpc:
    """Parse ``re`` or ``re,im`` (scientific notation allowed)."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) == 1:
        return mpmath.mpc(mpmath.mpf(parts[0]), 0)
    if len(parts) == 2:
        return mpmath.mpc(mpmath.mpf(parts[0]), mpmath.mpf(parts[1]))
    raise ValueError(f"cannot parse complex number {text!r}")


def distance_to_integers(s: Number) -> mpmath.mpf:
    s = to_mpc(s)
    return abs(s - mpmath.nint(s.real))


def nearest_integer(s: Number) -> int | None:
    """The integer n with s == n exactly, else None."""
    s = to_mpc(s)
    if s.imag == 0 and s.real == mpmath.floor(s.real):
        return int(s.real)
    return None


# -- special functions --------------------------------------------------------

def gamma(s: Number, ctx: PrecisionContext | None = None) -> mpmath.mpc:
    ctx = ctx_or_default(ctx)
    s = to_mpc(s)
    n = nearest_integer(s)
    if n is not None and n <= 0:
        raise PoleError(f"Gamma has a pole at s={n}")
    with ctx.workprec(10):
        if s.real < 0.5:
            # reflection keeps the series part in the right half-plane
            v = mpmath.pi / (mpmath.sinpi(s) * mpmath.gamma(1 - s))
        else:
            v = mpmath.gamma(s)
    return +v


def recip_sin_pi(s: Number, ctx: PrecisionContext | None = None,
                 pole_threshold: float = 1e-12) -> mpmath.mpc:
    """pi / sin(pi s).

    Away from the real axis the value is formed from exp(i pi s) directly so
    that the O(exp(-pi |Im s|)) decay never passes through a huge sine.
    """
    ctx = ctx_or_default(ctx)
    s = to_mpc(s)
    if distance_to_integers(s) <= pole_threshold:
        raise PoleError(f"pi/sin(pi s) has a pole near s={mpmath.nstr(s, 15)}")
    with ctx.workprec(10):
        y = s.imag
        if y > 20:
            e = mpmath.expjpi(s)          # |e| = exp(-pi y), small
            v = -2j * mpmath.pi * e / (1 - e * e)
        elif y < -20:
            e = mpmath.expjpi(-s)
            v = 2j * mpmath.pi * e / (1 - e * e)
        else:
            v = mpmath.pi / mpmath.sinpi(s)
    return +v


def zeta_int(k: int, ctx: PrecisionContext | None = None) -> mpmath.mpf:
    if int(k) != k or k < 2:
        raise DomainError(f"zeta_int needs an integer k >= 2, got {k}")
    ctx = ctx_or_default(ctx)
    with ctx.workprec(10):
        v = mpmath.zeta(int(k))
    return +v


def sin_expansion_coeffs(s0: Number, j_max: int,
                         ctx: PrecisionContext | None = None) -> list:
    """Coefficients b_{-1}, b_0, ..., b_{j_max} of pi/sin(pi s) about s0."""
    ctx = ctx_or_default(ctx)
    if j_max < -1:
        raise DomainError("j_max must be >= -1")
    s0 = to_mpc(s0)
    n = nearest_integer(s0)
    with ctx.workprec(10):
        if n is not None:
            sign = -1 if n % 2 else 1
            out = [mpmath.mpc(sign)]
            for j in range(0, j_max + 1):
                if j % 2 == 0:
                    out.append(mpmath.mpc(0))
                else:
                    k = (j + 1) // 2
                    out.append(mpmath.mpc(sign * (2 - mpmath.mpf(2) ** (2 - 2 * k))
                                          * mpmath.zeta(2 * k)))
            return out
    radius = float(distance_to_integers(s0)) / 2
    coeffs = taylor_coeffs_numeric(lambda s: recip_sin_pi(s, ctx), s0, radius,
                                   j_max + 1, ctx)
    return [mpmath.mpc(0)] + coeffs


def polylog(alpha: float, z: Number, ctx: PrecisionContext | None = None,
            max_terms: int = 10**8) -> mpmath.mpc:
    """sum_{n>=1} z^n / n^alpha for |z| < 1.

    Summation stops once the geometric tail bound t_{N+1} / (1 - q), with q
    the (eventually decreasing) term ratio, drops below tol * |partial|.
    """
    ctx = ctx_or_default(ctx)
    z = to_mpc(z)
    r = float(abs(z))
    if r >= 1:
        raise DomainError("polylog series diverges for |z| >= 1")
    if r == 0:
        return mpmath.mpc(0)
    alpha = float(alpha)
    if ctx.bits <= 53:
        return _polylog_numpy(alpha, complex(z), r, ctx.tol, max_terms)
    with ctx.workprec(20):
        total = mpmath.mpc(0)
        zn = mpmath.mpc(1)
        n = 0
        while True:
            n += 1
            zn *= z
            total += zn / mpmath.mpf(n) ** alpha
            bound = _tail_bound(alpha, r, n)
            if bound is not None and bound <= ctx.tol * max(abs(total), 1e-300):
                break
            if n >= max_terms:
                raise ConvergenceError("polylog: term cap reached")
    return +total


def _tail_bound(alpha, r, n):
    """Bound on sum_{m>n} r^m m^-alpha, or None while terms still grow."""
    q = r * ((n + 2) / (n + 1)) ** max(0.0, -alpha)
    if q >= 1:
        return None
    return r ** (n + 1) * (n + 1) ** (-alpha) / (1 - q)


def _polylog_numpy(alpha, z, r, tol, max_terms):
    chunk = 1 << 16
    parts = []
    start = 1
    arg = complex(np.log(z)) if z != 0 else 0
    while True:
        n = np.arange(start, start + chunk, dtype=np.float64)
        terms = np.exp(n * arg - alpha * np.log(n))
        parts.append(terms)
        end = start + chunk - 1
        total = complex(sum(math.fsum(p.real) for p in parts)
                        + 1j * sum(math.fsum(p.imag) for p in parts))
        bound = _tail_bound(alpha, r, end)
        if bound is not None and bound <= tol * max(abs(total), 1e-300):
            return mpmath.mpc(total)
        if end >= max_terms:
            raise ConvergenceError("polylog: term cap reached")
        start = end + 1


def taylor_coeffs_numeric(f: Callable, s0: Number, radius: float, count: int,
                          ctx: PrecisionContext | None = None,
                          laurent_order: int = 0, max_doublings: int = 10,
                          start_nodes: int = 16, return_scale: bool = False):
    """Taylor/Laurent coefficients by the trapezoidal rule on |s - s0| = radius.

    Returns ``count`` coefficients a_{-laurent_order}, ..., starting at index
    ``-laurent_order``; with ``return_scale`` also max |f| on the circle,
    which bounds the absolute error of a_k r^k.  The node count doubles until two successive estimates
    agree to ``ctx.tol`` relative to max |f| on the circle.
    """
    ctx = ctx_or_default(ctx)
    if radius <= 0:
        raise DomainError("radius must be positive")
    if count < 1:
        raise DomainError("count must be >= 1")
    s0 = to_mpc(s0)
    ks = list(range(-laurent_order, count - laurent_order))
    with ctx.workprec(20):
        r = mpmath.mpf(radius)
        prev = None
        cache: dict[Fraction, tuple] = {}
        N = max(start_nodes, 2 * (count + laurent_order))
        for _ in range(max_doublings + 1):
            vals = []
            for j in range(N):
                # nodes of the N-grid include all nodes of the N/2-grid
                key = Fraction(j, N)
                if key not in cache:
                    w = mpmath.expjpi(mpmath.mpf(2 * j) / N)
                    cache[key] = (w, f(s0 + r * w))
                vals.append(cache[key])
            est = []
            for k in ks:
                acc = mpmath.mpc(0)
                for w, fv in vals:
                    acc += fv * w ** (-k)
                est.append(acc / N / r ** k)
            if prev is not None:
                # Cauchy: |a_k| r^k <= max |f| on the circle, so this is the natural scale
                scale = max(max(abs(fv) for _, fv in vals), mpmath.mpf(1e-300))
                diff = max(abs(a - b) * r ** k for a, b, k in zip(est, prev, ks))
                if diff <= ctx.tol * scale:
                    out = [+e for e in est]
                    return (out, float(scale)) if return_scale else out
            prev = est
            N *= 2
    raise ConvergenceError(
        "Taylor coefficients did not converge; the circle probably crosses a singularity")


def newton(f: Callable, fprime: Callable, x0, ctx: PrecisionContext | None = None,
           max_iter: int = 60):
    ctx = ctx_or_default(ctx)
    x = x0
    for _ in range(max_iter):
        dx = f(x) / fprime(x)
        x = x - dx
        if abs(dx) <= ctx.tol * max(abs(x), 1) * 1e-3:
            return x
    raise ConvergenceError(f"Newton iteration did not converge from {x0}")
