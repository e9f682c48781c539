"""Closed-form asymptotics of E(z; c, theta) = sum_{n>=1} exp(c n^theta) (-z)^n.

* z -> oo, theta < 0: one real saddle (c > 0) or a conjugate pair (c < 0).
* z -> -1: polylogarithm sums (theta < 0), a Laplace-method approximant
  (c > 0, 0 < theta < 1) and the Abel Taylor coefficients (c < 0, 0 < theta < 1).
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple

import mpmath
import numpy as np
from scipy import special as sps

from .errors import ConvergenceError, DomainError
from .expansions import (INFINITY, NEG_LOG_ABS_Z, Expansion, ExpansionTerm,
                         Oscillation)
from .numerics import PrecisionContext, ctx_or_default, polylog, to_mpc

EPS_DEFAULT = 0.05


class SaddleConstants(NamedTuple):
    K1: float
    K2: float
    mu: float
    eps: float


class TwoSaddleConstants(NamedTuple):
    A1: float
    A2: float
    A3: float
    A4: float
    mu: float


class LaplaceConstants(NamedTuple):
    C1: float
    C2: float
    C3: float
    mu: float


class BoundaryApprox(NamedTuple):
    value: mpmath.mpf                # v-form for c > 0, Taylor polynomial for c < 0
    v_form: mpmath.mpf | None        # mpmath: exp(1/(4v)) overflows floats near -1
    one_plus_z_form: mpmath.mpf | None
    expansion: Expansion | None


def _saddle_mu(theta: float, eps: float) -> float:
    return theta / (2 * (theta - 1)) - eps if theta >= -2 else 1 / (1 - theta)


def _check_eps(eps):
    if not eps > 0:
        raise DomainError("eps must be positive")


def saddle_constants(c: float, theta: float, eps: float = EPS_DEFAULT) -> SaddleConstants:
    if not (c > 0 and theta < 0):
        raise DomainError("saddle constants need c > 0 and theta < 0")
    _check_eps(eps)
    m = -c * theta
    K1 = (2 * math.pi * (1 - theta)) ** -0.5 * m ** (1 / (2 * (theta - 1)))
    # saddle value of c s^theta + s log z; (1 - 1/(c theta)) agrees only at c = 1
    K2 = (1 - 1 / theta) * m ** (1 / (1 - theta))
    return SaddleConstants(K1, K2, _saddle_mu(theta, eps), eps)


def two_saddle_constants(c: float, theta: float, eps: float = EPS_DEFAULT) -> TwoSaddleConstants:
    if not (c < 0 and theta < 0):
        raise DomainError("two-saddle constants need c < 0 and theta < 0")
    _check_eps(eps)
    m = c * theta
    A1 = -m ** (1 / (2 * (theta - 1))) * math.sqrt(2 / (math.pi * (1 - theta)))
    amp = (1 - 1 / theta) * m ** (1 / (1 - theta))
    # cospi/sinpi give exact zeros at half-integers (A2 = 0 at theta = -1)
    A2 = amp * float(mpmath.cospi(mpmath.mpf(1) / (1 - theta)))
    A3 = amp * float(mpmath.sinpi(mpmath.mpf(1) / (1 - theta)))
    A4 = math.pi / (2 * (theta - 1))
    return TwoSaddleConstants(A1, A2, A3, A4, _saddle_mu(theta, eps))


def _frac(x: float) -> Fraction:
    return Fraction(x)        # exact value of the float supplied by the caller


def saddle_expansion(c: float, theta: float, eps: float = EPS_DEFAULT) -> Expansion:
    """One-term expansion at infinity with relative error O((log z)^-mu)."""
    beta = theta / (theta - 1)
    lp = theta / (2 * (1 - theta))
    th = _frac(theta)
    beta_ex = th / (th - 1)
    lp_ex = th / (2 * (1 - th))
    if c > 0:
        k = saddle_constants(c, theta, eps)
        term = ExpansionTerm(coeff=-k.K1, log_pow=lp, exp_q=k.K2, exp_beta=beta,
                             s0_exact=Fraction(0), log_pow_exact=lp_ex, exp_beta_exact=beta_ex)
        err = ExpansionTerm(log_pow=lp - k.mu, exp_q=k.K2, exp_beta=beta)
        src = f"saddle:c={c:g},theta={theta:g}"
    elif c < 0:
        k = two_saddle_constants(c, theta, eps)
        osc = Oscillation(k.A3, k.A4, beta, beta_ex)
        term = ExpansionTerm(coeff=k.A1, log_pow=lp,
                             exp_q=k.A2, exp_beta=beta if k.A2 != 0 else None,
                             osc=osc, s0_exact=Fraction(0), log_pow_exact=lp_ex,
                             exp_beta_exact=beta_ex if k.A2 != 0 else None)
        err = ExpansionTerm(log_pow=lp - k.mu, exp_q=k.A2,
                            exp_beta=beta if k.A2 != 0 else None)
        src = f"two-saddle:c={c:g},theta={theta:g}"
    else:
        raise DomainError("c must be non-zero")
    return Expansion.build([term], err, src, INFINITY,
                           provenance=f"eps={eps:g}", drop_zero=False)


def approx_infinity(c: float, theta: float, z, eps: float = EPS_DEFAULT):
    """(value, Expansion) of the saddle-point approximant at z -> oo."""
    if not theta < 0:
        raise DomainError("approx_infinity needs theta < 0")
    z = to_mpc(z)
    if abs(z) <= math.e:
        raise DomainError("approx_infinity needs |z| > e")
    if z.imag == 0 and z.real < 0:
        raise DomainError("z on the negative real axis")
    E = saddle_expansion(c, theta, eps)
    return E.terms[0].evaluate(z), E


# -- z -> -1 --------------------------------------------------------------------------

def polylog_sum(c: float, theta: float, z, ctx: PrecisionContext | None = None,
                max_k: int = 400) -> mpmath.mpc:
    """sum_k c^k/k! Li_{-k theta}(-z) for |z| < 1, theta < 0."""
    ctx = ctx_or_default(ctx)
    if not theta < 0:
        raise DomainError("polylog_sum needs theta < 0")
    z = to_mpc(z)
    r = float(abs(z))
    if r >= 1:
        raise DomainError("polylog_sum needs |z| < 1")
    bound0 = r / (1 - r)      # |Li_alpha(-z)| <= Li_0(|z|) for alpha >= 0
    total = mpmath.mpc(0)
    coef = mpmath.mpf(1)
    for k in range(max_k + 1):
        if k:
            coef = coef * c / k
        if coef == 0:
            return total
        total += coef * polylog(-k * theta, -z, ctx)
        # tail: sum_{j>k} |c|^j/j! * bound0 <= |c|^{k+1}/(k+1)! e^{|c|} bound0
        tail = abs(coef * c) / (k + 1) * math.exp(abs(c)) * bound0
        if tail <= ctx.tol * max(float(abs(total)), 1e-300):
            return total
    raise ConvergenceError("polylog_sum: k-series did not reach tolerance")


def polylog_constant(kmax: int = 200) -> mpmath.mpf:
    """-1 + sum_{k>=2} zeta(k)/k!."""
    s = mpmath.mpf(-1)
    for k in range(2, kmax):
        t = mpmath.zeta(k) / mpmath.factorial(k)
        s += t
        if t < mpmath.eps * 1e-3:
            break
    return s


def laplace_constants(c: float, theta: float, eps: float = EPS_DEFAULT) -> LaplaceConstants:
    if not (c > 0 and 0 < theta < 1):
        raise DomainError("Laplace constants need c > 0 and 0 < theta < 1")
    _check_eps(eps)
    m = c * theta
    C1 = math.sqrt(2 * math.pi) * (1 - theta) ** -0.5 * m ** (1 / (2 * (1 - theta)))
    C2 = (1 - theta) / theta * m ** (1 / (1 - theta))
    C3 = m ** (1 / (1 - theta))
    mu = min(theta / (2 * (1 - theta)) - eps, 1.0)
    return LaplaceConstants(C1, C2, C3, mu)


def _log1m_power_coeffs(beta: float, count: int) -> list:
    """e_m with (-log(1-w)/w)^beta = sum_m e_m w^m."""
    base = [mpmath.mpf(1) / (m + 1) for m in range(count)]       # 1 + w/2 + w^2/3 + ...
    # power of a series with leading coefficient 1, by the usual convolution recurrence
    e = [mpmath.mpf(1)]
    for m in range(1, count):
        acc = mpmath.mpf(0)
        for j in range(1, m + 1):
            acc += ((beta + 1) * j - m) * base[j] * e[m - j]
        e.append(acc / m)
    return e


def approx_minus_one(c: float, theta: float, z, eps: float = EPS_DEFAULT,
                     ctx: PrecisionContext | None = None, k_max: int = 2) -> BoundaryApprox:
    """Approximant of E(z; c, theta) as z -> -1+ along the reals, 0 < theta < 1."""
    ctx = ctx_or_default(ctx)
    z = mpmath.mpf(z) if not isinstance(z, mpmath.mpc) else z.real
    if not -1 < z < 0:
        raise DomainError("approx_minus_one needs z in (-1, 0)")
    if not 0 < theta < 1:
        raise DomainError("approx_minus_one needs 0 < theta < 1")
    w = 1 + z
    if c > 0:
        k = laplace_constants(c, theta, eps)
        v = -mpmath.log(-z)
        beta = theta / (theta - 1)
        a = (2 - theta) / (2 * (theta - 1))
        v_form = k.C1 * w ** a * mpmath.exp(k.C2 * v ** beta)
        # v^beta = w^beta * sum e_m w^m; keep exponents beta + m <= 0
        e = _log1m_power_coeffs(beta, int(math.floor(-beta)) + 1)
        expo = sum(e[m] * w ** (beta + m) for m in range(len(e)) if beta + m <= 0)
        w_form = k.C1 * w ** a * mpmath.exp(k.C2 * expo)
        th = _frac(theta)
        term = ExpansionTerm(coeff=k.C1, s0=a, exp_q=k.C2, exp_beta=beta,
                             variable=NEG_LOG_ABS_Z, s0_exact=(2 - th) / (2 * (th - 1)),
                             exp_beta_exact=th / (th - 1))
        err = ExpansionTerm(s0=a + k.mu, exp_q=k.C2, exp_beta=beta, variable=NEG_LOG_ABS_Z)
        E = Expansion.build([term], err, f"laplace:c={c:g},theta={theta:g}", NEG_LOG_ABS_Z,
                            provenance=f"eps={eps:g}")
        return BoundaryApprox(v_form, v_form, w_form, E)
    if c < 0:
        us = [abel_taylor_coeff(c, theta, j, ctx) for j in range(k_max + 1)]
        val = sum(u * w ** j for j, u in enumerate(us))
        return BoundaryApprox(mpmath.mpf(val), None, None, None)
    raise DomainError("c must be non-zero")


def abel_taylor_coeff(c: float, theta: float, k: int, ctx: PrecisionContext | None = None,
                      max_terms: int = 10**8) -> float:
    """u_k = (-1)^k sum_{n>=1} binom(n, k) exp(c n^theta), c < 0 < theta < 1.

    All summands are positive; the tail past the last term is bounded by the
    integral of the (then decreasing) continuous summand.
    """
    ctx = ctx_or_default(ctx)
    if not (c < 0 and 0 < theta < 1):
        raise DomainError("abel_taylor_coeff needs c < 0 and 0 < theta < 1")
    if int(k) != k or k < 0:
        raise DomainError("k must be a non-negative integer")
    k = int(k)
    lgk = math.lgamma(k + 1)

    def logt(x):
        return sps.gammaln(x + 1) - lgk - sps.gammaln(x - k + 1) + c * x ** theta

    peak = (-k / (c * theta)) ** (1 / theta) if k else 1.0
    parts = []
    start = max(k, 1)
    chunk = 4096
    while True:
        n = np.arange(start, start + chunk, dtype=np.float64)
        parts.append(math.fsum(np.exp(logt(n))))
        end = start + chunk - 1
        if end > peak:
            total = math.fsum(parts)
            with mpmath.workprec(ctx.bits + 10):
                tail = mpmath.quad(lambda x: mpmath.exp(
                    mpmath.loggamma(x + 1) - lgk - mpmath.loggamma(x - k + 1)
                    + c * x ** theta), [end, 2 * end, mpmath.inf])
            if float(tail) <= ctx.tol * total:
                return (-1) ** k * total
        if end > max_terms:
            raise ConvergenceError("abel_taylor_coeff: term cap reached")
        start = end + 1
        chunk = min(chunk * 2, 1 << 20)


def abel_lower_bound(c: float, theta: float, k: int) -> float:
    """binom(n(k), k) exp(c n(k)^theta) with n(k) = floor((-k/(c theta))^(1/theta))."""
    nk = math.floor((-k / (c * theta)) ** (1 / theta))
    return math.comb(nk, k) * math.exp(c * nk ** theta)
