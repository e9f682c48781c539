"""Alternating binomial differences D_n[f] = sum_k binom(n,k) (-1)^k f_k.

The sum cancels from size ~2^n down to O(1), so f_k is evaluated with about
1.45 n + 64 bits and the binomials are exact integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import mpmath

from .coeff_functions import CoefficientFunction
from .errors import (DomainError, PoleError, PrecisionCapError,
                     UnsupportedParameterError)
from .integral import direct_sum
from .numerics import DEFAULT, PrecisionContext, ctx_or_default, to_mpc

KINDS = ("ExpSqrtPlus", "ExpSqrtMinus", "ExpInvPlus", "ExpInvMinus", "Custom")
_CLI_KINDS = {"expsqrt+": "ExpSqrtPlus", "expsqrt-": "ExpSqrtMinus",
              "expinv+": "ExpInvPlus", "expinv-": "ExpInvMinus"}
MAX_BITS = 1 << 18


def kind_from_cli(text: str) -> str:
    try:
        return _CLI_KINDS[text.lower()]
    except KeyError:
        raise UnsupportedParameterError(f"unknown difference kind {text!r}") from None


def _builtin_sequence(kind: str) -> Callable[[int], mpmath.mpf]:
    # f_0 conventions: e^{+-sqrt 0} = 1; e^{+-1/k} sums start at k = 1 (f_0 = 0)
    if kind == "ExpSqrtPlus":
        return lambda k: mpmath.exp(mpmath.sqrt(k))
    if kind == "ExpSqrtMinus":
        return lambda k: mpmath.exp(-mpmath.sqrt(k))
    if kind == "ExpInvPlus":
        return lambda k: mpmath.exp(mpmath.mpf(1) / k) if k else mpmath.mpf(0)
    if kind == "ExpInvMinus":
        return lambda k: mpmath.exp(-mpmath.mpf(1) / k) if k else mpmath.mpf(0)
    raise UnsupportedParameterError(f"no builtin sequence for kind {kind!r}")


@dataclass(frozen=True)
class DifferenceRequest:
    kind: str
    n: int
    ctx: PrecisionContext = DEFAULT
    custom: Callable[[int], object] | None = None   # k -> f_k, including k = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UnsupportedParameterError(f"unknown difference kind {self.kind!r}")
        if int(self.n) != self.n or self.n < 1:
            raise DomainError("n must be a positive integer")
        if self.kind == "Custom" and self.custom is None:
            raise DomainError("Custom differences need an evaluator k -> f_k")

    def sequence(self):
        return self.custom if self.kind == "Custom" else _builtin_sequence(self.kind)


def required_bits(n: int, base_bits: int = 53) -> int:
    return max(base_bits, math.ceil(1.45 * n) + 64)


def _alternating_binomial_sum(n: int, fk: Callable, bits: int, offset: int = 0) -> mpmath.mpf:
    """sum_{k=0}^n binom(n,k) (-1)^k fk(k + offset) at ``bits`` of precision."""
    if bits > MAX_BITS:
        raise PrecisionCapError(f"{bits} bits exceeds the cap of {MAX_BITS}")
    with mpmath.workprec(bits):
        total = mpmath.mpf(0)
        binom = 1
        for k in range(n + 1):
            term = binom * mpmath.mpmathify(fk(k + offset))
            total = total - term if k % 2 else total + term
            binom = binom * (n - k) // (k + 1)
    return total


def differences_exact(req: DifferenceRequest) -> mpmath.mpf:
    bits = required_bits(req.n, req.ctx.bits)
    total = _alternating_binomial_sum(req.n, req.sequence(), bits)
    with req.ctx.workprec(0):
        return +total


def differences_asymptotic(kind: str, n: int) -> mpmath.mpf:
    if n < 3:
        raise DomainError("asymptotic formulas need n >= 3")
    L = mpmath.log(n)
    if kind == "ExpSqrtPlus":
        return -1 / mpmath.sqrt(mpmath.pi * L)
    if kind == "ExpSqrtMinus":
        return 1 / mpmath.sqrt(mpmath.pi * L)
    if kind == "ExpInvPlus":
        return -mpmath.exp(2 * mpmath.sqrt(L)) / (2 * mpmath.sqrt(mpmath.pi) * L ** 0.25)
    if kind == "ExpInvMinus":
        return -mpmath.cos(2 * mpmath.sqrt(L) - mpmath.pi / 4) / (mpmath.sqrt(mpmath.pi) * L ** 0.25)
    raise UnsupportedParameterError(f"no asymptotic formula for kind {kind!r}")


def _f0_of(f: CoefficientFunction, ctx) -> mpmath.mpf:
    try:
        with ctx.workprec(10):
            v = f.evaluator(mpmath.mpf(0))
    except (PoleError, ZeroDivisionError, ValueError):
        return mpmath.mpf(0)
    return v if mpmath.isfinite(v) else mpmath.mpf(0)


def euler_transform_check(f: CoefficientFunction, z, ctx: PrecisionContext | None = None,
                          f0=None, max_n: int = 400) -> float:
    """|sum g_n z^n - (f_0 + F(z/(1-z)))/(1-z)| with g_n = D_n[f].

    ``f0`` defaults to phi(0) when finite, else 0.
    """
    ctx = ctx_or_default(ctx)
    z = to_mpc(z)
    if not abs(z) < 0.5:
        raise DomainError("euler_transform_check needs |z| < 1/2")
    f0 = _f0_of(f, ctx) if f0 is None else mpmath.mpf(f0)

    def fk(k):
        return f0 if k == 0 else f.evaluator(mpmath.mpf(k))

    lhs = mpmath.mpc(0)
    small = 0
    zn = mpmath.mpc(1)
    for n in range(0, max_n + 1):
        g = _alternating_binomial_sum(n, fk, required_bits(n, ctx.bits)) if n else f0
        t = g * zn
        lhs += t
        small = small + 1 if abs(t) <= ctx.tol * 1e-3 * max(abs(lhs), 1) else 0
        if small >= 4:
            break
        zn *= z
    w = z / (1 - z)
    rhs = (f0 + direct_sum(f, w, ctx)) / (1 - z)
    return float(abs(lhs - rhs))


# -- generalized binomial distribution ------------------------------------------------

def _check_pmf_args(n, x, p, a):
    if int(n) != n or n < 0:
        raise DomainError("n must be a non-negative integer")
    if int(x) != x or not 0 <= x <= n:
        raise DomainError("x must be an integer in [0, n]")
    if not 0 < p < 1:
        raise DomainError("p must lie in (0, 1)")
    if not 0 <= a <= 1:
        raise DomainError("a must lie in [0, 1]")


def madsen_pmf(n: int, x: int, p: float, a: float,
               ctx: PrecisionContext | None = None) -> mpmath.mpf:
    """binom(n,x) sum_j binom(n-x,j) (-1)^j pi_{x+j}, pi_k = exp(log(p) k^a)."""
    ctx = ctx_or_default(ctx)
    _check_pmf_args(n, x, p, a)
    m = n - x
    bits = required_bits(m, ctx.bits)
    with mpmath.workprec(bits):
        lp = mpmath.log(mpmath.mpf(p))
        ma = mpmath.mpf(a)

        def pi_k(k):
            # pi_0 = 1 for every a, including a = 0, so the pmf sums to one
            return mpmath.exp(lp * mpmath.power(k, ma)) if k else mpmath.mpf(1)

        inner = _alternating_binomial_sum(m, pi_k, bits, offset=x)
        v = math.comb(n, x) * inner
    with ctx.workprec(0):
        return +v


def madsen_pmf_asymptotic(n: int, x: int, p: float, a: float) -> mpmath.mpf:
    if not 0 < a < 1:
        raise DomainError("the asymptotic form needs 0 < a < 1")
    L = mpmath.log(n)
    lp = mpmath.log(p)
    g = mpmath.gamma(1 - a)
    if x == 0:
        return -lp / (g * L ** a)
    return -a * lp / (x * g * L ** (a + 1))
