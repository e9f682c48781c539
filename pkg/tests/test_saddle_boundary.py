import math
from fractions import Fraction

import mpmath
import pytest
from numpy.testing import assert_allclose

from lindelof.coeff_functions import make_builtin
from lindelof.errors import DomainError
from lindelof.expansions import INFINITY, NEG_LOG_ABS_Z
from lindelof.integral import QuadratureConfig, continue_gf, direct_sum
from lindelof.saddle_boundary import (abel_lower_bound, abel_taylor_coeff, approx_infinity,
                                      approx_minus_one, laplace_constants, polylog_constant,
                                      polylog_sum, saddle_constants, saddle_expansion,
                                      two_saddle_constants)

AUTO = QuadratureConfig(shift="auto")


def c(x):
    return complex(x)


def test_saddle_constants_table_row():
    k = saddle_constants(1, -1)
    assert_allclose([k.K1, k.K2], [1 / (2 * math.sqrt(math.pi)), 2], rtol=1e-12)
    assert_allclose(k.mu, 0.25 - 0.05, rtol=1e-15)
    # saddle value 2 sqrt(c log z) at theta = -1
    assert_allclose(saddle_constants(2, -1).K2, 2 * math.sqrt(2), rtol=1e-12)
    assert saddle_constants(1, -1e6).mu < 1e-5
    with pytest.raises(DomainError):
        saddle_constants(-1, -1)


def test_two_saddle_constants_table_row():
    k = two_saddle_constants(-1, -1)
    assert_allclose([k.A1, k.A3, k.A4], [-1 / math.sqrt(math.pi), 2, -math.pi / 4], rtol=1e-12)
    assert k.A2 == 0


@pytest.mark.parametrize("theta,sign", [(-0.5, -1), (-1, 0), (-3, 1)])
def test_two_saddle_sign_rule(theta, sign):
    a2 = two_saddle_constants(-1, theta).A2
    assert (a2 > 0) - (a2 < 0) == sign


def test_laplace_constants_table_row():
    k = laplace_constants(1, 0.5)
    assert_allclose([k.C1, k.C2, k.C3], [math.sqrt(math.pi), 0.25, 0.25], rtol=1e-12)
    assert_allclose(k.mu, 0.5 - 0.05, rtol=1e-15)
    assert laplace_constants(1, 1 - 1e-9).C2 < 1e-6
    assert all(x > 0 for x in laplace_constants(2.5, 0.3)[:3])


def test_saddle_expansion_exponents_are_exact():
    E = saddle_expansion(1, -1)
    (t,) = E.terms
    assert t.exp_beta_exact == Fraction(1, 2) and t.log_pow_exact == Fraction(-1, 4)
    assert E.variable == INFINITY
    (u,) = saddle_expansion(-1, -1).terms
    assert u.osc is not None and u.osc.beta_exact == Fraction(1, 2)


def test_approx_infinity_closed_forms():
    L = 100
    v, _ = approx_infinity(1, -1, mpmath.exp(L))
    assert_allclose(c(v), -math.exp(20) / (2 * math.sqrt(math.pi) * L ** 0.25), rtol=1e-12)
    L = ((math.pi / 4 + 6 * math.pi) / 2) ** 2          # 2 sqrt(L) - pi/4 = 6 pi
    v, _ = approx_infinity(-1, -1, mpmath.exp(L))
    assert_allclose(c(v), -L ** -0.25 / math.sqrt(math.pi), rtol=1e-10)
    with pytest.raises(DomainError):
        approx_infinity(1, 0.5, 100)


def test_saddle_ratio_to_continuation():
    f = make_builtin("exp", 2, -1)
    L = 400
    z = mpmath.exp(L)
    ratio = continue_gf(f, z, AUTO).value / approx_infinity(2, -1, z)[0]
    assert abs(c(ratio) - 1) <= 3 * L ** -saddle_constants(2, -1).mu


def test_two_saddle_half_theta_against_continuation():
    # theta = -1/2: decaying oscillation, error relative to the amplitude envelope
    f = make_builtin("exp", -1, -0.5)
    for L in (60.0, 120.0):
        z = mpmath.exp(L)
        v = c(continue_gf(f, z, AUTO).value)
        a, _ = approx_infinity(-1, -0.5, z)
        k = two_saddle_constants(-1, -0.5)
        beta = 1 / 3
        env = abs(k.A1) * math.exp(k.A2 * L ** beta) * L ** (-1 / 6)
        assert abs(v - c(a)) <= 3 * env * L ** -k.mu


def test_polylog_sum_matches_direct_sum():
    f = make_builtin("exp", 1, -1)
    assert_allclose(c(polylog_sum(1, -1, -0.5)), c(direct_sum(f, -0.5)), rtol=1e-12)
    assert_allclose(c(polylog_sum(0, -1, 0.3)), -0.3 / 1.3, rtol=1e-14)


def test_polylog_sum_boundary_constant():
    z = -1 + 1e-4
    v = polylog_sum(1, -1, z)
    w = 1 + z
    assert abs(c(v) - (1 / w + math.log(1 / w) + 0.078189)) < 1e-3
    assert_allclose(float(polylog_constant()), 0.078189, atol=1e-6)


def test_approx_minus_one_forms():
    a = approx_minus_one(1, 0.5, -0.99)
    w = 0.01
    v = -math.log(0.99)
    assert_allclose(float(a.v_form), math.sqrt(math.pi) * w ** -1.5 * math.exp(0.25 / v),
                    rtol=1e-12)
    # the (1+z)-form carries the constant e^{-1/8}
    assert_allclose(float(a.one_plus_z_form),
                    math.sqrt(math.pi) * math.exp(-1 / 8) * w ** -1.5 * math.exp(0.25 / w),
                    rtol=1e-12)
    assert a.expansion.variable == NEG_LOG_ABS_Z
    assert_allclose(c(a.expansion.evaluate(-0.99)), float(a.v_form), rtol=1e-12)
    with pytest.raises(DomainError):
        approx_minus_one(1, 0.5, 0.5)


@pytest.mark.parametrize("z", [-0.99, -0.999])
def test_laplace_ratio(z):
    f = make_builtin("exp", 1, 0.5)
    a = approx_minus_one(1, 0.5, z)
    ratio = direct_sum(f, z) / a.v_form
    assert abs(c(ratio) - 1) <= 3 * (1 + z) ** (0.5 - 0.05)


def test_abel_coefficients_against_oracle():
    with mpmath.workdps(30):
        u0 = mpmath.nsum(lambda n: mpmath.exp(-mpmath.sqrt(n)), [1, mpmath.inf],
                         method="euler-maclaurin")
        u1 = -mpmath.nsum(lambda n: n * mpmath.exp(-mpmath.sqrt(n)), [1, mpmath.inf],
                          method="euler-maclaurin")
    assert_allclose(abel_taylor_coeff(-1, 0.5, 0), float(u0), rtol=1e-12)
    assert_allclose(abel_taylor_coeff(-1, 0.5, 1), float(u1), rtol=1e-12)


def test_abel_lower_bound_and_signs():
    for k in range(6):
        u = abel_taylor_coeff(-1, 0.5, k)
        assert (u > 0) == (k % 2 == 0)
        assert abs(u) >= abel_lower_bound(-1, 0.5, k)


def test_abel_consistency():
    f = make_builtin("exp", -1, 0.5)
    z = -1 + 1e-3
    w = 1e-3
    us = [abel_taylor_coeff(-1, 0.5, k) for k in range(4)]
    approx = us[0] + us[1] * w + us[2] * w ** 2
    assert abs(float(c(direct_sum(f, z)).real) - approx) <= 10 * abs(us[3]) * 1e-9
    assert_allclose(float(approx_minus_one(-1, 0.5, z).value), approx, rtol=1e-15)
