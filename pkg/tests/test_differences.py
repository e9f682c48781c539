import math

import mpmath
import pytest
from numpy.testing import assert_allclose

from lindelof.coeff_functions import make_builtin
from lindelof.differences import (DifferenceRequest, differences_asymptotic, differences_exact,
                                  euler_transform_check, kind_from_cli, madsen_pmf,
                                  madsen_pmf_asymptotic, required_bits)
from lindelof.errors import DomainError, PrecisionCapError, UnsupportedParameterError
from lindelof.numerics import PrecisionContext

REFERENCE_G = {1: "-2.71828", 10: "-8.03246", 100: "-20.4159", 1000: "-45.1379"}


def exact(kind, n, **kw):
    return differences_exact(DifferenceRequest(kind, n, **kw))


def test_reference_difference_digits():
    for n, text in REFERENCE_G.items():
        assert mpmath.nstr(exact("ExpInvPlus", n), 6) == text


def test_against_independent_high_precision_sum():
    with mpmath.workdps(120):
        ref = mpmath.fsum(mpmath.binomial(60, k) * (-1) ** k * mpmath.exp(-mpmath.sqrt(k))
                          for k in range(61))
    assert_allclose(float(exact("ExpSqrtMinus", 60)), float(ref), rtol=1e-14)


def test_polynomials_are_annihilated():
    for n in (2, 5, 40):
        assert exact("Custom", n, custom=lambda k: k) == 0
    assert exact("Custom", 1, custom=lambda k: k) == -1


@pytest.mark.parametrize("r", [mpmath.mpf(1) / 2, mpmath.mpf(2)])
@pytest.mark.parametrize("n", [1, 17, 300])
def test_binomial_sum_identity(r, n):
    got = exact("Custom", n, custom=lambda k: r ** k)
    expected = (1 - r) ** n
    assert abs(got - expected) <= 2.0 ** -50 * abs(expected)


@pytest.mark.parametrize("kind", ["ExpInvPlus", "ExpSqrtPlus", "ExpInvMinus"])
def test_precision_monotonicity(kind):
    n = 400
    a = exact(kind, n)
    b = exact(kind, n, ctx=PrecisionContext(bits=2 * required_bits(n), tol=1e-30))
    assert abs(a - b) <= 2.0 ** -50 * abs(b)


def test_required_bits():
    assert required_bits(1000) == math.ceil(1450) + 64
    assert required_bits(1) == 66
    with pytest.raises(PrecisionCapError):
        exact("ExpSqrtPlus", 200000)


@pytest.mark.parametrize("n", [100, 400, 1000, 2000])
def test_sqrt_sign_rule(n):
    assert exact("ExpSqrtPlus", n) < 0
    assert exact("ExpSqrtMinus", n) > 0


def test_asymptotic_formulas():
    n = 10 ** 6
    assert_allclose(float(differences_asymptotic("ExpSqrtPlus", n)),
                    -1 / math.sqrt(math.pi * math.log(n)), rtol=1e-15)
    ratio = exact("ExpInvPlus", 1000) / differences_asymptotic("ExpInvPlus", 1000)
    assert 0.5 <= ratio <= 2
    with pytest.raises(DomainError):
        differences_asymptotic("ExpSqrtPlus", 2)


def test_exp_inv_minus_sign_change_near_cosine_zero():
    # cos(2 sqrt(log n) - pi/4) = 0 at log n = (3 pi / 8)^2
    n0 = round(math.exp((3 * math.pi / 8) ** 2))
    lo, hi = exact("ExpInvMinus", max(3, n0 // 3)), exact("ExpInvMinus", 3 * n0)
    assert lo * hi < 0


def test_euler_transform_residuals():
    assert euler_transform_check(make_builtin("const", 1), 0.2, f0=1) <= 1e-12
    assert euler_transform_check(make_builtin("exp", 1, -1), 0.2) <= 1e-10
    assert euler_transform_check(make_builtin("identity"), 0.1) <= 1e-12
    assert euler_transform_check(make_builtin("exp", -1, 0.5), 0.3, f0=1) <= 1e-10
    with pytest.raises(DomainError):
        euler_transform_check(make_builtin("const", 1), 0.6)


def test_cli_kinds():
    assert kind_from_cli("expinv+") == "ExpInvPlus"
    assert kind_from_cli("EXPSQRT-") == "ExpSqrtMinus"
    with pytest.raises(UnsupportedParameterError):
        kind_from_cli("expcube")
    with pytest.raises(DomainError):
        DifferenceRequest("ExpInvPlus", 0)


def test_madsen_binomial_case():
    n, p = 20, 0.3
    for x in range(n + 1):
        expected = math.comb(n, x) * p ** x * (1 - p) ** (n - x)
        assert abs(float(madsen_pmf(n, x, p, 1.0)) - expected) <= 1e-12


@pytest.mark.parametrize("n,p,a", [(20, 0.3, 0.5), (35, 0.7, 0.25), (12, 0.5, 0.0),
                                   (25, 0.1, 0.9)])
def test_madsen_normalization(n, p, a):
    total = mpmath.fsum(madsen_pmf(n, x, p, a) for x in range(n + 1))
    assert abs(total - 1) <= 1e-10


def test_madsen_against_direct_sum():
    n, x, p, a = 30, 4, 0.4, 0.5
    with mpmath.workdps(80):
        ref = mpmath.binomial(n, x) * mpmath.fsum(
            mpmath.binomial(n - x, j) * (-1) ** j * mpmath.power(p, mpmath.sqrt(x + j))
            for j in range(n - x + 1))
    assert_allclose(float(madsen_pmf(n, x, p, a)), float(ref), rtol=1e-12)


def test_madsen_large_n_asymptotic():
    v = madsen_pmf(10 ** 4, 0, 0.5, 0.5)
    asy = madsen_pmf_asymptotic(10 ** 4, 0, 0.5, 0.5)
    assert_allclose(float(asy), -math.log(0.5) / (math.sqrt(math.pi) * math.sqrt(math.log(1e4))),
                    rtol=1e-14)
    assert 0.5 <= v / asy <= 2


def test_madsen_argument_checks():
    with pytest.raises(DomainError):
        madsen_pmf(10, 11, 0.3, 0.5)
    with pytest.raises(DomainError):
        madsen_pmf(10, 2, 1.3, 0.5)
    with pytest.raises(DomainError):
        madsen_pmf_asymptotic(10, 2, 0.3, 1.0)
