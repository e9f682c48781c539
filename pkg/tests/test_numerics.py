import mpmath
import numpy as np
import pytest
from numpy.testing import assert_allclose

from lindelof.errors import ConvergenceError, DomainError, PoleError
from lindelof.numerics import (PrecisionContext, gamma, parse_complex, polylog, recip_sin_pi,
                               sin_expansion_coeffs, taylor_coeffs_numeric, zeta_int)


def c(x):
    return complex(x)


def test_precision_context_validation():
    with pytest.raises(DomainError):
        PrecisionContext(bits=40)
    with pytest.raises(DomainError):
        PrecisionContext(bits=53, tol=1e-20)
    assert PrecisionContext(bits=200, tol=1e-50).bits == 200


def test_parse_complex():
    assert parse_complex("2") == 2
    assert parse_complex("1e-3,2.5") == mpmath.mpc(1e-3, 2.5)
    with pytest.raises(ValueError):
        parse_complex("1,2,3")


def test_gamma_values():
    assert_allclose(c(gamma(1)), 1, rtol=1e-15)
    assert_allclose(c(gamma(0.5)), np.sqrt(np.pi), rtol=1e-14)
    assert abs(c(gamma(-2.457024)) + 1) < 1e-4
    with pytest.raises(PoleError):
        gamma(-3)


def test_gamma_reflection_identity():
    rng = np.random.default_rng(7)
    for _ in range(40):
        s = complex(rng.uniform(-8, 8), rng.uniform(-15, 15))
        if abs(s - round(s.real)) < 1e-3:
            continue
        v = gamma(s) * gamma(1 - s) * mpmath.sinpi(s) / mpmath.pi
        assert abs(c(v) - 1) < 1e-12


def test_gamma_high_precision():
    ctx = PrecisionContext(bits=300, tol=1e-80)
    with mpmath.workprec(320):
        ref = mpmath.sqrt(mpmath.pi)
        assert abs(gamma(mpmath.mpf(1) / 2, ctx) - ref) < mpmath.mpf(10) ** -85


def test_recip_sin_pi_values():
    assert_allclose(c(recip_sin_pi(0.5)), np.pi, rtol=1e-15)
    assert_allclose(c(recip_sin_pi(0.25)), np.pi * np.sqrt(2), rtol=1e-15)
    with mpmath.workprec(200):
        ref = mpmath.pi / mpmath.sin(mpmath.pi * mpmath.mpc(0.5, 10))
    assert_allclose(abs(c(recip_sin_pi(0.5 + 10j))), abs(c(ref)), rtol=1e-12)
    assert_allclose(abs(c(recip_sin_pi(0.5 + 10j))), 2 * np.pi * np.exp(-10 * np.pi), rtol=1e-12)
    with pytest.raises(PoleError):
        recip_sin_pi(3)


def test_recip_sin_pi_large_imaginary_part():
    with mpmath.workprec(300):
        for y in (25.0, -40.0, 120.0):
            s = mpmath.mpc(0.3, y)
            ref = mpmath.pi / mpmath.sin(mpmath.pi * s)
            assert abs(recip_sin_pi(s) / ref - 1) < 1e-13


def test_recip_sin_pi_period_two():
    rng = np.random.default_rng(3)
    for _ in range(30):
        s = complex(rng.uniform(-5, 5), rng.uniform(-30, 30))
        assert abs(c(recip_sin_pi(s + 2)) / c(recip_sin_pi(s)) - 1) < 1e-12


def test_zeta_int():
    assert_allclose(float(zeta_int(2)), np.pi ** 2 / 6, rtol=1e-15)
    assert_allclose(float(zeta_int(4)), np.pi ** 4 / 90, rtol=1e-15)
    with pytest.raises(DomainError):
        zeta_int(1)


def test_zeta_factorial_constant():
    total = -1 + sum(zeta_int(k) / mpmath.factorial(k) for k in range(2, 60))
    assert abs(float(total) - 0.078189) < 1e-6


def test_sin_expansion_at_integers():
    b = sin_expansion_coeffs(0, 6)
    assert c(b[0]) == 1 and c(b[1]) == 0
    assert_allclose(c(b[2]), np.pi ** 2 / 6, rtol=1e-15)
    assert c(sin_expansion_coeffs(1, 2)[0]) == -1
    for n in (-3, 0, 2, 5):
        b = sin_expansion_coeffs(n, 9)
        assert all(c(b[1 + j]) == 0 for j in range(0, 10, 2))


def test_sin_expansion_regular_point():
    b = sin_expansion_coeffs(0.5, 3)
    assert c(b[0]) == 0
    assert_allclose(c(b[1]), np.pi, rtol=1e-12)
    # pi/sin(pi s) is even about 1/2
    assert abs(c(b[2])) < 1e-10


def test_sin_expansion_matches_numeric_laurent():
    num = taylor_coeffs_numeric(lambda s: recip_sin_pi(s), 0, 0.5, 6, laurent_order=1)
    ref = sin_expansion_coeffs(0, 4)
    assert_allclose([c(x) for x in num], [c(x) for x in ref], atol=1e-12)


def test_polylog():
    z = 0.3 - 0.2j
    assert_allclose(c(polylog(0, z)), z / (1 - z), rtol=1e-13)
    assert_allclose(c(polylog(1, 0.5)), np.log(2), rtol=1e-13)
    with mpmath.workprec(200):
        ref = mpmath.pi ** 2 / 12 - mpmath.log(2) ** 2 / 2
    assert_allclose(c(polylog(2, 0.5)), float(ref), rtol=1e-12)
    assert_allclose(c(polylog(2.5, -0.9)), c(mpmath.polylog(2.5, -0.9)), rtol=1e-12)
    with pytest.raises(DomainError):
        polylog(2, 1.0)


def test_taylor_exp():
    got = taylor_coeffs_numeric(mpmath.exp, 0, 1.0, 3)
    assert_allclose([c(x) for x in got], [1, 1, 0.5], atol=1e-13)


@pytest.mark.parametrize("radius", [0.3, 1.0, 4.0])
def test_taylor_polynomial_independent_of_radius(radius):
    coeffs = [2, -1, 0.5, 3, -0.25]

    def p(s):
        return sum(a * (s - 1) ** k for k, a in enumerate(coeffs))
    got = taylor_coeffs_numeric(p, 1, radius, 6)
    assert_allclose([c(x) for x in got], coeffs + [0], atol=1e-12 * max(1, radius ** 4))


def test_taylor_laurent_gamma_root_residue():
    ctx = PrecisionContext()
    with mpmath.workprec(80):
        sk = mpmath.findroot(lambda s: mpmath.gamma(s + 1) + 1, -3.457)
        expected = 1 / mpmath.diff(lambda s: mpmath.gamma(s + 1), sk)
    got = taylor_coeffs_numeric(lambda s: 1 / (1 + mpmath.gamma(s + 1)), sk, 0.1, 2,
                                ctx, laurent_order=1)
    assert_allclose(c(got[0]), float(expected), rtol=1e-10)


def test_taylor_radius_crossing_singularity_fails():
    with pytest.raises(ConvergenceError):
        taylor_coeffs_numeric(lambda s: 1 / (s - 0.5), 0, 0.5 + 1e-9, 4, max_doublings=4)
