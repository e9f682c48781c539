import json
import math

import mpmath
import numpy as np
import pytest
from numpy.testing import assert_allclose

from lindelof.coeff_functions import (Algebraic, BUILTIN_KINDS, Essential, Pole, PoleLattice,
                                      evaluate, from_json, gamma_eq_minus_one_complex_roots,
                                      gamma_plus_one_eq_minus_one_roots, make_builtin,
                                      parse_phi)
from lindelof.errors import DomainError, PoleError, UnsupportedParameterError

REFERENCE_ROOTS = [-2.457024, -2.747682, -4.039361, -4.991544,
               -6.001385, -6.999801, -8.000024, -8.999997]

SPECS = ["exp:1,0.5", "exp:-1,0.5", "exp:1,-1", "exp:-1,-1", "exp:1,-0.5", "exp:0.5,1",
         "recip_two_pow", "gamma_ratio", "recip_zeta_shift", "power:1", "power:0.5",
         "power:-1", "const:1", "const:-3", "identity"]


@pytest.fixture(scope="module")
def recip_gamma():
    return make_builtin("recip_gamma_plus_one")


def c(x):
    return complex(x)


def test_exp_power_catalog():
    f = make_builtin("exp", 1, 0.5)
    assert_allclose(c(f(4)), math.exp(2), rtol=1e-14)
    (sing,) = f.catalog
    assert isinstance(sing, Algebraic)
    assert sing.lam == 0 and sing.theta == 0.5
    assert_allclose([float(p) for p in sing.psi_coeffs[:5]],
                    [1 / math.factorial(k) for k in range(5)], rtol=1e-15)


def test_exp_power_rejects_bad_parameters():
    with pytest.raises(UnsupportedParameterError):
        make_builtin("exp", 1, 1.5)
    with pytest.raises(UnsupportedParameterError):
        make_builtin("exp", 1, 0.5j)


def test_recip_two_pow_lattice():
    f = make_builtin("recip_two_pow")
    (lat,) = f.catalog
    assert isinstance(lat, PoleLattice) and lat.count is None
    assert_allclose(complex(lat.step), 2j * math.pi / math.log(2), rtol=1e-15)
    poles = [p for p, _ in f.poles(-1, 1, 30)]
    assert_allclose(sorted(abs(p) for p in poles)[:3],
                    [0, 2 * math.pi / math.log(2), 2 * math.pi / math.log(2)], atol=1e-12)


def test_constant_has_empty_catalog():
    f = make_builtin("const", 1)
    assert f.catalog == () and f.growth_A == 0
    assert c(f(3 + 4j)) == 1


def test_evaluate_examples(recip_gamma):
    assert_allclose(c(make_builtin("exp", 1, -1)(1)), math.e, rtol=1e-15)
    assert_allclose(c(recip_gamma(1)), 0.5, rtol=1e-15)
    assert_allclose(c(make_builtin("gamma_ratio")(2)), float(mpmath.gamma(2 * mpmath.sqrt(2))),
                    rtol=1e-13)


def test_evaluate_hits_pole():
    with pytest.raises(PoleError):
        evaluate(make_builtin("recip_two_pow"), 2j * math.pi / math.log(2))
    with pytest.raises(PoleError):
        evaluate(make_builtin("power", 2), 0)


def test_reference_roots():
    roots = gamma_plus_one_eq_minus_one_roots(8)
    assert_allclose([float(r) for r in roots], REFERENCE_ROOTS, atol=1e-5)
    for r in roots:
        assert abs(mpmath.gamma(r) + 1) < 1e-9


def test_roots_interlace_integers():
    roots = gamma_plus_one_eq_minus_one_roots(12)
    for k, r in zip(range(4, 14), roots[2:]):
        assert abs(r + k) <= 2 / math.factorial(k)


def test_complex_roots_of_gamma_eq_minus_one():
    roots = gamma_eq_minus_one_complex_roots(-2, 6, 6)
    # roots of Gamma(s + 1) = -1, in conjugate pairs
    assert any(abs(complex(r) - (2.394 + 2.662j)) < 1e-2 for r in roots)
    assert len(roots) % 2 == 0
    for r in roots:
        assert abs(mpmath.gamma(r + 1) + 1) < 1e-9


def test_recip_gamma_catalog_contains_right_half_plane_poles(recip_gamma):
    right = [p for p, _ in recip_gamma.poles(0, 10, 10)]
    assert any(abs(p - (2.394 + 2.662j)) < 1e-2 for p in right)
    for p in right:
        assert abs(mpmath.gamma(p + 1) + 1) < 1e-9


@pytest.mark.parametrize("spec", SPECS)
def test_growth_condition_on_half_line(spec):
    f = parse_phi(spec)
    for t in np.linspace(-50, 50, 401):
        s = 0.5 + 1j * t
        assert abs(c(f(s))) <= f.growth_C * math.exp(f.growth_A * abs(s)) * (1 + 1e-12)


def test_growth_condition_recip_gamma(recip_gamma):
    f = recip_gamma
    for t in np.linspace(-50, 50, 201):
        s = 0.5 + 1j * t
        assert abs(c(f(s))) <= f.growth_C * math.exp(f.growth_A * abs(s))


@pytest.mark.parametrize("spec", ["power:2", "recip_two_pow", "recip_zeta_shift"])
def test_poles_blow_up(spec):
    f = parse_phi(spec)
    for p, _ in f.poles(-5, 1, 10)[:3]:
        for d in (1, 1j, -1, -1j):
            assert abs(c(f.evaluator(mpmath.mpc(p) + 1e-8 * d))) > 1e5


def test_recip_gamma_poles_blow_up(recip_gamma):
    for p, _ in recip_gamma.poles(-6, 4, 4)[:4]:
        for d in (1, 1j, -1, -1j):
            assert abs(c(recip_gamma.evaluator(mpmath.mpc(p) + 1e-8 * d))) > 1e5


@pytest.mark.parametrize("spec", ["exp:1,0.5", "exp:-1,0.5", "power:-0.5"])
def test_algebraic_points_stay_bounded(spec):
    f = parse_phi(spec)
    (a,) = [s for s in f.catalog if isinstance(s, Algebraic)]
    assert complex(a.lam).real <= 0
    for d in (1, 1j, -1j, np.exp(0.75j * np.pi)):
        for r in (1e-2, 1e-5, 1e-8):
            assert abs(c(f.evaluator(mpmath.mpc(complex(a.location) + r * d)))) < 10


def test_cauchy_riemann_on_right_half_plane():
    h = 1e-6
    for spec in SPECS:
        f = parse_phi(spec)
        for s in (0.7 + 0.3j, 2.5 - 4j, 6 + 10j):
            fx = (c(f(s + h)) - c(f(s - h))) / (2 * h)
            fy = (c(f(s + 1j * h)) - c(f(s - 1j * h))) / (2 * h)
            assert abs(fy - 1j * fx) <= 1e-5 * (1 + abs(fx))


def test_json_round_trip():
    for spec in ["exp:1,-1", "power:0.5", "const:2", "recip_two_pow"]:
        f = parse_phi(spec)
        data = json.loads(json.dumps(f.to_json()))
        g = from_json(data)
        assert g.kind == f.kind and tuple(g.params) == tuple(f.params)
        assert c(g(1.7)) == c(f(1.7))


def test_unknown_kind():
    with pytest.raises(UnsupportedParameterError):
        parse_phi("nope")
    with pytest.raises(UnsupportedParameterError):
        make_builtin("exp", 1)
    assert "exp" in BUILTIN_KINDS


def test_singularity_validation():
    with pytest.raises(DomainError):
        PoleLattice(0j, 0j, 3)
    assert isinstance(make_builtin("exp", 1, -1).catalog[0], Essential)
    assert isinstance(make_builtin("power", 2).catalog[0], Pole)
