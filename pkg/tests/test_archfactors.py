import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncmotive import archfactors as af
from ncmotive.archfactors import HodgeStructure, PrincipalValueSpec, WeilGroupElement
from ncmotive.errors import PoleError, SingularityError
from ncmotive.spectral import zeta_zeros

EULER = 0.57721566490153286
POINT = HodgeStructure.point()
ELLIPTIC = HodgeStructure.elliptic_h1()


# gamma factors ----------------------------------------------------------------

def test_gamma_factor_values():
    assert abs(af.gamma_factor("C", 1) - 1 / (2 * math.pi)) < 1e-15
    assert abs(af.gamma_factor("R", 1) - 2 ** -0.5) < 1e-14
    assert abs(af.gamma_factor("R", 2) - 2 ** -0.5 / math.pi) < 1e-14
    with pytest.raises(ValueError):
        af.gamma_factor("H", 1)


def test_gamma_factor_pole():
    with pytest.raises(PoleError):
        af.gamma_factor("C", 0)


@given(st.floats(0.1, 8), st.floats(-20, 20))
def test_duplication(x, y):
    z = complex(x, y)
    lhs = af.gamma_factor("R", z) * af.gamma_factor("R", z + 1)
    rhs = af.gamma_factor("C", z)
    assert abs(lhs - rhs) <= 1e-11 * abs(rhs)


@given(st.floats(0.3, 6), st.floats(-15, 15))
def test_gamma_factor_against_mpmath(x, y):
    z = complex(x, y)
    ref = complex((2 * mpmath.pi) ** -z * mpmath.gamma(z))
    assert abs(af.gamma_factor("C", z) - ref) <= 1e-11 * abs(ref)


# Hodge data and local factors --------------------------------------------------------

def test_hodge_validation():
    with pytest.raises(ValueError):
        HodgeStructure(1, {(1, 0): 1})
    with pytest.raises(ValueError):
        HodgeStructure(2, {(1, 0): 1, (0, 1): 1})
    with pytest.raises(ValueError):
        HodgeStructure(2, {(1, 1): 2}, {1: (2, 1)})
    with pytest.raises(ValueError):
        HodgeStructure(2, {(1, 1): 1}).signs(1)
    assert HodgeStructure(2, {(1, 1): 2}).signs(1) == (1, 1)
    assert ELLIPTIC.betti == 2


def test_hodge_json_forms():
    h = HodgeStructure(2, {(2, 0): 1, (0, 2): 1, (1, 1): 3}, {1: (2, 1)})
    assert HodgeStructure.from_json(h.to_json()) == h
    alt = {"m": 2, "hpq": {"2,0": 1, "0,2": 1, "1,1": 3}, "hpm": {"1,+": 2, "1,-": 1}}
    assert HodgeStructure.from_json(alt) == h


def test_local_factor_examples():
    z = 0.7 + 2j
    assert abs(af.local_factor(POINT, "real", z) - af.gamma_factor("R", z)) < 1e-15
    assert abs(af.local_factor(POINT, "complex", z) - af.gamma_factor("C", z)) < 1e-15
    assert abs(af.local_factor(ELLIPTIC, "real", z) - af.gamma_factor("C", z)) < 1e-15
    assert abs(af.local_factor(ELLIPTIC, "complex", z) - af.gamma_factor("C", z) ** 2) < 1e-15
    assert af.local_factor(HodgeStructure.zero(), "real", z) == 1
    with pytest.raises(ValueError):
        af.local_factor(POINT, "p-adic", z)


def test_minus_two_dlog_matches_finite_difference():
    for h, place in [(POINT, "real"), (ELLIPTIC, "complex"),
                     (HodgeStructure(2, {(1, 1): 1}, {1: (0, 1)}), "real")]:
        for s in (0.0, 1.3, 7.0):
            eps = 1e-5
            im = lambda t: np.unwrap([np.angle(af.local_factor(h, place, af.critical_point(h, x)))
                                      for x in (t - eps, t + eps)])
            ph = im(s)
            fd = -2 * (ph[1] - ph[0]) / (2 * eps)
            assert abs(af.minus_two_dlog(h, place, s) - fd) < 1e-6


# Weil group representation -------------------------------------------------------------

def test_rep_trace():
    assert af.rep_trace(POINT, WeilGroupElement(2 + 1j)) == 1
    assert af.rep_trace(POINT, WeilGroupElement(2j, 1)) == 1
    w = 0.5 + 2j
    got = af.rep_trace(ELLIPTIC, WeilGroupElement(w))
    assert abs(got - (1 / w + 1 / w.conjugate())) < 1e-15
    assert af.rep_trace(ELLIPTIC, WeilGroupElement(w, 1)) == 0
    h2 = HodgeStructure(2, {(1, 1): 3}, {1: (1, 2)})
    assert abs(af.rep_trace(h2, WeilGroupElement(2, 1)) - (-1 / 4)) < 1e-15


def test_weil_element_validation():
    with pytest.raises(ValueError):
        WeilGroupElement(0)
    with pytest.raises(ValueError):
        WeilGroupElement(1, 2)
    assert WeilGroupElement(1 + 1j, 1).quaternion_distance() == pytest.approx(3)
    assert WeilGroupElement(3).module == 9


# fiber integrals ---------------------------------------------------------------------

def test_fiber_integral_examples():
    assert af.fiber_integral(0, 0.25) == pytest.approx(4 / 3, rel=1e-15)
    assert af.fiber_integral(2, 4.0) == pytest.approx(1 / 12, rel=1e-15)
    with pytest.raises(SingularityError):
        af.fiber_integral(0, 1.0)
    with pytest.raises(SingularityError):
        af.fiber_integral_quad(3, 1.0)


def test_fiber_integral_random_against_quadrature():
    rng = np.random.default_rng(11)
    for _ in range(50):
        n = int(rng.integers(-6, 7))
        nu = float(np.exp(rng.uniform(-2.5, 2.5)))
        if abs(nu - 1) < 0.05:
            continue
        exact = af.fiber_integral(n, nu)
        assert abs(exact - af.fiber_integral_quad(n, nu)) <= 1e-12 * max(1, exact)


# principal values ---------------------------------------------------------------------

def test_pv_f0_over_f1():
    res = af.pv_f0_over_f1()
    assert abs(res.value - 2 * (math.log(2 * math.pi) + EULER)) < 1e-8
    # two-point slope at the top of the ladder, so O(1/t) off
    assert abs(res.c_estimate - 1) < 1e-3


def test_pv_n0_s0_value():
    assert abs(af.weil_pv(PrincipalValueSpec(0, 0.0)).value - 7.602774) < 1e-6


@pytest.mark.parametrize("n", [0, 1, -1, 2, -2])
@pytest.mark.parametrize("s", [0.0, 1.0, 5.0, 20.0])
def test_schemes_agree(n, s):
    a = af.weil_pv(PrincipalValueSpec(n, s, "WeilCutoff")).value
    b = af.weil_pv(PrincipalValueSpec(n, s, "MinimalSubtraction")).value
    assert abs(a - b) < 1e-8


def test_pv_is_even_in_n():
    assert af.weil_pv(PrincipalValueSpec(3, 2.0)).value == \
        pytest.approx(af.weil_pv(PrincipalValueSpec(-3, 2.0)).value, abs=1e-12)


def test_unknown_scheme():
    with pytest.raises(ValueError):
        af.weil_pv(PrincipalValueSpec(scheme="Dimreg"))


# Lefschetz identities ---------------------------------------------------------------------

@pytest.mark.parametrize("pq", [(0, 0), (1, 0), (1, 1), (2, 0)])
@pytest.mark.parametrize("s", [0.0, 1.0, 2.0, 10.0])
def test_lefschetz_complex(pq, s):
    p, q = pq
    hpq = {(p, q): 1, (q, p): 1}
    h = HodgeStructure(p + q, hpq)
    assert af.lefschetz_complex(h, s).diff < 1e-8


REAL_CASES = [
    POINT,
    ELLIPTIC,
    HodgeStructure(2, {(1, 1): 1}, {1: (1, 0)}),
    HodgeStructure(2, {(1, 1): 1}, {1: (0, 1)}),
    HodgeStructure(2, {(2, 0): 1, (0, 2): 1, (1, 1): 2}, {1: (2, 0)}),
]


@pytest.mark.parametrize("h", REAL_CASES, ids=["H0", "H1", "H2+", "H2-", "surface"])
@pytest.mark.parametrize("s", [0.0, 1.0, 2.0])
def test_lefschetz_real(h, s):
    assert af.lefschetz_real(h, s).diff < 1e-8


def test_j_part_integral_at_zero():
    assert abs(af.j_part_integral(0) - math.pi) < 1e-8


@given(st.floats(-8, 8))
@settings(max_examples=15)
def test_j_part_closed_form(s):
    # int v^{a}/(1+v) d*v = pi / sin(pi a)
    a = 0.5 + 1j * s
    ref = complex(mpmath.pi / mpmath.sin(mpmath.pi * a))
    assert abs(af.j_part_integral(s) - ref) < 1e-8 * max(1, abs(ref))


def test_zero_hodge():
    zero = HodgeStructure.zero(3)
    assert tuple(af.lefschetz_complex(zero, 1.0)) == (0.0, 0.0, 0.0)
    assert tuple(af.lefschetz_real(zero, 1.0)) == (0.0, 0.0, 0.0)
    assert af.zero_count_average(zero, ["real"], 50) == 0


# zero counting -----------------------------------------------------------------------------

def test_zero_count_tracks_riemann_von_mangoldt():
    for E in (20.0, 50.0, 100.0):
        avg = af.zero_count_average(POINT, ["real"], E)
        x = E / (2 * math.pi)
        rvm = x * math.log(x) - x + 7 / 8
        assert abs(avg - rvm) < 0.05
        assert abs(avg - len(zeta_zeros(E))) < 1.5


def test_zero_count_edge_cases():
    assert af.zero_count_average(POINT, ["real"], 0) == 0
    sym = af.zero_count_average(POINT, ["real"], 30, symmetric=True)
    assert abs(af.zero_count_average(POINT, ["real"], 30) - (sym / 2 + 1)) < 1e-12
