import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncmotive import explicit as ex
from ncmotive import spectral as sp
from ncmotive.errors import ConditionsViolated, InsufficientZeros

ZEROS_200 = sp.zeta_zeros(200).ordinates


# transforms ---------------------------------------------------------------------

@given(st.floats(0.08, 1.0), st.floats(-1, 1), st.floats(-0.5, 1.5), st.floats(-30, 30))
@settings(max_examples=30)
def test_closed_form_hat_matches_quadrature(sigma, center, x, y):
    h = ex.gaussian(sigma, center)
    s = complex(x, y)
    closed = ex.fourier_hat(h, s)
    quad = ex.fourier_hat(h, s, quadrature=True)
    assert abs(closed - quad) <= 1e-10 * max(1, abs(closed))


def test_bump_hat_against_mpmath():
    h = ex.bump(0.1, 0.5)
    s = 0.5 + 3j
    def f(x):
        y2 = ((x - 0.1) / 0.5) ** 2
        return mpmath.exp(-0.5 * x - 1 / (1 - y2) + s * x) if y2 < 1 else 0
    ref = complex(mpmath.quad(f, [-0.4, 0.1, 0.6]))
    assert abs(ex.fourier_hat(h, s) - ref) < 1e-12


def test_zero_function():
    z = ex.IdeleTestFunction.zero()
    assert ex.fourier_hat(z, 0.5 + 3j) == 0
    assert ex.prime_terms(z) == ({}, 0.0)
    assert ex.degrees(z) == (0, 0)


@given(st.floats(0.3, 3), st.floats(-10, 10))
@settings(max_examples=25)
def test_dilation_covariance(mu, t):
    h = ex.bump(0.0, 0.4)
    s = 0.5 + 1j * t
    moved = ex.fourier_hat(h.dilate(mu), s)
    assert abs(moved - mu ** s * ex.fourier_hat(h, s)) < 1e-12
    g = ex.gaussian(0.3)
    assert abs(ex.fourier_hat(g.dilate(mu), s) - ex.fourier_hat(g.dilate(mu), s, True)) < 1e-10


def test_convolution_theorem():
    f, g = ex.gaussian(0.3, 0.2), ex.bump(-0.1, 0.4)
    g.hat = None
    c = ex.convolve(f, g)
    s = 0.5 + 2j
    direct = ex.fourier_hat(c, s, quadrature=True)
    assert abs(direct - ex.fourier_hat(f, s) * ex.fourier_hat(g, s)) < 1e-8


def test_adjoint():
    f = ex.gaussian(0.4, 0.3, 1 + 2j)
    fa = ex.adjoint(f)
    for s in (0.5 + 1j, 0.2 - 3j, 2.0):
        ref = np.conj(ex.fourier_hat(f, 1 - np.conj(s)))
        assert abs(ex.fourier_hat(fa, s) - ref) < 1e-14
        assert abs(ex.fourier_hat(fa, s, quadrature=True) - ref) < 1e-10
    u = np.array([0.7, 1.3])
    assert np.allclose(fa(u), np.conj(f(1 / u)) / u)


# degrees ---------------------------------------------------------------------------

def test_degrees_of_an_interval_indicator():
    ind = ex.IdeleTestFunction(lambda u: ((u >= 1) & (u <= 2)).astype(float),
                               (0.0, math.log(2)), compact=True)
    d, dprime = ex.degrees(ind, quadrature=True)
    assert abs(d - 1) < 1e-13
    assert abs(dprime - math.log(2)) < 1e-13


@pytest.mark.parametrize("g0", [0.5, 2.0, 7.0])
def test_degrees_concentrated_near_a_point(g0):
    h = ex.gaussian(0.01, math.log(g0))
    d, dprime = ex.degrees(h)
    assert abs(d / dprime - g0) < 1e-12 * g0


def test_degrees_of_adjoint_are_swapped_conjugates():
    f = ex.gaussian(0.3, 0.4, 1 - 1j)
    d, dp = ex.degrees(f)
    da, dpa = ex.degrees(ex.adjoint(f))
    assert abs(da - np.conj(dp)) < 1e-14 and abs(dpa - np.conj(d)) < 1e-14


def test_delta_term():
    assert ex.delta_term() == 0
    assert abs(ex.delta_term(-4) + math.log(4)) < 1e-15


# geometric side ------------------------------------------------------------------------

def test_narrow_family_sees_no_primes():
    for h in ex.narrow_family():
        assert h.window[1] < math.log(2) and h.window[0] > -math.log(2)
        assert ex.prime_terms(h) == ({}, 0.0)


def test_prime_terms_gaussian():
    h = ex.gaussian(1.0)
    terms, tail = ex.prime_terms(h)
    assert max(terms) <= math.exp(h.window[1])
    assert min(terms) == 2
    assert tail <= 1e-12
    # direct check of the p = 2 entry
    lp = math.log(2)
    ref = sum(lp * (h(np.array([2.0 ** k]))[0] + h(np.array([2.0 ** -k]))[0] / 2 ** k)
              for k in range(1, 14))
    assert abs(terms[2] - ref) < 1e-15


def test_arch_kernel_is_the_real_place_density():
    from ncmotive.numkernel import digamma
    for t in (0.0, 3.0, 40.0):
        ref = math.log(math.pi) - complex(digamma(0.25 + 0.5j * t)).real
        assert abs(ex.arch_kernel(t) - ref) < 1e-12


# spectral side ----------------------------------------------------------------------------

def test_spectral_side_examples():
    h = ex.gaussian(0.5)
    total, tail = ex.spectral_side(h, ZEROS_200)
    g = np.array(ZEROS_200)
    ref = 2 * np.sum(0.5 * math.sqrt(2 * math.pi) * np.exp(-0.125 * g * g))
    assert abs(total - ref) < 1e-15 and tail < 1e-15
    with pytest.raises(InsufficientZeros):
        ex.spectral_side(ex.gaussian(0.05), ZEROS_200[:5])


# balance -----------------------------------------------------------------------------------

@pytest.mark.parametrize("sigma", [0.08, 0.1, 0.15, 0.25, 0.5])
def test_gaussian_balance(sigma):
    rep = ex.balance(ex.gaussian(sigma), ZEROS_200, 1e-3)
    assert rep.residual <= 1e-3
    assert rep.residual <= 1e-10  # in practice near machine precision


def test_narrow_balance_single():
    zeros = sp.zeta_zeros(500).ordinates
    rep = ex.balance(ex.bump(0.0, 0.69), zeros, 1e-6)
    assert rep.finite_terms == {}
    assert rep.residual <= 1e-6


def test_balance_detects_a_missing_zero():
    zeros = list(ZEROS_200)
    del zeros[0]
    rep = ex.balance(ex.gaussian(0.25), zeros, 1e-3)
    assert rep.residual > 1e-3


def test_report_json():
    rep = ex.balance(ex.gaussian(0.5), ZEROS_200)
    data = rep.to_json()
    assert float(data["residual"]) == rep.residual
    assert set(data) >= {"spectral_side", "geometric_side", "arch_term", "finite_terms"}
    assert ex.ExplicitFormulaReport().geometric_side == 0


# positivity ----------------------------------------------------------------------------------

def test_positivity_geometric_matches_spectral():
    rng = np.random.default_rng(4)
    for _ in range(5):
        f = ex.random_gaussian_mixture(rng)
        geo = ex.weil_positivity(f)
        assert abs(geo.imag) < 1e-14
        assert abs(geo.real - ex.positivity_form(f, ZEROS_200)) < 1e-12
        assert geo.real >= -1e-6


def test_self_correlation_closed_form_matches_convolution():
    f = ex.mixture([ex.gaussian(0.3, 0.1, 0.7), ex.gaussian(0.2, -0.2, -0.3)])
    closed = ex.self_correlation(f)
    generic = ex.convolve(f, ex.adjoint(f))
    u = np.array([0.6, 1.0, 1.5])
    assert np.allclose(closed(u), generic(u), atol=1e-11, rtol=0)


def test_positivity_of_a_single_gaussian():
    f = ex.gaussian(0.3)
    assert ex.weil_positivity(f).real > 0
    assert ex.positivity_form(ex.IdeleTestFunction.zero(), ZEROS_200) == 0


# radical check -------------------------------------------------------------------------------

def test_radical_check():
    zeros = sp.zeta_zeros(40).ordinates
    good = sp.TestFunction(sp.alternating(sp.log_gaussian(0.15)), 1,
                           lam_max=sp.gaussian_lam_max(0.15))
    assert ex.radical_check(good, zeros, 5) <= 1e-4
    bad = sp.TestFunction(sp.log_gaussian(0.15), 1, lam_max=sp.gaussian_lam_max(0.15))
    with pytest.raises(ConditionsViolated):
        ex.radical_check(bad, zeros)
    assert ex.radical_check(bad, zeros, enforce=False) > 1e-4
    assert ex.radical_check(sp.TestFunction.zero(), zeros) == 0
