"""Log-gamma, digamma and Hurwitz zeta in double precision.

All three accept a scalar or an array argument and return the same shape
(python ``complex`` for scalar input).  log-gamma is the principal branch,
continuous along vertical lines, which the zero locator relies on.
"""
import math

import numpy as np
from scipy.special import bernoulli

from ..errors import ConvergenceError, PoleError
from . import _backend

EULER_GAMMA = 0.57721566490153286061
LOG_2PI = math.log(2 * math.pi)

# B_{2k} / (2k (2k-1)) for the Stirling series of log Gamma
_B = bernoulli(60)
_STIRLING = np.array([_B[2 * k] / (2 * k * (2 * k - 1)) for k in range(1, 11)])
# B_{2k} / (2k) for the digamma asymptotic series
_DIGAMMA = np.array([_B[2 * k] / (2 * k) for k in range(1, 11)])
# B_{2j} / (2j)! for Euler-Maclaurin, j = 1..30
_EM = np.array([_B[2 * j] / math.factorial(2 * j) for j in range(1, 31)])

_ASYMPTOTIC_RADIUS = 16.0


def _as_complex(z):
    arr = np.asarray(z, dtype=np.complex128)
    return arr, arr.ndim == 0


def _out(arr, scalar):
    return complex(arr) if scalar else arr


def _check_poles(z):
    bad = (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))
    if np.any(bad):
        raise PoleError(f"pole of Gamma at {z[bad].ravel()[0].real:g}")


def _shift_counts(z):
    """Integer shift N with Re(z+N) >= 1 and |z+N| >= the asymptotic radius."""
    need = np.maximum(0.0, 1.0 - z.real)
    small = np.abs(z.imag) < _ASYMPTOTIC_RADIUS
    need = np.where(small, np.maximum(need, _ASYMPTOTIC_RADIUS - z.real), need)
    return np.ceil(need).astype(np.int64)


def log_gamma(z):
    """Principal branch of log Gamma(z)."""
    z, scalar = _as_complex(z)
    z = np.atleast_1d(z)
    _check_poles(z)
    shift = _shift_counts(z)
    acc = np.zeros(z.shape, dtype=np.complex128)
    for k in range(int(shift.max(initial=0))):
        m = shift > k
        acc[m] += np.log(z[m] + k)
    w = z + shift
    inv = 1.0 / w
    inv2 = inv * inv
    series = np.zeros(z.shape, dtype=np.complex128)
    for c in _STIRLING[::-1]:
        series = series * inv2 + c
    res = (w - 0.5) * np.log(w) - w + 0.5 * LOG_2PI + series * inv - acc
    return _out(res[0] if scalar else res, scalar)


def digamma(z):
    """Gamma'(z)/Gamma(z)."""
    z, scalar = _as_complex(z)
    z = np.atleast_1d(z)
    _check_poles(z)
    shift = _shift_counts(z)
    acc = np.zeros(z.shape, dtype=np.complex128)
    for k in range(int(shift.max(initial=0))):
        m = shift > k
        acc[m] += 1.0 / (z[m] + k)
    w = z + shift
    inv2 = 1.0 / (w * w)
    series = np.zeros(z.shape, dtype=np.complex128)
    for c in _DIGAMMA[::-1]:
        series = series * inv2 + c
    res = np.log(w) - 0.5 / w - series * inv2 - acc
    return _out(res[0] if scalar else res, scalar)


def gamma(z):
    return np.exp(log_gamma(z)) if np.ndim(z) else complex(np.exp(log_gamma(z)))


def hurwitz_zeta(s, a=1.0, rtol=1e-15):
    """Hurwitz zeta(s, a) by Euler-Maclaurin, for 0 < a and Re s >= -2.

    The head is shifted until ``a + N >= max(10, |s|/2)`` so the correction
    series converges geometrically along the critical line.
    """
    a = float(a)
    if not a > 0:
        raise ValueError("Hurwitz parameter a must be positive")
    s, scalar = _as_complex(s)
    shape = s.shape
    s = np.atleast_1d(s).ravel()
    if np.any(s == 1):
        raise PoleError("Hurwitz zeta has a pole at s=1")
    target = np.maximum(10.0, np.abs(s) / 2.0)
    n_terms = np.maximum(0, np.ceil(target - a)).astype(np.int64)
    head = _backend.power_sum(s, a, n_terms)
    w = a + n_terms
    logw = np.log(w)
    w_neg_s = np.exp(-s * logw)
    total = head + w * w_neg_s / (s - 1) + 0.5 * w_neg_s
    poch = s.copy()
    wpow = w_neg_s / w  # w^{-s-1}
    inv_w2 = 1.0 / (w * w)
    # absolute floor keeps the stopping rule meaningful next to zeros
    scale_floor = np.abs(w_neg_s)
    done = np.zeros(s.shape, dtype=bool)
    for j, coef in enumerate(_EM):
        term = coef * poch * wpow
        total = np.where(done, total, total + term)
        done |= np.abs(term) <= rtol * (np.abs(total) + scale_floor)
        if done.all():
            break
        poch = poch * (s + 2 * j + 1) * (s + 2 * j + 2)
        wpow = wpow * inv_w2
    else:
        raise ConvergenceError("Euler-Maclaurin tail did not converge")
    return _out(total[0] if scalar else total.reshape(shape), scalar)


def zeta(s):
    """Riemann zeta via ``hurwitz_zeta(s, 1)``."""
    return hurwitz_zeta(s, 1.0)
