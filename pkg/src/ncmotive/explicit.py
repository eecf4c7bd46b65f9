"""The Riemann-Weil explicit formula over Q, checked numerically.

For h on R+* with h^(s) = int h(u) u^s d*u the balance reads

    sum_rho h^(rho) = h^(0) + h^(1) - DeltaDelta h(1)
                      - sum_p sum_k log p (h(p^k) + p^-k h(p^-k))
                      - (1/2 pi) int h^(1/2 + it) (log pi - Re psi(1/4 + it/2)) dt,

the last kernel being the real-place principal value of archfactors.
"""
from dataclasses import dataclass, field
import json
import math

import numpy as np

from .archfactors import HodgeStructure, minus_two_dlog
from .errors import ConditionsViolated, ConvergenceError, InsufficientZeros
from .numkernel import digamma, integrate_adaptive
from .spectral import check_conditions, vanishing_check

LOG_PI = math.log(math.pi)
_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)


class IdeleTestFunction:
    """Test function h(u) on R+* with its decay metadata.

    ``window = (a, b)`` bounds the support in x = log u (exact for compact
    support, else where |h(e^x)| e^{x/2} has dropped below 1e-17).  ``hat``
    is an optional closed form of the Mellin transform.  ``t_max`` is the
    height beyond which |h^(1/2 + it)| is negligible.
    """

    def __init__(self, h, window, hat=None, t_max=None, decay=2.0, chi=None,
                 compact=False, name=""):
        self.h = h
        self.window = (float(window[0]), float(window[1]))
        self.hat = hat
        self.t_max = t_max
        self.decay = decay
        self.chi = chi
        self.compact = compact
        self.name = name

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        return np.asarray(self.h(u), dtype=complex)

    @classmethod
    def zero(cls):
        return cls(lambda u: np.zeros_like(np.asarray(u, float)), (-1.0, 1.0),
                   hat=lambda s: np.zeros_like(np.asarray(s, complex)), t_max=1.0, name="zero")

    def dilate(self, mu):
        """u -> h(u / mu); the transform picks up mu^s."""
        shift = math.log(mu)
        hat = None if self.hat is None else (lambda s, f=self.hat: mu ** np.asarray(s) * f(s))
        return IdeleTestFunction(lambda u: self.h(np.asarray(u) / mu),
                                 (self.window[0] + shift, self.window[1] + shift), hat,
                                 self.t_max, self.decay, self.chi, self.compact,
                                 f"{self.name}@{mu}")


def gaussian(sigma=1.0, center=0.0, coeff=1.0):
    """h(u) = c u^{-1/2} exp(-(log u - m)^2 / 2 sigma^2), h^(1/2 + it) Gaussian in t."""
    half = sigma * math.sqrt(2 * 41.0)

    def h(u):
        x = np.log(np.asarray(u, dtype=float))
        return coeff * np.exp(-0.5 * x - (x - center) ** 2 / (2 * sigma ** 2))

    def hat(s):
        s = np.asarray(s, dtype=complex)
        w = s - 0.5
        return coeff * sigma * math.sqrt(2 * math.pi) * np.exp(center * w + 0.5 * sigma ** 2 * w * w)

    out = IdeleTestFunction(h, (center - half, center + half), hat,
                            t_max=math.sqrt(2 * 45.0) / sigma, name=f"gauss{sigma}")
    out.sigma, out.center, out.coeff = sigma, center, coeff
    return out


def bump(center=0.0, width=0.69, coeff=1.0):
    """h(u) = c u^{-1/2} exp(-1 / (1 - y^2)), y = (log u - center)/width, |y| < 1."""
    def h(u):
        x = np.log(np.asarray(u, dtype=float))
        y = (x - center) / width
        out = np.zeros_like(y)
        inside = np.abs(y) < 1
        out[inside] = np.exp(-0.5 * x[inside] - 1.0 / (1.0 - y[inside] ** 2))
        return coeff * out

    # |h^| ~ exp(-sqrt(2 width t)); 1e-18 is reached near t = 41^2 / (2 width)
    return IdeleTestFunction(h, (center - width, center + width), None,
                             t_max=41.0 ** 2 / (2 * width), compact=True, name=f"bump{width}")


def narrow_family():
    """Bumps with log-support inside (-log 2, log 2): no prime power is seen."""
    return [bump(0.0, 0.69), bump(0.05, 0.6), bump(-0.1, 0.55), bump(0.0, 0.5, 2.0),
            bump(0.1, 0.58, -1.0)]


def gaussian_family():
    return [gaussian(s) for s in (0.08, 0.1, 0.15, 0.25, 0.5)]


# transforms --------------------------------------------------------------------

def _nodes(window, t_abs):
    a, b = window
    width = min(0.1, 18.0 / (t_abs + 1.0))
    k = max(1, int(math.ceil((b - a) / width)))
    edges = np.linspace(a, b, k + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
    half = 0.5 * (edges[1:] - edges[:-1])[:, None]
    return (mid + half * _GL_X).ravel(), (half * _GL_W).ravel()


def _quad_hat(h, s):
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    x, w = _nodes(h.window, float(np.max(np.abs(s.imag), initial=0.0)))
    vals = h(np.exp(x)) * w
    out = np.empty(s.shape, dtype=complex)
    for start in range(0, s.size, 512):
        blk = s[start:start + 512]
        out[start:start + 512] = np.exp(np.outer(blk, x)) @ vals
    return out


def fourier_hat(h, rho, quadrature=False):
    """h^(rho) = int h(u) u^rho d*u (closed form when known, unless ``quadrature``)."""
    scalar = np.ndim(rho) == 0
    if h.hat is not None and not quadrature:
        out = np.asarray(h.hat(np.atleast_1d(np.asarray(rho, dtype=complex))), dtype=complex)
    else:
        out = _quad_hat(h, rho)
    return complex(out[0]) if scalar else out


def convolve(f, g, tol=1e-12):
    """(f * g)(u) = int f(k) g(u/k) d*k, by quadrature in log k."""
    a = f.window[0] + g.window[0]
    b = f.window[1] + g.window[1]

    def h(u):
        u = np.atleast_1d(np.asarray(u, dtype=float))
        out = np.empty(u.shape, dtype=complex)
        for i, uu in enumerate(u.ravel()):
            lo = max(f.window[0], math.log(uu) - g.window[1])
            hi = min(f.window[1], math.log(uu) - g.window[0])
            if hi <= lo:
                out.flat[i] = 0
                continue
            integrand = lambda x: f(np.exp(x)) * g(uu * np.exp(-np.asarray(x)))
            out.flat[i] = integrate_adaptive(integrand, (lo, hi), tol=tol).value
        return out

    hat = None
    if f.hat is not None and g.hat is not None:
        hat = lambda s: f.hat(s) * g.hat(s)
    t_max = min(x for x in (f.t_max, g.t_max) if x is not None) if (f.t_max or g.t_max) else None
    return IdeleTestFunction(h, (a, b), hat, t_max, name=f"({f.name}*{g.name})")


def adjoint(f):
    """f#(u) = u^-1 conj f(1/u); its transform is conj f^(1 - conj s)."""
    h = lambda u: np.conj(f(1.0 / np.asarray(u, dtype=float))) / np.asarray(u, dtype=float)
    hat = None
    if f.hat is not None:
        hat = lambda s: np.conj(f.hat(1 - np.conj(np.asarray(s, dtype=complex))))
    return IdeleTestFunction(h, (-f.window[1], -f.window[0]), hat, f.t_max, f.decay,
                             f.chi, f.compact, f"{f.name}#")


def degrees(h, quadrature=False):
    """(d, d') = (h^(1), h^(0))."""
    return (fourier_hat(h, 1.0, quadrature), fourier_hat(h, 0.0, quadrature))


def delta_term(discriminant=1):
    """Delta.Delta = -log |D| (0 for Q)."""
    return -math.log(abs(discriminant))


# geometric side ----------------------------------------------------------------

def _primes_upto(n):
    n = int(n)
    if n < 2:
        return np.array([], dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(n ** 0.5) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return np.nonzero(sieve)[0]


def prime_terms(h, extra=0.0):
    """{p: sum_k log p (h(p^k) + p^-k h(p^-k))} over p^k inside the window, plus a tail bound."""
    a, b = h.window
    top = max(b, -a) + extra
    if top < math.log(2):
        return {}, 0.0
    limit = math.exp(top)
    if limit > 5e7:
        raise ConvergenceError(f"prime sum up to {limit:.3g} is beyond the budget")
    terms = {}
    for p in _primes_upto(limit):
        p = int(p)
        lp = math.log(p)
        total = 0j
        k = 1
        while k * lp <= top:
            q = float(p) ** k
            total += lp * (complex(h(np.array([q]))[0]) + complex(h(np.array([1 / q]))[0]) / q)
            k += 1
        if total != 0:
            terms[p] = total
    tail = 0.0
    if not h.compact:
        # Chebyshev: sum_{n > X} Lambda(n) F(n) <= 1.04 int_X^inf F(x) dx for decreasing F
        g = lambda x: np.abs(h(np.asarray(x))) + np.abs(h(1 / np.asarray(x))) / np.asarray(x)
        tail = 1.04 * integrate_adaptive(g, (limit, math.inf), tol=1e-18).value.real
    return terms, tail


def arch_kernel(t):
    """log pi - Re psi(1/4 + it/2), the real-place principal value density."""
    return minus_two_dlog(HodgeStructure.point(), "real", t)


def arch_term(h):
    """(1/2 pi) int h^(1/2 + it) (log pi - Re psi(1/4 + it/2)) dt."""
    t_max = h.t_max or 200.0
    reach = max(abs(h.window[0]), abs(h.window[1]))
    width = min(2.0, t_max / 64, 6.0 / (reach + 1.0))
    k = max(1, int(math.ceil(2 * t_max / width)))
    edges = np.linspace(-t_max, t_max, k + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
    half = 0.5 * (edges[1:] - edges[:-1])[:, None]
    t = (mid + half * _GL_X).ravel()
    w = (half * _GL_W).ravel()
    kern = LOG_PI - digamma(0.25 + 0.5j * t).real
    hat = fourier_hat(h, 0.5 + 1j * t)
    return complex(np.sum(w * kern * hat)) / (2 * math.pi)


def spectral_side(h, zeros, tol=1e-6):
    """sum over tabulated rho = 1/2 +- i gamma, with a tail estimate past the table."""
    ords = np.array(tuple(zeros), dtype=float)
    if ords.size == 0:
        total = 0j
        height = 0.0
    else:
        total = complex(np.sum(fourier_hat(h, 0.5 + 1j * ords) + fourier_hat(h, 0.5 - 1j * ords)))
        height = float(ords.max())
    tail = _zero_tail(h, height)
    if tail > tol:
        raise InsufficientZeros(f"zero-sum tail {tail:.3g} past height {height:.1f} exceeds {tol:g}")
    return total, tail


def _zero_tail(h, height):
    """int_T^inf (|h^(1/2+it)| + |h^(1/2-it)|) (1/2 pi) log(t / 2 pi) dt (density bound)."""
    t_max = h.t_max or 200.0
    lo = max(height, 2 * math.pi + 1e-9)
    if lo >= t_max:
        return 0.0
    t = np.linspace(lo, t_max, 4001)
    mag = np.abs(fourier_hat(h, 0.5 + 1j * t)) + np.abs(fourier_hat(h, 0.5 - 1j * t))
    dens = np.log(t / (2 * math.pi)) / (2 * math.pi) + 0.5 / t  # slack for the O(log t) error
    return float(np.trapezoid(mag * dens, t))


@dataclass
class ExplicitFormulaReport:
    spectral_side: complex = 0j
    hhat0: complex = 0j
    hhat1: complex = 0j
    delta_term: float = 0.0
    h_at_one: complex = 0j
    arch_term: complex = 0j
    finite_terms: dict = field(default_factory=dict)
    prime_tail: float = 0.0
    zero_tail: float = 0.0
    residual: float = 0.0

    @property
    def finite_total(self):
        return sum(self.finite_terms.values(), 0j)

    @property
    def geometric_side(self):
        return (self.hhat0 + self.hhat1 - self.delta_term * self.h_at_one
                - self.finite_total - self.arch_term)

    @property
    def budget(self):
        return self.prime_tail + self.zero_tail

    def to_json(self):
        def dec(z):
            z = complex(z)
            return repr(z.real) if z.imag == 0 else f"{z.real!r}{z.imag:+.17g}j"
        return {"spectral_side": dec(self.spectral_side), "hhat0": dec(self.hhat0),
                "hhat1": dec(self.hhat1), "delta_term": dec(self.delta_term),
                "h_at_one": dec(self.h_at_one),
                "arch_term": dec(self.arch_term),
                "finite_terms": {str(p): dec(v) for p, v in sorted(self.finite_terms.items())},
                "prime_tail": dec(self.prime_tail), "zero_tail": dec(self.zero_tail),
                "residual": dec(self.residual), "geometric_side": dec(self.geometric_side)}

    def dumps(self):
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def geometric_side(h, discriminant=1):
    """All terms of the geometric side; DeltaDelta h(1) is 0 for Q."""
    terms, tail = prime_terms(h)
    d = delta_term(discriminant)
    rep = ExplicitFormulaReport(hhat0=fourier_hat(h, 0.0), hhat1=fourier_hat(h, 1.0),
                                delta_term=d, arch_term=arch_term(h), finite_terms=terms,
                                prime_tail=tail, h_at_one=complex(h(np.array([1.0]))[0]))
    return rep


def balance(h, zeros, tol=1e-6):
    """Spectral minus geometric side, as a filled ExplicitFormulaReport."""
    rep = geometric_side(h)
    rep.spectral_side, rep.zero_tail = spectral_side(h, zeros, tol)
    rep.residual = abs(rep.spectral_side - rep.geometric_side)
    return rep


def positivity_form(f, zeros, tol=1e-6):
    """sum over tabulated zeros of |f^(rho)|^2, the spectral side of f * f#."""
    ords = np.array(tuple(zeros), dtype=float)
    if ords.size == 0:
        return 0.0
    vals = np.abs(fourier_hat(f, 0.5 + 1j * ords)) ** 2 + np.abs(fourier_hat(f, 0.5 - 1j * ords)) ** 2
    value = float(np.sum(vals))
    if value < -tol:
        raise ConvergenceError("positivity form is negative")
    return value


def mixture(parts, name="mixture"):
    """Sum of gaussian() components; keeps them so correlations stay in closed form."""
    parts = list(parts)
    lo = min(p.window[0] for p in parts)
    hi = max(p.window[1] for p in parts)
    h = lambda u: sum(p.h(u) for p in parts)
    hat = lambda s: sum(p.hat(s) for p in parts)
    out = IdeleTestFunction(h, (lo, hi), hat, max(p.t_max for p in parts), name=name)
    out.parts = parts
    return out


def random_gaussian_mixture(rng, n_terms=3):
    """sum_i c_i * gaussian(sigma_i, m_i), scaled so that sum |c_i| = 1."""
    sig = rng.uniform(0.1, 0.5, n_terms)
    cen = rng.uniform(-0.5, 0.5, n_terms)
    coef = rng.normal(size=n_terms)
    coef /= np.abs(coef).sum()
    return mixture([gaussian(s, m, c) for s, m, c in zip(sig, cen, coef)])


def self_correlation(f):
    """f * f#, whose transform is |f^|^2 on the critical line.

    For a Gaussian mixture the pairwise products of transforms are again
    Gaussian: sigma^2 = sigma_i^2 + sigma_j^2, centre m_i - m_j.
    """
    parts = getattr(f, "parts", None)
    if parts is None:
        return convolve(f, adjoint(f))
    terms = []
    for a in parts:
        for b in parts:
            sa, sb = a.sigma, b.sigma
            sig = math.hypot(sa, sb)
            coeff = a.coeff * np.conj(b.coeff) * sa * sb * math.sqrt(2 * math.pi) / sig
            terms.append(gaussian(sig, a.center - b.center, coeff))
    return mixture(terms, name=f"{f.name}*#")


def weil_positivity(f, discriminant=1):
    """Geometric side of f * f#; nonnegative for every f exactly when RH holds."""
    return geometric_side(self_correlation(f), discriminant).geometric_side


def radical_check(xi, zeros, k_max=None, enforce=True):
    """max over tabulated zeros of |f^(rho)| / line scale for f = E(xi).

    For xi meeting the (V) conditions this vanishes; with ``enforce=False``
    a violating xi is accepted and its ratio sits far above the tolerance.
    """
    if xi.is_zero:
        return 0.0
    ok, integral, at_zero = check_conditions(xi)
    if enforce and not ok:
        raise ConditionsViolated(f"integral {integral:.3g}, value at 0 {at_zero:.3g}")
    k = len(tuple(zeros)) if k_max is None else k_max
    rep = vanishing_check(xi, zeros, k, subtract=False, enforce=enforce)
    return float(np.max(rep.ratios, initial=0.0))
