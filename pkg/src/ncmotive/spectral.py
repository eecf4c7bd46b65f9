"""Numerical distillation: the summation map E, Mellin transforms, Poisson
residuals, factorization through Dirichlet L-functions and vanishing at zeros.

A point of the idele class group is a pair (u mod N, lam).  Test functions
are finite sums of product forms f0(rho) f_inf(lam) with f0 a function on
Z/N.  The Mellin convention is ``int h(lam) lam^s d*lam``.
"""
from dataclasses import dataclass, field
import cmath
import math

import numpy as np
from scipy.optimize import brentq

from .characters import DirichletCharacter, characters, factorize
from .errors import ConditionsViolated, ConvergenceError, NotCovariant
from .numkernel import hurwitz_zeta, log_gamma, mellin_transform

MAX_TERMS = 2 * 10 ** 7


def _vectorised(f):
    def g(lam):
        lam = np.asarray(lam, dtype=float)
        try:
            out = np.asarray(f(lam), dtype=complex)
            if out.shape == lam.shape:
                return out
        except (TypeError, ValueError):
            pass
        return np.array([complex(f(x)) for x in lam.ravel()]).reshape(lam.shape)
    return g


class TestFunction:
    """sum_i f0_i(rho) f_inf_i(lam) on (Z/N) x R+*.

    ``lam_max`` is declared decay metadata: beyond it every f_inf is
    negligible (below 1e-18 relative).  ``beta`` is the strip parameter.
    """
    __test__ = False  # keep pytest from collecting the class

    def __init__(self, f_inf=None, level=1, f0=None, lam_max=60.0, beta=2.0, name=""):
        self.level = int(level)
        self.lam_max = float(lam_max)
        self.beta = beta
        self.name = name
        self.components = []
        if f_inf is not None:
            self.add(f0, f_inf)

    def add(self, f0, f_inf):
        if f0 is None:
            vals = np.ones(self.level, dtype=complex)
        elif callable(f0):
            vals = np.array([complex(f0(r)) for r in range(self.level)])
        else:
            vals = np.asarray(f0, dtype=complex)
            if vals.shape != (self.level,):
                raise ValueError(f"f0 needs {self.level} residue values")
        self.components.append((vals, _vectorised(f_inf)))
        return self

    @classmethod
    def zero(cls, level=1):
        return cls(lambda lam: np.zeros_like(lam), level, np.zeros(level))

    @property
    def is_zero(self):
        return all(not v.any() for v, _ in self.components)

    def __call__(self, rho, lam):
        return sum(v[int(rho) % self.level] * f(np.asarray(lam, float))
                   for v, f in self.components)

    def dilate(self, mu):
        """lam -> xi(rho, mu lam)."""
        out = TestFunction(level=self.level, lam_max=self.lam_max / mu, beta=self.beta,
                           name=f"{self.name}@{mu}")
        for v, f in self.components:
            out.components.append((v, lambda lam, f=f: f(mu * np.asarray(lam))))
        return out

    def integral(self, u=1):
        """mean_rho f0(rho u) * int f_inf dlam, the Poisson main coefficient."""
        total = 0j
        for v, f in self.components:
            mean = v[(np.arange(self.level) * u) % self.level].mean()
            if mean != 0:
                total += mean * mellin_transform(f, 1.0, tol=1e-13).value
        return total

    def value_at_zero(self, u=1):
        """Euler-Maclaurin constant: -sum_j f0(j u) B1(j/N) f_inf(0+)."""
        total = 0j
        js = np.arange(1, self.level + 1)
        b1 = js / self.level - 0.5
        for v, f in self.components:
            f_at_0 = complex(f(np.array([1e-14]))[0])
            if f_at_0 != 0:
                total -= f_at_0 * np.sum(v[(js * u) % self.level] * b1)
        return total

    def spot_check_decay(self, grid=None, tol=1e-12):
        """|f_inf| small at lam_max and at the bottom of the grid."""
        grid = np.logspace(-6, math.log10(self.lam_max), 40) if grid is None else grid
        vals = [np.abs(f(grid)) for _, f in self.components]
        return all(v[-1] <= tol * max(1.0, v.max()) for v in vals)


# summation map ---------------------------------------------------------------

def summation_E(xi, u, lam, tol=1e-14):
    """E(xi)(u, lam) = sum_{n >= 1} xi(n u mod N, n lam).

    Truncated where n lam passes the declared ``lam_max``; returns
    (value, tail estimate).
    """
    n_terms = int(math.ceil(xi.lam_max / lam))
    if n_terms > MAX_TERMS:
        raise ConvergenceError(f"E-sum at lam={lam} needs {n_terms} terms")
    n = np.arange(n_terms, 0, -1)
    x = n * lam
    res = (n * u) % xi.level
    total = 0j
    tail = 0.0
    for v, f in xi.components:
        fv = f(x)
        total += np.sum(v[res] * fv)
        edge = f(np.array([xi.lam_max, 2 * xi.lam_max]))
        tail += float(np.max(np.abs(edge)) * np.abs(v).max()) / lam
    return complex(total), tail


def _E_on_grid(xi, u, lams):
    return np.array([summation_E(xi, u, lam)[0] for lam in lams])


def mellin(h, s, tol=1e-11):
    """int_0^inf h(lam) lam^s d*lam for a level-1 TestFunction or a callable."""
    if isinstance(h, TestFunction):
        f = lambda lam: h(1 % h.level, lam)
    else:
        f = h
    return mellin_transform(f, s, tol=tol)


# composite Gauss-Legendre in x = log lam, reused for every exponent
_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)


def _panels(x0, x1, width):
    k = max(1, int(math.ceil((x1 - x0) / width)))
    edges = np.linspace(x0, x1, k + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
    half = 0.5 * (edges[1:] - edges[:-1])[:, None]
    return (mid + half * _GL_X).ravel(), (half * _GL_W).ravel()


@dataclass
class MellinOfE:
    values: np.ndarray
    errors: np.ndarray


def mellin_of_E(xi, s, u=1, subtract=False, lam_c=1e-4, width=0.5):
    """Mellin transform of E(xi)(u, .), optionally minus its lam^-1 term.

    [lam_c, lam_max] is integrated numerically from the summed function.
    Below lam_c, E = A/lam + R0 + O(lam) is used in closed form, and above
    lam_max only the subtracted -A/lam survives.  Needs Re s > 1 without
    subtraction and 0 < Re s < 1 with it.
    """
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    a_coef = xi.integral(u)
    r0 = xi.value_at_zero(u)
    x0, x1 = math.log(lam_c), math.log(xi.lam_max)

    def numeric(w):
        x, wts = _panels(x0, x1, w)
        lams = np.exp(x)
        e = _E_on_grid(xi, u, lams)
        if subtract:
            e = e - a_coef / lams
        return (np.exp(np.outer(s, x)) * (wts * e)).sum(axis=1)

    fine = numeric(width)
    coarse = numeric(2 * width)
    below = r0 * lam_c ** s / s
    if subtract:
        above = a_coef * xi.lam_max ** (s - 1) / (s - 1)
    else:
        below = below + a_coef * lam_c ** (s - 1) / (s - 1)
        above = 0.0
    # size of the first neglected Euler-Maclaurin term at lam_c
    e_c = summation_E(xi, u, lam_c)[0]
    slope = abs(e_c - a_coef / lam_c - r0) / lam_c
    err = np.abs(fine - coarse) + slope * lam_c ** (s.real + 1) / (s.real + 1)
    return MellinOfE(fine + below + above, err)


# Poisson residual ---------------------------------------------------------------

@dataclass
class PoissonReport:
    lams: np.ndarray
    residuals: np.ndarray
    decay_exponent: float
    declared_order: int

    @property
    def passed(self):
        return self.decay_exponent >= self.declared_order


def poisson_residual(xi, lams, u=1, order=2):
    """r(lam) = E(xi)(u, lam) - lam^-1 * mean * int xi, with a decay fit.

    The exponent is the least-squares slope of -log|r| against
    log|log lam| over the grid (larger means faster decay as lam -> 0).
    """
    lams = np.asarray(lams, dtype=float)
    a_coef = xi.integral(u)
    r = np.array([summation_E(xi, u, lam)[0] for lam in lams]) - a_coef / lams
    mag = np.abs(r)
    if not mag.any():
        return PoissonReport(lams, r, math.inf, order)
    floor = 1e-300
    slope = np.polyfit(np.log(np.abs(np.log(lams))), -np.log(mag + floor), 1)[0]
    return PoissonReport(lams, r, float(slope), order)


# Dirichlet L-functions and factorization -------------------------------------

def dirichlet_l(s, chi):
    """L(s, chi) = N^-s sum_{j=1}^{N} chi(j) zeta(s, j/N) (imprimitive at p | N)."""
    n = chi.modulus
    s_arr = np.asarray(s, dtype=complex)
    total = np.zeros(s_arr.shape, dtype=complex)
    for j in range(1, n + 1):
        c = chi(j) if n > 1 else 1.0
        if c != 0:
            total = total + c * hurwitz_zeta(s_arr, j / n)
    out = total * np.exp(-s_arr * math.log(n))
    return complex(out) if np.ndim(s) == 0 else out


def covariance_character(f0_vals):
    """The character chi with f0(m a) = chi(m) f0(a) for all units m."""
    n = len(f0_vals)
    for chi in characters(n):
        ok = True
        for m in range(1, n + 1):
            c = chi(m) if n > 1 else 1.0
            if c == 0:
                continue
            idx = (np.arange(n) * m) % n
            if np.max(np.abs(f0_vals[idx] - c * f0_vals), initial=0.0) > 1e-12:
                ok = False
                break
        if ok:
            return chi
    raise NotCovariant("f0 is not an eigenfunction of the unit group")


def finite_factor(f0_vals, s, u=1):
    """sum over N-smooth a of f0(a u) a^-s, as a finite exponential sum.

    For p | N the residues p^k mod N are periodic from k = v_p(N) on with
    period T_p; those exponents carry the geometric factor 1/(1 - p^{-T_p s}).
    """
    n = len(f0_vals)
    primes = sorted(factorize(n)) if n > 1 else []
    cof = {}
    ranges = []
    for p in primes:
        e = factorize(n)[p]
        rest = n // p ** e
        period = 1
        if rest > 1:
            while pow(p, period, rest) != 1:
                period += 1
        cof[p] = (e, period)
        ranges.append(range(e + period))
    total = 0j
    s = complex(s)

    def rec(i, a, weight):
        nonlocal total
        if i == len(primes):
            total += f0_vals[(a * u) % n] * weight
            return
        p = primes[i]
        e, period = cof[p]
        for k in range(e + period):
            w = p ** (-k * s)
            if k >= e:
                w /= 1 - p ** (-period * s)
            rec(i + 1, a * p ** k, weight * w)

    rec(0, 1, 1.0 + 0j)
    return total


@dataclass
class Factorization:
    lhs: complex
    rhs: complex
    lhs_error: float
    s: complex

    @property
    def difference(self):
        return abs(self.lhs - self.rhs)

    def __iter__(self):
        return iter((self.lhs, self.rhs))


def l_factorization(xi, s, u=1, lam_c=1e-3):
    """Mellin of E(xi)(u, .) against L(chi, s) <D'_f(s), f0> <D'_inf(s), f_inf>.

    ``s`` may be a list; the summed function is then sampled once.
    """
    scalar = np.ndim(s) == 0
    s_arr = np.atleast_1d(np.asarray(s, dtype=complex))
    if np.any(s_arr.real <= 1):
        raise ValueError("factorization is evaluated for Re s > 1")
    if xi.is_zero:
        out = [Factorization(0j, 0j, 0.0, complex(z)) for z in s_arr]
        return out[0] if scalar else out
    rhs = np.zeros(s_arr.shape, dtype=complex)
    for vals, f in xi.components:
        chi = covariance_character(vals)
        arch, _ = mellin_transform(f, s_arr, tol=1e-13)
        fin = np.array([finite_factor(vals, z, u) for z in s_arr])
        rhs += dirichlet_l(s_arr, chi) * fin * arch
    lhs = mellin_of_E(xi, s_arr, u=u, lam_c=lam_c)
    out = [Factorization(complex(a), complex(b), float(e), complex(z))
           for a, b, e, z in zip(lhs.values, rhs, lhs.errors, s_arr)]
    return out[0] if scalar else out


# zeros ---------------------------------------------------------------------------

@dataclass
class ZeroTable:
    modulus: int = 1
    index: tuple = ()
    ordinates: tuple = ()
    source: str = "internal"
    accuracy: float = 1e-8
    residuals: tuple = field(default=(), repr=False)

    def __post_init__(self):
        self.ordinates = tuple(float(g) for g in self.ordinates)
        if any(b <= a for a, b in zip(self.ordinates, self.ordinates[1:])):
            raise ValueError("ordinates must be strictly increasing")

    def __len__(self):
        return len(self.ordinates)

    def __iter__(self):
        return iter(self.ordinates)

    def up_to(self, height):
        return ZeroTable(self.modulus, self.index,
                         tuple(g for g in self.ordinates if g <= height), self.source,
                         self.accuracy)

    @property
    def character(self):
        return DirichletCharacter(self.modulus, self.index or None)

    def validate(self, threshold=1e-6):
        """Max |L(1/2 + i gamma)| over the table; raises above the threshold."""
        if not self.ordinates:
            return 0.0
        s = 0.5 + 1j * np.array(self.ordinates)
        worst = float(np.max(np.abs(dirichlet_l(s, self.character))))
        if worst > threshold:
            raise ConvergenceError(f"table entry off the zero set: |L| = {worst:.3g}")
        return worst

    @classmethod
    def from_file(cls, path, modulus=1, index=(), accuracy=1e-8):
        vals = []
        with open(path) as fh:
            for line in fh:
                line = line.split("#", 1)[0].strip()
                if line:
                    vals.append(float(line))
        return cls(modulus, tuple(index), tuple(vals), "file", accuracy)

    def to_file(self, path):
        with open(path, "w") as fh:
            fh.write(f"# zeros of L(s, chi) mod {self.modulus} index {list(self.index)}\n")
            for g in self.ordinates:
                fh.write(f"{g:.12f}\n")


def _gauss_sum(chi):
    n = chi.modulus
    return sum(chi(a) * cmath.exp(2j * math.pi * a / n) for a in range(1, n + 1))


def hardy_function(t, chi=None):
    """Real rotation of L(1/2 + it, chi) for primitive chi (zeta when chi is None).

    Z(t) = eps^{-1/2} (q/pi)^{it/2} exp(i Im log Gamma((1/2 + a + it)/2)) L(1/2 + it).
    """
    t = np.asarray(t, dtype=float)
    if chi is None or chi.modulus == 1:
        q, a, eps = 1, 0, 1.0
        chi = DirichletCharacter(1)
    else:
        q, a = chi.modulus, chi.parity
        eps = _gauss_sum(chi) / ((1j ** a) * math.sqrt(q))
    s = 0.5 + 1j * t
    theta = np.imag(log_gamma((0.5 + a + 1j * t) / 2)) + 0.5 * t * math.log(q / math.pi)
    z = np.exp(1j * theta) * dirichlet_l(s, chi) / np.sqrt(complex(eps))
    return z.real if np.ndim(z) else float(np.real(z))


def _locate(chi, e_max, step):
    ts = np.arange(0.05, e_max + step, step)
    ts = ts[ts <= e_max]
    z = hardy_function(ts, chi)
    idx = np.nonzero(np.sign(z[:-1]) * np.sign(z[1:]) < 0)[0]
    f = lambda t: float(hardy_function(np.array([t]), chi)[0])
    return [brentq(f, ts[i], ts[i + 1], xtol=1e-13, rtol=1e-15) for i in idx]


def l_zeros(chi, e_max, step=0.02, max_refine=4):
    """Ordinates in (0, e_max] of zeros of L(1/2 + it, chi) via sign changes.

    The grid is halved until two successive grids agree on the count.
    """
    if e_max > 500:
        raise ValueError("e_max is capped at 500")
    if chi is not None and chi.modulus > 1 and chi.conductor != chi.modulus:
        raise ValueError("l_zeros needs a primitive character")
    found = _locate(chi, e_max, step)
    for _ in range(max_refine):
        step /= 2
        again = _locate(chi, e_max, step)
        if len(again) == len(found):
            found = again
            break
        found = again
    else:
        raise ConvergenceError("sign-change count did not stabilise")
    modulus = 1 if chi is None else chi.modulus
    index = () if chi is None else chi.index
    table = ZeroTable(modulus, index, tuple(found), "internal", 1e-8)
    if found:
        s = 0.5 + 1j * np.array(found)
        table.residuals = tuple(np.abs(dirichlet_l(s, table.character)))
    return table


def zeta_zeros(e_max, step=0.02):
    return l_zeros(None, e_max, step)


# vanishing -----------------------------------------------------------------------

@dataclass
class VanishingReport:
    ordinates: tuple
    values: np.ndarray
    errors: np.ndarray
    line_scale: float
    tol: float

    @property
    def ratios(self):
        return np.abs(self.values) / self.line_scale if self.line_scale else np.abs(self.values)

    @property
    def passed(self):
        return bool(np.all(self.ratios <= self.tol))


def check_conditions(xi, u=1, tol=1e-10):
    """(V)-type conditions: xi(rho, 0+) = 0 and the integral vanishes."""
    a = abs(xi.integral(u))
    r0 = max((abs(complex(f(np.array([1e-14]))[0])) * np.abs(v).max()
              for v, f in xi.components), default=0.0)
    return a <= tol and r0 <= tol, a, r0


def vanishing_check(xi, zeros, k_max=5, u=1, subtract=True, enforce=True, tol=1e-4,
                    line_grid=None):
    """|F~h(1/2 + i gamma)| at the first k_max zeros, h = E(xi) (- its lam^-1 term).

    Without subtraction the conditions must hold; ``enforce=False`` skips
    the check (negative controls), and then the Mellin integral is the one
    over [lam_c, inf) plus the analytic A/lam piece, which does not vanish.
    """
    ords = tuple(zeros)[:k_max]
    if xi.is_zero:
        z = np.zeros(len(ords), dtype=complex)
        return VanishingReport(ords, z, np.zeros(len(ords)), 0.0, tol)
    ok, _, _ = check_conditions(xi, u)
    if enforce and not subtract and not ok:
        raise ConditionsViolated("xi(0) != 0 or the integral does not vanish")
    line = np.linspace(0.0, max(ords, default=0.0) + 2.0, 41) if line_grid is None else line_grid
    pts = np.concatenate([0.5 + 1j * np.array(ords), 0.5 + 1j * np.asarray(line)])
    if subtract or ok:
        res = mellin_of_E(xi, pts, u=u, subtract=subtract and not ok)
        vals, errs = res.values, res.errors
    else:
        vals, errs = _unsubtracted_line(xi, pts, u)
    k = len(ords)
    scale = float(np.max(np.abs(vals[k:])))
    return VanishingReport(ords, vals[:k], errs[:k], scale, tol)


def _unsubtracted_line(xi, pts, u, lam_c=1e-4):
    """Control: integrate E(xi) over [lam_c, inf) on the line, no subtraction."""
    x, wts = _panels(math.log(lam_c), math.log(xi.lam_max), 0.5)
    e = _E_on_grid(xi, u, np.exp(x))
    vals = (np.exp(np.outer(pts, x)) * (wts * e)).sum(axis=1)
    return vals, np.zeros(len(pts))


# standard families ----------------------------------------------------------------

def gamma_kernel(k=1):
    """f_inf(lam) = lam^k e^-lam, Mellin transform Gamma(s + k)."""
    return lambda lam: np.asarray(lam) ** k * np.exp(-np.asarray(lam))


def log_gaussian(sigma=1.0, center=0.0):
    """exp(-(log lam - center)^2 / (2 sigma^2))."""
    def f(lam):
        with np.errstate(divide="ignore"):
            x = np.log(np.asarray(lam, dtype=float)) - center
        return np.exp(-x * x / (2 * sigma * sigma))
    return f


def gaussian_lam_max(sigma, center=0.0):
    return math.exp(center + sigma * math.sqrt(2 * 42.0))


def alternating(f):
    """f(lam) - 2 f(2 lam): zero integral, Mellin (1 - 2^{1-s}) Mf(s)."""
    return lambda lam: f(np.asarray(lam)) - 2 * f(2 * np.asarray(lam))


def factorization_family():
    """Ten product-form test functions of levels 1, 3, 4 and 5."""
    fam = []
    for k in (1, 2, 3):
        fam.append(TestFunction(gamma_kernel(k), 1, lam_max=60.0 + 2 * k, name=f"gamma{k}"))
    fam.append(TestFunction(log_gaussian(0.7), 1, lam_max=gaussian_lam_max(0.7),
                            name="loggauss"))
    for n in (3, 4, 5):
        chi = characters(n)[-1]
        vals = np.array([chi(r) for r in range(n)])
        fam.append(TestFunction(gamma_kernel(1), n, vals, name=f"chi{n}"))
    # unit-invariant but supported on non-units too: exercises the finite factor
    fam.append(TestFunction(gamma_kernel(2), 4, [1.0, 0.5, 2.0, 0.5], name="f4mix"))
    fam.append(TestFunction(gamma_kernel(1), 3, [3.0, 1.0, 1.0], name="f3mix"))
    fam.append(TestFunction(gamma_kernel(1), 5, lambda r: 1.0 if r % 5 == 0 else 0.0,
                            name="f5zero"))
    return fam
