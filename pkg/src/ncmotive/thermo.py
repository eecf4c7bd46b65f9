"""Thermodynamics of the BC system in its truncated type-I representations.

The point (u, lam) of Zhat* x R+* acts on l^2(N*) with
``(pi(x) xi)(n) = sum_m x(n/m, m u) xi(m)`` and H = diag(log n + log lam).
For a normal-form term U_{n2} b U*_{n1} this is the partial isometry
``eps_m -> [n1 | m] chi_b(m u / n1) eps_{n2 m / n1}``.

Every number coming out of a Gibbs sum carries the zeta-tail bound
``n_max^(1 - beta) / (beta - 1)`` of the terms beyond the cutoff.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
import cmath
import math
from typing import NamedTuple

import numpy as np

from .endomotive import CrossedElement
from .errors import DivergenceError, LevelMismatch
from .numkernel import hurwitz_zeta
from .numkernel._backend import partial_zeta, residue_power_sums


@dataclass(frozen=True)
class GnsTruncation:
    """Cutoff n_max and the point (u mod M, lam).

    ``M=None`` means u is the identity of Zhat*, which is defined at every
    level; then u must be 1.
    """
    n_max: int
    u: int = 1
    M: int = None
    lam: float = 1.0

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError("n_max must be at least 1")
        if self.lam <= 0:
            raise ValueError("lam must be positive")
        if self.M is None:
            if self.u != 1:
                raise ValueError("a non-trivial u needs its modulus M")
        elif math.gcd(self.u, self.M) != 1:
            raise ValueError(f"u={self.u} is not invertible mod {self.M}")

    def residue(self, level):
        """u reduced mod ``level``; the level must divide M."""
        if self.M is None:
            return 1 % level if level > 1 else 0
        if self.M % level:
            raise LevelMismatch(f"level {level} does not divide M={self.M}")
        return self.u % level

    def hamiltonian(self):
        return np.log(np.arange(1, self.n_max + 1)) + math.log(self.lam)


def tail_bound(beta, n_max):
    """sum_{n > n_max} n^-beta <= n_max^(1-beta)/(beta-1)."""
    return n_max ** (1.0 - beta) / (beta - 1.0)


def _check_beta(beta):
    if not beta > 1:
        raise DivergenceError(f"Gibbs sums diverge for beta={beta} <= 1")


def partition_function(beta, n_max):
    """(sum_{n <= n_max} n^-beta, tail bound)."""
    _check_beta(beta)
    return partial_zeta(beta, n_max), tail_bound(beta, n_max)


@dataclass(frozen=True)
class GibbsState:
    beta: float
    truncation: GnsTruncation
    tail_bound: float = None

    def __post_init__(self):
        _check_beta(self.beta)
        floor = tail_bound(self.beta, self.truncation.n_max)
        if self.tail_bound is None:
            object.__setattr__(self, "tail_bound", floor)
        elif self.tail_bound < floor:
            raise ValueError("declared tail bound is below the zeta tail")

    @property
    def partition(self):
        return partial_zeta(self.beta, self.truncation.n_max)


class Expectation(NamedTuple):
    """A Gibbs value: the cutoff sum, its bound, and the tail-completed value."""
    value: complex
    bound: float
    completed: complex


@dataclass
class EvolvedElement:
    """sigma_t(x): the normal term U_{n2} b U*_{n1} picks up (n2/n1)^{it}."""
    element: CrossedElement
    t: float = 0.0

    def normal_terms(self):
        for n1, b, n2 in self.element.normal_terms():
            yield n1, b, n2, cmath.exp(1j * self.t * math.log(n2 / n1))


def time_evolve(x, t):
    if isinstance(x, EvolvedElement):
        return EvolvedElement(x.element, x.t + t)
    return EvolvedElement(x, float(t))


def _terms(x):
    if isinstance(x, EvolvedElement):
        return list(x.normal_terms())
    return [(n1, b, n2, 1.0) for n1, b, n2 in x.normal_terms()]


def _chi_values(b, point, values):
    """chi_b(v * point) for integer v (vectorised)."""
    out = np.zeros(len(values), dtype=complex)
    for r, c in b.coeffs.items():
        out += float(c) * np.exp(2j * np.pi * ((r * point) % b.level) * (values % b.level)
                                 / b.level)
    return out


def represent(x, t):
    """Dense matrix of pi_{(u, lam)}(x) on span(eps_1..eps_{n_max})."""
    n = t.n_max
    mat = np.zeros((n, n), dtype=complex)
    for n1, b, n2, phase in _terms(x):
        point = t.residue(b.level)
        m = np.arange(n1, n + 1, n1)          # columns with n1 | m
        target = m // n1 * n2
        keep = target <= n
        m, target = m[keep], target[keep]
        if m.size:
            mat[target - 1, m - 1] += phase * _chi_values(b, point, m // n1)
    return mat


@lru_cache(maxsize=256)
def _residue_sums(beta, n_max, level):
    """Cutoff and completed sums of m^-beta over each class m = j mod level."""
    cut = np.asarray(residue_power_sums(beta, n_max, level), dtype=float)
    tails = np.empty(level)
    for j in range(level):
        first = n_max + 1 + ((j - n_max - 1) % level)
        tails[j] = level ** -beta * hurwitz_zeta(beta, first / level).real
    return cut, cut + tails


def _diagonal_expect(b, phase, state):
    t = state.truncation
    beta, n_max = state.beta, t.n_max
    point = t.residue(b.level)
    cut, full = _residue_sums(beta, n_max, b.level)
    chi = _chi_values(b, point, np.arange(b.level))
    z = partial_zeta(beta, n_max)
    zfull = z + hurwitz_zeta(beta, n_max + 1.0).real
    norm1 = sum(abs(float(c)) for c in b.coeffs.values()) * abs(phase)
    value = phase * complex(chi @ cut) / z
    completed = phase * complex(chi @ full) / zfull
    return value, 2.0 * norm1 * tail_bound(beta, n_max) / z, completed


def gibbs_expect(x, state):
    """Gibbs expectation Trace(pi(x) e^{-beta H}) / Trace(e^{-beta H}).

    Only the (1, 1) normal term has a diagonal, so
    ``phi(x) = sum_m chi_b(m u) m^-beta / Z``.  The bound covers the
    difference between the cutoff value and the full state;
    ``completed`` adds the exact tail of each residue class.
    """
    value, bound, completed = 0j, 0.0, 0j
    for n1, b, n2, phase in _terms(x):
        if n1 == 1 and n2 == 1:
            v, e, c = _diagonal_expect(b, phase, state)
            value += v
            bound += e
            completed += c
    return Expectation(value, bound, completed)


@dataclass
class KMSRow:
    t: float
    lhs: complex            # F_{x,y}(t + i beta)
    rhs: complex            # phi(sigma_t(y) x)
    residual: float         # with tail-completed Gibbs sums
    residual_truncated: float
    bound: float

    @property
    def passed(self):
        slack = 1e-13 * (1.0 + abs(self.lhs))
        return (self.residual <= 10 * self.bound + slack
                and self.residual_truncated <= 10 * self.bound + slack)


@dataclass
class KMSReport:
    beta: float
    rows: list = field(default_factory=list)

    @property
    def passed(self):
        return all(r.passed for r in self.rows)

    @property
    def max_residual(self):
        return max((r.residual for r in self.rows), default=0.0)


def kms_verify(x, y, beta, t_samples, truncation=None):
    """Compare F_{x,y}(t + i beta) with phi(sigma_t(y) x).

    With y = sum_j y_j, y_j of weight k_j = n2/n1, one has
    F(z) = sum_j k_j^{iz} phi(x y_j), continued term by term.
    """
    truncation = truncation or GnsTruncation(10 ** 5)
    state = GibbsState(beta, truncation)
    pieces = []
    for n1, b, n2 in y.normal_terms():
        yj = CrossedElement.normal(n1, b, n2)
        k = n2 / n1
        pieces.append((k, gibbs_expect(x * yj, state), gibbs_expect(yj * x, state)))
    report = KMSReport(beta)
    for t in t_samples:
        lhs = rhs = lhs_cut = rhs_cut = 0j
        bound = 0.0
        for k, xy, yx in pieces:
            ph = cmath.exp(1j * t * math.log(k))
            w = k ** -beta
            lhs += ph * w * xy.completed
            rhs += ph * yx.completed
            lhs_cut += ph * w * xy.value
            rhs_cut += ph * yx.value
            bound += w * xy.bound + yx.bound
        report.rows.append(KMSRow(t, lhs, rhs, abs(lhs - rhs), abs(lhs_cut - rhs_cut), bound))
    return report


def monomial_family(n_bound=8):
    """All U*_{n1} U_{n2} with n1, n2 <= n_bound."""
    return [CrossedElement.monomial(n1, None, n2)
            for n1 in range(1, n_bound + 1) for n2 in range(1, n_bound + 1)]


# dual system -------------------------------------------------------------

class DualElement:
    """Function f(k, rho, lam) on the groupoid of Q+* acting on Zhat x R+*.

    ``components`` maps (k, rho mod level) to a function of lam; ``scale``
    records accumulated dual actions, f(k, rho, lam) = g(k, rho, scale * lam).
    ``beta`` is strip-decay metadata.
    """

    def __init__(self, level, components, beta=2.0, scale=1.0):
        self.level = int(level)
        self.components = {(Fraction(k), int(r) % self.level): g
                           for (k, r), g in components.items()}
        self.beta = beta
        self.scale = scale

    def __call__(self, k, rho, lam):
        g = self.components.get((Fraction(k), int(rho) % self.level))
        return 0j if g is None else complex(g(self.scale * lam))

    @classmethod
    def from_crossed(cls, x, h, beta=2.0):
        """f(k, rho, lam) = x(k, rho) h(lam), with x read off its normal terms."""
        level = 1
        for n1, b, _ in x.normal_terms():
            level = math.lcm(level, n1 * b.level)
        comps = {}
        for n1, b, n2 in x.normal_terms():
            k = Fraction(n2, n1)
            for rho in range(0, level, n1):
                v = complex(_chi_values(b, 1, np.array([rho // n1]))[0])
                if v != 0:
                    prev = comps.get((k, rho), 0j)
                    comps[(k, rho)] = prev + v
        funcs = {key: (lambda lam, c=c: c * h(lam)) for key, c in comps.items()}
        return cls(level, funcs, beta)


def dual_action(f, mu):
    """theta_mu: f(k, rho, lam) -> f(k, rho, mu lam).

    Follows theta_mu(int x(t) U_t dt) = int mu^{it} x(t) U_t dt together
    with f(k, rho, lam) = int x(t)(k, rho) lam^{it} dt.
    """
    if mu <= 0:
        raise ValueError("mu must be positive")
    return DualElement(f.level, f.components, f.beta, f.scale * mu)


def represent_dual(f, t):
    """Matrix entries f(n/m, m u, m lam) of pi_{(u, lam)}(f)."""
    n = t.n_max
    point = t.residue(f.level)
    mat = np.zeros((n, n), dtype=complex)
    for (k, r), _ in f.components.items():
        for m in range(1, n + 1):
            if m * point % f.level != r:
                continue
            tgt = k * m
            if tgt.denominator == 1 and tgt <= n:
                mat[int(tgt) - 1, m - 1] = f(k, r, m * t.lam)
    return mat


def dual_trace(f, t):
    """sum_{n <= n_max} f(1, n u, n lam), the trace of pi_{(u, lam)}(f)."""
    point = t.residue(f.level)
    return sum(f(1, n * point, n * t.lam) for n in range(1, t.n_max + 1))
