"""Exact arithmetic helpers: rational linear algebra and cyclotomic numbers."""
from fractions import Fraction
from functools import lru_cache
import cmath
import math

from sympy import QQ, Poly, Symbol, cyclotomic_poly
from sympy.polys.matrices import DomainMatrix


def to_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10 ** 12)
    return Fraction(x)


def _dm(rows, ncols=None):
    rows = [[QQ(r.numerator, r.denominator) if isinstance(r, Fraction) else QQ(r) for r in row]
            for row in rows]
    if not rows:
        return DomainMatrix([], (0, ncols or 0), QQ)
    return DomainMatrix(rows, (len(rows), len(rows[0])), QQ)


def _from_qq(v):
    return Fraction(int(v.numerator), int(v.denominator))


def rref(rows, ncols=None):
    """Reduced row echelon form over Q; returns (nonzero rows, pivot columns)."""
    if not rows:
        return [], ()
    m, pivots = _dm(rows, ncols).rref()
    out = [[_from_qq(v) for v in row] for row in m.to_Matrix().tolist()[:len(pivots)]]
    out = [[Fraction(v) if not isinstance(v, Fraction) else v for v in row] for row in out]
    return out, tuple(pivots)


def rank(rows):
    if not rows:
        return 0
    return _dm(rows).rank()


def matmul(a, b):
    """Product of two matrices given as lists of rows of Fractions."""
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    return [[sum((a[i][k] * b[k][j] for k in range(inner) if a[i][k]), Fraction(0))
             for j in range(cols)] for i in range(len(a))]


def identity(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def zeros(r, c):
    return [[Fraction(0)] * c for _ in range(r)]


def totient(n):
    result = n
    p, m = 2, n
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def units(n):
    return [a for a in range(1, n + 1) if math.gcd(a, n) == 1] if n > 1 else [1]


@lru_cache(maxsize=None)
def _cyclotomic_coeffs(n):
    """Integer coefficients of Phi_n, lowest degree first."""
    x = Symbol("x")
    return tuple(int(c) for c in reversed(Poly(cyclotomic_poly(n, x), x).all_coeffs()))


class Cyclotomic:
    """Element of Q(zeta_N) stored in the power basis 1, z, ..., z^(phi(N)-1).

    ``zeta_N = exp(2 pi i / N)``.  Elements of different conductors are
    combined in the field of the lcm.
    """
    __slots__ = ("n", "coeffs")

    def __init__(self, n, coeffs):
        self.n = int(n)
        self.coeffs = self._reduce(self.n, [to_fraction(c) for c in coeffs])

    @staticmethod
    def _reduce(n, c):
        phi = _cyclotomic_coeffs(n)
        deg = len(phi) - 1
        c = list(c)
        for k in range(len(c) - 1, deg - 1, -1):
            lead = c[k]
            if lead:
                # z^k = -sum_{i<deg} phi_i z^(k-deg+i)
                for i in range(deg):
                    if phi[i]:
                        c[k - deg + i] -= lead * phi[i]
                c[k] = Fraction(0)
        c = c[:deg] + [Fraction(0)] * max(0, deg - len(c))
        return tuple(c)

    @classmethod
    def root(cls, n, k=1, coeff=1):
        """coeff * zeta_n^k."""
        n = int(n)
        k %= n
        c = [Fraction(0)] * (k + 1)
        c[k] = to_fraction(coeff)
        return cls(n, c)

    @classmethod
    def rational(cls, q, n=1):
        return cls(n, [to_fraction(q)])

    def lift(self, m):
        """View inside Q(zeta_m); requires n | m."""
        if m % self.n:
            raise ValueError(f"cannot lift level {self.n} to {m}")
        step = m // self.n
        c = [Fraction(0)] * (step * len(self.coeffs) + 1)
        for i, v in enumerate(self.coeffs):
            c[i * step] = v
        return Cyclotomic(m, c)

    def _common(self, other):
        if not isinstance(other, Cyclotomic):
            other = Cyclotomic.rational(other, self.n)
        if other.n == self.n:
            return self, other
        m = self.n * other.n // math.gcd(self.n, other.n)
        return self.lift(m), other.lift(m)

    def __add__(self, other):
        a, b = self._common(other)
        return Cyclotomic(a.n, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.n, [-x for x in self.coeffs])

    def __sub__(self, other):
        return self + (-other if isinstance(other, Cyclotomic) else -to_fraction(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Cyclotomic):
            q = to_fraction(other)
            return Cyclotomic(self.n, [x * q for x in self.coeffs])
        a, b = self._common(other)
        prod = [Fraction(0)] * (len(a.coeffs) + len(b.coeffs))
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    if y:
                        prod[i + j] += x * y
        return Cyclotomic(a.n, prod)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Cyclotomic):
            try:
                other = Cyclotomic.rational(other, self.n)
            except (TypeError, ValueError):
                return NotImplemented
        a, b = self._common(other)
        return a.coeffs == b.coeffs

    __hash__ = None  # equality crosses conductors, so no canonical hash

    def is_zero(self):
        return not any(self.coeffs)

    def galois(self, a):
        """Apply zeta -> zeta^a (a a unit mod n)."""
        if math.gcd(a, self.n) != 1:
            raise ValueError("Galois exponent must be a unit")
        out = Cyclotomic(self.n, [0])
        for i, v in enumerate(self.coeffs):
            if v:
                out = out + Cyclotomic.root(self.n, i * a, v)
        return out

    def conjugate(self):
        return self.galois(-1 % self.n if self.n > 1 else 1)

    def __complex__(self):
        z = cmath.exp(2j * math.pi / self.n)
        return sum((float(v) * z ** i for i, v in enumerate(self.coeffs)), 0j)

    def __repr__(self):
        terms = [f"{v}*z^{i}" for i, v in enumerate(self.coeffs) if v]
        return f"Cyclotomic({self.n}: {' + '.join(terms) or '0'})"
