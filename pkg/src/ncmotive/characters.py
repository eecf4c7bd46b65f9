"""Dirichlet characters with exact cyclotomic values."""
from functools import lru_cache
import cmath
import math

from .exact import Cyclotomic, totient


def factorize(n):
    out = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _primitive_root(p):
    phi = p - 1
    primes = list(factorize(phi))
    for g in range(2, p):
        if all(pow(g, phi // q, p) != 1 for q in primes):
            return g
    return 1


@lru_cache(maxsize=None)
def _structure(n):
    """Cyclic decomposition of (Z/n)*: list of (generator, order) and a log table.

    ``logs[u]`` is the exponent tuple of a unit u in terms of the generators
    (lifted to n by CRT), or None for non-units.
    """
    gens = []
    comps = []  # (modulus q, [(gen mod q, order)])
    for p, e in sorted(factorize(n).items()):
        q = p ** e
        if p == 2:
            if e == 2:
                comps.append((q, [(q - 1, 2)]))
            elif e >= 3:
                comps.append((q, [(q - 1, 2), (5, q // 4)]))
            else:
                comps.append((q, []))
        else:
            g = _primitive_root(p)
            if e > 1 and pow(g, p - 1, p * p) == 1:
                g += p
            comps.append((q, [(g, q // p * (p - 1))]))
    # per-component discrete logs
    local_logs = []
    for q, gl in comps:
        table = {}
        if not gl:
            table[1 % q] = ()
        elif len(gl) == 1:
            g, o = gl[0]
            x = 1
            for k in range(o):
                table[x] = (k,)
                x = x * g % q
        else:
            (g1, o1), (g2, o2) = gl
            x1 = 1
            for a in range(o1):
                x2 = x1
                for b in range(o2):
                    table[x2] = (a, b)
                    x2 = x2 * g2 % q
                x1 = x1 * g1 % q
        local_logs.append(table)
        gens.extend(o for _, o in gl)
    logs = [None] * n
    for u in range(n):
        if math.gcd(u, n) != 1:
            continue
        exps = ()
        for (q, _), table in zip(comps, local_logs):
            exps += table[u % q]
        logs[u] = exps
    if n == 1:
        logs = [()]
    return tuple(gens), tuple(logs)


class DirichletCharacter:
    """Character of (Z/N)* indexed by exponents on the cyclic generators.

    ``chi(u) = prod_i exp(2 pi i a_i log_i(u) / o_i)``; values are stored as
    exponents of zeta_L with L the group exponent.
    """

    def __init__(self, modulus, index=None):
        self.modulus = int(modulus)
        orders, logs = _structure(self.modulus)
        self.orders = orders
        self.index = tuple(index) if index is not None else (0,) * len(orders)
        if len(self.index) != len(orders):
            raise ValueError("character index has wrong length")
        self.index = tuple(a % o for a, o in zip(self.index, orders))
        self.exponent = math.lcm(*orders) if orders else 1
        self._exp = [None] * self.modulus
        for u, lg in enumerate(logs):
            if lg is not None:
                self._exp[u] = sum(a * l * (self.exponent // o)
                                   for a, l, o in zip(self.index, lg, orders)) % self.exponent

    def exponent_of(self, n):
        """k with chi(n) = zeta_L^k, or None when gcd(n, N) > 1."""
        return self._exp[n % self.modulus]

    def __call__(self, n):
        k = self.exponent_of(n)
        return 0j if k is None else cmath.exp(2j * math.pi * k / self.exponent)

    def value(self, n):
        """Exact value as a cyclotomic number (0 off the units)."""
        k = self.exponent_of(n)
        if k is None:
            return Cyclotomic.rational(0, self.exponent)
        return Cyclotomic.root(self.exponent, k)

    @property
    def is_trivial(self):
        return not any(self.index)

    @property
    def is_even(self):
        return self.exponent_of(self.modulus - 1 if self.modulus > 1 else 0) in (0, None)

    @property
    def parity(self):
        """0 for even characters, 1 for odd ones."""
        return 0 if self.is_even else 1

    @property
    def conductor(self):
        for d in sorted(d for d in range(1, self.modulus + 1) if self.modulus % d == 0):
            if self._induced_from(d):
                return d
        return self.modulus

    def _induced_from(self, d):
        # chi factors through (Z/d)* iff chi(u) = 1 whenever u = 1 mod d
        return all(self._exp[u] == 0 for u in range(1, self.modulus, d)
                   if self._exp[u] is not None)

    def primitive(self):
        """The primitive character inducing this one."""
        d = self.conductor
        for chi in characters(d):
            if all(chi.complex_close(self, u) for u in range(self.modulus)
                   if self._exp[u] is not None):
                return chi
        raise RuntimeError("no primitive character found")

    def complex_close(self, other, u):
        return abs(self(u) - other(u)) < 1e-12

    def conj(self):
        return DirichletCharacter(self.modulus, tuple(-a for a in self.index))

    def __mul__(self, other):
        if other.modulus != self.modulus:
            raise ValueError("characters of different moduli")
        return DirichletCharacter(self.modulus,
                                  tuple(a + b for a, b in zip(self.index, other.index)))

    def __eq__(self, other):
        return (isinstance(other, DirichletCharacter) and self.modulus == other.modulus
                and self.index == other.index)

    def __hash__(self):
        return hash((self.modulus, self.index))

    def __repr__(self):
        return f"DirichletCharacter({self.modulus}, {self.index})"


def characters(n):
    """All phi(n) characters mod n, trivial first."""
    orders, _ = _structure(n)
    out = [()]
    for o in orders:
        out = [idx + (a,) for idx in out for a in range(o)]
    chars = [DirichletCharacter(n, idx) for idx in out]
    assert len(chars) == totient(n) or n == 1
    return chars


def trivial(n):
    return DirichletCharacter(n)


def kronecker(d, n):
    """Kronecker symbol (d/n) for a fundamental discriminant d."""
    if n == 0:
        return 1 if abs(d) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if d < 0:
            result = -result
    while n % 2 == 0:
        n //= 2
        if d % 2 == 0:
            return 0
        if d % 8 in (3, 5):
            result = -result
    # Jacobi symbol (d/n) for odd n
    a = d % n if n > 1 else 0
    if n == 1:
        return result
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def quadratic_character(d):
    """Character mod |D| attached to the fundamental discriminant D of Q(sqrt d)."""
    disc = fundamental_discriminant(d)
    n = abs(disc)
    for chi in characters(n):
        if all(abs(chi(u) - kronecker(disc, u)) < 1e-12 for u in range(n)):
            return chi
    raise ValueError(f"no character found for discriminant {disc}")


def squarefree_part(d):
    sign = -1 if d < 0 else 1
    d = abs(d)
    out = 1
    for p, e in factorize(d).items():
        if e % 2:
            out *= p
    return sign * out


def fundamental_discriminant(d):
    d = squarefree_part(d)
    if d == 1:
        raise ValueError("Q(sqrt 1) is not a quadratic field")
    return d if d % 4 == 1 else 4 * d
