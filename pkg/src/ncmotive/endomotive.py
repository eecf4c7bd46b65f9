"""The algebraic BC endomotive Q[Q/Z] x N at finite level.

Group-ring elements are rational combinations of e_{r/N}.  Crossed elements
are sums of monomials U*_{n1} a U_{n2}.  They are stored in the normal
form U_{n2} b U*_{n1} with gcd(n1, n2) = 1, using

* U*_d a U_d = sigma_d(a), sigma_d(e_r) = e_{dr}, to remove gcd(n1, n2);
* U*_{n1} a U_{n2} = U_{n2} sigma_{n1 n2}(a) U*_{n1} for coprime n1, n2.

b is unique (U*_{n2} (U_{n2} b U*_{n1}) U_{n1} = b), so two crossed elements
are equal iff their normal forms agree; the Gibbs representation in
``thermo`` gives an independent check.
"""
from dataclasses import dataclass
from fractions import Fraction
import json
import math
import random

from .errors import ClosureError, DivisibilityError, LevelMismatch, NotAUnit
from .exact import Cyclotomic, rank, to_fraction

# lcm of three random levels <= 24 already approaches 10^4, so the cap
# sits well above the desk-scale levels used in practice
LEVEL_CAP = 10 ** 6


def _lcm(a, b):
    return a * b // math.gcd(a, b)


class GroupRingElement:
    """sum_r c_r e_{r/N}, stored at the minimal level N."""
    __slots__ = ("level", "coeffs")

    def __init__(self, level, coeffs):
        level = int(level)
        if level < 1:
            raise ValueError("level must be positive")
        if level > LEVEL_CAP:
            raise ValueError(f"level {level} exceeds the cap {LEVEL_CAP}")
        clean = {}
        for r, c in dict(coeffs).items():
            c = to_fraction(c)
            if c:
                r = int(r) % level
                v = clean.get(r, Fraction(0)) + c
                if v:
                    clean[r] = v
                else:
                    del clean[r]
        g = level
        for r in clean:
            g = math.gcd(g, r)
        if clean and g > 1:
            level //= g
            clean = {r // g: c for r, c in clean.items()}
        elif not clean:
            level = 1
        self.level = level
        self.coeffs = clean

    @classmethod
    def e(cls, num, den=1, coeff=1):
        """coeff * e_{num/den}."""
        return cls(den, {num: coeff})

    @classmethod
    def one(cls):
        return cls(1, {0: 1})

    @classmethod
    def zero(cls):
        return cls(1, {})

    def is_zero(self):
        return not self.coeffs

    def lift_coeffs(self, m):
        """Coefficients indexed mod m (requires level | m)."""
        if m % self.level:
            raise LevelMismatch(f"level {self.level} does not divide {m}")
        k = m // self.level
        return {r * k: c for r, c in self.coeffs.items()}

    def __add__(self, other):
        m = _lcm(self.level, other.level)
        out = self.lift_coeffs(m)
        for r, c in other.lift_coeffs(m).items():
            out[r] = out.get(r, Fraction(0)) + c
        return GroupRingElement(m, out)

    def __neg__(self):
        return GroupRingElement(self.level, {r: -c for r, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, q):
        q = to_fraction(q)
        return GroupRingElement(self.level, {r: c * q for r, c in self.coeffs.items()})

    def __mul__(self, other):
        if not isinstance(other, GroupRingElement):
            return self.scale(other)
        m = _lcm(self.level, other.level)
        a, b = self.lift_coeffs(m), other.lift_coeffs(m)
        out = {}
        for r, c in a.items():
            for s, d in b.items():
                k = (r + s) % m
                out[k] = out.get(k, Fraction(0)) + c * d
        return GroupRingElement(m, out)

    __rmul__ = scale

    def __eq__(self, other):
        return (isinstance(other, GroupRingElement) and self.level == other.level
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.level, tuple(sorted(self.coeffs.items()))))

    def augmentation(self):
        return sum(self.coeffs.values(), Fraction(0))

    def to_json(self):
        return {"level": self.level,
                "coeffs": {str(r): str(c) for r, c in sorted(self.coeffs.items())}}

    @classmethod
    def from_json(cls, data):
        return cls(data["level"], {int(r): Fraction(c) for r, c in data["coeffs"].items()})

    def __repr__(self):
        terms = " + ".join(f"{c}*e({r}/{self.level})" for r, c in sorted(self.coeffs.items()))
        return f"GroupRingElement({terms or '0'})"


def rho(n, a):
    """rho_n(e_r) = (1/n) sum_{ns = r} e_s."""
    n = int(n)
    if n < 1:
        raise ValueError("n must be a positive integer")
    N = a.level
    inv = Fraction(1, n)
    out = {}
    for r, c in a.coeffs.items():
        for k in range(n):
            s = r + k * N
            out[s] = out.get(s, Fraction(0)) + c * inv
    return GroupRingElement(n * N, out)


def sigma(d, a):
    """sigma_d(e_r) = e_{dr}; satisfies U*_d a U_d = sigma_d(a)."""
    out = {}
    for r, c in a.coeffs.items():
        k = d * r % a.level
        out[k] = out.get(k, Fraction(0)) + c
    return GroupRingElement(a.level, out)


def range_projection(n):
    """rho_n(1) = U_n U*_n."""
    return rho(n, GroupRingElement.one())


def times_projection(a, n):
    """a * rho_n(1), i.e. the average of a over translations by k/n."""
    if n == 1:
        return a
    m = _lcm(a.level, n)
    step = m // n
    inv = Fraction(1, n)
    out = {}
    for r, c in a.lift_coeffs(m).items():
        for k in range(n):
            s = (r + k * step) % m
            out[s] = out.get(s, Fraction(0)) + c * inv
    return GroupRingElement(m, out)


def _wick(n1, a, n2):
    """U*_{n1} a U_{n2} -> (m1, b, m2) with U*_{n1} a U_{n2} = U_{m2} b U*_{m1}, gcd(m1, m2) = 1."""
    d = math.gcd(n1, n2)
    n1, n2 = n1 // d, n2 // d
    return n1, sigma(d * n1 * n2, a), n2


class CrossedElement:
    """Finite sum of monomials, stored in the normal form U_{n2} b U*_{n1}.

    Keys are ``(n1, n2)`` with gcd 1; every monomial U*_{n1} a U_{n2} is
    converted on entry.  The normal form is unique, so equality of the
    dictionaries is equality in the algebra.
    """

    def __init__(self, terms=None):
        self.terms = {}
        for (n1, n2), a in (terms or {}).items():
            self.add_monomial(int(n1), a, int(n2))

    def add_monomial(self, n1, a, n2):
        """Add U*_{n1} a U_{n2}."""
        if n1 < 1 or n2 < 1:
            raise ValueError("monomial indices must be positive integers")
        self._add_normal(*_wick(n1, a, n2))

    def _add_normal(self, m1, b, m2):
        key = (m1, m2)
        cur = self.terms.get(key)
        new = b if cur is None else cur + b
        if new.is_zero():
            self.terms.pop(key, None)
        else:
            self.terms[key] = new

    @classmethod
    def monomial(cls, n1, a=None, n2=1, coeff=1):
        """coeff * U*_{n1} a U_{n2}."""
        a = GroupRingElement.one() if a is None else a
        out = cls()
        out.add_monomial(int(n1), a.scale(coeff), int(n2))
        return out

    @classmethod
    def normal(cls, n1, b, n2):
        """U_{n2} b U*_{n1} for coprime n1, n2."""
        if math.gcd(n1, n2) != 1:
            raise ValueError("normal-form indices must be coprime")
        out = cls()
        out._add_normal(int(n1), b, int(n2))
        return out

    @classmethod
    def U(cls, n):
        return cls.monomial(1, None, n)

    @classmethod
    def Ustar(cls, n):
        return cls.monomial(n, None, 1)

    @classmethod
    def from_group_ring(cls, a):
        return cls.monomial(1, a, 1)

    @classmethod
    def one(cls):
        return cls.from_group_ring(GroupRingElement.one())

    def normal_terms(self):
        """Yield (n1, b, n2) meaning U_{n2} b U*_{n1}, sorted by index pair."""
        for (n1, n2) in sorted(self.terms):
            yield n1, self.terms[(n1, n2)], n2

    def monomials(self):
        """Yield (n1, a, n2) meaning U*_{n1} a U_{n2} with a = rho_{n1 n2}(b)."""
        for n1, b, n2 in self.normal_terms():
            yield n1, rho(n1 * n2, b), n2

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        out = CrossedElement()
        out.terms = dict(self.terms)
        for n1, b, n2 in other.normal_terms():
            out._add_normal(n1, b, n2)
        return out

    def scale(self, q):
        out = CrossedElement()
        for n1, b, n2 in self.normal_terms():
            out._add_normal(n1, b.scale(q), n2)
        return out

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, CrossedElement):
            return self.scale(other)
        return multiply(self, other)

    def __eq__(self, other):
        return isinstance(other, CrossedElement) and self.terms == other.terms

    def adjoint(self):
        """(U_{n2} b U*_{n1})* = U_{n1} b* U*_{n2} with e_r* = e_{-r}."""
        out = CrossedElement()
        for n1, b, n2 in self.normal_terms():
            bstar = GroupRingElement(b.level, {-r: c for r, c in b.coeffs.items()})
            out._add_normal(n2, bstar, n1)
        return out

    def max_level(self):
        return max((b.level for b in self.terms.values()), default=1)

    def to_json(self):
        return [{"n1": n1, "n2": n2, "b": b.to_json()} for n1, b, n2 in self.normal_terms()]

    @classmethod
    def from_json(cls, data):
        """Accepts normal-form entries ("b") and U*aU monomials ("a")."""
        if isinstance(data, str):
            data = json.loads(data)
        out = cls()
        for m in data:
            if "b" in m:
                out = out + cls.normal(int(m["n1"]), GroupRingElement.from_json(m["b"]),
                                       int(m["n2"]))
            else:
                out.add_monomial(int(m["n1"]), GroupRingElement.from_json(m["a"]), int(m["n2"]))
        return out

    def __repr__(self):
        parts = [f"U{n2} [{b}] U*{n1}" for n1, b, n2 in self.normal_terms()]
        return "CrossedElement(" + (" + ".join(parts) or "0") + ")"


def multiply(x, y):
    """Product of normal forms.

    (U_p a U*_q)(U_r b U*_s): with g = gcd(q, r), q = g q', r = g r' one has
    U*_q U_r = U_{r'} U*_{q'}, a U_{r'} = U_{r'} sigma_{r'}(a) and
    U*_{q'} b = sigma_{q'}(b) U*_{q'}; a common factor d of p r' and q' s is
    removed with U_d c U*_d = rho_d(c).  This agrees with the monomial rule
    U*_{n1} a U_{n2} U*_{n3} b U_{n4} = U*_{n1 n3} rho_{n3}(a) rho_{n2 n3}(1) rho_{n2}(b) U_{n2 n4}
    (checked in the tests).
    """
    out = CrossedElement()
    for q, a, p in x.normal_terms():
        for s, b, r in y.normal_terms():
            g = math.gcd(q, r)
            qq, rr = q // g, r // g
            c = sigma(rr, a) * sigma(qq, b)
            if c.is_zero():
                continue
            big_p, big_q = p * rr, qq * s
            d = math.gcd(big_p, big_q)
            out._add_normal(big_q // d, rho(d, c) if d > 1 else c, big_p // d)
    return out


def multiply_monomial_rule(x, y):
    """Reference product straight from the monomial formula (slow; for cross-checks)."""
    out = CrossedElement()
    for n1, a, n2 in x.monomials():
        for n3, b, n4 in y.monomials():
            mid = times_projection(rho(n3, a), n2 * n3) * rho(n2, b)
            if not mid.is_zero():
                out.add_monomial(n1 * n3, mid, n2 * n4)
    return out


# Galois action --------------------------------------------------------------

def _check_unit(alpha, level):
    if math.gcd(int(alpha), level) != 1:
        raise NotAUnit(f"{alpha} is not a unit modulo {level}")


@dataclass(frozen=True)
class BCPoint:
    """Character x_c of A_N: e_{r/N} -> zeta_N^{rc} (a point of X_N)."""
    level: int
    c: int

    def __call__(self, a):
        if isinstance(a, CrossedElement):
            a = a.terms.get((1, 1), GroupRingElement.zero())
        if self.level % a.level:
            raise LevelMismatch(f"element level {a.level} does not divide {self.level}")
        k = self.level // a.level
        total = Cyclotomic.rational(0, self.level)
        for r, coef in a.coeffs.items():
            total = total + Cyclotomic.root(self.level, r * k * self.c, coef)
        return total


def galois_act(alpha, x):
    """alpha-tilde(e_r) = e_{alpha r}; on characters, alpha o chi."""
    alpha = int(alpha)
    if isinstance(x, BCPoint):
        _check_unit(alpha, x.level)
        return BCPoint(x.level, alpha * x.c % x.level)
    if isinstance(x, GroupRingElement):
        _check_unit(alpha, x.level)
        return GroupRingElement(x.level, {alpha * r: c for r, c in x.coeffs.items()})
    if isinstance(x, CrossedElement):
        out = CrossedElement()
        for n1, b, n2 in x.normal_terms():
            out._add_normal(n1, galois_act(alpha, b), n2)
        return out
    raise TypeError(f"cannot act on {type(x).__name__}")


def fabulous_check(chi, alpha, a):
    """Exact test of alpha(phi(a)) = phi(alpha-tilde(a)) for the state phi = chi.

    ``alpha-tilde`` is e_r -> e_{alpha r}, which as an operator on functions
    on X is f -> f o alpha, i.e. the inverse of the Galois action on C(X).
    """
    if not isinstance(chi, BCPoint):
        raise TypeError("chi must be a BCPoint")
    _check_unit(alpha, chi.level)
    levels = [m.level for m in (a.terms.values() if isinstance(a, CrossedElement) else [a])]
    if any(chi.level % lv for lv in levels):
        raise LevelMismatch("element level does not divide the character level")
    lhs = chi(a).galois(alpha % chi.level if chi.level > 1 else 1)
    rhs = chi(galois_act(alpha, a))
    return lhs == rhs


# Self-map systems ------------------------------------------------------------

class SelfMapSystem:
    """X_n = {y in G_m : y^n = 1} for n in a divisor-closed set of levels.

    The point zeta_n^k of X_n is stored as the residue k mod n; for n | m the
    projection xi_{n,m}: X_m -> X_n is y -> y^{m/n}, i.e. k -> k mod n.
    """

    def __init__(self, levels):
        self.levels = sorted(set(int(n) for n in levels))
        for n in self.levels:
            missing = [d for d in range(1, n + 1) if n % d == 0 and d not in self.levels]
            if missing:
                raise ClosureError(f"levels not closed under divisors: {n} lacks {missing}")

    def points(self, n):
        self._need(n)
        return list(range(n))

    def degree(self, n):
        return n

    def _need(self, n):
        if n not in self.levels:
            raise KeyError(f"level {n} not in the system")

    def projection(self, n, m):
        """xi_{n,m}: X_m -> X_n as a list (index k of X_m -> index in X_n)."""
        self._need(n)
        self._need(m)
        if m % n:
            raise DivisibilityError(f"{n} does not divide {m}")
        return [k % n for k in range(m)]

    def power_map(self, n, m):
        """The same projection computed from y -> y^{m/n} on roots of unity."""
        r = m // n
        # zeta_m^k raised to r is zeta_m^{rk} = zeta_n^{k} since zeta_m^r = zeta_n
        return [(r * k) % m // r for k in range(m)]

    def beta(self, s, k):
        """beta_s: X_k -> X^{e_s} in X_{sk}, c -> s c."""
        return [s * c % (s * k) for c in range(k)]

    def beta_inverse(self, s, k):
        """beta_s^{-1} on the points of X_{sk} with xi_s = 1."""
        return {c: c // s for c in range(s * k) if c % s == 0}

    def iota(self, n, k):
        """iota(u(n)^k) = e_{k/n}."""
        return GroupRingElement.e(k, n)

    def verify_rho(self, n, k):
        """Exact check of xi_{nk}(x) = xi_k(x o rho_n) on every x in X_{nk} with xi_n(x) = 1,
        and x o rho_n = 0 when xi_n(x) != 1."""
        m = n * k
        self._need(m)
        for c in range(m):
            x = BCPoint(m, c)
            for j in range(k):
                lhs = x(rho(n, GroupRingElement.e(j, k)))
                if c % n == 0:
                    rhs = x(GroupRingElement.e(j, m))
                else:
                    rhs = Cyclotomic.rational(0, m)
                if lhs != rhs:
                    return False
        return True

    def verify_endo(self, n, k):
        """rho_n(f)(x) = f(beta_n^{-1} x) on X^{e_n}, 0 elsewhere (via iota, exactly)."""
        m = n * k
        inv = self.beta_inverse(n, k)
        for j in range(k):
            f = self.iota(k, j)
            img = rho(n, f)
            for c in range(m):
                val = BCPoint(m, c)(img)
                expect = BCPoint(k, inv[c])(f) if c in inv else Cyclotomic.rational(0, m)
                if val != expect:
                    return False
        return True

    def verify(self):
        """Run every structural check over all compatible level pairs."""
        report = {"projections_are_power_maps": True, "beta_inverse": True,
                  "rho_matches": True, "endo_matches": True}
        for m in self.levels:
            for n in self.levels:
                if m % n == 0:
                    if self.projection(n, m) != self.power_map(n, m):
                        report["projections_are_power_maps"] = False
                    k = m // n
                    b = self.beta(n, k)
                    inv = self.beta_inverse(n, k)
                    if any(inv[b[c]] != c for c in range(k)) or sorted(b) != sorted(inv):
                        report["beta_inverse"] = False
                    if not self.verify_rho(n, k):
                        report["rho_matches"] = False
                    if not self.verify_endo(n, k):
                        report["endo_matches"] = False
        return report


def selfmap_bc(levels):
    system = SelfMapSystem(levels)
    return system, system.verify()


def measure_pushforward_check(system, s, s_prime, projection=None):
    """Push the uniform measure on X_{s'} to X_s and compare with uniform.

    ``projection`` overrides xi (a list, entries may be None to drop a point).
    """
    if s_prime % s:
        raise DivisibilityError(f"{s} does not divide {s_prime}")
    proj = projection if projection is not None else system.projection(s, s_prime)
    mass = [Fraction(0)] * s
    w = Fraction(1, s_prime)
    for k in range(s_prime):
        if proj[k] is not None:
            mass[proj[k]] += w
    return all(m == Fraction(1, s) for m in mass)


# helpers for property tests ---------------------------------------------------

def random_group_ring(rng=None, max_level=24, n_terms=3, max_coeff=4):
    rng = rng or random.Random(0)
    level = rng.randint(1, max_level)
    return GroupRingElement(level, {rng.randrange(level):
                                    Fraction(rng.randint(-max_coeff, max_coeff),
                                             rng.randint(1, max_coeff))
                                    for _ in range(n_terms)})


def random_monomial(rng=None, max_n=6, max_level=24):
    rng = rng or random.Random(0)
    return CrossedElement.monomial(rng.randint(1, max_n), random_group_ring(rng, max_level),
                                   rng.randint(1, max_n))


def rho_image_rank(n, level):
    """Rank of rho_n on A_level and of e A_{n level} e with e = rho_n(1)."""
    big = n * level
    e = range_projection(n)
    vecs_img, vecs_corner = [], []
    for r in range(level):
        v = rho(n, GroupRingElement.e(r, level)).lift_coeffs(big)
        vecs_img.append([v.get(k, Fraction(0)) for k in range(big)])
    for r in range(big):
        v = (e * GroupRingElement.e(r, big) * e).lift_coeffs(big)
        vecs_corner.append([v.get(k, Fraction(0)) for k in range(big)])
    return rank(vecs_img), rank(vecs_corner)
