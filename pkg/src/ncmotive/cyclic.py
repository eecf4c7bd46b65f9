"""Cyclic-category operators on tensor powers of finite-dimensional algebras.

Chains are linear combinations of basis tensors ``e_{i0} x ... x e_{in}``
with rational coefficients.  Faces multiply neighbouring factors (the last
face wraps ``x^n x^0`` to the front), degeneracies insert the unit and the
cyclic operator rotates the last factor to the front.  Everything is exact.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
import random

from .errors import DimensionMismatch, NotATrace
from .exact import rref, to_fraction


class FiniteAlgebra:
    """Unital associative algebra over Q given by structure constants.

    ``table[i][j]`` lists the nonzero ``(k, c_ij^k)`` of ``e_i e_j``.
    """

    def __init__(self, dim, unit, structure, name=None):
        self.dim = int(dim)
        self.unit = tuple(to_fraction(u) for u in unit)
        self.name = name or f"A{dim}"
        self.table = [[tuple((k, to_fraction(c)) for k, c in structure[i][j] if c)
                       for j in range(self.dim)] for i in range(self.dim)]
        if len(self.unit) != self.dim:
            raise DimensionMismatch("unit has wrong length")
        self._unit_terms = tuple((k, u) for k, u in enumerate(self.unit) if u)

    @classmethod
    def from_dense(cls, dim, unit, c, name=None):
        """Build from a dense rank-3 array ``c[i][j][k]``."""
        structure = [[[(k, c[i][j][k]) for k in range(dim) if c[i][j][k]]
                      for j in range(dim)] for i in range(dim)]
        return cls(dim, unit, structure, name)

    def mul(self, x, y):
        out = [Fraction(0)] * self.dim
        for i, xi in enumerate(x):
            if xi:
                for j, yj in enumerate(y):
                    if yj:
                        for k, c in self.table[i][j]:
                            out[k] += xi * yj * c
        return tuple(out)

    def basis(self, i):
        return tuple(Fraction(int(k == i)) for k in range(self.dim))

    def check_axioms(self):
        """Return (associative, unital) checked exactly on basis triples."""
        e = [self.basis(i) for i in range(self.dim)]
        assoc = all(self.mul(self.mul(a, b), c) == self.mul(a, self.mul(b, c))
                    for a in e for b in e for c in e)
        unital = all(self.mul(self.unit, a) == a == self.mul(a, self.unit) for a in e)
        return assoc, unital

    def __repr__(self):
        return f"FiniteAlgebra({self.name}, dim={self.dim})"


def rationals():
    return FiniteAlgebra(1, [1], [[[(0, 1)]]], "Q")


def diagonal(n=2):
    """Q^n with componentwise product."""
    s = [[[(i, 1)] if i == j else [] for j in range(n)] for i in range(n)]
    return FiniteAlgebra(n, [1] * n, s, f"Q^{n}")


def matrices(k=2):
    """M_k(Q) in the matrix-unit basis e_{rc} -> index r*k + c."""
    d = k * k
    s = [[[] for _ in range(d)] for _ in range(d)]
    for r, c, c2, q in product(range(k), repeat=4):
        if c == c2:
            s[r * k + c][c2 * k + q] = [(r * k + q, 1)]
    unit = [1 if i // k == i % k else 0 for i in range(d)]
    return FiniteAlgebra(d, unit, s, f"M{k}(Q)")


def truncated_polynomials(d=3):
    """Q[t]/(t^d) in the monomial basis."""
    s = [[[(i + j, 1)] if i + j < d else [] for j in range(d)] for i in range(d)]
    return FiniteAlgebra(d, [1] + [0] * (d - 1), s, f"Q[t]/(t^{d})")


def tensor_matrices(alg, k):
    """B (x) M_k with basis index b*k*k + r*k + c for b (x) e_{rc}."""
    kk = k * k
    d = alg.dim * kk
    s = [[[] for _ in range(d)] for _ in range(d)]
    for b1 in range(alg.dim):
        for b2 in range(alg.dim):
            prod_b = alg.table[b1][b2]
            if not prod_b:
                continue
            for r, c, q in product(range(k), repeat=3):
                i = b1 * kk + r * k + c
                j = b2 * kk + c * k + q
                s[i][j] = [(b * kk + r * k + q, coef) for b, coef in prod_b]
    unit = [0] * d
    for b, u in enumerate(alg.unit):
        for r in range(k):
            unit[b * kk + r * k + r] = u
    out = FiniteAlgebra(d, unit, s, f"{alg.name}(x)M{k}")
    out.factors = (alg, k)
    return out


ALGEBRAS = {
    "rationals": rationals,
    "Q": rationals,
    "Q2": diagonal,
    "diagonal": diagonal,
    "M2": matrices,
    "matrices": matrices,
    "truncated": truncated_polynomials,
    "Qt3": truncated_polynomials,
}


def algebra_by_name(name):
    try:
        return ALGEBRAS[name]()
    except KeyError:
        raise KeyError(f"unknown algebra {name!r}; choose from {sorted(ALGEBRAS)}") from None


@dataclass
class CyclicChain:
    """Element of A^{(n+1)} as ``{(i0, ..., in): coefficient}``."""
    algebra: FiniteAlgebra
    degree: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for key, c in self.terms.items():
            key = tuple(key)
            if len(key) != self.degree + 1 or any(not 0 <= i < self.algebra.dim for i in key):
                raise DimensionMismatch(f"bad basis tensor {key} for degree {self.degree}")
            c = to_fraction(c)
            if c:
                clean[key] = clean.get(key, Fraction(0)) + c
        self.terms = {k: v for k, v in clean.items() if v}

    @classmethod
    def from_tensor(cls, algebra, factors, coeff=1):
        """Expand ``coeff * x0 (x) ... (x) xn`` for algebra elements given as vectors."""
        terms = {(): to_fraction(coeff)}
        for x in factors:
            if len(x) != algebra.dim:
                raise DimensionMismatch("factor dimension does not match the algebra")
            new = {}
            for key, c in terms.items():
                for i, xi in enumerate(x):
                    if xi:
                        new[key + (i,)] = c * to_fraction(xi)
            terms = new
        return cls(algebra, len(factors) - 1, terms)

    @classmethod
    def basis_tensor(cls, algebra, idx, coeff=1):
        return cls(algebra, len(idx) - 1, {tuple(idx): coeff})

    def __add__(self, other):
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms.get(k, Fraction(0)) + v
        return CyclicChain(self.algebra, self.degree, terms)

    def scale(self, q):
        q = to_fraction(q)
        return CyclicChain(self.algebra, self.degree, {k: v * q for k, v in self.terms.items()})

    def __eq__(self, other):
        return (isinstance(other, CyclicChain) and self.degree == other.degree
                and self.terms == other.terms)

    def is_zero(self):
        return not self.terms


def _accumulate(out, key, c):
    v = out.get(key, Fraction(0)) + c
    if v:
        out[key] = v
    else:
        out.pop(key, None)


def face(i, chain):
    """delta_i: multiply factors i and i+1; delta_n puts x^n x^0 in front."""
    n = chain.degree
    if n < 1 or not 0 <= i <= n:
        raise IndexError(f"face index {i} invalid in degree {n}")
    table = chain.algebra.table
    out = {}
    for key, c in chain.terms.items():
        if i < n:
            for k, s in table[key[i]][key[i + 1]]:
                _accumulate(out, key[:i] + (k,) + key[i + 2:], c * s)
        else:
            for k, s in table[key[n]][key[0]]:
                _accumulate(out, (k,) + key[1:n], c * s)
    return CyclicChain(chain.algebra, n - 1, out)


def degeneracy(j, chain):
    """sigma_j: insert the unit after slot j."""
    n = chain.degree
    if not 0 <= j <= n:
        raise IndexError(f"degeneracy index {j} invalid in degree {n}")
    out = {}
    for key, c in chain.terms.items():
        for k, u in chain.algebra._unit_terms:
            _accumulate(out, key[:j + 1] + (k,) + key[j + 1:], c * u)
    return CyclicChain(chain.algebra, n + 1, out)


def cyclic(chain, shift=1):
    """tau_n: (x0, ..., xn) -> (xn, x0, ..., x_{n-1}).

    ``shift`` rotates further; anything but 1 is only useful as a corrupted
    operator in negative controls.
    """
    out = {}
    for key, c in chain.terms.items():
        s = shift % len(key)
        _accumulate(out, key[-s:] + key[:-s] if s else key, c)
    return CyclicChain(chain.algebra, chain.degree, out)


@dataclass
class RelationResult:
    family: str
    degree: int
    indices: tuple
    passed: bool


@dataclass
class RelationReport:
    algebra: str
    n_max: int
    results: list

    @property
    def all_passed(self):
        return all(r.passed for r in self.results)

    def failures(self):
        return [r for r in self.results if not r.passed]

    def families(self):
        fam = {}
        for r in self.results:
            fam.setdefault(r.family, True)
            fam[r.family] &= r.passed
        return fam


def _relation_instances(n, tau):
    """Yield (family, indices, lhs, rhs) as operator pairs acting on degree-n chains."""
    d, s = face, degeneracy
    if n >= 2:
        for j in range(n + 1):
            for i in range(j):
                yield ("face-face", (i, j),
                       lambda x, i=i, j=j: d(i, d(j, x)),
                       lambda x, i=i, j=j: d(j - 1, d(i, x)))
    for j in range(n + 1):
        for i in range(j + 1):
            yield ("degeneracy-degeneracy", (i, j),
                   lambda x, i=i, j=j: s(i, s(j, x)),
                   lambda x, i=i, j=j: s(j + 1, s(i, x)))
    for j in range(n + 1):
        for i in range(n + 2):
            lhs = (lambda x, i=i, j=j: d(i, s(j, x)))
            if i < j:
                yield ("face-degeneracy i<j", (i, j), lhs,
                       lambda x, i=i, j=j: s(j - 1, d(i, x)))
            elif i == j:
                yield ("face-degeneracy i=j", (i, j), lhs, lambda x: x)
            elif i == j + 1:
                yield ("face-degeneracy i=j+1", (i, j), lhs, lambda x: x)
            else:
                yield ("face-degeneracy i>j+1", (i, j), lhs,
                       lambda x, i=i, j=j: s(j, d(i - 1, x)))
    if n >= 1:
        for i in range(1, n + 1):
            yield ("cyclic-face", (i,),
                   lambda x, i=i: d(i, tau(x)), lambda x, i=i: tau(d(i - 1, x)))
        yield ("cyclic-face i=0", (0,), lambda x: d(0, tau(x)), lambda x: d(n, x))
    for i in range(1, n + 1):
        yield ("cyclic-degeneracy", (i,),
               lambda x, i=i: s(i, tau(x)), lambda x, i=i: tau(s(i - 1, x)))
    yield ("cyclic-degeneracy i=0", (0,), lambda x: s(0, tau(x)),
           lambda x: tau(tau(s(n, x))))

    def power(x):
        for _ in range(n + 1):
            x = tau(x)
        return x
    yield ("cyclic order", (), power, lambda x: x)


FAMILIES = (
    "face-face", "degeneracy-degeneracy", "face-degeneracy i<j", "face-degeneracy i=j",
    "face-degeneracy i=j+1", "face-degeneracy i>j+1", "cyclic-face", "cyclic-face i=0",
    "cyclic-degeneracy", "cyclic-degeneracy i=0", "cyclic order",
)


def check_relations(alg, n_max, tau=None):
    """Test every cyclic-category relation on every basis tensor of degree <= n_max.

    Relations are checked in the chain (simplicial) orientation; the cochain
    side is the transpose and satisfies the dual identities automatically.
    ``tau`` replaces the cyclic operator (for negative controls).
    """
    if n_max > 5:
        raise ValueError("n_max is capped at 5")
    tau = tau or cyclic
    results = []
    for n in range(n_max + 1):
        chains = [CyclicChain.basis_tensor(alg, idx)
                  for idx in product(range(alg.dim), repeat=n + 1)]
        for family, idx, lhs, rhs in _relation_instances(n, tau):
            ok = all(lhs(x) == rhs(x) for x in chains)
            results.append(RelationResult(family, n, idx, ok))
    return RelationReport(alg.name, n_max, results)


def rotate_by_two(chain):
    """Corrupted cyclic operator used in negative controls."""
    return cyclic(chain, 2)


def signed_rotation(chain):
    """-tau: satisfies the face relations up to sign but breaks tau^(n+1) = 1 in even degree."""
    return cyclic(chain).scale(-1)


def is_trace(alg, phi):
    phi = [to_fraction(v) for v in phi]

    def ev(x):
        return sum((p * v for p, v in zip(phi, x)), Fraction(0))
    for i in range(alg.dim):
        for j in range(alg.dim):
            if ev(alg.mul(alg.basis(i), alg.basis(j))) != ev(alg.mul(alg.basis(j), alg.basis(i))):
                return False
    return True


def trace_morphism(phi, chain):
    """phi^natural(a0 (x) ... (x) an) = phi(a0 a1 ... an)."""
    alg = chain.algebra
    phi = [to_fraction(v) for v in phi]
    if len(phi) != alg.dim:
        raise DimensionMismatch("functional has wrong length")
    if not is_trace(alg, phi):
        raise NotATrace("phi(ab) != phi(ba) on a basis pair")
    total = Fraction(0)
    for key, c in chain.terms.items():
        x = alg.basis(key[0])
        for k in key[1:]:
            x = alg.mul(x, alg.basis(k))
            if not any(x):
                break
        total += c * sum((p * v for p, v in zip(phi, x)), Fraction(0))
    return total


def matrix_trace(k):
    """Trace functional on M_k(Q) in the matrix-unit basis."""
    return [1 if i // k == i % k else 0 for i in range(k * k)]


def chain_from_pairs(base, k, pairs, coeff=1):
    """Chain over B (x) M_k from factors ``(b_vector, k x k rational matrix)``."""
    alg = tensor_matrices(base, k)
    factors = []
    for b, t in pairs:
        if len(b) != base.dim or len(t) != k or any(len(row) != k for row in t):
            raise DimensionMismatch("factor does not match B (x) M_k")
        v = [Fraction(0)] * alg.dim
        for bi, bv in enumerate(b):
            for r in range(k):
                for c in range(k):
                    v[bi * k * k + r * k + c] = to_fraction(bv) * to_fraction(t[r][c])
        factors.append(v)
    return CyclicChain.from_tensor(alg, factors, coeff)


def partial_trace(chain, base=None, k=None):
    """Trace((x0 (x) t0) (x) ... (x) (xn (x) tn)) = x0 (x) ... (x) xn * Trace(t0 t1 ... tn)."""
    alg = chain.algebra
    if base is None or k is None:
        try:
            base, k = alg.factors
        except AttributeError:
            raise DimensionMismatch("chain is not over an algebra of the form B (x) M_k") from None
    kk = k * k
    if alg.dim != base.dim * kk:
        raise DimensionMismatch(f"dimension {alg.dim} is not {base.dim} * {kk}")
    out = {}
    for key, c in chain.terms.items():
        bs, rs, cs = [], [], []
        for idx in key:
            b, m = divmod(idx, kk)
            r, col = divmod(m, k)
            bs.append(b)
            rs.append(r)
            cs.append(col)
        # matrix units: e_{r0 c0} e_{r1 c1} ... has trace 1 iff the indices close up
        m = len(key)
        if all(cs[i] == rs[(i + 1) % m] for i in range(m)):
            _accumulate(out, tuple(bs), c)
    return CyclicChain(base, chain.degree, out)


def hc0(alg):
    """Basis (as algebra vectors) of a complement of [A, A] in A, i.e. of HC_0."""
    rows = []
    for i in range(alg.dim):
        for j in range(i + 1, alg.dim):
            ab = alg.mul(alg.basis(i), alg.basis(j))
            ba = alg.mul(alg.basis(j), alg.basis(i))
            diff = [x - y for x, y in zip(ab, ba)]
            if any(diff):
                rows.append(diff)
    _, pivots = rref(rows, alg.dim) if rows else ([], ())
    return [alg.basis(k) for k in range(alg.dim) if k not in pivots]


def random_chain(alg, degree, rng=None, n_terms=4, max_coeff=5):
    rng = rng or random.Random(0)
    terms = {}
    for _ in range(n_terms):
        key = tuple(rng.randrange(alg.dim) for _ in range(degree + 1))
        terms[key] = Fraction(rng.randint(-max_coeff, max_coeff), rng.randint(1, max_coeff))
    return CyclicChain(alg, degree, terms)
