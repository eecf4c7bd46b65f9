"""Artin motives over Q with abelian (cyclotomic) Galois action.

An object is a finite set with an action of (Z/N)*; morphisms are
G-invariant rational matrices.  Everything is exact: rational entries, and
cyclotomic entries for the character idempotents.
"""
from dataclasses import dataclass
from fractions import Fraction
import json
import math

from .characters import DirichletCharacter, characters, quadratic_character
from .errors import LevelMismatch, NotIdempotent, ShapeMismatch
from .exact import Cyclotomic, identity, matmul, rref, to_fraction, units


def _lcm(a, b):
    return a * b // math.gcd(a, b)


class ArtinObject:
    """Finite set of ``points`` with (Z/N)* acting by ``action[u][i] = u.i``."""

    def __init__(self, points, level, action, name=None, check=True):
        self.points = tuple(points)
        self.level = int(level)
        self.action = {int(u) % self.level if self.level > 1 else 1: tuple(p)
                       for u, p in action.items()}
        self.name = name or f"X{len(self.points)}@{self.level}"
        if check:
            self.validate()

    @property
    def size(self):
        return len(self.points)

    def act(self, u, i):
        if self.level == 1:
            return i
        return self.action[u % self.level][i]

    def validate(self):
        us = units(self.level)
        k = self.size
        for u in us:
            perm = self.action.get(u % self.level if self.level > 1 else 1)
            if perm is None or sorted(perm) != list(range(k)):
                raise ValueError(f"action of {u} is not a permutation")
        # homomorphism: checked on all pairs when cheap, else on a generating sweep
        pairs = [(u, v) for u in us for v in us] if len(us) ** 2 * k <= 10 ** 6 else \
            [(u, v) for u in us[:16] for v in us]
        for u, v in pairs:
            w = u * v % self.level if self.level > 1 else 1
            if any(self.act(u, self.act(v, i)) != self.act(w, i) for i in range(k)):
                raise ValueError(f"action is not a homomorphism at ({u}, {v})")

    def lift(self, m):
        """Same object viewed at level m (a multiple of the level)."""
        if m % self.level:
            raise LevelMismatch(f"level {self.level} does not divide {m}")
        if m == self.level:
            return self
        action = {u: tuple(self.act(u, i) for i in range(self.size)) for u in units(m)}
        return ArtinObject(self.points, m, action, self.name, check=False)

    def same_as(self, other):
        m = _lcm(self.level, other.level)
        a, b = self.lift(m), other.lift(m)
        return a.points == b.points and all(
            a.act(u, i) == b.act(u, i) for u in units(m) for i in range(a.size))

    def orbits(self):
        seen, out = set(), []
        for i in range(self.size):
            if i not in seen:
                orb = sorted({self.act(u, i) for u in units(self.level)})
                seen.update(orb)
                out.append(orb)
        return out

    # constructors -------------------------------------------------------
    @classmethod
    def point(cls, level=1):
        return cls(("pt",), level, {u: (0,) for u in units(level)}, "point")

    @classmethod
    def roots_of_unity(cls, n):
        """Primitive n-th roots of unity zeta^k, u acting by k -> uk."""
        us = units(n)
        pos = {k: i for i, k in enumerate(us)}
        action = {u: tuple(pos[u * k % n if n > 1 else 1] for k in us) for u in us}
        return cls(tuple(f"zeta{n}^{k}" for k in us), n, action, f"mu{n}*")

    regular = roots_of_unity

    @classmethod
    def quadratic(cls, d):
        """Two embeddings of Q(sqrt d); u swaps them iff chi_D(u) = -1."""
        chi = quadratic_character(d)
        n = chi.modulus
        action = {u: (0, 1) if chi(u).real > 0 else (1, 0) for u in units(n)}
        return cls((f"+sqrt({d})", f"-sqrt({d})"), n, action, f"Q(sqrt {d})")

    @classmethod
    def trivial(cls, k, level=1):
        return cls(tuple(range(k)), level, {u: tuple(range(k)) for u in units(level)},
                   f"trivial{k}")

    # serialization ------------------------------------------------------
    def to_json(self):
        return {"points": [str(p) for p in self.points], "level": self.level,
                "action": {str(u): list(p) for u, p in sorted(self.action.items())},
                "name": self.name}

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        return cls(data["points"], data["level"],
                   {int(u): p for u, p in data["action"].items()}, data.get("name"))

    def __repr__(self):
        return f"ArtinObject({self.name}, |X|={self.size}, N={self.level})"


def _perm_matrix(obj, u):
    k = obj.size
    m = [[Fraction(0)] * k for _ in range(k)]
    for i in range(k):
        m[obj.act(u, i)][i] = Fraction(1)
    return m


@dataclass
class Correspondence:
    """Invariant matrix from ``source`` to ``target`` (rows index the target)."""
    source: ArtinObject
    target: ArtinObject
    matrix: list

    def __post_init__(self):
        if len(self.matrix) != self.target.size or any(len(r) != self.source.size
                                                      for r in self.matrix):
            raise ShapeMismatch("matrix shape does not match target x source")
        self.matrix = [[v if isinstance(v, Cyclotomic) else to_fraction(v) for v in row]
                       for row in self.matrix]

    @property
    def level(self):
        return _lcm(self.source.level, self.target.level)

    def is_invariant(self):
        m = self.level
        s, t = self.source.lift(m), self.target.lift(m)
        for u in units(m):
            if matmul(_perm_matrix(t, u), self.matrix) != matmul(self.matrix, _perm_matrix(s, u)):
                return False
        return True

    def __eq__(self, other):
        return (isinstance(other, Correspondence) and self.source.same_as(other.source)
                and self.target.same_as(other.target) and self.matrix == other.matrix)

    def __add__(self, other):
        return Correspondence(self.source, self.target,
                              [[a + b for a, b in zip(r1, r2)]
                               for r1, r2 in zip(self.matrix, other.matrix)])

    def scale(self, q):
        return Correspondence(self.source, self.target,
                              [[v * q for v in row] for row in self.matrix])

    def to_json(self):
        return {"source": self.source.to_json(), "target": self.target.to_json(),
                "matrix": [[str(v) for v in row] for row in self.matrix]}

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        return cls(ArtinObject.from_json(data["source"]), ArtinObject.from_json(data["target"]),
                   [[Fraction(v) for v in row] for row in data["matrix"]])


def identity_correspondence(x):
    return Correspondence(x, x, identity(x.size))


def compose(u, v):
    """V o U for U: X -> Y and V: Y -> Z."""
    if not u.target.same_as(v.source):
        raise ShapeMismatch("target of U differs from source of V")
    return Correspondence(u.source, v.target, matmul(v.matrix, u.matrix))


def invariant_basis(x, y):
    """Indicator matrices of the orbits of (Z/N)* on Y x X (a basis of Hom(X, Y))."""
    m = _lcm(x.level, y.level)
    xl, yl = x.lift(m), y.lift(m)
    seen = set()
    basis = []
    for j in range(y.size):
        for i in range(x.size):
            if (j, i) in seen:
                continue
            orb = {(yl.act(u, j), xl.act(u, i)) for u in units(m)}
            seen |= orb
            mat = [[Fraction(int((r, c) in orb)) for c in range(x.size)] for r in range(y.size)]
            basis.append(Correspondence(x, y, mat))
    return basis


@dataclass
class VirtualObject:
    """Range of an idempotent correspondence: an object of the pseudo-abelian envelope."""
    parent: ArtinObject
    projector: list
    rank: int
    basis: list  # rational vectors spanning the range


def idempotent_range(p):
    if not p.source.same_as(p.target):
        raise ShapeMismatch("idempotent must be an endomorphism")
    if matmul(p.matrix, p.matrix) != p.matrix:
        raise NotIdempotent("p^2 != p")
    # the range is spanned by the columns; row-reduce the transpose
    cols = [list(c) for c in zip(*p.matrix)]
    rows, pivots = rref(cols, p.source.size) if cols else ([], ())
    return VirtualObject(p.source, p.matrix, len(pivots), rows)


@dataclass
class FiberRepresentation:
    """Permutation representation of (Z/N)* on Q^{|X|}."""
    obj: ArtinObject
    matrices: dict

    @property
    def dimension(self):
        return self.obj.size

    def character(self, u):
        return sum(self.matrices[u][i][i] for i in range(self.dimension))

    def multiplicities(self):
        """Multiplicity of every Dirichlet character mod N in the representation."""
        n = self.obj.level
        us = units(n)
        out = {}
        for chi in characters(n):
            total = Cyclotomic.rational(0, chi.exponent)
            for u in us:
                total = total + chi.conj().value(u) * self.character(u)
            total = total * Fraction(1, len(us))
            out[chi] = total
        return {chi: _as_rational(m) for chi, m in out.items()}


def _as_rational(c):
    if any(c.coeffs[1:]):
        raise ValueError("multiplicity is not rational")
    return c.coeffs[0] if c.coeffs else Fraction(0)


def fiber_functor(x):
    """omega(X) = Q^{X}: permutation matrices of (Z/N)*; on correspondences the matrix."""
    if isinstance(x, Correspondence):
        return x.matrix
    return FiberRepresentation(x, {u: _perm_matrix(x, u) for u in units(x.level)})


def character_idempotent(chi, x):
    """p_chi = (1/phi(N)) sum_g chi(g) P(g) with exact cyclotomic entries."""
    if not isinstance(chi, DirichletCharacter):
        raise TypeError("chi must be a DirichletCharacter")
    n = chi.modulus
    if n % x.level:
        raise LevelMismatch(f"object level {x.level} does not divide character modulus {n}")
    xl = x.lift(n)
    us = units(n)
    k = x.size
    zero = Cyclotomic.rational(0, chi.exponent)
    mat = [[zero for _ in range(k)] for _ in range(k)]
    for u in us:
        val = chi.value(u)
        for i in range(k):
            r = xl.act(u, i)
            mat[r][i] = mat[r][i] + val
    inv = Fraction(1, len(us))
    mat = [[v * inv for v in row] for row in mat]
    return Correspondence(xl, xl, mat)


def check_resolution(n, x=None):
    """Exact checks that the p_chi are orthogonal idempotents summing to 1."""
    x = x or ArtinObject.regular(n)
    ps = [character_idempotent(chi, x) for chi in characters(n)]
    k = x.lift(n).size
    ident = identity(k)
    idem = all(matmul(p.matrix, p.matrix) == p.matrix for p in ps)
    orth = all(not any(v != 0 for row in matmul(p.matrix, q.matrix) for v in row)
               for i, p in enumerate(ps) for j, q in enumerate(ps) if i != j)
    total = ps[0].matrix
    for p in ps[1:]:
        total = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(total, p.matrix)]
    return {"idempotent": idem, "orthogonal": orth, "sum_is_identity": total == ident}
