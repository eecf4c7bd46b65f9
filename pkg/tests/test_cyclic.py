from fractions import Fraction
import random

import pytest
from hypothesis import given, strategies as st

from ncmotive.cyclic import (FAMILIES, CyclicChain, algebra_by_name, chain_from_pairs,
                             check_relations, cyclic, degeneracy, diagonal, face, hc0,
                             matrices, matrix_trace, partial_trace, random_chain, rationals,
                             rotate_by_two, signed_rotation, tensor_matrices, trace_morphism,
                             truncated_polynomials)
from ncmotive.errors import DimensionMismatch, NotATrace

M2 = matrices(2)


def unit_matrix(k, r, c):
    """Matrix unit e_rc of M_k as an algebra vector."""
    v = [0] * (k * k)
    v[r * k + c] = 1
    return v


def tensor(alg, *factors):
    return CyclicChain.from_tensor(alg, factors)


# single operators ------------------------------------------------------------

def test_face_products():
    a, b = unit_matrix(2, 0, 1), unit_matrix(2, 1, 0)
    x = tensor(M2, a, b)
    assert face(0, x) == tensor(M2, M2.mul(a, b))
    assert face(1, x) == tensor(M2, M2.mul(b, a))
    one = M2.unit
    assert face(0, tensor(M2, one, a)) == tensor(M2, a)


def test_face_index_errors():
    with pytest.raises(IndexError):
        face(0, tensor(M2, M2.unit))
    with pytest.raises(IndexError):
        face(3, tensor(M2, M2.unit, M2.unit))
    with pytest.raises(IndexError):
        degeneracy(2, tensor(M2, M2.unit))


def test_degeneracy_and_rotation():
    a, b, c = unit_matrix(2, 0, 1), unit_matrix(2, 1, 1), unit_matrix(2, 1, 0)
    assert degeneracy(0, tensor(M2, a)) == tensor(M2, a, M2.unit)
    assert cyclic(tensor(M2, a, b)) == tensor(M2, b, a)
    x = tensor(M2, a, b, c)
    assert cyclic(cyclic(cyclic(x))) == x
    assert cyclic(x) != x


def test_chain_dimension_checks():
    with pytest.raises(DimensionMismatch):
        CyclicChain(M2, 1, {(0,): 1})
    with pytest.raises(DimensionMismatch):
        CyclicChain.from_tensor(M2, [[1, 0]])


def test_algebras_are_associative_and_unital():
    for alg in (rationals(), diagonal(), M2, truncated_polynomials(), tensor_matrices(diagonal(), 2)):
        assert alg.check_axioms() == (True, True)


def test_unknown_algebra():
    with pytest.raises(KeyError):
        algebra_by_name("octonions")


# relation families -----------------------------------------------------------

@pytest.mark.parametrize("name, n_max", [("Q", 2), ("M2", 3), ("Q2", 4), ("Qt3", 4)])
def test_relations_hold(name, n_max):
    rep = check_relations(algebra_by_name(name), n_max)
    assert rep.all_passed, rep.failures()[:3]
    assert set(rep.families()) == set(FAMILIES)


def test_rotation_by_two_breaks_cyclic_order():
    rep = check_relations(M2, 2, tau=rotate_by_two)
    fams = rep.families()
    assert not rep.all_passed
    assert not fams["cyclic order"] or not fams["cyclic-face"]
    # face and degeneracy relations do not involve tau and still hold
    assert fams["face-face"] and fams["degeneracy-degeneracy"]


def test_signed_rotation_breaks_even_degree_order():
    rep = check_relations(diagonal(), 2, tau=signed_rotation)
    bad = {(r.family, r.degree) for r in rep.failures()}
    assert ("cyclic order", 0) in bad and ("cyclic order", 2) in bad
    assert ("cyclic order", 1) not in bad


def test_degree_cap():
    with pytest.raises(ValueError):
        check_relations(rationals(), 6)


# trace morphism ---------------------------------------------------------------

def test_trace_morphism_examples():
    tr = matrix_trace(2)
    x = tensor(M2, unit_matrix(2, 0, 1), unit_matrix(2, 1, 0))
    assert trace_morphism(tr, x) == 1
    one = tensor(M2, M2.unit, M2.unit, M2.unit)
    assert trace_morphism(tr, one) == 2


def test_trace_morphism_rejects_non_trace():
    with pytest.raises(NotATrace):
        trace_morphism([1, 0, 0, 0], tensor(M2, M2.unit))
    with pytest.raises(DimensionMismatch):
        trace_morphism([1, 1], tensor(M2, M2.unit))


@given(st.integers(0, 4), st.integers(0, 10 ** 6))
def test_trace_morphism_is_cyclic(degree, seed):
    x = random_chain(M2, degree, random.Random(seed))
    tr = matrix_trace(2)
    assert trace_morphism(tr, cyclic(x)) == trace_morphism(tr, x)


# partial trace ----------------------------------------------------------------

def _random_pairs(rng, base, k, n):
    pairs = []
    for _ in range(n + 1):
        b = [Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(base.dim)]
        t = [[Fraction(rng.randint(-2, 2)) for _ in range(k)] for _ in range(k)]
        pairs.append((b, t))
    return pairs


def _matprod(ms):
    k = len(ms[0])
    out = [[Fraction(int(i == j)) for j in range(k)] for i in range(k)]
    for m in ms:
        out = [[sum(out[i][l] * m[l][j] for l in range(k)) for j in range(k)] for i in range(k)]
    return out


def test_partial_trace_formula():
    rng = random.Random(3)
    base = truncated_polynomials()
    pairs = _random_pairs(rng, base, 2, 1)
    chain = chain_from_pairs(base, 2, pairs)
    t = _matprod([p[1] for p in pairs])
    expected = CyclicChain.from_tensor(base, [p[0] for p in pairs]).scale(t[0][0] + t[1][1])
    assert partial_trace(chain) == expected


def test_partial_trace_k1_is_identity():
    base = diagonal()
    chain = chain_from_pairs(base, 1, [([1, 2], [[1]]), ([3, -1], [[1]])])
    assert partial_trace(chain) == CyclicChain.from_tensor(base, [[1, 2], [3, -1]])


def test_partial_trace_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        partial_trace(tensor(M2, M2.unit))
    with pytest.raises(DimensionMismatch):
        partial_trace(tensor(M2, M2.unit), base=diagonal(), k=3)


@given(st.integers(0, 3), st.integers(0, 10 ** 6))
def test_partial_trace_is_a_cyclic_map(degree, seed):
    rng = random.Random(seed)
    base = diagonal()
    chain = random_chain(tensor_matrices(base, 2), degree, rng)
    pt = lambda c: partial_trace(c, base, 2)
    assert pt(cyclic(chain)) == cyclic(pt(chain))
    for j in range(degree + 1):
        assert pt(degeneracy(j, chain)) == degeneracy(j, pt(chain))
    for i in range(degree + 1 if degree else 0):
        assert pt(face(i, chain)) == face(i, pt(chain))


# HC_0 ------------------------------------------------------------------------

@pytest.mark.parametrize("alg, dim", [(diagonal(), 2), (M2, 1), (truncated_polynomials(), 3),
                                      (matrices(3), 1), (rationals(), 1)])
def test_hc0_dimension(alg, dim):
    assert len(hc0(alg)) == dim
