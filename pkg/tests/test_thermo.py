import cmath
import math
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ncmotive.endomotive import CrossedElement, GroupRingElement, random_monomial, range_projection
from ncmotive.errors import DivergenceError, LevelMismatch
from ncmotive.numkernel import hurwitz_zeta
from ncmotive.thermo import (DualElement, EvolvedElement, GibbsState, GnsTruncation, dual_action,
                             dual_trace, gibbs_expect, kms_verify, monomial_family,
                             partition_function, represent, represent_dual, tail_bound,
                             time_evolve)

U, Us = CrossedElement.U, CrossedElement.Ustar
ONE = CrossedElement.one()
T1 = GnsTruncation(10 ** 5)


# truncation and representation -----------------------------------------------------

def test_truncation_validation():
    with pytest.raises(ValueError):
        GnsTruncation(0)
    with pytest.raises(ValueError):
        GnsTruncation(10, 2, 4)
    with pytest.raises(ValueError):
        GnsTruncation(10, 3)
    with pytest.raises(LevelMismatch):
        GnsTruncation(10, 1, 6).residue(4)
    t = GnsTruncation(10, 5, 12, lam=2.0)
    assert t.residue(4) == 1
    assert t.hamiltonian()[0] == pytest.approx(math.log(2))


def test_represent_examples():
    t = GnsTruncation(16)
    assert np.array_equal(represent(ONE, t), np.eye(16))
    p = represent(U(2) * Us(2), t)
    assert np.allclose(np.diag(p), [1 if n % 2 == 0 else 0 for n in range(1, 17)])
    assert np.allclose(p, np.diag(np.diag(p)))


def test_represent_level_mismatch():
    x = CrossedElement.from_group_ring(GroupRingElement.e(1, 3))
    with pytest.raises(LevelMismatch):
        represent(x, GnsTruncation(10, 1, 4))


def test_represent_is_star_homomorphism():
    rng = random.Random(7)
    t = GnsTruncation(256, 5, 12)
    fam = [CrossedElement.monomial(n1, GroupRingElement.e(r, 12), n2)
           for n1 in range(1, 5) for n2 in range(1, 5) for r in (0, 1, 5)]
    for _ in range(40):
        x, y = rng.choice(fam), rng.choice(fam)
        blk = 256 // 16
        lhs = represent(x * y, t)[:blk, :blk]
        rhs = (represent(x, t) @ represent(y, t))[:blk, :blk]
        assert np.allclose(lhs, rhs, atol=1e-13)
        assert np.allclose(represent(x.adjoint(), t), represent(x, t).conj().T, atol=1e-13)


# partition function and Gibbs states --------------------------------------------------

def test_partition_function_zeta_two():
    z, tail = partition_function(2, 10 ** 6)
    assert abs(z - math.pi ** 2 / 6) <= 1e-6
    assert abs(z - math.pi ** 2 / 6) <= tail


def test_partition_function_zeta_four():
    z, tail = partition_function(4, 1000)
    assert 0 <= math.pi ** 4 / 90 - z <= tail


@pytest.mark.parametrize("beta", [1, 0.5])
def test_partition_function_diverges(beta):
    with pytest.raises(DivergenceError):
        partition_function(beta, 100)
    with pytest.raises(DivergenceError):
        GibbsState(beta, T1)


@given(st.floats(1.1, 8.0), st.integers(10, 5000))
def test_partition_function_against_hurwitz(beta, n):
    z, tail = partition_function(beta, n)
    ref = hurwitz_zeta(beta, 1.0).real
    assert -1e-14 <= ref - z <= tail * (1 + 1e-10) + 1e-10
    z2, _ = partition_function(beta + 0.5, n)
    assert z2 < z


def test_declared_tail_bound_floor():
    with pytest.raises(ValueError):
        GibbsState(2.0, GnsTruncation(100), tail_bound=1e-9)
    assert GibbsState(2.0, GnsTruncation(100)).tail_bound == pytest.approx(tail_bound(2, 100))


def test_gibbs_examples():
    st2 = GibbsState(2.0, T1)
    e = gibbs_expect(U(2) * Us(2), st2)
    assert abs(e.value - 0.25) <= e.bound
    assert abs(e.completed - 0.25) < 1e-14
    assert gibbs_expect(ONE, st2).value == pytest.approx(1, abs=1e-15)
    assert gibbs_expect(Us(2), st2).value == 0


def test_gibbs_matches_dense_trace():
    t = GnsTruncation(400, 7, 10)
    st_ = GibbsState(2.5, t)
    weights = np.arange(1, 401, dtype=float) ** -2.5
    rng = random.Random(2)
    for _ in range(10):
        x = random_monomial(rng, 3, 10)
        if 10 % x.max_level():
            continue
        dense = np.trace(represent(x, t) * weights) / weights.sum()
        assert abs(gibbs_expect(x, st_).value - dense) < 1e-13


@given(st.integers(0, 10 ** 6))
def test_gibbs_positivity(seed):
    rng = random.Random(seed)
    x = random_monomial(rng, 4, 12) + random_monomial(rng, 4, 12)
    t = GnsTruncation(20000, 1, None)
    e = gibbs_expect(x.adjoint() * x, GibbsState(2.0, t))
    assert abs(e.value.imag) < 1e-12
    assert e.value.real >= -e.bound


# time evolution and KMS -----------------------------------------------------------

def test_time_evolution_phases():
    a = CrossedElement.from_group_ring(GroupRingElement.e(1, 3))
    assert [ph for *_, ph in time_evolve(a, 2.7).normal_terms()] == [1]
    (_, _, _, ph), = time_evolve(U(2), 1.3).normal_terms()
    assert ph == pytest.approx(cmath.exp(1.3j * math.log(2)))
    x = U(3) + Us(2)
    lhs = time_evolve(time_evolve(x, 0.4), 1.1)
    rhs = time_evolve(x, 1.5)
    assert isinstance(lhs, EvolvedElement)
    for a_, b_ in zip(lhs.normal_terms(), rhs.normal_terms()):
        assert a_[3] == pytest.approx(b_[3], abs=1e-15)


def test_kms_closed_form():
    rep = kms_verify(U(2), Us(2), 2.0, [0.0, 1.0, 5.0])
    assert rep.passed
    for r in rep.rows:
        assert r.residual <= 1e-12
        # F(t + i beta) = 2^{-it} phi(U*_2 U_2) = 2^{-it}
        assert abs(r.rhs - cmath.exp(-1j * r.t * math.log(2))) < 1e-12


def test_kms_trivial_and_off_diagonal():
    assert kms_verify(ONE, ONE, 2.0, [0, 3]).max_residual <= 1e-15
    rep = kms_verify(U(3), Us(2), 2.0, [0, 1])
    assert all(r.lhs == 0 and r.rhs == 0 for r in rep.rows)


@pytest.mark.parametrize("beta", [1.5, 2.0, 3.0])
def test_kms_small_family(beta):
    fam = monomial_family(4)
    for x in fam:
        for y in fam:
            rep = kms_verify(x, y, beta, [0, 1, 5])
            assert rep.passed, (x, y, rep.rows)


def test_kms_with_group_ring_coefficients():
    a = CrossedElement.from_group_ring(GroupRingElement(4, {1: 1, 2: -2}))
    x = U(2) * a + Us(3)
    y = a * Us(2) + U(3)
    assert kms_verify(x, y, 2.5, [0, 0.7, 4]).passed


# dual system ----------------------------------------------------------------------

def _dual():
    x = U(2) * Us(3) + CrossedElement.from_group_ring(range_projection(2))
    h = lambda lam: math.exp(-lam) * lam ** 2
    return DualElement.from_crossed(x, h)


def test_dual_action_group_law():
    f = _dual()
    assert dual_action(f, 1.0)(1, 0, 0.7) == f(1, 0, 0.7)
    g1 = dual_action(dual_action(f, 2.0), 3.0)
    g2 = dual_action(f, 6.0)
    for k, r, lam in [(1, 0, 0.3), (1, 1, 1.1)]:
        assert g1(k, r, lam) == g2(k, r, lam)
    with pytest.raises(ValueError):
        dual_action(f, 0)


def test_dual_equivariance():
    f = _dual()
    mu = 1.7
    t = GnsTruncation(60, 1, None, lam=0.4)
    moved = GnsTruncation(60, 1, None, lam=0.4 * mu)
    assert np.allclose(represent_dual(dual_action(f, mu), t), represent_dual(f, moved), atol=0)
    assert dual_trace(dual_action(f, mu), t) == pytest.approx(dual_trace(f, moved), rel=1e-14)


def test_dual_matrix_entries():
    f = _dual()
    t = GnsTruncation(12, 1, None, lam=1.0)
    mat = represent_dual(f, t)
    # diagonal entries come from the k = 1 component, e.g. rho_2(1) at even m
    h = lambda lam: math.exp(-lam) * lam ** 2
    assert mat[1, 1] == pytest.approx(h(2.0))
    assert abs(mat[0, 0]) < 1e-15
    assert dual_trace(f, t) == pytest.approx(np.trace(mat))
