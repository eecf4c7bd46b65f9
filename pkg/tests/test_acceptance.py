"""Acceptance checks, one per primary criterion.

Each test prints ``criterion N: PASS|FAIL (...)`` to the terminal whether or
not output capture is on, then asserts.  Run standalone with
``python tests/test_acceptance.py`` for the summary lines alone.
"""
import math
import random
import sys
import time

import numpy as np
import pytest

from ncmotive import archfactors as af
from ncmotive import explicit as ex
from ncmotive import spectral as sp
from ncmotive.artin import check_resolution
from ncmotive.cyclic import (algebra_by_name, check_relations, cyclic, degeneracy, diagonal, face,
                             partial_trace, random_chain, tensor_matrices)
from ncmotive.endomotive import CrossedElement, GroupRingElement, random_group_ring, rho
from ncmotive.thermo import GnsTruncation, kms_verify, monomial_family, partition_function

EULER = 0.57721566490153286060651209


# criteria --------------------------------------------------------------------------

def criterion_1():
    notes, ok = [], True
    for name in ("Q2", "M2", "Qt3"):
        rep = check_relations(algebra_by_name(name), 4)
        ok &= rep.all_passed
        notes.append(f"{name}: {len(rep.results)} relation instances")
    rng = random.Random(1)
    base = diagonal()
    big = tensor_matrices(base, 2)
    pt = lambda c: partial_trace(c, base, 2)
    for degree in range(5):
        for _ in range(3):
            x = random_chain(big, degree, rng)
            ok &= pt(cyclic(x)) == cyclic(pt(x))
            for j in range(degree + 1):
                ok &= pt(degeneracy(j, x)) == degeneracy(j, pt(x))
                if degree:
                    ok &= pt(face(j, x)) == face(j, pt(x))
    rng = random.Random(2)
    elems = [random_group_ring(rng, 12) for _ in range(3)]
    elems.append(GroupRingElement.e(1, 4))
    for a in elems:
        for n in range(1, 13):
            for m in range(1, 13):
                ok &= rho(n, rho(m, a)) == rho(n * m, a)
    for n in (3, 4, 5, 8, 12):
        ok &= all(check_resolution(n).values())
    return ok, "; ".join(notes), 30.0


def criterion_2():
    fam = monomial_family(8)
    trunc = GnsTruncation(10 ** 5)
    ok, worst = True, 0.0
    for beta in (1.5, 2.0, 3.0):
        for x in fam:
            for y in fam:
                rep = kms_verify(x, y, beta, [0.0, 1.0, 5.0], trunc)
                ok &= rep.passed
                worst = max(worst, rep.max_residual)
    closed = kms_verify(CrossedElement.U(2), CrossedElement.Ustar(2), 2.0, [0.0, 1.0, 5.0], trunc)
    ok &= closed.max_residual <= 1e-12
    return ok, (f"{len(fam) ** 2} pairs x 3 beta, max residual {worst:.2e}, "
                f"closed form {closed.max_residual:.2e}"), 120.0


def criterion_3():
    z, tail = partition_function(2.0, 10 ** 6)
    diff = abs(z - math.pi ** 2 / 6)
    return diff <= 1e-6 and diff <= tail, f"|diff| {diff:.9e}, tail bound {tail:.9e}", None


def criterion_4():
    norm = af.pv_f0_over_f1().value
    err = abs(norm - 2 * (math.log(2 * math.pi) + EULER))
    worst = 0.0
    for n in (0, 1, -1, 2, -2):
        for s in (0.0, 1.0, 5.0, 20.0):
            a = af.weil_pv(af.PrincipalValueSpec(n, s, "WeilCutoff")).value
            b = af.weil_pv(af.PrincipalValueSpec(n, s, "MinimalSubtraction")).value
            worst = max(worst, abs(a - b))
    return err <= 1e-6 and worst <= 1e-6, f"normalization {err:.2e}, scheme gap {worst:.2e}", None


def criterion_5():
    H = af.HodgeStructure
    worst = 0.0
    for p, q in ((0, 0), (1, 0), (1, 1), (2, 0)):
        h = H(p + q, {(p, q): 1, (q, p): 1})
        for s in (0.0, 1.0, 2.0, 10.0):
            worst = max(worst, af.lefschetz_complex(h, s).diff)
    real = [H.point(), H.elliptic_h1(), H(2, {(1, 1): 1}, {1: (1, 0)}),
            H(2, {(1, 1): 1}, {1: (0, 1)})]
    for h in real:
        for s in (0.0, 1.0, 2.0):
            worst = max(worst, af.lefschetz_real(h, s).diff)
    j_err = abs(af.j_part_integral(0.0) - math.pi)
    return worst <= 1e-6 and j_err <= 1e-8, f"max diff {worst:.2e}, j-part {j_err:.2e}", None


def criterion_6():
    below30 = sp.zeta_zeros(30).ordinates
    ok = len(below30) == 3 and abs(below30[0] - 14.134725) <= 1e-4
    parts = []
    for E in (30.0, 50.0, 100.0):
        avg = af.zero_count_average(af.HodgeStructure.point(), ["real"], E)
        located = len(sp.zeta_zeros(E))
        ok &= abs(avg - located) <= 1
        parts.append(f"E={E:g}: {avg:.3f} vs {located}")
    return ok, f"gamma_1 {below30[0]:.9f}; " + ", ".join(parts), None


def criterion_7():
    worst = 0.0
    for xi in sp.factorization_family():
        for f in sp.l_factorization(xi, [2, 3, 2 + 5j]):
            worst = max(worst, f.difference / (1 + abs(f.lhs)))
    zeros = sp.zeta_zeros(40).ordinates
    good = sp.TestFunction(sp.alternating(sp.log_gaussian(0.15)), 1,
                           lam_max=sp.gaussian_lam_max(0.15))
    van = sp.vanishing_check(good, zeros, 5, subtract=False)
    bad = sp.TestFunction(sp.log_gaussian(0.15), 1, lam_max=sp.gaussian_lam_max(0.15))
    ctrl_van = sp.vanishing_check(bad, zeros, 5, subtract=False, enforce=False)
    at_zero = sp.TestFunction(lambda lam: np.exp(-lam), 1, lam_max=60)
    ctrl_poisson = sp.poisson_residual(at_zero, [1e-3, 3e-3, 1e-2, 3e-2])
    ok = (worst <= 1e-6 and van.passed and len(van.ordinates) == 5
          and not ctrl_van.passed and not ctrl_poisson.passed)
    return ok, (f"factorization {worst:.2e}, vanishing {np.max(van.ratios):.2e}, "
                f"controls {np.min(ctrl_van.ratios):.2e} / decay "
                f"{ctrl_poisson.decay_exponent:.2f}"), None


def criterion_8():
    z200 = sp.zeta_zeros(200).ordinates
    z500 = sp.zeta_zeros(500).ordinates
    narrow = max(ex.balance(h, z500, 1e-6).residual for h in ex.narrow_family())
    gauss = max(ex.balance(h, z200, 1e-3).residual for h in ex.gaussian_family())
    rng = np.random.default_rng(0)
    pos = min(ex.weil_positivity(ex.random_gaussian_mixture(rng)).real for _ in range(20))
    ok = narrow <= 1e-6 and gauss <= 1e-3 and pos >= -1e-6
    return ok, f"narrow {narrow:.2e}, gaussian {gauss:.2e}, positivity min {pos:.3e}", 300.0


CRITERIA = {n: globals()[f"criterion_{n}"] for n in range(1, 9)}


def evaluate(n):
    start = time.perf_counter()
    ok, detail, limit = CRITERIA[n]()
    elapsed = time.perf_counter() - start
    if limit is not None and elapsed > limit:
        ok = False
        detail += f"; over the {limit:g} s limit"
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({elapsed:.1f} s; {detail})"
    return bool(ok), line


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n, capsys):
    ok, line = evaluate(n)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [evaluate(n) for n in sorted(CRITERIA)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
