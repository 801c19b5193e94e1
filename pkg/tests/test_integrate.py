import random
from fractions import Fraction

import pytest

from ltcycles import samples
from ltcycles.cycles import make_equi_pair, res_rel, standard_tau
from ltcycles.errors import BudgetExceeded, DomainError, EnumerationTooLarge
from ltcycles.formula import resultant_integrand
from ltcycles.integrate import (ConstantIntegrand, ResFormIntegrand, ResPathIntegrand,
                                TestFunction, adaptive_integrate, c_closed, c_pair,
                                coset_representatives, decompose_double_coset,
                                deg_level_F, deg_level_K, double_coset_index, exhaustive_integrate,
                                frac_det, frac_inv, frac_mul, gl_order, in_R, vol_R)
from ltcycles.cycles import invariant_poly_j
from ltcycles.linalg import matrix
from ltcycles.localfield import FieldDesc, QuadExt

F = FieldDesc(3)
KU = QuadExt(F, "unramified")
KR = QuadExt(F, "ramified")


def test_level_degrees():
    assert deg_level_F(1, 1, 3) == 48
    assert deg_level_F(1, 2, 3) == 3888
    assert deg_level_F(1, 0, 3) == 1
    assert deg_level_K(KU, 1, 1) == 8
    assert deg_level_K(KR, 1, 1) == 6
    assert gl_order(2, 3) == 48
    assert vol_R(1, 2, 3) == Fraction(1, 3888)


def test_constants_examples():
    assert c_closed(KU, 1) == Fraction(3, 4)
    assert c_closed(KR, 1) == Fraction(4, 3)
    assert c_pair(KU, KU, 1) == Fraction(48, 64)


@pytest.mark.parametrize("p", [3, 5, 7])
@pytest.mark.parametrize("kind", ["unramified", "ramified"])
def test_constant_independent_of_level(p, kind):
    K = QuadExt(FieldDesc(p), kind)
    for h in (1, 2, 3, 4):
        c = c_closed(K, h)
        for m in (1, 2, 3):
            assert c_pair(K, K, h, m) == c


def test_constant_integrand():
    f = TestFunction(1, 2)
    assert adaptive_integrate(ConstantIntegrand(Fraction(5, 7)), f, 3).value == Fraction(5, 7)
    assert exhaustive_integrate(ConstantIntegrand(3), f, 3, 3) == 3


def test_test_function_validation():
    with pytest.raises(DomainError):
        TestFunction(1, 0, ((1, 1), (1, 1)))
    with pytest.raises(DomainError):
        TestFunction(1, -1)
    with pytest.raises(DomainError):
        TestFunction(1, 0, kind="triple")


def test_coset_counts():
    assert len(coset_representatives(1, 0, 1, 3)) == 48
    assert len(coset_representatives(1, 1, 2, 3)) == 81
    assert len(coset_representatives(1, 0, 2, 3)) == 3888
    with pytest.raises(EnumerationTooLarge):
        coset_representatives(1, 0, 3, 3, limit=1000)


@pytest.fixture(scope="module")
def pair():
    return make_equi_pair(KU, standard_tau(KU, 1))


def _strict_j(pair, seed, b_val=0):
    return samples.random_quaternion(pair.D, random.Random(seed), b_val)


@pytest.mark.parametrize("seed", [1, 2])
def test_adaptive_matches_both_exhaustive_routes(pair, seed):
    j = _strict_j(pair, seed)
    f = TestFunction(1, 0)
    ad = adaptive_integrate(resultant_integrand(j, pair), f, 3)
    alpha = -invariant_poly_j(j, pair, strict=True).coeffs[0]
    for m in (1, 2):
        assert exhaustive_integrate(ResFormIntegrand(alpha, pair), f, m, 3) == ad.value
    assert exhaustive_integrate(ResPathIntegrand(j, pair, True), f, 1, 3) == ad.value


def test_adaptive_value_denominator(pair):
    j = _strict_j(pair, 3, 1)
    v = adaptive_integrate(resultant_integrand(j, pair), TestFunction(1, 0), 3).value
    d = v.denominator
    while d % 3 == 0:
        d //= 3
    assert 48 % d == 0


def test_certificate_soundness(pair):
    j = _strict_j(pair, 4, 1)
    G = resultant_integrand(j, pair)
    res = adaptive_integrate(G, TestFunction(1, 0), 3, keep_cells=True)
    rng = random.Random(0)
    cells = rng.sample(res.certified, 6)
    for L, c, m, v in cells:
        for _ in range(20):
            pt = [x + 3 ** m * rng.randrange(9) for x in c]
            g = matrix(F, [pt[0:2], pt[2:4]])
            r = res_rel(j, g, pair)
            assert r.valuation() == v


def test_partition_soundness(pair):
    j = _strict_j(pair, 5, 1)
    res = adaptive_integrate(resultant_integrand(j, pair), TestFunction(1, 0), 3, keep_cells=True)
    vol = sum(Fraction(1, deg_level_F(1, m, 3)) for _, _, m, _ in res.certified)
    assert vol == 1


def test_budget_is_enforced(pair):
    j = _strict_j(pair, 6, 2)
    with pytest.raises(BudgetExceeded):
        adaptive_integrate(resultant_integrand(j, pair), TestFunction(1, 0), 3, budget=100)


def test_threads_do_not_change_results(pair):
    j = _strict_j(pair, 7, 2)
    G = resultant_integrand(j, pair)
    f = TestFunction(1, 0)
    a = adaptive_integrate(G, f, 3, threads=1)
    b = adaptive_integrate(G, f, 3, threads=8)
    assert (a.value, a.cells, a.max_depth) == (b.value, b.cells, b.max_depth)


def test_single_coset_support(pair):
    j = _strict_j(pair, 8)
    g0 = ((1, 0), (0, 1))
    f = TestFunction(1, 1, g0)
    ad = adaptive_integrate(resultant_integrand(j, pair), f, 3).value
    alpha = -invariant_poly_j(j, pair, strict=True).coeffs[0]
    assert exhaustive_integrate(ResFormIntegrand(alpha, pair), f, 2, 3) == ad
    # replacing g0 by g0 r with r in R_1 changes nothing
    f2 = TestFunction(1, 1, ((4, 3), (6, 1)))
    assert adaptive_integrate(resultant_integrand(j, pair), f2, 3).value == ad


@pytest.mark.parametrize("p", [3, 5])
def test_hecke_double_coset_counts(p):
    reps = decompose_double_coset(0, ((p, 0), (0, 1)), p)
    assert len(reps) == p + 1
    assert double_coset_index(0, ((p, 0), (0, 1)), p) == p + 1
    # distinct left cosets, all inside the double coset
    for i, x in enumerate(reps):
        d = frac_det(x)
        assert d.denominator == 1 and d.numerator % p == 0 and d.numerator % (p * p)
        for y in reps[:i]:
            assert not in_R(frac_mul(frac_inv(y), x), 0, p)


def test_double_coset_of_group_element_is_single():
    reps = decompose_double_coset(1, ((4, 3), (6, 1)), 3)
    assert len(reps) == 1


def test_double_coset_count_identity():
    # level 1, g0 = diag(3, 1): #reps equals the index computed from the stabilizer
    g0 = ((3, 0), (0, 1))
    assert len(decompose_double_coset(1, g0, 3)) == double_coset_index(1, g0, 3)
