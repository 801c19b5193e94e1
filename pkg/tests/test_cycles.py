import random
from fractions import Fraction

import pytest

from ltcycles import samples
from ltcycles.cda import CyclicAlgebra, nrd_block
from ltcycles.cycles import (INFINITE, cond_tau, height_tau, infinite_level_intersection,
                             invariant_poly_j,
                             make_equi_pair, res_rel, res_rel_norm_oracle, res_abs_inv,
                             stable_level, stable_level_from, standard_tau, translate_tau)
from ltcycles.errors import DegenerateElement, HeightMismatch, InfiniteIntersection
from ltcycles.linalg import Poly, invariant_poly_tau, mat_det, matrix, xpm_decompose
from ltcycles.localfield import FieldDesc, QuadExt

F = FieldDesc(3)
KU = QuadExt(F, "unramified")
KR = QuadExt(F, "ramified")


def scaled(tau, z):
    return [[x * z for x in row] for row in tau]


@pytest.mark.parametrize("K", [KU, KR])
@pytest.mark.parametrize("h", [1, 2])
def test_height_and_conductor(K, h):
    t0 = standard_tau(K, h)
    assert height_tau(t0) == 0 and cond_tau(t0) == 0
    t1 = scaled(t0, K(3))
    assert height_tau(t1) == -2 * h
    assert cond_tau(t1) == 1
    g = [[F(1), F(2)] + [F(0)] * (2 * h - 2), [F(0), F(1)] + [F(0)] * (2 * h - 2)]
    g += [[F(0)] * (2 * h) for _ in range(2 * h - 2)]
    for i in range(2, 2 * h):
        g[i][i] = F(1)
    assert height_tau(translate_tau(g, t0)) == 0


def test_conductor_of_mixed_lattice():
    # M_tau = diag(1/3, 9): SNF exponents (-1, 2)
    th = KU.gen()
    tau = [[KU(Fraction(1, 3))], [th * KU(9)]]
    assert cond_tau(tau) == 2
    assert height_tau(tau) == -1


def test_equi_pairs():
    D = CyclicAlgebra(F, 1)
    pr = make_equi_pair(KU, standard_tau(KU, 1), D.one(), D=D)
    assert pr.height == 0
    tau = [[KU.one()], [KU.gen() * KU(Fraction(1, 3))]]
    pr = make_equi_pair(KU, tau, D.Pi(), D=D)
    assert pr.height == 1
    with pytest.raises(HeightMismatch):
        make_equi_pair(KU, standard_tau(KU, 1), D.scalar(3), D=D)


@pytest.mark.parametrize("K", [KU, KR])
def test_delta_norm_identity(K):
    D = CyclicAlgebra(F, 1)
    rng = random.Random(8)
    for _ in range(10):
        g = samples.random_integral_matrix(2, rng, 12)
        if mat_det(matrix(F, g)).is_zero():
            continue
        tau = translate_tau(matrix(F, g), standard_tau(K, 1))
        ht = height_tau(tau)
        pr = make_equi_pair(K, tau, D.Pi_power(ht), D=D)
        assert nrd_block(pr.delta).valuation() == K.disc_val


def test_res_rel_linear_example():
    pr = make_equi_pair(KU, standard_tau(KU, 1))
    Pj = Poly([F(-5), F(1)])
    g = matrix(F, [[1, 0], [0, 1]])
    # g = 1 has P_g = X - 1
    assert res_rel(Pj, g, pr).to_rational() == 4


def test_res_rel_quaternion_closed_form():
    pr = make_equi_pair(KU, standard_tau(KU, 1))
    D = pr.D
    rng = random.Random(9)
    for _ in range(15):
        a, b = samples.random_unit_fn(D, rng), samples.random_unit_fn(D, rng)
        j = D.from_fn(a) + D.from_fn(b) * D.Pi()
        g = matrix(F, samples.random_gl_O(2, 3, rng))
        xp, _ = xpm_decompose(g, pr)
        alpha = (F.one() - F(3) * (b / a).norm()).inverse()
        beta = xp[0][0].norm() / mat_det(g)
        assert res_rel(j, g, pr, strict=True) == alpha - beta


def test_res_rel_on_embedded_elements():
    pr = make_equi_pair(KU, standard_tau(KU, 1))
    D = pr.D
    j = D.from_fn(D.T.element([1, 1])) + D.Pi()
    z = KU(2, 1)
    nu = KU.gen_sq
    g = [[z.a, z.b * nu], [z.b, z.a]]
    assert invariant_poly_tau(g, pr).to_rationals() == [-1, 1]
    # Res(X - alpha, X - 1) = alpha - 1 = -P_j(1)
    assert res_rel(j, g, pr) == -invariant_poly_j(j, pr)(F.one())


@pytest.mark.parametrize("K", [KU, KR])
def test_norm_oracle_matches_resultant(K):
    D = CyclicAlgebra(F, 1)
    pr = make_equi_pair(K, standard_tau(K, 1), D=D)
    rng = random.Random(10)
    checked = 0
    for _ in range(10):
        j = samples.random_element(D, rng, 15)
        g = matrix(F, samples.random_integral_matrix(2, rng, 15))
        if mat_det(g).is_zero():
            continue
        try:
            r = res_rel(j, g, pr)
        except DegenerateElement:
            continue
        checked += 1
        assert res_abs_inv(r) == res_rel_norm_oracle(j, g, pr)
        # central scaling of j against g leaves the oracle unchanged
        jz = j * D.scalar(3)
        gz = [[x / F(3) for x in row] for row in g]
        assert res_rel_norm_oracle(jz, gz, pr) == res_rel_norm_oracle(j, g, pr)
    assert checked >= 5


def test_self_intersection_is_infinite():
    pr = make_equi_pair(KU, standard_tau(KU, 1))
    one = pr.D.one()
    g = matrix(F, [[1, 0], [0, 1]])
    assert res_rel_norm_oracle(one, g, pr) == INFINITE
    assert res_abs_inv(res_rel(one, g, pr)) == INFINITE
    with pytest.raises(InfiniteIntersection):
        infinite_level_intersection(pr, j=one)


@pytest.mark.parametrize("K", [KU, KR])
def test_infinite_level_quaternion(K):
    pr = make_equi_pair(K, standard_tau(K, 1))
    D = pr.D
    j = D.from_fn(D.T.element([1, 1])) + D.from_fn(D.T.element([2, 0])) * D.Pi()
    g = matrix(F, [[1, 1], [1, 2]])
    val = infinite_level_intersection(pr, g=g, j=j)
    assert val == 3 ** K.disc_val * res_abs_inv(res_rel(j, g, pr))


def test_stable_level_examples():
    assert stable_level_from(1, 1, 3, 0, 0) == 1
    assert stable_level_from(9, 1, 3, 0, 0) == 2
    assert stable_level_from(9, 1, 3, 1, 2) == 6
    assert stable_level_from(10, 1, 3, 0, 0) == 3


def test_stable_level_from_pairs():
    D = CyclicAlgebra(F, 1)
    pr = make_equi_pair(KU, standard_tau(KU, 1), D=D)
    pr2 = make_equi_pair(KR, standard_tau(KR, 1), D=D)
    N = stable_level(pr, pr2)
    length = infinite_level_intersection(pr, pr2)
    assert N == stable_level_from(length, 1, 3, 0, 0)
