import random
from fractions import Fraction

import pytest

from ltcycles import samples
from ltcycles.cda import (CyclicAlgebra, UnramifiedTower, cartan_snf_OD, embed_quadratic,
                          invariant_poly_D, is_irreducible_mod_p, nrd_block, pm_decompose,
                          smallest_irreducible)
from ltcycles.errors import NotIrreducible
from ltcycles.linalg import mat_mul
from ltcycles.localfield import FieldDesc, QuadExt

F3 = FieldDesc(3)
F5 = FieldDesc(5)


@pytest.fixture(scope="module", params=[1, 2])
def D(request):
    return CyclicAlgebra(F3, request.param)


def test_smallest_irreducible_mod_p():
    # ascending coefficients: X^2 + 1 over F_3, X^2 + X + 1 over F_5
    assert tuple(smallest_irreducible(3, 2)) == (1, 0, 1)
    assert tuple(smallest_irreducible(5, 2)) == (1, 1, 1)
    for p, n in [(3, 4), (7, 4), (5, 6)]:
        f = smallest_irreducible(p, n)
        assert len(f) == n + 1 and is_irreducible_mod_p(f, p)
    assert not is_irreducible_mod_p([2, 0, 1], 3)  # X^2 - 1


def test_frobenius_is_order_n():
    T = UnramifiedTower(F3, 4)
    x = T.element([2, 1, 0, 5])
    assert x.sigma(4) == x
    assert x.sigma(1) != x
    assert (x * x).sigma(1) == x.sigma(1) * x.sigma(1)
    # sigma reduces to the p-th power map
    assert (x.sigma(1) - x * x * x).valuation() >= 1


def test_defining_relations(D):
    rng = random.Random(1)
    a = samples.random_unit_fn(D, rng)
    Pi = D.Pi()
    assert Pi * D.from_fn(a) == D.from_fn(a.sigma(1)) * Pi
    assert D.Pi_power(D.n) == D.scalar(3)


def test_inverse_roundtrip(D):
    rng = random.Random(2)
    for _ in range(10):
        x = samples.random_element(D, rng)
        assert x * x.inverse() == D.one()
        assert x.inverse() * x == D.one()


def test_reduced_norm_examples():
    D = CyclicAlgebra(F3, 1)
    assert D.Pi().nrd().to_rational() == -3
    a = D.T.element([2, 1])
    assert D.from_fn(a).nrd() == a.norm()
    for h in (1, 2):
        Dh = CyclicAlgebra(F3, h)
        assert Dh.scalar(3).nrd().to_rational() == 3 ** (2 * h)
        assert Dh.scalar(3).valuation() == 2 * h
        assert Dh.Pi().valuation() == 1


def test_reduced_norm_multiplicative(D):
    rng = random.Random(3)
    for _ in range(8):
        x, y = samples.random_element(D, rng), samples.random_element(D, rng)
        assert (x * y).nrd() == x.nrd() * y.nrd()


@pytest.mark.parametrize("kind,u", [("unramified", 1), ("ramified", 1), ("ramified", 2)])
@pytest.mark.parametrize("h", [1, 2])
def test_embedding_is_an_algebra_map(kind, u, h):
    K = QuadExt(F3, kind, u)
    emb = embed_quadratic(K, h)
    rng = random.Random(4)
    for _ in range(10):
        x = K(rng.randint(-20, 20), rng.randint(-20, 20))
        y = K(rng.randint(-20, 20), rng.randint(1, 20))
        assert emb(x * y) == emb(x) * emb(y)
        # reduced norm of the image is Nm_K^h
        assert emb(y).nrd() == y.norm() ** h


def test_ramified_u1_generator_is_Pi():
    K = QuadExt(F3, "ramified")
    emb = embed_quadratic(K, 1)
    assert emb(K.gen()) == emb.D.Pi()


def test_pm_decompose_examples():
    K = QuadExt(F3, "unramified")
    emb = embed_quadratic(K, 1)
    D = emb.D
    jp, jm = pm_decompose(D.Pi(), emb)
    assert jp.is_zero() and jm == D.Pi()
    jp, jm = pm_decompose(emb(K(2, 5)), emb)
    assert jm.is_zero() and jp == emb(K(2, 5))


def test_pm_eigen_relations():
    K = QuadExt(F3, "unramified")
    emb = embed_quadratic(K, 2)
    D = emb.D
    rng = random.Random(5)
    th = emb.theta
    for _ in range(5):
        j = samples.random_element(D, rng)
        jp, jm = pm_decompose(j, emb)
        assert jp + jm == j
        assert th * jp == jp * th
        assert th * jm == -(jm * th)


def test_invariant_poly_examples():
    K = QuadExt(F3, "unramified")
    emb = embed_quadratic(K, 1)
    D = emb.D
    assert invariant_poly_D(emb(K(2, 7)), emb).to_rationals() == [-1, 1]
    assert invariant_poly_D(D.Pi(), emb).to_rationals() == [0, 1]
    with pytest.raises(NotIrreducible):
        invariant_poly_D(D.Pi(), emb, strict=True)


def test_invariant_poly_quaternion_closed_form():
    K = QuadExt(F3, "unramified")
    emb = embed_quadratic(K, 1)
    D = emb.D
    rng = random.Random(6)
    for _ in range(25):
        a = samples.random_unit_fn(D, rng)
        b = samples.random_unit_fn(D, rng)
        j = D.from_fn(a) + D.from_fn(b) * D.Pi()
        expect = (F3.one() - F3(3) * (b / a).norm()).inverse()
        assert invariant_poly_D(j, emb).coeffs[0] == -expect


def test_cartan_examples():
    D = CyclicAlgebra(F3, 1)
    Pi, one, zero = D.Pi(), D.one(), D.zero()
    _, _, _, exps = cartan_snf_OD([[Pi, zero], [zero, one]])
    assert list(exps) == [0, 1]
    U, T, V, exps = cartan_snf_OD([[Pi, one], [zero, one]])
    assert list(exps) == [0, 1]


def test_cartan_and_nrd_block_sweep():
    D = CyclicAlgebra(F3, 1)
    rng = random.Random(7)
    for _ in range(6):
        M = [[samples.random_element(D, rng, 6) for _ in range(2)] for _ in range(2)]
        N = [[samples.random_element(D, rng, 6) for _ in range(2)] for _ in range(2)]
        nM = nrd_block(M)
        if nM.is_zero():
            continue
        U, T, V, exps = cartan_snf_OD(M)
        assert sum(exps) == nM.valuation()
        assert nrd_block(mat_mul(M, N)) == nM * nrd_block(N)
    x = samples.random_element(D, rng)
    assert nrd_block([[x]]) == x.nrd()
    y = samples.random_element(D, rng)
    assert nrd_block([[x, D.zero()], [D.zero(), y]]) == x.nrd() * y.nrd()
