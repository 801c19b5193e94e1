import pytest

from ltcycles.errors import IrreducibilityUndecided
from ltcycles.linalg import Poly
from ltcycles.localfield import FieldDesc
from ltcycles.padicpoly import has_root, is_irreducible

F = FieldDesc(3)


def P(*cs):
    return Poly([F(c) for c in cs])


def test_linear_is_irreducible():
    assert is_irreducible(P(5, 1))


@pytest.mark.parametrize("coeffs,irr", [
    ((-3, 0, 1), True),        # Eisenstein
    ((1, 0, 1), True),         # X^2 + 1 has no root mod 3
    ((-1, 0, 1), False),       # (X - 1)(X + 1)
    ((-7, 0, 1), False),       # 7 = 1 mod 3 is a 3-adic square
    ((-9, 0, 1), False),
    ((-18, 0, 1), True),       # 18 = 9 * 2 and 2 is not a square mod 3
    ((-3, 0, 0, 1), True),
    ((2, 3, 0, 1), True),      # no root mod 3^8 (checked by enumeration)
    ((-8, 0, 0, 1), False),    # root 2
])
def test_small_degree_cases(coeffs, irr):
    poly = P(*coeffs)
    assert is_irreducible(poly) == irr
    assert has_root(poly) == (not irr)


def test_newton_polygon_slopes():
    assert is_irreducible(P(3, 0, 0, 0, 1))   # single slope 1/4


def test_degree_four_reducible_reduction_is_undecided():
    # (X^2 + 1)(X^2 + 2): reduction not irreducible, polygon flat
    poly = P(1, 0, 1) * P(2, 0, 1)
    with pytest.raises(IrreducibilityUndecided):
        is_irreducible(poly)


def test_degree_four_irreducible_reduction():
    # X^4 + X + 2 is irreducible over F_3
    assert is_irreducible(P(2, 1, 0, 0, 1))
