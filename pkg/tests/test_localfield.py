from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ltcycles.errors import DomainError, PrecisionExhausted
from ltcycles.localfield import (INF, FieldDesc, QuadExt, Scalar, disc_norm, eta_unramified,
                                 smallest_nonresidue, teichmuller, vp)

F3 = FieldDesc(3)
F5 = FieldDesc(5)

# kept well inside the rational-reconstruction range sqrt(p^N / 2)
rationals = st.fractions(min_value=-10**4, max_value=10**4, max_denominator=10**3)
nonzero = rationals.filter(lambda x: x != 0)


def test_vp_and_nonresidues():
    assert vp(54, 3) == 3
    assert vp(7, 3) == 0
    assert smallest_nonresidue(3) == 2
    assert smallest_nonresidue(7) == 3
    assert smallest_nonresidue(17) == 3


@given(rationals, rationals)
def test_ring_ops_match_rationals(x, y):
    a, b = F3(x), F3(y)
    assert (a + b).to_rational() == x + y
    assert (a - b).to_rational() == x - y
    assert (a * b).to_rational() == x * y


@given(nonzero)
def test_valuation_and_inverse(x):
    a = F5(x)
    assert a.valuation() == vp(x.numerator, 5) - vp(x.denominator, 5)
    assert (a * a.inverse()) == F5.one()
    assert (a / a).to_rational() == 1


def test_exact_zero_and_inexact_zero():
    z = F3.zero()
    assert z.is_exact_zero() and z.valuation() == INF
    a = F3(Fraction(1, 3))
    d = a - a
    assert d.is_zero()
    w = Scalar.inexact_zero(F3, 5)
    assert w.is_zero() and not w.is_exact_zero()
    with pytest.raises(PrecisionExhausted):
        w.valuation()


def test_rational_reconstruction():
    F = FieldDesc(3, 8)
    assert Scalar.from_int_mod(F, pow(7, -1, 3 ** 8), 8).to_rational() == Fraction(1, 7)
    # 1/7 + 3^7 has no representative with numerator and denominator below sqrt(3^8 / 2)
    x = Scalar.from_int_mod(F, (pow(7, -1, 3 ** 8) * 40 + 3 ** 4 * 11) % 3 ** 8, 8)
    with pytest.raises(DomainError):
        x.to_rational()


def test_teichmuller_is_root_of_unity():
    for p in (3, 5, 7):
        F = FieldDesc(p)
        for a in range(1, p):
            t = teichmuller(F, a)
            assert t ** (p - 1) == F.one()
            d = t - F(a)
            assert d.is_zero() or d.valuation() >= 1


@pytest.mark.parametrize("kind", ["unramified", "ramified"])
@settings(max_examples=40)
@given(rationals, rationals, rationals, rationals)
def test_quadratic_norm_is_multiplicative(kind, a, b, c, d):
    K = QuadExt(F5, kind)
    x, y = K(a, b), K(c, d)
    assert (x * y).norm() == x.norm() * y.norm()
    assert (x * y).conj() == x.conj() * y.conj()
    assert x.trace() == x + x.conj()
    if not x.is_zero():
        assert x * x.inverse() == K.one()


def test_norm_closed_forms():
    K = QuadExt(F3, "unramified")
    th = K.gen()
    # theta^2 is the Teichmuller lift of 2 (== -1 mod 3)
    assert (th * th).in_base() == teichmuller(F3, 2)
    R = QuadExt(F3, "ramified", 2)
    assert R.gen().norm().to_rational() == -6
    assert R.gen().valuation() == 1
    assert K.disc_val == 0 and R.disc_val == 1


def test_unramified_norms_have_even_valuation():
    K = QuadExt(F5, "unramified")
    for a in range(-6, 7):
        for b in range(-6, 7):
            if a or b:
                v = K(a, b).norm().valuation()
                assert v % 2 == 0
                assert eta_unramified(K(a, b).norm()) == 1
    assert eta_unramified(F5(5)) == -1


def test_disc_norm():
    assert disc_norm(QuadExt(F3, "unramified"), 2) == 1
    assert disc_norm(QuadExt(F3, "ramified"), 2) == 81


def test_ramified_twist_must_be_unit():
    with pytest.raises(DomainError):
        QuadExt(F3, "ramified", 3)
