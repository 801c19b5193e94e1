"""Capped relative precision arithmetic in Q_p and its quadratic extensions.

A nonzero :class:`Scalar` is ``p**val * unit`` where ``unit`` is known modulo
``p**prec``.  An exact zero has ``val = INF``.  A value whose digits were all
lost to cancellation is an *inexact zero*: ``unit = 0``, ``prec = 0`` and
``val`` records the absolute precision.  Asking for the valuation or the
inverse of an inexact zero raises :class:`PrecisionExhausted`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
import math

from .errors import DomainError, PrecisionExhausted

INF = math.inf


def vp(n: int, p: int) -> int:
    """Valuation of a nonzero integer."""
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def smallest_nonresidue(p: int) -> int:
    for a in range(2, p):
        if pow(a, (p - 1) // 2, p) == p - 1:
            return a
    raise DomainError(f"no non-residue mod {p}")


@dataclass(frozen=True)
class FieldDesc:
    """The base field Q_p, with ``N`` significant digits retained."""

    p: int
    N: int = 64
    guard: int = 8

    def __post_init__(self):
        if self.p < 3 or not is_prime(self.p):
            raise DomainError(f"p must be an odd prime, got {self.p}")
        if self.N < 8:
            raise DomainError(f"precision cap must be at least 8, got {self.N}")

    @property
    def q(self) -> int:
        return self.p

    @cached_property
    def pN(self) -> int:
        return self.p ** self.N

    def __call__(self, x) -> "Scalar":
        return Scalar.coerce(self, x)

    def zero(self) -> "Scalar":
        return Scalar(self, INF, 0, self.N)

    def one(self) -> "Scalar":
        return Scalar(self, 0, 1, self.N)

    def uniformizer(self) -> "Scalar":
        return Scalar(self, 1, 1, self.N)

    def with_precision(self, N: int) -> "FieldDesc":
        return FieldDesc(self.p, N, self.guard)


def parse_rational(x) -> Fraction:
    """Accept ints, Fractions and strings like ``"-3/4"``."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot read {x!r} as a rational")


class Scalar:
    __slots__ = ("F", "val", "unit", "prec")

    def __init__(self, F: FieldDesc, val, unit: int, prec: int):
        self.F = F
        self.val = val
        self.unit = unit
        self.prec = prec

    def zero_like(self) -> "Scalar":
        return self.F.zero()

    def one_like(self) -> "Scalar":
        return self.F.one()

    # construction

    @staticmethod
    def coerce(F: FieldDesc, x) -> "Scalar":
        if isinstance(x, Scalar):
            return x
        if isinstance(x, bool):
            raise TypeError("bool is not a field element")
        return Scalar.from_rational(F, parse_rational(x))

    @staticmethod
    def from_rational(F: FieldDesc, x: Fraction, prec: int | None = None) -> "Scalar":
        if x == 0:
            return F.zero()
        p = F.p
        num, den = x.numerator, x.denominator
        v = 0
        while num % p == 0:
            num //= p
            v += 1
        while den % p == 0:
            den //= p
            v -= 1
        prec = F.N if prec is None else min(prec, F.N)
        mod = p ** prec
        return Scalar(F, v, num * pow(den, -1, mod) % mod, prec)

    @staticmethod
    def from_int_mod(F: FieldDesc, n: int, abs_prec: int) -> "Scalar":
        """The integer ``n`` known modulo ``p**abs_prec``."""
        p = F.p
        n %= p ** abs_prec
        if n == 0:
            return Scalar(F, abs_prec, 0, 0)
        v = vp(n, p)
        r = abs_prec - v
        return Scalar(F, v, (n // p ** v) % p ** r, r)

    @staticmethod
    def inexact_zero(F: FieldDesc, abs_prec) -> "Scalar":
        if abs_prec == INF:
            return F.zero()
        return Scalar(F, abs_prec, 0, 0)

    # inspection

    def is_exact_zero(self) -> bool:
        return self.val == INF

    def is_zero(self) -> bool:
        """True for exact zeros and for values indistinguishable from zero."""
        return self.val == INF or self.prec == 0

    def abs_prec(self):
        return INF if self.val == INF else self.val + self.prec

    def valuation(self):
        if self.val == INF:
            return INF
        if self.prec == 0:
            raise PrecisionExhausted(f"valuation of a value known only mod p^{self.val}")
        return self.val

    def lift(self) -> Fraction:
        """A rational representative (exact when the value is a p-adic integer read mod p^prec)."""
        if self.val == INF or self.prec == 0:
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.F.p) ** self.val

    def residue_digits(self) -> int:
        """Integer ``n`` with self = n mod p^abs_prec, for values in Z_p."""
        if self.val == INF:
            return 0
        if self.val < 0:
            raise DomainError("value is not integral")
        return self.unit * self.F.p ** self.val

    def to_rational(self) -> Fraction:
        """Rational reconstruction of the value from its known digits.

        Returns the unique fraction a/b with |a|, |b| below the square root of
        the modulus agreeing with the digits, or raises DomainError.
        """
        if self.val == INF or self.prec == 0:
            return Fraction(0)
        m = self.F.p ** self.prec
        u = self.unit
        bound = math.isqrt(m // 2)
        r0, r1 = m, u
        s0, s1 = 0, 1
        while r1 > bound:
            qq = r0 // r1
            r0, r1 = r1, r0 - qq * r1
            s0, s1 = s1, s0 - qq * s1
        if s1 == 0 or abs(s1) > bound or math.gcd(s1, m) != 1:
            raise DomainError("value has no small rational representative")
        return Fraction(r1, s1) * Fraction(self.F.p) ** self.val

    # arithmetic

    def _co(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            return other
        return Scalar.coerce(self.F, other)

    def __neg__(self) -> "Scalar":
        if self.prec == 0 or self.val == INF:
            return self
        return Scalar(self.F, self.val, (-self.unit) % self.F.p ** self.prec, self.prec)

    def __add__(self, other) -> "Scalar":
        if not isinstance(other, Scalar):
            if isinstance(other, ExtScalar):
                return NotImplemented
            other = self._co(other)
        if self.val == INF:
            return other
        if other.val == INF:
            return self
        p = self.F.p
        ab = min(self.val + self.prec, other.val + other.prec)
        vmin = min(self.val, other.val)
        rel = ab - vmin
        if rel <= 0:
            return Scalar(self.F, ab, 0, 0)
        mod = p ** rel
        x = (self.unit * p ** (self.val - vmin) + other.unit * p ** (other.val - vmin)) % mod
        if x == 0:
            return Scalar(self.F, ab, 0, 0)
        v = 0
        while x % p == 0:
            x //= p
            v += 1
        return Scalar(self.F, vmin + v, x, rel - v)

    __radd__ = __add__

    def __sub__(self, other) -> "Scalar":
        if isinstance(other, ExtScalar):
            return NotImplemented
        return self + (-self._co(other))

    def __rsub__(self, other) -> "Scalar":
        return self._co(other) + (-self)

    def __mul__(self, other) -> "Scalar":
        if not isinstance(other, Scalar):
            if isinstance(other, ExtScalar):
                return NotImplemented
            other = self._co(other)
        if self.val == INF or other.val == INF:
            return self.F.zero()
        prec = min(self.prec, other.prec)
        if prec == 0:
            return Scalar(self.F, self.val + other.val, 0, 0)
        return Scalar(self.F, self.val + other.val,
                      self.unit * other.unit % self.F.p ** prec, prec)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if self.val == INF:
            raise ZeroDivisionError("inverse of exact zero")
        if self.prec == 0:
            raise PrecisionExhausted("inverse of a value indistinguishable from zero")
        return Scalar(self.F, -self.val, pow(self.unit, -1, self.F.p ** self.prec), self.prec)

    def __truediv__(self, other) -> "Scalar":
        if isinstance(other, ExtScalar):
            return NotImplemented
        return self * self._co(other).inverse()

    def __rtruediv__(self, other) -> "Scalar":
        return self._co(other) * self.inverse()

    def __pow__(self, n: int) -> "Scalar":
        if n < 0:
            return self.inverse() ** (-n)
        if self.val == INF:
            return self.F.one() if n == 0 else self
        if n == 0:
            return self.F.one()
        if self.prec == 0:
            return Scalar(self.F, self.val * n, 0, 0)
        return Scalar(self.F, self.val * n, pow(self.unit, n, self.F.p ** self.prec), self.prec)

    def __eq__(self, other) -> bool:
        if isinstance(other, ExtScalar):
            return other == self
        try:
            other = self._co(other)
        except TypeError:
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self) -> str:
        if self.val == INF:
            return "0"
        if self.prec == 0:
            return f"O(p^{self.val})"
        try:
            r = self.to_rational()
            return f"{r} + O(p^{self.abs_prec()})"
        except (DomainError, PrecisionExhausted):
            return f"p^{self.val}*{self.unit} + O(p^{self.abs_prec()})"


def sc_norm_abs(x: Scalar) -> Fraction:
    """|x| = q^(-v(x)); 0 for zero."""
    v = x.valuation()
    if v == INF:
        return Fraction(0)
    return Fraction(x.F.p) ** (-v)


def teichmuller(F: FieldDesc, a: int) -> Scalar:
    """The (p-1)-th root of unity congruent to ``a`` mod p."""
    if a % F.p == 0:
        raise DomainError("Teichmuller lift of a non-unit")
    m = F.pN
    t = a % F.p
    for _ in range(F.N + 1):
        nxt = pow(t, F.p, m)
        if nxt == t:
            break
        t = nxt
    return Scalar(F, 0, t, F.N)


@dataclass(frozen=True)
class QuadExt:
    """A quadratic extension K = F(theta), theta**2 = gen_sq.

    ``kind`` is ``"unramified"`` (theta = mu, mu**2 a Teichmuller non-residue)
    or ``"ramified"`` (theta**2 = p*u).
    """

    F: FieldDesc
    kind: str
    u: int = 1
    gen_sq: Scalar = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if self.kind == "unramified":
            nu = teichmuller(self.F, smallest_nonresidue(self.F.p))
            object.__setattr__(self, "gen_sq", nu)
        elif self.kind == "ramified":
            if self.u % self.F.p == 0:
                raise DomainError("ramified twist must be a unit")
            object.__setattr__(self, "gen_sq", Scalar.from_rational(self.F, Fraction(self.F.p * self.u)))
        else:
            raise DomainError(f"unknown extension kind {self.kind!r}")

    @property
    def disc_val(self) -> int:
        return 0 if self.kind == "unramified" else 1

    @property
    def ramified(self) -> bool:
        return self.kind == "ramified"

    def __call__(self, a=0, b=0) -> "ExtScalar":
        return ExtScalar(self, self.F(a), self.F(b))

    def coerce(self, x) -> "ExtScalar":
        if isinstance(x, ExtScalar):
            return x
        if isinstance(x, (tuple, list)):
            return self(*x)
        return ExtScalar(self, self.F(x), self.F.zero())

    def gen(self) -> "ExtScalar":
        return ExtScalar(self, self.F.zero(), self.F.one())

    def zero(self) -> "ExtScalar":
        return ExtScalar(self, self.F.zero(), self.F.zero())

    def one(self) -> "ExtScalar":
        return ExtScalar(self, self.F.one(), self.F.zero())


class ExtScalar:
    """a + b*theta in K."""

    __slots__ = ("K", "a", "b")

    def __init__(self, K: QuadExt, a: Scalar, b: Scalar):
        self.K = K
        self.a = a
        self.b = b

    def zero_like(self) -> "ExtScalar":
        return self.K.zero()

    def one_like(self) -> "ExtScalar":
        return self.K.one()

    def _co(self, other) -> "ExtScalar":
        if isinstance(other, ExtScalar):
            return other
        return self.K.coerce(other)

    def __add__(self, other):
        o = self._co(other)
        return ExtScalar(self.K, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return ExtScalar(self.K, -self.a, -self.b)

    def __sub__(self, other):
        o = self._co(other)
        return ExtScalar(self.K, self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        return self._co(other) - self

    def __mul__(self, other):
        if isinstance(other, Scalar):
            return ExtScalar(self.K, self.a * other, self.b * other)
        o = self._co(other)
        a, b, c, d = self.a, self.b, o.a, o.b
        return ExtScalar(self.K, a * c + b * d * self.K.gen_sq, a * d + b * c)

    __rmul__ = __mul__

    def conj(self) -> "ExtScalar":
        return ExtScalar(self.K, self.a, -self.b)

    def norm(self) -> Scalar:
        return self.a * self.a - self.b * self.b * self.K.gen_sq

    def trace(self) -> Scalar:
        return self.a + self.a

    def inverse(self) -> "ExtScalar":
        n = self.norm()
        if n.is_exact_zero():
            raise ZeroDivisionError("inverse of exact zero")
        ni = n.inverse()
        return ExtScalar(self.K, self.a * ni, -(self.b * ni))

    def __truediv__(self, other):
        return self * self._co(other).inverse()

    def __rtruediv__(self, other):
        return self._co(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        r = self.K.one()
        for _ in range(n):
            r = r * self
        return r

    def is_zero(self) -> bool:
        return self.a.is_zero() and self.b.is_zero()

    def is_exact_zero(self) -> bool:
        return self.a.is_exact_zero() and self.b.is_exact_zero()

    def valuation(self):
        """v_F of the norm; twice the F-normalized valuation."""
        return self.norm().valuation()

    def in_base(self) -> Scalar:
        """The value as an element of F, if its theta-coordinate vanishes."""
        if not self.b.is_zero():
            from .errors import CoefficientNotRational
            raise CoefficientNotRational(f"{self!r} is not in the base field")
        return self.a

    def __eq__(self, other) -> bool:
        try:
            o = self._co(other)
        except TypeError:
            return NotImplemented
        return (self - o).is_zero()

    __hash__ = None

    def __repr__(self) -> str:
        return f"({self.a!r}) + ({self.b!r})*theta"


def ext_conj(x: ExtScalar) -> ExtScalar:
    return x.conj()


def ext_norm(x: ExtScalar) -> Scalar:
    return x.norm()


def ext_trace(x: ExtScalar) -> Scalar:
    return x.trace()


def eta_unramified(x: Scalar, K: QuadExt | None = None) -> int:
    """The quadratic character of F^x attached to the unramified extension."""
    if K is not None and K.ramified:
        raise DomainError("eta is defined here only for the unramified extension")
    v = x.valuation()
    if v == INF:
        raise DomainError("eta(0) is undefined")
    return -1 if v % 2 else 1


def disc_norm(K: QuadExt, h: int) -> Fraction:
    """|Disc_{K/F}|^(-h^2)."""
    return Fraction(K.F.p ** (K.disc_val * h * h))
