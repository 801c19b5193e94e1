"""The division algebra D of invariant 1/n over Q_p, n = 2h.

D is the cyclic algebra (F_n/F, sigma, p): elements are sums a_i Pi^i with
a_i in the unramified extension F_n, Pi a = sigma(a) Pi and Pi^n = p.
Reduced norms come from the regular representation on right coordinates.
"""
from __future__ import annotations

from fractions import Fraction
from functools import cached_property
import itertools

from .errors import (DegenerateElement, DomainError, NotIrreducible, NotRational,
                     PrecisionExhausted, SingularMatrix)
from .linalg import Poly, identity, mat_charpoly, mat_det, mat_inv, mat_mul, snf
from .localfield import INF, ExtScalar, FieldDesc, QuadExt, Scalar
from . import padicpoly


# ---------------------------------------------------------------------------
# polynomials over Z/p^k, coefficient lists from the constant term up

def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _fp_divmod(a, b, p):
    a = _trim([x % p for x in a])
    b = _trim([x % p for x in b])
    inv = pow(b[-1], -1, p)
    qt = [0] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b):
        c = a[-1] * inv % p
        s = len(a) - len(b)
        qt[s] = c
        for i, y in enumerate(b):
            a[s + i] = (a[s + i] - c * y) % p
        a = _trim(a)
    return qt, a


def _fp_gcd(a, b, p):
    a, b = _trim([x % p for x in a]), _trim([x % p for x in b])
    while b:
        _, r = _fp_divmod(a, b, p)
        a, b = b, r
    return a


def _fp_mulmod(a, b, f, p):
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _fp_divmod(out, f, p)[1] if out else []


def _fp_powmod(a, e, f, p):
    result, base = [1], _fp_divmod(a, f, p)[1]
    while e:
        if e & 1:
            result = _fp_mulmod(result, base, f, p)
        base = _fp_mulmod(base, base, f, p)
        e >>= 1
    return result


def is_irreducible_mod_p(f, p) -> bool:
    """Rabin's test for a monic polynomial over F_p."""
    n = len(f) - 1
    if n == 1:
        return True
    primes = [d for d in range(2, n + 1) if n % d == 0 and all(d % e for e in range(2, d))]
    x = [0, 1]
    for d in primes:
        xp = _fp_powmod(x, p ** (n // d), f, p)
        diff = _trim([(a - b) % p for a, b in itertools.zip_longest(xp, x, fillvalue=0)])
        if len(_fp_gcd(f, diff, p)) > 1:
            return False
    xp = _fp_powmod(x, p ** n, f, p)
    diff = _trim([(a - b) % p for a, b in itertools.zip_longest(xp, x, fillvalue=0)])
    return not diff


def smallest_irreducible(p: int, n: int):
    for tail in itertools.product(range(p), repeat=n):
        f = list(tail) + [1]
        if f[0] % p == 0 and n > 1:
            continue
        if is_irreducible_mod_p(f, p):
            return tuple(f)
    raise DomainError("no irreducible polynomial found")


# ---------------------------------------------------------------------------

class UnramifiedTower:
    """F_n = Z_p[x]/(f) tensored with Q_p, with its Frobenius tables."""

    def __init__(self, F: FieldDesc, n: int):
        self.F = F
        self.n = n
        self.p = F.p
        self.modulus = smallest_irreducible(F.p, n)
        self.M = F.pN
        self._frob = self._frobenius_root()
        self.sigma_mats = self._sigma_tables()

    # raw ring Z/p^N[x]/(f)

    def _reduce(self, c, mod):
        f = self.modulus
        n = self.n
        c = list(c)
        for k in range(len(c) - 1, n - 1, -1):
            t = c[k]
            if t:
                for i in range(n):
                    c[k - n + i] -= t * f[i]
            c[k] = 0
        c = c[:n] + [0] * (n - len(c[:n]))
        return tuple(x % mod for x in c)

    def raw_mul(self, a, b, mod):
        out = [0] * (2 * self.n - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return self._reduce(out, mod)

    def raw_inv(self, a, mod):
        """Inverse of a unit in Z/mod[x]/(f), mod a power of p."""
        p = self.p
        g = _fp_gcd(self.modulus, a, p)
        if len(g) != 1:
            raise ZeroDivisionError("not a unit")
        # residue inverse via extended Euclid over F_p
        r0, r1 = _trim([x % p for x in self.modulus]), _trim([x % p for x in a])
        s0, s1 = [], [1]
        while r1:
            qt, r = _fp_divmod(r0, r1, p)
            prod = _fp_mul(qt, s1, p)
            s_new = _trim([(x - y) % p for x, y in itertools.zip_longest(s0, prod, fillvalue=0)])
            r0, r1, s0, s1 = r1, r, s1, s_new
        c = pow(r0[0], -1, p)
        y = tuple((x * c) % p for x in s0) + (0,) * (self.n - len(s0))
        y = self._reduce(y, mod)
        k = 1
        while True:
            k = min(2 * k, 10 ** 9)
            ay = self.raw_mul(a, y, mod)
            two_minus = tuple(((2 if i == 0 else 0) - v) % mod for i, v in enumerate(ay))
            y2 = self.raw_mul(y, two_minus, mod)
            if y2 == y:
                return y
            y = y2

    def _eval_f(self, r, mod):
        acc = (self.modulus[-1],) + (0,) * (self.n - 1)
        for c in reversed(self.modulus[:-1]):
            acc = self.raw_mul(acc, r, mod)
            acc = ((acc[0] + c) % mod,) + acc[1:]
        return acc

    def _eval_df(self, r, mod):
        f = self.modulus
        df = [i * f[i] for i in range(1, len(f))]
        acc = (df[-1],) + (0,) * (self.n - 1)
        for c in reversed(df[:-1]):
            acc = self.raw_mul(acc, r, mod)
            acc = ((acc[0] + c) % mod,) + acc[1:]
        return acc

    def _frobenius_root(self):
        """The root of f congruent to x^p, by Newton iteration mod p^N."""
        mod = self.M
        n = self.n
        if n == 1:
            return ((-self.modulus[0]) % mod,)
        x = (0, 1) + (0,) * (n - 2)
        r = (1,) + (0,) * (n - 1)
        for _ in range(self.p):
            r = self.raw_mul(r, x, mod)
        while True:
            fr = self._eval_f(r, mod)
            dfr = self._eval_df(r, mod)
            step = self.raw_mul(fr, self.raw_inv(dfr, mod), mod)
            r2 = tuple((a - b) % mod for a, b in zip(r, step))
            if r2 == r:
                return r
            r = r2

    def _sigma_tables(self):
        """Matrices of sigma^k on the power basis, k = 0..n-1 (column i = sigma^k(x^i))."""
        mod = self.M
        n = self.n
        mats = []
        root = (0, 1) + (0,) * (n - 2) if n > 1 else (0,)
        for k in range(n):
            cols = []
            pw = (1,) + (0,) * (n - 1)
            for i in range(n):
                cols.append(pw)
                pw = self.raw_mul(pw, root, mod)
            mats.append(tuple(tuple(cols[i][r] for i in range(n)) for r in range(n)))
            root = self._apply_poly(root, self._frob, mod)
        return mats

    def _apply_poly(self, c, r, mod):
        """Evaluate the polynomial with coefficients c at r."""
        acc = (0,) * self.n
        pw = (1,) + (0,) * (self.n - 1)
        for ci in c:
            if ci:
                acc = tuple((a + ci * b) % mod for a, b in zip(acc, pw))
            pw = self.raw_mul(pw, r, mod)
        return acc

    # elements

    def element(self, coeffs) -> "FnElt":
        """Element from rational coordinates in the power basis."""
        F = self.F
        scal = [F(c) for c in coeffs] + [F.zero()] * (self.n - len(coeffs))
        return FnElt.from_coords(self, scal)

    def from_scalar(self, s: Scalar) -> "FnElt":
        if s.val == INF:
            return self.zero()
        return FnElt(self, s.val, (s.unit,) + (0,) * (self.n - 1), s.prec)

    def zero(self) -> "FnElt":
        return FnElt(self, INF, (0,) * self.n, self.F.N)

    def one(self) -> "FnElt":
        return FnElt(self, 0, (1,) + (0,) * (self.n - 1), self.F.N)

    def gen(self) -> "FnElt":
        if self.n == 1:
            return self.from_scalar(Scalar(self.F, 0, self._frob[0], self.F.N)) if self._frob[0] else self.zero()
        return FnElt(self, 0, (0, 1) + (0,) * (self.n - 2), self.F.N)

    def sqrt(self, s: Scalar) -> "FnElt":
        """A square root of a unit of F inside F_n, by Hensel lifting a residue root."""
        if s.valuation() != 0:
            raise DomainError("square root of a non-unit is not supported")
        p, n = self.p, self.n
        target = self.from_scalar(s)
        for cand in itertools.product(range(p), repeat=n):
            c = tuple(reversed(cand))
            if not any(c):
                continue
            sq = self.raw_mul(c, c, p)
            if sq == tuple(x % p for x in target.coeffs):
                break
        else:
            raise DomainError("no square root in this extension")
        y = FnElt(self, 0, c, self.F.N)
        two = self.from_scalar(self.F(2))
        for _ in range(2 * self.F.N.bit_length() + 2):
            y = y - (y * y - target) / (two * y)
        return y


def _fp_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


class FnElt:
    """p^val * (unit vector in the power basis), known modulo p^prec."""

    __slots__ = ("T", "val", "coeffs", "prec")

    def __init__(self, T: UnramifiedTower, val, coeffs, prec):
        self.T = T
        self.val = val
        self.coeffs = coeffs
        self.prec = prec

    @staticmethod
    def from_coords(T: UnramifiedTower, scal) -> "FnElt":
        nonzero = [s for s in scal if not s.is_exact_zero()]
        if not nonzero:
            return T.zero()
        ab = min(s.abs_prec() for s in scal)
        vmin = min(s.val for s in nonzero)
        if ab <= vmin:
            return FnElt(T, ab, (0,) * T.n, 0)
        p = T.p
        mod = p ** (ab - vmin)
        ints = []
        for s in scal:
            if s.is_exact_zero() or s.prec == 0:
                ints.append(0)
            else:
                ints.append(s.unit * p ** (s.val - vmin) % mod)
        return FnElt._normalize(T, vmin, ints, ab - vmin)

    @staticmethod
    def _normalize(T, v0, ints, rel):
        p = T.p
        if rel <= 0 or not any(ints):
            return FnElt(T, v0 + max(rel, 0), (0,) * T.n, 0)
        v = 0
        while all(x % p == 0 for x in ints):
            ints = [x // p for x in ints]
            v += 1
        rel -= v
        mod = p ** rel
        return FnElt(T, v0 + v, tuple(x % mod for x in ints), rel)

    def zero_like(self):
        return self.T.zero()

    def one_like(self):
        return self.T.one()

    def _co(self, other) -> "FnElt":
        if isinstance(other, FnElt):
            return other
        return self.T.from_scalar(self.T.F(other))

    def is_exact_zero(self) -> bool:
        return self.val == INF

    def is_zero(self) -> bool:
        return self.val == INF or self.prec == 0

    def abs_prec(self):
        return INF if self.val == INF else self.val + self.prec

    def valuation(self):
        if self.val == INF:
            return INF
        if self.prec == 0:
            raise PrecisionExhausted("valuation of an element indistinguishable from zero")
        return self.val

    def __neg__(self):
        if self.is_zero():
            return self
        mod = self.T.p ** self.prec
        return FnElt(self.T, self.val, tuple((-x) % mod for x in self.coeffs), self.prec)

    def __add__(self, other):
        other = self._co(other)
        if self.val == INF:
            return other
        if other.val == INF:
            return self
        p = self.T.p
        ab = min(self.abs_prec(), other.abs_prec())
        vmin = min(self.val, other.val)
        rel = ab - vmin
        if rel <= 0:
            return FnElt(self.T, ab, (0,) * self.T.n, 0)
        mod = p ** rel
        s1, s2 = p ** (self.val - vmin), p ** (other.val - vmin)
        ints = [(a * s1 + b * s2) % mod for a, b in zip(self.coeffs, other.coeffs)]
        return FnElt._normalize(self.T, vmin, ints, rel)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._co(other))

    def __rsub__(self, other):
        return self._co(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, CDAElement):
            return NotImplemented
        other = self._co(other)
        if self.val == INF or other.val == INF:
            return self.T.zero()
        prec = min(self.prec, other.prec)
        if prec == 0:
            return FnElt(self.T, self.val + other.val, (0,) * self.T.n, 0)
        c = self.T.raw_mul(self.coeffs, other.coeffs, self.T.p ** prec)
        return FnElt(self.T, self.val + other.val, c, prec)

    __rmul__ = __mul__

    def inverse(self):
        if self.val == INF:
            raise ZeroDivisionError("inverse of exact zero")
        if self.prec == 0:
            raise PrecisionExhausted("inverse of an element indistinguishable from zero")
        c = self.T.raw_inv(self.coeffs, self.T.p ** self.prec)
        return FnElt(self.T, -self.val, c, self.prec)

    def __truediv__(self, other):
        return self * self._co(other).inverse()

    def sigma(self, k: int = 1) -> "FnElt":
        k %= self.T.n
        if k == 0 or self.is_zero():
            return self
        mod = self.T.p ** self.prec
        S = self.T.sigma_mats[k]
        c = tuple(sum(S[r][i] * self.coeffs[i] for i in range(self.T.n)) % mod
                  for r in range(self.T.n))
        return FnElt(self.T, self.val, c, self.prec)

    def coordinates(self):
        """Coordinates in the power basis, as Scalars."""
        F = self.T.F
        if self.val == INF:
            return [F.zero()] * self.T.n
        return [_shift(Scalar.from_int_mod(F, c, self.prec), self.val) for c in self.coeffs]

    def in_base(self) -> Scalar:
        co = self.coordinates()
        if not all(x.is_zero() for x in co[1:]):
            raise NotRational("element of the unramified extension is not in F")
        return co[0]

    def norm(self) -> Scalar:
        acc = self
        for k in range(1, self.T.n):
            acc = acc * self.sigma(k)
        return acc.in_base()

    def __eq__(self, other):
        try:
            o = self._co(other)
        except TypeError:
            return NotImplemented
        return (self - o).is_zero()

    __hash__ = None

    def __repr__(self):
        if self.val == INF:
            return "0"
        return f"p^{self.val}*{list(self.coeffs)} + O(p^{self.abs_prec()})"


def _shift(s: Scalar, k: int) -> Scalar:
    if s.is_exact_zero():
        return s
    return Scalar(s.F, s.val + k, s.unit, s.prec)


# ---------------------------------------------------------------------------

class CyclicAlgebra:
    """D = (F_n/F, sigma, p) with n = 2h."""

    def __init__(self, F: FieldDesc, h: int):
        if h < 1:
            raise DomainError("h must be positive")
        self.F = F
        self.h = h
        self.n = 2 * h
        self.T = UnramifiedTower(F, self.n)
        self.pi_fn = self.T.from_scalar(F.uniformizer())

    def element(self, coeffs) -> "CDAElement":
        """From a list of n coefficient lists (power-basis rationals) or FnElts."""
        out = []
        for c in coeffs:
            if isinstance(c, FnElt):
                out.append(c)
            elif isinstance(c, (list, tuple)):
                out.append(self.T.element(c))
            else:
                out.append(self.T.from_scalar(self.F(c)))
        out += [self.T.zero()] * (self.n - len(out))
        return CDAElement(self, tuple(out))

    def scalar(self, s) -> "CDAElement":
        s = self.F(s)
        return CDAElement(self, (self.T.from_scalar(s),) + (self.T.zero(),) * (self.n - 1))

    def from_fn(self, a: FnElt) -> "CDAElement":
        return CDAElement(self, (a,) + (self.T.zero(),) * (self.n - 1))

    def zero(self) -> "CDAElement":
        return CDAElement(self, (self.T.zero(),) * self.n)

    def one(self) -> "CDAElement":
        return self.scalar(1)

    def Pi(self) -> "CDAElement":
        z = self.T.zero()
        return CDAElement(self, tuple(self.T.one() if i == 1 else z for i in range(self.n)))

    def Pi_power(self, k: int) -> "CDAElement":
        r = self.one()
        base = self.Pi() if k >= 0 else self.Pi().inverse()
        for _ in range(abs(k)):
            r = r * base
        return r


class CDAElement:
    __slots__ = ("D", "coeffs")

    def __init__(self, D: CyclicAlgebra, coeffs):
        self.D = D
        self.coeffs = tuple(coeffs)

    def zero_like(self):
        return self.D.zero()

    def one_like(self):
        return self.D.one()

    def _co(self, other) -> "CDAElement":
        if isinstance(other, CDAElement):
            return other
        if isinstance(other, FnElt):
            return self.D.from_fn(other)
        return self.D.scalar(other)

    def __add__(self, other):
        o = self._co(other)
        return CDAElement(self.D, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CDAElement(self.D, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        o = self._co(other)
        return CDAElement(self.D, tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        return self._co(other) - self

    def __mul__(self, other):
        o = self._co(other)
        n = self.D.n
        T = self.D.T
        pi = self.D.pi_fn
        out = [T.zero()] * n
        for i, a in enumerate(self.coeffs):
            if a.is_exact_zero():
                continue
            for j, b in enumerate(o.coeffs):
                if b.is_exact_zero():
                    continue
                term = a * b.sigma(i)
                k = i + j
                if k >= n:
                    k -= n
                    term = term * pi
                out[k] = out[k] + term
        return CDAElement(self.D, out)

    def __rmul__(self, other):
        return self._co(other) * self

    def regular_rep(self):
        """Matrix of left multiplication on right coordinates.

        Entry (r, c) is sigma^-r(a_{(r-c) mod n}) times p when r < c.
        """
        n = self.D.n
        pi = self.D.pi_fn
        M = []
        for r in range(n):
            row = []
            for c in range(n):
                e = self.coeffs[(r - c) % n].sigma(-r)
                if r < c:
                    e = e * pi
                row.append(e)
            M.append(row)
        return M

    def nrd(self) -> Scalar:
        return mat_det(self.regular_rep()).in_base()

    def valuation(self):
        return self.nrd().valuation()

    def is_zero(self) -> bool:
        return all(a.is_zero() for a in self.coeffs)

    def is_exact_zero(self) -> bool:
        return all(a.is_exact_zero() for a in self.coeffs)

    def inverse(self) -> "CDAElement":
        if self.is_exact_zero():
            raise ZeroDivisionError("inverse of exact zero")
        n = self.D.n
        try:
            Minv = mat_inv(self.regular_rep())
        except SingularMatrix as exc:
            raise PrecisionExhausted("element indistinguishable from zero") from exc
        beta = [Minv[i][0] for i in range(n)]
        return CDAElement(self.D, tuple(beta[i].sigma(i) for i in range(n)))

    def __truediv__(self, other):
        return self * self._co(other).inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        r = self.D.one()
        for _ in range(k):
            r = r * self
        return r

    def __eq__(self, other):
        try:
            o = self._co(other)
        except TypeError:
            return NotImplemented
        return (self - o).is_zero()

    __hash__ = None

    def coordinates(self):
        """F-coordinates: for each Pi-power i, the power-basis coordinates of a_i."""
        out = []
        for a in self.coeffs:
            out.extend(a.coordinates())
        return out

    def __repr__(self):
        return " + ".join(f"({a!r})*Pi^{i}" for i, a in enumerate(self.coeffs) if not a.is_exact_zero()) or "0"


def cda_mul(x: CDAElement, y: CDAElement) -> CDAElement:
    return x * y


def cda_inv(x: CDAElement) -> CDAElement:
    return x.inverse()


def cda_nrd(x: CDAElement) -> Scalar:
    return x.nrd()


def cda_val(x: CDAElement) -> int:
    v = x.valuation()
    if v == INF:
        raise DomainError("valuation of zero")
    return v


# ---------------------------------------------------------------------------

class Embedding:
    """An F-algebra embedding K -> D, determined by the image of the generator."""

    def __init__(self, K: QuadExt, D: CyclicAlgebra, theta: CDAElement):
        self.K = K
        self.D = D
        self.theta = theta
        self.theta_inv = theta.inverse()

    def __call__(self, x) -> CDAElement:
        x = self.K.coerce(x)
        return self.D.scalar(x.a) + self.D.scalar(x.b) * self.theta

    def conjugated(self, phi: CDAElement) -> "Embedding":
        """The embedding k -> phi k phi^-1."""
        return Embedding(self.K, self.D, phi * self.theta * phi.inverse())


def embed_quadratic(K: QuadExt, h: int, D: CyclicAlgebra | None = None) -> Embedding:
    F = K.F
    if D is None:
        D = CyclicAlgebra(F, h)
    if K.kind == "unramified":
        theta = D.from_fn(D.T.sqrt(K.gen_sq))
    else:
        c = _ramified_unit(D, K.u)
        theta = D.Pi_power(h) * D.from_fn(c)
    if not (theta * theta == D.scalar(K.gen_sq)):
        raise DomainError("embedding check failed")
    return Embedding(K, D, theta)


def _ramified_unit(D: CyclicAlgebra, u: int) -> FnElt:
    """A unit c of F_n with c * sigma^h(c) = u, so that (Pi^h c)^2 = p u."""
    T = D.T
    h = D.h
    target = T.from_scalar(D.F(u))
    if u == 1:
        return T.one()
    p = T.p
    found = None
    for cand in itertools.product(range(p), repeat=T.n):
        if not any(cand):
            continue
        c = FnElt(T, 0, tuple(cand), 1)
        if (c * c.sigma(h) - target).is_zero():
            found = tuple(cand)
            break
    if found is None:
        raise DomainError("no unit with the required relative norm")
    c = FnElt(T, 0, found, D.F.N)
    half = T.from_scalar(D.F(Fraction(1, 2)))
    for _ in range(2 * D.F.N.bit_length() + 2):
        e = c * c.sigma(h) / target - 1
        if e.is_zero():
            break
        c = c * (T.one() - e * half)
    if not (c * c.sigma(h) == target):
        raise DomainError("relative norm refinement failed")
    return c


def pm_decompose(j: CDAElement, emb: Embedding):
    """(j+, j-) with j+ commuting with K and j- conjugating K."""
    jc = emb.theta * j * emb.theta_inv
    half = j.D.F(Fraction(1, 2))
    jp = (j + jc) * j.D.scalar(half)
    jm = (j - jc) * j.D.scalar(half)
    return jp, jm


def invariant_element_D(j: CDAElement, emb: Embedding) -> CDAElement:
    """j' = j+ (j+ - j-)^-1 j+ (j+ + j-)^-1."""
    jp, jm = pm_decompose(j, emb)
    try:
        a = (jp - jm).inverse()
        b = (jp + jm).inverse()
    except (ZeroDivisionError, PrecisionExhausted) as exc:
        raise DegenerateElement("j+ - j- or j+ + j- is not invertible") from exc
    return jp * a * jp * b


def poly_sqrt(Q: Poly) -> Poly:
    """The monic square root of a monic polynomial of even degree."""
    m = Q.degree
    if m % 2:
        raise NotRational("odd degree has no square root")
    h = m // 2
    c = Q.coeffs
    one = c[-1].one_like()
    half = one / 2
    P = [None] * (h + 1)
    P[h] = one
    for k in range(1, h + 1):
        # coefficient of X^(2h-k) in P^2
        s = c[m - k]
        for i in range(h - k + 1, h + 1):
            jj = m - k - i
            if h - k < jj <= h:
                s = s - P[i] * P[jj]
        P[h - k] = s * half
    R = Poly(P)
    if not (R * R == Q):
        raise NotRational("characteristic polynomial is not a square")
    return R


def invariant_poly_D(j: CDAElement, emb: Embedding, strict: bool = False) -> Poly:
    """Invariant polynomial of j: the reduced characteristic polynomial of j'.

    The characteristic polynomial of j' in the regular representation over
    F_n is the square of the reduced characteristic polynomial (degree h)
    of j' viewed in the centralizer of K.  Strict mode also demands that the
    result is irreducible and that j+ and j- are both nonzero, the conditions
    under which the intersection integrand never vanishes.
    """
    jp, jm = pm_decompose(j, emb)
    jprime = invariant_element_D(j, emb)
    if jprime.is_zero():
        h = j.D.h
        F = j.D.F
        P = Poly([F.zero()] * h + [F.one()])
    else:
        Q = mat_charpoly(jprime.regular_rep())
        Q = Poly([c.in_base() for c in Q.coeffs])
        P = poly_sqrt(Q)
    if strict:
        if jp.is_zero() or jm.is_zero():
            raise NotIrreducible("j+ or j- vanishes")
        if not padicpoly.is_irreducible(P):
            raise NotIrreducible("invariant polynomial is reducible")
    return P


# ---------------------------------------------------------------------------
# matrices over D

def nrd_block(M) -> Scalar:
    """Reduced norm of a square matrix over D via the full split representation."""
    h2 = len(M)
    n = M[0][0].D.n
    big = [[None] * (h2 * n) for _ in range(h2 * n)]
    for r in range(h2):
        for c in range(h2):
            R = M[r][c].regular_rep()
            for i in range(n):
                for k in range(n):
                    big[r * n + i][c * n + k] = R[i][k]
    return mat_det(big).in_base()


def f_linear_matrix(M):
    """Matrix over F of left multiplication by M on D^m (columns = images of basis vectors).

    Basis order: slot s, then Pi-power i, then power-basis index k.
    """
    m = len(M)
    D = M[0][0].D
    n = D.n
    T = D.T
    basis = []
    for i in range(n):
        for k in range(n):
            a = FnElt(T, 0, tuple(1 if t == k else 0 for t in range(n)), D.F.N)
            coeffs = [T.zero()] * n
            coeffs[i] = a
            basis.append(CDAElement(D, coeffs))
    dim = m * n * n
    cols = []
    for s in range(m):
        for e in basis:
            col = []
            for r in range(m):
                col.extend((M[r][s] * e).coordinates())
            cols.append(col)
    return [[cols[c][r] for c in range(dim)] for r in range(dim)]


def cartan_snf_OD(M):
    """M = U diag(Pi^a) V with U, V invertible over the maximal order, a sorted."""
    m = len(M)
    D = M[0][0].D
    W = [list(row) for row in M]
    U = identity(m, D.one())
    V = identity(m, D.one())
    zero = D.zero()
    exps = []
    for k in range(m):
        best, best_v = None, INF
        for r in range(k, m):
            for c in range(k, m):
                x = W[r][c]
                if x.is_zero():
                    continue
                v = x.valuation()
                if v < best_v:
                    best, best_v = (r, c), v
        if best is None:
            raise SingularMatrix("matrix over D is singular")
        r, c = best
        if r != k:
            W[k], W[r] = W[r], W[k]
            for row in U:
                row[k], row[r] = row[r], row[k]
        if c != k:
            for row in W:
                row[k], row[c] = row[c], row[k]
            V[k], V[c] = V[c], V[k]
        piv = W[k][k]
        pinv = piv.inverse()
        for r in range(k + 1, m):
            if W[r][k].is_zero():
                continue
            f = W[r][k] * pinv
            W[r] = [a - f * b for a, b in zip(W[r], W[k])]
            W[r][k] = zero
            for row in U:
                row[k] = row[k] + row[r] * f
        for c in range(k + 1, m):
            if W[k][c].is_zero():
                continue
            f = pinv * W[k][c]
            for row in W:
                row[c] = row[c] - row[k] * f
            W[k][c] = zero
            V[k] = [a + f * b for a, b in zip(V[k], V[c])]
        unit = D.Pi_power(-best_v) * piv
        V[k] = [unit * x for x in V[k]]
        exps.append(best_v)
    order = sorted(range(m), key=lambda i: exps[i])
    if order != list(range(m)):
        U = [[row[i] for i in order] for row in U]
        V = [V[i] for i in order]
        exps = [exps[i] for i in order]
    T = [[D.Pi_power(exps[i]) if i == j else zero for j in range(m)] for i in range(m)]
    return U, T, V, tuple(exps)
