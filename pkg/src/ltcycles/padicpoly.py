"""Irreducibility of polynomials over Q_p.

Three criteria, tried in order: degree one; a Newton polygon with a single
segment whose slope has denominator equal to the degree; for degree at most
three, absence of a root in Q_p (found by a residue-tree search).  For
higher degree an irreducible reduction after rescaling also suffices.
"""
from __future__ import annotations

from fractions import Fraction
import math

from .errors import IrreducibilityUndecided, PrecisionExhausted
from .localfield import INF


def _integral_digits(coeffs):
    """Scale to a primitive integral polynomial; return (ints, modulus exponent)."""
    vals = [c.valuation() for c in coeffs]
    vmin = min(v for v in vals if v != INF)
    ab = min(c.abs_prec() for c in coeffs) - vmin
    if ab <= 0:
        raise PrecisionExhausted("no digits left after normalization")
    p = coeffs[0].F.p
    mod = p ** ab
    ints = []
    for c in coeffs:
        if c.is_zero():
            ints.append(0)
        else:
            ints.append(c.unit * p ** (c.val - vmin) % mod)
    return ints, ab


def newton_polygon(vals):
    """Lower convex hull of (i, v_i); returns a list of (length, slope)."""
    pts = [(i, v) for i, v in enumerate(vals) if v != INF]
    hull = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return [(b[0] - a[0], Fraction(b[1] - a[1], b[0] - a[0])) for a, b in zip(hull, hull[1:])]


def _has_root_zp(ints, ab, p, depth=0):
    ints = list(ints)
    while True:
        if all(x % p == 0 for x in ints):
            if ab <= 1:
                raise PrecisionExhausted("root search ran out of digits")
            ints = [x // p for x in ints]
            ab -= 1
            continue
        break
    mod = p ** ab
    n = len(ints) - 1
    for r in range(p):
        val = sum(c * pow(r, i, p) for i, c in enumerate(ints)) % p
        if val:
            continue
        der = sum(i * c * pow(r, i - 1, p) for i, c in enumerate(ints) if i) % p
        if der:
            return True
        if depth > 4 * ab:
            raise PrecisionExhausted("root search did not terminate")
        # substitute X = r + pY
        shifted = _taylor_shift(ints, r, mod)
        scaled = [c * p ** i % mod for i, c in enumerate(shifted)]
        if _has_root_zp(scaled, ab, p, depth + 1):
            return True
    return False


def _taylor_shift(ints, r, mod):
    c = list(ints)
    n = len(c) - 1
    for i in range(n):
        for k in range(n - 1, i - 1, -1):
            c[k] = (c[k] + r * c[k + 1]) % mod
    return c


def has_root(P) -> bool:
    """Whether the polynomial has a root in Q_p."""
    coeffs = list(P.coeffs)
    if coeffs[0].is_zero():
        if coeffs[0].is_exact_zero():
            return True
        raise PrecisionExhausted("constant term indistinguishable from zero")
    ints, ab = _integral_digits(coeffs)
    p = coeffs[0].F.p
    if _has_root_zp(ints, ab, p):
        return True
    return _has_root_zp(list(reversed(ints)), ab, p)


def is_irreducible(P) -> bool:
    n = P.degree
    if n <= 0:
        return False
    if n == 1:
        return True
    vals = [c.valuation() if not c.is_zero() else INF for c in P.coeffs]
    if vals[0] == INF:
        return False
    segs = newton_polygon(vals)
    if len(segs) == 1 and segs[0][1].denominator == n:
        return True
    if n <= 3:
        return not has_root(P)
    if len(segs) > 1:
        return False
    s = segs[0][1]
    if s.denominator == 1:
        from .cda import is_irreducible_mod_p
        p = P.coeffs[0].F.p
        k = int(s)
        scaled = [c * P.coeffs[0].F.uniformizer() ** (k * i) for i, c in enumerate(P.coeffs)]
        ints, _ = _integral_digits(scaled)
        lead = ints[-1] % p
        if lead:
            inv = pow(lead, -1, p)
            red = [x * inv % p for x in ints]
            if is_irreducible_mod_p(red, p):
                return True
    g = math.gcd(n, s.denominator)
    raise IrreducibilityUndecided(f"cannot decide irreducibility in degree {n}")
