"""The h = 1 orbital integral on the split side and the linear AFL check.

For g = [[a, b], [c, d]] and h1 = diag(a1, b1), h2 = diag(a2, b2) in the
diagonal torus, the integrand is the indicator of GL_2(Z_p) at
h1^-1 g h2, times eta(b2/a2) and |b1/a1 * b2/a2|^s.  Fixing a1 = 1 leaves
the valuations x = v(b1), y = v(a2), z = v(b2), each cell of volume one:

    v(a) + y >= 0,  v(b) + z >= 0,  v(c) + y - x >= 0,  v(d) + z - x >= 0,
    v(det g) + y + z - x = 0,

with term (-1)^(z - y) t^(x + z - y), t = q^-s.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction

from .cda import CDAElement, invariant_poly_D
from .cycles import EquiPair, make_equi_pair, standard_tau
from .errors import DomainError, IrregularElement, NoIntegralRepresentative
from .integrate import DEFAULT_CELL_BUDGET, TestFunction, adaptive_integrate, c_closed
from .formula import resultant_integrand
from .linalg import Poly, invariant_poly_split, mat_det
from .localfield import INF, Scalar


class QSeries:
    """Finite Laurent polynomial sum c_k t^k with rational coefficients."""

    def __init__(self, coeffs=None):
        self.coeffs = {int(k): Fraction(v) for k, v in (coeffs or {}).items() if v != 0}

    def __eq__(self, other):
        return isinstance(other, QSeries) and self.coeffs == other.coeffs

    __hash__ = None

    def at_zero(self) -> Fraction:
        return sum(self.coeffs.values(), Fraction(0))

    def evaluate(self, s: float, q: int) -> float:
        return sum(float(c) * q ** (-s * k) for k, c in self.coeffs.items())

    def __repr__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"{c}*t^{k}" for k, c in sorted(self.coeffs.items()))


def derivative_at_zero(S: QSeries) -> Fraction:
    """sum k c_k; the derivative in s at 0 is -ln(q) times this."""
    return sum((k * c for k, c in S.coeffs.items()), Fraction(0))


@dataclass
class MatchedElement:
    g_of_j: list
    alpha: Scalar


def match_element(Pj: Poly, variant: int = 0) -> MatchedElement:
    """A 2x2 matrix over F with invariant polynomial X - alpha.

    variant 0: [[p^k, 1], [c p^k, 1]] with c = 1 - 1/alpha, k = max(0, -v(c));
    variant 1: [[1, c], [1, 1]] when c is integral.
    """
    if Pj.degree != 1:
        raise DomainError("matching is implemented for h = 1")
    alpha = -Pj.coeffs[0]
    F = alpha.F
    if alpha.is_zero():
        raise NoIntegralRepresentative("alpha = 0 has only irregular representatives")
    if alpha == 1:
        return MatchedElement([[F.one(), F.zero()], [F.zero(), F.one()]], alpha)
    c = 1 - alpha.inverse()
    k = max(0, -c.valuation())
    pk = F.uniformizer() ** k
    if variant == 0:
        g = [[pk, F.one()], [c * pk, F.one()]]
    elif variant == 1:
        if k:
            raise NoIntegralRepresentative("variant 1 needs an integral c")
        g = [[F.one(), c], [F.one(), F.one()]]
    else:
        raise DomainError(f"unknown variant {variant}")
    return MatchedElement(g, alpha)


def transfer_factor(g) -> int:
    """eta(b / a) for g = [[a, b], [c, d]].

    Translating g by torus elements multiplies the orbital integral at s = 0
    by the same character, so Omega(g) Orb(g) depends only on the orbit.
    """
    a, b = g[0][0], g[0][1]
    if a.is_zero() or b.is_zero():
        raise IrregularElement("transfer factor needs a and b nonzero")
    return -1 if (b.valuation() - a.valuation()) % 2 else 1


def _vals(g):
    vs = [g[0][0], g[0][1], g[1][0], g[1][1]]
    if any(x.is_zero() for x in vs):
        raise IrregularElement("orbital integrals need all four entries nonzero")
    va, vb, vc, vd = (x.valuation() for x in vs)
    return va, vb, vc, vd, mat_det(g).valuation()


def orbital_h1(g) -> QSeries:
    """Orbital integral of the unit spherical function, by summing over x with z in a range.

    Solving the relation for y gives sign (-1)^(x + D) and power t^(2z + D), so
    each x contributes a geometric run in z.
    """
    va, vb, vc, vd, D = _vals(g)
    out = defaultdict(Fraction)
    for x in range(D - va - vb, vc + vd - D + 1):
        lo = max(-vb, x - vd)
        hi = min(x - D + va, vc - D)
        sign = -1 if (x + D) % 2 else 1
        for z in range(lo, hi + 1):
            out[2 * z + D] += sign
    return QSeries(out)


def orbital_h1_bruteforce(g, gauge: str = "a1") -> QSeries:
    """Triple loop over a box of valuations; gauge fixes v(a1) = 0 or v(b1) = 0."""
    va, vb, vc, vd, D = _vals(g)
    R = abs(va) + abs(vb) + abs(vc) + abs(vd) + abs(D) + 2
    out = defaultdict(Fraction)
    rng = range(-R, R + 1)
    for u in rng:
        for y in rng:
            for z in rng:
                if gauge == "a1":
                    w, x = 0, u
                elif gauge == "b1":
                    w, x = u, 0
                else:
                    raise DomainError(f"unknown gauge {gauge!r}")
                ok = (va + y - w >= 0 and vb + z - w >= 0 and vc + y - x >= 0
                      and vd + z - x >= 0 and D + y + z - x - w == 0)
                if ok:
                    out[x - w + z - y] += -1 if (z - y) % 2 else 1
    return QSeries(out)


@dataclass
class AFLReport:
    lhs: Fraction
    rhs: Fraction
    ratio: Fraction
    alpha: Scalar
    series: QSeries
    integral: Fraction
    cells: int


def verify_afl_h1(j: CDAElement, pair: EquiPair | None = None, variant: int = 0,
                  budget: int = DEFAULT_CELL_BUDGET, threads: int = 1) -> AFLReport:
    """Compare -1/2 Omega(g) d/ds Orb / ln q with c(K) times the resultant integral over GL_2(Z_p)."""
    D = j.D
    if D.h != 1:
        raise DomainError("the AFL verifier is for h = 1")
    if pair is None:
        from .localfield import QuadExt
        K = QuadExt(D.F, "unramified")
        pair = make_equi_pair(K, standard_tau(K, 1), D.one(), D=D)
    if pair.K.ramified:
        raise DomainError("the AFL identity is stated for unramified K")
    v = j.valuation()
    if v % 2:
        raise DomainError("j must lie in F^x O_D^x (even reduced-norm valuation)")
    j = j * D.scalar(D.F.uniformizer() ** (-(v // 2)))
    Pj = invariant_poly_D(j, pair.emb_phi, strict=True)
    g = match_element(Pj, variant).g_of_j
    S = orbital_h1(g)
    lhs = -transfer_factor(g) * derivative_at_zero(S) / 2
    res = adaptive_integrate(resultant_integrand(j, pair), TestFunction(1, 0), D.F.p,
                             budget=budget, threads=threads)
    rhs = c_closed(pair.K, 1) * res.value
    ratio = lhs / rhs if rhs else None
    return AFLReport(lhs, rhs, ratio, -Pj.coeffs[0], S, res.value, res.cells)
