"""Closed formulas for intersection numbers at finite level."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cycles import EquiPair, invariant_poly_j
from .integrate import (DEFAULT_CELL_BUDGET, NormIntegrand, TestFunction, adaptive_integrate,
                        c_closed, c_pair, deg_level_K, vol_R)
from .linalg import block
from .localfield import disc_norm


@dataclass
class IntersectionReport:
    value: Fraction
    constant_C: Fraction
    disc_factor: Fraction
    integral: Fraction
    cells_used: int
    level: int
    max_depth: int = 0

    def check(self) -> bool:
        return self.value == self.constant_C * self.disc_factor * self.integral


def resultant_integrand(j, pair: EquiPair) -> NormIntegrand:
    """x -> |Res(j, x)|^-1 through the reduced norm of [0 I] Delta^-1 j x Delta [I 0]^T.

    The norm form equals the resultant up to q^{h (v(Nrd j) + v(det x))},
    which the integrand's shifts remove.
    """
    h = pair.h
    P = [[x * j for x in row] for row in block(pair.delta_inv, h, 2 * h, 0, 2 * h)]
    Q = block(pair.delta, 0, 2 * h, 0, h)
    return NormIntegrand(P, Q, pair.F, h, base_shift=-h * j.valuation(), shift_per_det=-h)


def intersection_number(j, pair: EquiPair, f: TestFunction, strict: bool = True,
                        integrand=None, budget: int = DEFAULT_CELL_BUDGET,
                        threads: int = 1) -> IntersectionReport:
    """C |Disc|^{-h^2} times the integral of f(x) |Res(j, x)|^-1."""
    h = pair.h
    if integrand is None:
        if strict:
            invariant_poly_j(j, pair, strict=True)
        integrand = resultant_integrand(j, pair)
    C = c_closed(pair.K, h) if f.n == 0 else Fraction(1)
    disc = disc_norm(pair.K, h)
    res = adaptive_integrate(integrand, f, pair.F.p, budget=budget, threads=threads)
    return IntersectionReport(C * disc * res.value, C, disc, res.value, res.cells, f.n, res.max_depth)


def intersection_two_fields(pair1: EquiPair, pair2: EquiPair, n: int,
                            budget: int = DEFAULT_CELL_BUDGET, threads: int = 1) -> IntersectionReport:
    """c(K1, K2) deg_K1(n) deg_K2(n) |Disc_1|^{-h^2} times the integral over R_n of |F(g)|^-1."""
    h = pair1.h
    q = pair1.F.p
    P = block(pair1.delta_inv, h, 2 * h, 0, 2 * h)
    Q = block(pair2.delta, 0, 2 * h, 0, h)
    G = NormIntegrand(P, Q, pair1.F, h)
    res = adaptive_integrate(G, TestFunction(h, n), q, budget=budget, threads=threads)
    C = c_pair(pair1.K, pair2.K, h) * deg_level_K(pair1.K, h, n) * deg_level_K(pair2.K, h, n)
    disc = disc_norm(pair1.K, h)
    integral = res.value * vol_R(h, n, q)
    return IntersectionReport(C * disc * integral, C, disc, integral, res.cells, n, res.max_depth)


def hecke_intersection(j, pair: EquiPair, n: int, g0, strict: bool = True,
                       budget: int = DEFAULT_CELL_BUDGET, threads: int = 1) -> IntersectionReport:
    """Intersection number against the standard function of R_n g0 R_n."""
    f = TestFunction(pair.h, n, g0, "double_coset")
    return intersection_number(j, pair, f, strict=strict, budget=budget, threads=threads)
