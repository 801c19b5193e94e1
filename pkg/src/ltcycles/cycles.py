"""Equi-height pairs, heights, conductors and the relative resultant.

Conventions (see the README for the reasoning):

* ``tau`` is a 2h x h matrix over K.  Its F-matrix ``M_tau`` sends the i-th
  standard basis vector of F^{2h} to row i of ``tau``, written in the
  F-basis {e_k, theta e_k} of K^h.  The standard ``tau`` is [I; theta I].
* Height(tau) = -v(det M_tau), the log_q-volume of the lattice spanned by
  the rows, and Height(phi) = v(Nrd phi).  With this sign the reduced norm
  of Delta has absolute value |Disc|^{h^2} for every valid pair.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
import math

from .cda import (CDAElement, CyclicAlgebra, Embedding, embed_quadratic, invariant_poly_D,
                  nrd_block)
from .errors import (DeltaNormMismatch, HeightMismatch, InfiniteIntersection,
                     PrecisionExhausted, SingularMatrix)
from .linalg import (Poly, block, conj_mat, from_blocks, invariant_poly_tau, mat_det,
                     mat_inv, mat_mul, resultant, snf, to_ext)
from .localfield import INF, QuadExt, Scalar, disc_norm

INFINITE = math.inf


def standard_tau(K: QuadExt, h: int):
    one, zero, th = K.one(), K.zero(), K.gen()
    top = [[one if i == k else zero for k in range(h)] for i in range(h)]
    bot = [[th if i == k else zero for k in range(h)] for i in range(h)]
    return top + bot


def tau_matrix(tau):
    """The 2h x 2h F-matrix of tau (column i = coordinates of row i)."""
    h = len(tau[0])
    cols = []
    for row in tau:
        cols.append([x.a for x in row] + [x.b for x in row])
    return [[cols[c][r] for c in range(2 * h)] for r in range(2 * h)]


def height_tau(tau) -> int:
    d = mat_det(tau_matrix(tau))
    if d.is_zero():
        raise SingularMatrix("tau is not an isomorphism")
    return -d.valuation()


def cond_tau(tau) -> int:
    return max(0, max(snf(tau_matrix(tau)).exponents))


def translate_tau(g, tau):
    """The matrix g.tau for g in GL_{2h}(F)."""
    K = tau[0][0].K
    return mat_mul(to_ext(K, g), tau)


@dataclass(eq=False)
class EquiPair:
    K: QuadExt
    h: int
    tau: list
    phi: CDAElement
    D: CyclicAlgebra
    emb: Embedding
    height: int
    cond: int
    frame: list = field(repr=False)
    frame_inv: list = field(repr=False)
    delta: list = field(repr=False)
    delta_inv: list = field(repr=False)
    emb_phi: Embedding = field(repr=False)

    @property
    def F(self):
        return self.K.F


def make_equi_pair(K: QuadExt, tau, phi: CDAElement | None = None, h: int | None = None,
                   D: CyclicAlgebra | None = None, emb: Embedding | None = None) -> EquiPair:
    h = len(tau[0]) if h is None else h
    if D is None:
        D = phi.D if phi is not None else CyclicAlgebra(K.F, h)
    if phi is None:
        phi = D.one()
    if emb is None:
        emb = embed_quadratic(K, h, D)
    ht = height_tau(tau)
    hp = phi.valuation()
    if ht != hp:
        raise HeightMismatch(f"Height(tau) = {ht} but Height(phi) = {hp}")
    frame = [list(row) + [x.conj() for x in row] for row in tau]
    try:
        frame_inv = mat_inv(frame)
    except SingularMatrix as exc:
        raise DeltaNormMismatch("(tau | conj tau) is singular") from exc
    delta = [[phi * emb(x) for x in row] for row in frame]
    nd = nrd_block(delta)
    expected = K.disc_val * h * h
    if nd.is_zero() or nd.valuation() != expected:
        raise DeltaNormMismatch(f"v(NRD(Delta)) = {nd.valuation() if not nd.is_zero() else INF}, "
                                f"expected {expected}")
    phi_inv = phi.inverse()
    delta_inv = [[emb(x) * phi_inv for x in row] for row in frame_inv]
    return EquiPair(K=K, h=h, tau=tau, phi=phi, D=D, emb=emb, height=ht, cond=cond_tau(tau),
                    frame=frame, frame_inv=frame_inv, delta=delta, delta_inv=delta_inv,
                    emb_phi=emb.conjugated(phi))


def invariant_poly_j(j, pair: EquiPair, strict: bool = False) -> Poly:
    if isinstance(j, Poly):
        return j
    return invariant_poly_D(j, pair.emb_phi, strict=strict)


def res_rel(j, g, pair: EquiPair, strict: bool = False):
    """Resultant of the invariant polynomials of j and g."""
    return resultant(invariant_poly_j(j, pair, strict), invariant_poly_tau(g, pair))


def norm_block(j: CDAElement, g, pair: EquiPair):
    """[0 I] Delta^-1 j g Delta [I 0]^T as an h x h matrix over D."""
    h = pair.h
    D = pair.D
    gD = [[D.scalar(x) for x in row] for row in g]
    lower = block(pair.delta_inv, h, 2 * h, 0, 2 * h)
    left = [[x * j for x in row] for row in lower]
    right = block(pair.delta, 0, 2 * h, 0, h)
    return mat_mul(mat_mul(left, gD), right)


def res_rel_norm_oracle(j: CDAElement, g, pair: EquiPair, normalized: bool = True):
    """|Res(j, g)|^-1 computed from NRD([0 I] Delta^-1 j g Delta [I 0]^T).

    The two valuations differ by h (v(Nrd j) + v(det g)); ``normalized``
    removes that offset, otherwise the raw |NRD|^-1 is returned.
    INFINITE when the norm vanishes.
    """
    n = nrd_block(norm_block(j, g, pair))
    if n.is_zero():
        return INFINITE
    v = n.valuation()
    if normalized:
        v -= pair.h * (j.valuation() + mat_det(g).valuation())
    return Fraction(pair.F.p) ** v


def res_abs_inv(r: Scalar):
    if r.is_zero():
        return INFINITE
    return Fraction(r.F.p) ** r.valuation()


def infinite_level_intersection(pair1: EquiPair, pair2: EquiPair | None = None, g=None,
                                j: CDAElement | None = None):
    """Infinite-level intersection multiplicity.

    With ``j`` given: |Disc|^{-h^2} |Res(j, g)|^-1 for the single pair.
    Otherwise the two-pair form |Disc_1|^{-h^2} |NRD([0 I] Delta_1^-1 g Delta_2 [I 0]^T)|^-1.
    """
    h = pair1.h
    F = pair1.F
    if g is None:
        g = [[F.one() if r == c else F.zero() for c in range(2 * h)] for r in range(2 * h)]
    disc = disc_norm(pair1.K, h)
    if j is not None:
        v = res_abs_inv(res_rel(j, g, pair1))
        if v == INFINITE:
            raise InfiniteIntersection("the relative resultant vanishes")
        return disc * v
    D = pair1.D
    gD = [[D.scalar(x) for x in row] for row in g]
    A = mat_mul(mat_mul(block(pair1.delta_inv, h, 2 * h, 0, 2 * h), gD),
                block(pair2.delta, 0, 2 * h, 0, h))
    n = nrd_block(A)
    if n.is_zero():
        raise InfiniteIntersection("the norm argument is singular")
    return disc * Fraction(F.p) ** n.valuation()


def stable_level_from(length, h: int, q: int, cond1: int, cond2: int) -> int:
    """ceil(log_q(length) / 2h) + 2 max(cond) + 1, by exact comparison."""
    length = Fraction(length)
    if length <= 0:
        raise InfiniteIntersection("length must be positive")
    k = 0
    while Fraction(q) ** (2 * h * k) < length:
        k += 1
    while Fraction(q) ** (2 * h * (k - 1)) >= length:
        k -= 1
    return k + 2 * max(cond1, cond2) + 1


def stable_level(pair1: EquiPair, pair2: EquiPair, g=None, j=None) -> int:
    if j is not None:
        length = infinite_level_intersection(pair1, g=g, j=j)
    else:
        length = infinite_level_intersection(pair1, pair2, g=g)
    return stable_level_from(length, pair1.h, pair1.F.p, pair1.cond, pair2.cond)
