"""Matrices, characteristic polynomials, resultants and Smith forms.

Matrices are lists of rows.  The routines are generic in the entry type:
anything with ``+ - *``, ``inverse()``, ``valuation()``, ``is_zero()``,
``zero_like()`` and ``one_like()`` works.  Row reduction only multiplies on
the left, so inversion is valid over the division algebra as well;
determinants and characteristic polynomials assume commutative entries.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import (CoefficientNotRational, DegenerateElement, PrecisionExhausted,
                     SingularMatrix)
from .localfield import INF, ExtScalar, FieldDesc, Scalar


def _key(x):
    """Pivot key: valuation, with zeros pushed to the end."""
    if x.is_zero():
        return INF
    return x.valuation()


def shape(A):
    return len(A), len(A[0]) if A else 0


def identity(n: int, like):
    one, zero = like.one_like(), like.zero_like()
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def zeros(r: int, c: int, like):
    zero = like.zero_like()
    return [[zero] * c for _ in range(r)]


def mat_mul(A, B):
    n, k = shape(A)
    k2, m = shape(B)
    if k != k2:
        raise ValueError("dimension mismatch")
    out = []
    for i in range(n):
        row = []
        Ai = A[i]
        for j in range(m):
            s = Ai[0] * B[0][j]
            for t in range(1, k):
                s = s + Ai[t] * B[t][j]
            row.append(s)
        out.append(row)
    return out


def mat_add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_scale(c, A):
    return [[c * a for a in row] for row in A]


def transpose(A):
    return [list(col) for col in zip(*A)]


def block(A, r0, r1, c0, c1):
    return [row[c0:c1] for row in A[r0:r1]]


def from_blocks(blocks):
    """Assemble a matrix from a 2D list of blocks."""
    out = []
    for brow in blocks:
        for i in range(len(brow[0])):
            row = []
            for B in brow:
                row.extend(B[i])
            out.append(row)
    return out


def blockdiag(A, B):
    like = A[0][0]
    return from_blocks([[A, zeros(len(A), len(B[0]), like)],
                        [zeros(len(B), len(A[0]), like), B]])


def conj_mat(A):
    return [[x.conj() for x in row] for row in A]


def to_ext(K, A):
    return [[K.coerce(x) for x in row] for row in A]


def matrix(F: FieldDesc, rows) -> list:
    """Coerce nested rationals (ints, Fractions, strings) into a MatF."""
    return [[F(x) for x in row] for row in rows]


def mat_equal(A, B) -> bool:
    return all(a == b for ra, rb in zip(A, B) for a, b in zip(ra, rb))


def _pick_pivot(col_entries):
    best, best_key, saw_inexact = None, INF, False
    for idx, x in col_entries:
        if x.is_zero():
            if not _exact_zero(x):
                saw_inexact = True
            continue
        k = x.valuation()
        if k < best_key:
            best, best_key = idx, k
    return best, saw_inexact


def _exact_zero(x) -> bool:
    f = getattr(x, "is_exact_zero", None)
    return bool(f()) if f is not None else False


def mat_inv(A):
    """Inverse by Gauss-Jordan elimination with valuation pivoting (left operations only)."""
    n = len(A)
    W = [list(row) + ident_row for row, ident_row in zip(A, identity(n, A[0][0]))]
    for i in range(n):
        r, inexact = _pick_pivot((r, W[r][i]) for r in range(i, n))
        if r is None:
            if inexact:
                raise PrecisionExhausted("pivot indistinguishable from zero")
            raise SingularMatrix("matrix is singular")
        W[i], W[r] = W[r], W[i]
        pinv = W[i][i].inverse()
        W[i] = [pinv * x for x in W[i]]
        for k in range(n):
            if k != i and not W[k][i].is_zero():
                f = W[k][i]
                W[k] = [a - f * b for a, b in zip(W[k], W[i])]
    return [row[n:] for row in W]


def mat_solve(A, b):
    """Solve A x = b for a column vector b (given as a list)."""
    inv = mat_inv(A)
    return [row[0] for row in mat_mul(inv, [[x] for x in b])]


def mat_det(A):
    """Determinant by elimination with valuation pivoting."""
    n = len(A)
    W = [list(row) for row in A]
    sign = 1
    acc = A[0][0].one_like()
    for i in range(n):
        r, _ = _pick_pivot((r, W[r][i]) for r in range(i, n))
        if r is None:
            # the whole column is (numerically) zero: the product carries its precision
            z = W[i][i]
            for rr in range(i, n):
                if not _exact_zero(W[rr][i]):
                    z = W[rr][i]
                    break
            return acc * z
        if r != i:
            W[i], W[r] = W[r], W[i]
            sign = -sign
        piv = W[i][i]
        acc = acc * piv
        pinv = piv.inverse()
        for k in range(i + 1, n):
            if not W[k][i].is_zero():
                f = W[k][i] * pinv
                W[k] = [a - f * b for a, b in zip(W[k], W[i])]
    return acc if sign == 1 else -acc


class Poly:
    """Polynomial with coefficients listed from the constant term up."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence):
        self.coeffs = tuple(coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_monic(self) -> bool:
        return self.coeffs[-1] == 1

    def __call__(self, x):
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc

    def __mul__(self, other: "Poly") -> "Poly":
        a, b = self.coeffs, other.coeffs
        out = [a[0].zero_like()] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                out[i + j] = out[i + j] + x * y
        return Poly(out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        if len(self.coeffs) != len(other.coeffs):
            return False
        return all(a == b for a, b in zip(self.coeffs, other.coeffs))

    __hash__ = None

    def to_rationals(self):
        return [c.to_rational() for c in self.coeffs]

    def __repr__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            terms.append(f"({c!r})*X^{i}")
        return " + ".join(terms)


def descend(P: Poly) -> Poly:
    """Map a polynomial with K-coefficients to F, checking each coefficient lies in F."""
    out = []
    for c in P.coeffs:
        if isinstance(c, ExtScalar):
            if not c.b.is_zero():
                raise CoefficientNotRational(f"coefficient {c!r} is not in the base field")
            out.append(c.a)
        else:
            out.append(c)
    return Poly(out)


def mat_charpoly(A) -> Poly:
    """det(X - A) by Berkowitz's division-free algorithm."""
    n = len(A)
    one = A[0][0].one_like()
    C = [one, -A[0][0]]
    for r in range(1, n):
        R = A[r][:r]
        S = [A[i][r] for i in range(r)]
        t = [one, -A[r][r]]
        v = S
        for _ in range(r):
            s = R[0] * v[0]
            for k in range(1, r):
                s = s + R[k] * v[k]
            t.append(-s)
            v = [_dot(A[i][:r], v) for i in range(r)]
        newC = []
        for i in range(r + 2):
            s = None
            for j in range(min(i, r) + 1):
                term = t[i - j] * C[j]
                s = term if s is None else s + term
            newC.append(s)
        C = newC
    return Poly(list(reversed(C)))


def _dot(row, v):
    s = row[0] * v[0]
    for a, b in zip(row[1:], v[1:]):
        s = s + a * b
    return s


def resultant(P: Poly, Q: Poly):
    """Resultant as the determinant of the Sylvester matrix."""
    m, n = P.degree, Q.degree
    like = P.coeffs[-1]
    if m == 0 and n == 0:
        return like.one_like()
    zero = like.zero_like()
    size = m + n
    rows = []
    pd = list(reversed(P.coeffs))
    qd = list(reversed(Q.coeffs))
    for i in range(n):
        rows.append([zero] * i + pd + [zero] * (size - i - m - 1))
    for i in range(m):
        rows.append([zero] * i + qd + [zero] * (size - i - n - 1))
    return mat_det(rows)


@dataclass
class SNFResult:
    U: list
    exponents: tuple
    V: list

    def diagonal(self):
        F = self.U[0][0].F
        n = len(self.exponents)
        return [[F.uniformizer() ** a if i == j else F.zero() for j in range(n)]
                for i, a in enumerate(self.exponents)]

    def reconstruct(self):
        return mat_mul(mat_mul(self.U, self.diagonal()), self.V)


def snf(M) -> SNFResult:
    """Smith normal form over Z_p: M = U diag(p^a) V with U, V in GL(Z_p)."""
    n = len(M)
    if any(len(row) != n for row in M):
        raise ValueError("snf expects a square matrix")
    W = [list(row) for row in M]
    like = M[0][0]
    U = identity(n, like)
    V = identity(n, like)
    zero = like.zero_like()
    exps = []
    for k in range(n):
        best, best_key, inexact = None, INF, False
        for r in range(k, n):
            for c in range(k, n):
                x = W[r][c]
                if x.is_zero():
                    inexact = inexact or not x.is_exact_zero()
                    continue
                if x.val < best_key:
                    best, best_key = (r, c), x.val
        if best is None:
            if inexact:
                raise PrecisionExhausted("cannot certify a nonzero pivot")
            raise SingularMatrix("matrix is singular")
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
        for r in range(k + 1, n):
            if W[r][k].is_zero():
                continue
            f = W[r][k] * pinv
            W[r] = [a - f * b for a, b in zip(W[r], W[k])]
            W[r][k] = zero
            for row in U:
                row[k] = row[k] + f * row[r]
        for c in range(k + 1, n):
            if W[k][c].is_zero():
                continue
            f = W[k][c] * pinv
            for row in W:
                row[c] = row[c] - f * row[k]
            W[k][c] = zero
            V[k] = [a + f * b for a, b in zip(V[k], V[c])]
        unit = Scalar(piv.F, 0, piv.unit, piv.prec)
        V[k] = [unit * x for x in V[k]]
        exps.append(piv.val)
    return SNFResult(U, tuple(exps), V)


def snf_exponents(M) -> tuple:
    return snf(M).exponents


def _inv_or_degenerate(A, what: str):
    try:
        return mat_inv(A)
    except (SingularMatrix, ZeroDivisionError) as exc:
        raise DegenerateElement(f"{what} is not invertible") from exc
    except PrecisionExhausted as exc:
        # a pivot vanishing to working precision: treated as degenerate input
        raise DegenerateElement(f"{what} is not invertible at working precision") from exc


def invariant_prime_split(g):
    """The element g' of the split invariant-polynomial definition.

    With g = [[a, b], [c, d]] in h x h blocks,
    g' is the top-left block of diag(a, d) g^-1 diag(a, d) [[a, -b], [-c, d]]^-1.
    """
    n = len(g)
    if n % 2:
        raise ValueError("g must have even size")
    h = n // 2
    a, b = block(g, 0, h, 0, h), block(g, 0, h, h, n)
    c, d = block(g, h, n, 0, h), block(g, h, n, h, n)
    like = g[0][0]
    tw = from_blocks([[a, mat_scale(-like.one_like(), b)],
                      [mat_scale(-like.one_like(), c), d]])
    ginv = _inv_or_degenerate(g, "g")
    twinv = _inv_or_degenerate(tw, "the twisted matrix [[a, -b], [-c, d]]")
    D = blockdiag(a, d)
    G = mat_mul(mat_mul(mat_mul(D, ginv), D), twinv)
    return block(G, 0, h, 0, h)


def invariant_poly_split(g) -> Poly:
    """Characteristic polynomial of g' (coefficients certified in F)."""
    return descend(mat_charpoly(invariant_prime_split(g)))


def xpm_decompose(g, pair):
    """Blocks (x_plus, x_minus) of (tau|conj tau)^-1 g (tau|conj tau).

    This equals Delta^-1 g Delta since g has entries in F, which commute with
    phi.  The lower blocks are checked to be the conjugates of the upper ones.
    """
    K = pair.K
    h = pair.h
    X = mat_mul(mat_mul(pair.frame_inv, to_ext(K, g)), pair.frame)
    xp = block(X, 0, h, 0, h)
    xm = block(X, 0, h, h, 2 * h)
    if not (mat_equal(block(X, h, 2 * h, h, 2 * h), conj_mat(xp))
            and mat_equal(block(X, h, 2 * h, 0, h), conj_mat(xm))):
        raise PrecisionExhausted("conjugated matrix lost its block symmetry")
    return xp, xm


def invariant_prime_tau(g, pair):
    """g' = g+ (g+ - g-)^-1 g+ (g+ + g-)^-1 computed in the Delta-frame, top-left block."""
    h = pair.h
    xp, xm = xpm_decompose(g, pair)
    zero = pair.K.zero()
    Z = [[zero] * h for _ in range(h)]
    A = from_blocks([[xp, Z], [Z, conj_mat(xp)]])
    B = from_blocks([[Z, xm], [conj_mat(xm), Z]])
    plus = _inv_or_degenerate(mat_add(A, B), "g")
    minus = _inv_or_degenerate(mat_sub(A, B), "g+ - g-")
    Y = mat_mul(mat_mul(mat_mul(A, minus), A), plus)
    return block(Y, 0, h, 0, h)


def invariant_poly_tau(g, pair) -> Poly:
    return descend(mat_charpoly(invariant_prime_tau(g, pair)))


def unit_form_prime(xp, xm):
    """(I - u conj(u))^-1 with u = x_plus^-1 x_minus; equals g' when x_plus is invertible."""
    u = mat_mul(_inv_or_degenerate(xp, "x_plus"), xm)
    h = len(u)
    I = identity(h, u[0][0])
    return _inv_or_degenerate(mat_sub(I, mat_mul(u, conj_mat(u))), "I - u conj(u)")
