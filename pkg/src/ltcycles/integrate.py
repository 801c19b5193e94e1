"""Integration of locally constant functions over cosets of GL_{2h}(Z_p).

Haar measure is normalized so GL_{2h}(Z_p) has volume 1, hence
Vol(R_n) = 1 / deg_level_F(h, n).  A cell is a set ``L c R_m R`` with c an
integer matrix; on the integrand side everything is linear in c, so a cell
is handled as a row of integers and batches of cells go through the kernels.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
import itertools

import numpy as np

from . import kernels
from ._kernels_py import exponents_one
from .cda import f_linear_matrix
from .errors import (BudgetExceeded, DomainError, EnumerationTooLarge, PrecisionExhausted,
                     SingularOrbit)
from .linalg import mat_det, matrix, snf
from .localfield import INF, FieldDesc, QuadExt, Scalar

DEFAULT_CELL_BUDGET = 10 ** 7


# ---------------------------------------------------------------------------
# group orders and constants

def gl_order(n: int, q: int) -> int:
    out = 1
    for i in range(n):
        out *= q ** n - q ** i
    return out


def deg_level_F(h: int, n: int, q: int) -> int:
    """#GL_{2h}(Z_p / p^n)."""
    if n <= 0:
        return 1
    return gl_order(2 * h, q) * q ** (4 * h * h * (n - 1))


def deg_level_K(K: QuadExt, h: int, n: int) -> int:
    """#GL_h(O_K / p^n)."""
    if n <= 0:
        return 1
    q = K.F.p
    if K.ramified:
        return gl_order(h, q) * q ** (h * h * (2 * n - 1))
    return gl_order(h, q * q) * q ** (2 * h * h * (n - 1))


def vol_R(h: int, n: int, q: int) -> Fraction:
    return Fraction(1, deg_level_F(h, n, q))


def c_pair(K1: QuadExt, K2: QuadExt, h: int, m: int = 1) -> Fraction:
    """deg_F(m) / (deg_K1(m) deg_K2(m)), which does not depend on m >= 1."""
    q = K1.F.p
    return Fraction(deg_level_F(h, m, q), deg_level_K(K1, h, m) * deg_level_K(K2, h, m))


def c_closed(K: QuadExt, h: int) -> Fraction:
    q = Fraction(K.F.p)
    out = Fraction(1)
    for n in range(1, h + 1):
        if K.ramified:
            out *= (1 - q ** (-n - h)) / (1 - q ** (-n))
        else:
            out *= (1 - q ** (1 - 2 * n)) / (1 - q ** (-2 * n))
    return out


# ---------------------------------------------------------------------------
# test functions and rational matrices

def _frac_matrix(rows):
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


def frac_identity(n: int):
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def frac_mul(A, B):
    return tuple(tuple(sum(A[i][t] * B[t][j] for t in range(len(B))) for j in range(len(B[0])))
                 for i in range(len(A)))


def frac_inv(A):
    n = len(A)
    W = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
    for i in range(n):
        r = next((r for r in range(i, n) if W[r][i] != 0), None)
        if r is None:
            raise DomainError("matrix is singular")
        W[i], W[r] = W[r], W[i]
        piv = W[i][i]
        W[i] = [x / piv for x in W[i]]
        for k in range(n):
            if k != i and W[k][i] != 0:
                f = W[k][i]
                W[k] = [a - f * b for a, b in zip(W[k], W[i])]
    return tuple(tuple(row[n:]) for row in W)


def frac_det(A):
    n = len(A)
    W = [list(row) for row in A]
    det = Fraction(1)
    for i in range(n):
        r = next((r for r in range(i, n) if W[r][i] != 0), None)
        if r is None:
            return Fraction(0)
        if r != i:
            W[i], W[r] = W[r], W[i]
            det = -det
        det *= W[i][i]
        for k in range(i + 1, n):
            f = W[k][i] / W[i][i]
            W[k] = [a - f * b for a, b in zip(W[k], W[i])]
    return det


def _vfrac(x: Fraction, p: int):
    if x == 0:
        return INF
    v = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def in_R(x, n: int, p: int) -> bool:
    """Membership of a rational matrix in R_n (R_0 = GL_{2h}(Z_p))."""
    size = len(x)
    for i in range(size):
        for j in range(size):
            e = x[i][j] - (1 if (i == j and n > 0) else 0)
            if _vfrac(e, p) < n:
                return False
    return _vfrac(frac_det(x), p) == 0


@dataclass(frozen=True)
class TestFunction:
    """Standard function (indicator / volume) of g0 R_n or of R_n g0 R_n."""

    __test__ = False  # keeps pytest from collecting it

    h: int
    n: int = 0
    g0: tuple = None
    kind: str = "single_coset"

    def __post_init__(self):
        size = 2 * self.h
        g0 = frac_identity(size) if self.g0 is None else _frac_matrix(self.g0)
        if len(g0) != size or frac_det(g0) == 0:
            raise DomainError("g0 must be an invertible 2h x 2h matrix")
        object.__setattr__(self, "g0", g0)
        if self.kind not in ("single_coset", "double_coset"):
            raise DomainError(f"unknown test function kind {self.kind!r}")
        if self.n < 0:
            raise DomainError("level must be non-negative")

    def pieces(self, p: int):
        """Left cosets x R_n making up the support, each with its share of the mass."""
        if self.kind == "single_coset":
            return [(self.g0, Fraction(1))]
        reps = decompose_double_coset(self.n, self.g0, p)
        w = Fraction(1, len(reps))
        return [(x, w) for x in reps]


# ---------------------------------------------------------------------------
# enumeration of residues

def all_residue_matrices(size: int, q: int, limit: int | None = None):
    count = q ** (size * size)
    if limit is not None and count > limit:
        raise EnumerationTooLarge(f"{count} residue matrices exceed the limit {limit}")
    return np.array(list(itertools.product(range(q), repeat=size * size)), dtype=np.int64)


def _det_mod_p(M, size, p):
    """Determinants mod p of a batch of flattened matrices (rows of M)."""
    A = M.reshape(-1, size, size) % p
    n = A.shape[0]
    A = A.copy()
    det = np.ones(n, dtype=np.int64)
    for i in range(size):
        # choose a pivot row with nonzero entry in column i
        piv_rows = np.argmax(A[:, i:, i] != 0, axis=1) + i
        has = A[np.arange(n), piv_rows, i] != 0
        det[~has] = 0
        idx = np.arange(n)
        swap = piv_rows != i
        if swap.any():
            rows_i = A[idx, i].copy()
            A[idx, i] = A[idx, piv_rows]
            A[idx, piv_rows] = rows_i
            det[swap] = (-det[swap]) % p
        piv = A[:, i, i]
        det = det * piv % p
        inv = np.array([pow(int(x), -1, p) if x else 0 for x in range(p)], dtype=np.int64)[piv]
        for k in range(i + 1, size):
            f = A[:, k, i] * inv % p
            A[:, k, :] = (A[:, k, :] - f[:, None] * A[:, i, :]) % p
    return det


def gl_residues(h: int, p: int, limit: int = DEFAULT_CELL_BUDGET):
    size = 2 * h
    M = all_residue_matrices(size, p, limit)
    return M[_det_mod_p(M, size, p) != 0]


def coset_representatives(h: int, n: int, m: int, p: int, limit: int = DEFAULT_CELL_BUDGET):
    """Integer matrices c (flattened) representing R_n / R_m, or GL/R_m when n = 0."""
    size = 2 * h
    K = size * size
    if m < n:
        raise DomainError("depth must be at least the level")
    count = deg_level_F(h, m, p) // deg_level_F(h, n, p)
    if count > limit:
        raise EnumerationTooLarge(f"{count} representatives exceed the limit {limit}")
    eye = np.eye(size, dtype=np.int64).reshape(1, K)
    if n == m:
        return eye.copy()
    if n == 0:
        base = gl_residues(h, p, limit)
        lo = 1
    else:
        base = eye.copy()
        lo = n
    if m > lo:
        Z = np.array(list(itertools.product(range(p ** (m - lo)), repeat=K)), dtype=np.int64)
        out = (base[:, None, :] + p ** lo * Z[None, :, :]).reshape(-1, K)
    else:
        out = base
    return out


# ---------------------------------------------------------------------------
# integrands

def scalars_to_ints(entries, Nk: int):
    """Scale Scalars by a common power of p to integers known mod p^Nk; returns (ints, shift)."""
    vals = [e.val for e in entries if not e.is_zero()]
    if not vals:
        raise SingularOrbit("integrand data vanish identically")
    s = min(vals)
    P = entries[0].F.p ** Nk
    out = []
    p = entries[0].F.p
    for e in entries:
        if e.is_exact_zero():
            out.append(0)
            continue
        if e.abs_prec() - s < Nk:
            raise PrecisionExhausted("integrand coefficients lack precision for the word kernel")
        if e.prec == 0:
            out.append(0)
        else:
            out.append(e.unit * p ** (e.val - s) % P)
    return out, s


def _big_digits(entries):
    s = min(e.val for e in entries if not e.is_zero())
    return min(e.abs_prec() for e in entries) - s


class ConstantIntegrand:
    """An integrand known to be constant (``value`` is an exact rational)."""

    constant = True

    def __init__(self, value):
        self.value = Fraction(value)


class NormIntegrand:
    """x -> |NRD(P x Q)|^-1 * q^shift, for P (h x 2h) and Q (2h x h) over D.

    ``shift_per_det`` adds -h * v(det x) to the exponent; with
    ``base_shift = -h v(Nrd j)`` this turns the norm into the
    resultant integrand of the intersection formula.
    """

    constant = False

    def __init__(self, P, Q, F: FieldDesc, h: int, base_shift: int = 0, shift_per_det: int = 0):
        self.P = P
        self.Q = Q
        self.F = F
        self.h = h
        self.base_shift = base_shift
        self.shift_per_det = shift_per_det

    def prepare(self, L, R):
        return PreparedNorm(self, L, R)


class PreparedNorm:
    def __init__(self, G: NormIntegrand, L, R):
        F = G.F
        p = F.p
        h = G.h
        size = 2 * h
        D = G.P[0][0].D
        self.p = p
        self.h = h
        self.Nk = kernels.word_digits(p)
        PL = [[sum((G.P[r][a] * D.scalar(L[a][k]) for a in range(size)), D.zero())
               for k in range(size)] for r in range(h)]
        RQ = [[sum((D.scalar(R[t][b]) * G.Q[b][c] for b in range(size)), D.zero())
               for c in range(h)] for t in range(size)]
        mats = []
        for k in range(size):
            for t in range(size):
                B = [[PL[r][k] * RQ[t][c] for c in range(h)] for r in range(h)]
                mats.append(f_linear_matrix(B))
        self.d = len(mats[0])
        flat = [e for M in mats for row in M for e in row]
        ints, s = scalars_to_ints(flat, self.Nk)
        self.scale = s
        K = size * size
        self.S = np.array(ints, dtype=np.int64).reshape(K, self.d, self.d)
        nb = _big_digits(flat)
        self.Nbig = nb
        Pb = p ** nb
        self.S_big = [[[(e.unit * p ** (e.val - s)) % Pb if not e.is_zero() else 0
                        for e in M[r]] for r in range(self.d)] for M in mats]
        vdet = _vfrac(frac_det(L), p) + _vfrac(frac_det(R), p)
        self.shift = G.base_shift + G.shift_per_det * vdet

    def _exact_row(self, c):
        P = self.p ** self.Nbig
        d = self.d
        W = [[0] * d for _ in range(d)]
        for k, ck in enumerate(c):
            ck = int(ck)
            if ck:
                Sk = self.S_big[k]
                for r in range(d):
                    for t in range(d):
                        W[r][t] += ck * Sk[r][t]
        W = [[x % P for x in row] for row in W]
        return exponents_one(W, self.p, P)

    def exponents(self, C, threads: int = 1):
        """Elementary-divisor exponents of the scaled linear matrix at each row of C."""
        C = np.asarray(C, dtype=np.int64)
        if C.size and int(C.max()) >= self.p ** self.Nk:
            raise PrecisionExhausted("cell representatives exceed the word kernel range")
        E = kernels.snf_exponents_batch(self.S, C, self.p, self.Nk, threads)
        bad = np.nonzero((E < 0).any(axis=1))[0]
        for i in bad:
            row = self._exact_row(C[i])
            if min(row) < 0:
                raise SingularOrbit("the integrand is infinite at a cell representative")
            E[i] = row
        return E

    def valuations_from_exponents(self, E):
        tot = E.sum(axis=1).astype(np.int64) + self.d * self.scale
        if (tot % (2 * self.h)).any():
            raise PrecisionExhausted("determinant valuation is not a multiple of 2h")
        return tot // (2 * self.h) + self.shift

    def valuations(self, C, threads: int = 1):
        return self.valuations_from_exponents(self.exponents(C, threads))


class ResFormIntegrand:
    """x -> |alpha - Nm(x_plus(x)) / det x|^-1 for h = 1 (the resultant path).

    At h = 1 the invariant element of x is Nm(x_plus)/det(x); the resultant
    with X - alpha is alpha - Nm(x_plus)/det(x).  Multiplying through by
    det(x) gives a quadratic form in the entries of x, evaluated by the
    word kernel.
    """

    constant = False

    def __init__(self, alpha: Scalar, pair):
        if pair.h != 1:
            raise DomainError("the quadratic-form path is specific to h = 1")
        self.alpha = alpha
        self.pair = pair
        self.F = pair.F
        self.h = 1

    def prepare(self, L, R):
        return PreparedResForm(self, L, R)


class PreparedResForm:
    def __init__(self, G: ResFormIntegrand, L, R):
        F = G.F
        p = F.p
        pair = G.pair
        self.p = p
        self.Nk = kernels.word_digits(p)
        fi, fr = pair.frame_inv, pair.frame
        # x_plus = sum_ab x_ab w_ab with w_ab = (frame^-1 E_ab frame)_00
        w = [[fi[0][a] * fr[b][0] for b in range(2)] for a in range(2)]
        Lm = [[F(x) for x in row] for row in L]
        Rm = [[F(x) for x in row] for row in R]
        # x = L c R, so x_ab = sum_kt L_ak c_kt R_tb and x_plus = sum_kt c_kt omega_kt
        omega = []
        for k in range(2):
            for t in range(2):
                o = pair.K.zero()
                for a in range(2):
                    for b in range(2):
                        o = o + w[a][b] * (Lm[a][k] * Rm[t][b])
                omega.append(o)
        detLR = mat_det(Lm) * mat_det(Rm)
        Q = [[F.zero()] * 4 for _ in range(4)]
        for i in range(4):
            Q[i][i] = -omega[i].norm()
            for j in range(i + 1, 4):
                Q[i][j] = -(omega[i] * omega[j].conj()).trace()
        ad = G.alpha * detLR
        Q[0][3] = Q[0][3] + ad
        Q[1][2] = Q[1][2] - ad
        flat = [Q[i][j] for i in range(4) for j in range(4)]
        ints, s = scalars_to_ints([x if i <= j else F.zero() for i, row in enumerate(Q)
                                   for j, x in enumerate(row)], self.Nk)
        self.Q = np.array(ints, dtype=np.int64).reshape(4, 4)
        self.scale = s
        self.vdet = detLR.valuation()

    def valuations(self, C, threads: int = 1):
        C = np.asarray(C, dtype=np.int64)
        V = kernels.form_valuations(self.Q, C, self.p, self.Nk, threads)
        if (V < 0).any():
            raise SingularOrbit("resultant vanishes (to word precision) at a representative")
        return V.astype(np.int64) + self.scale - self.vdet


class ResPathIntegrand:
    """x -> |Res(P_j, P_x)|^-1 evaluated one point at a time through invariant polynomials."""

    constant = False

    def __init__(self, j, pair, strict: bool = False):
        from .cycles import invariant_poly_j
        self.Pj = invariant_poly_j(j, pair, strict)
        self.pair = pair
        self.F = pair.F
        self.h = pair.h

    def prepare(self, L, R):
        return PreparedResPath(self, L, R)


class PreparedResPath:
    def __init__(self, G: ResPathIntegrand, L, R):
        self.G = G
        self.L = L
        self.R = R

    def valuations(self, C, threads: int = 1):
        from .cycles import res_rel
        from .linalg import invariant_poly_tau, resultant
        F = self.G.F
        size = 2 * self.G.h
        out = np.empty(len(C), dtype=np.int64)
        for i, row in enumerate(np.asarray(C)):
            c = [[Fraction(int(row[a * size + b])) for b in range(size)] for a in range(size)]
            x = frac_mul(frac_mul(self.L, c), self.R)
            r = resultant(self.G.Pj, invariant_poly_tau(matrix(F, x), self.G.pair))
            if r.is_zero():
                raise SingularOrbit("resultant vanishes at a representative")
            out[i] = r.valuation()
        return out


# ---------------------------------------------------------------------------

@dataclass
class IntegrationResult:
    value: Fraction
    cells: int
    max_depth: int
    certified: list = field(default_factory=list, repr=False)


def _pow_q(p, v):
    return Fraction(p) ** int(v)


def adaptive_integrate(G, f: TestFunction, p: int, budget: int = DEFAULT_CELL_BUDGET,
                       threads: int = 1, keep_cells: bool = False) -> IntegrationResult:
    """Integral of f * G with exact, certified subdivision into R_m-cells."""
    if getattr(G, "constant", False):
        return IntegrationResult(G.value, len(f.pieces(p)), f.n)
    h = f.h
    size = 2 * h
    K = size * size
    n = f.n
    total = Fraction(0)
    used = 0
    max_depth = n
    certified = []
    children = None
    I = frac_identity(size)
    for L, mass in f.pieces(p):
        prep = G.prepare(L, I)
        if n == 0:
            cells = gl_residues(h, p, budget)
            m = 1
        else:
            cells = np.eye(size, dtype=np.int64).reshape(1, K)
            m = n
        counts = Counter()
        while len(cells):
            if used + len(cells) > budget:
                raise BudgetExceeded(f"more than {budget} cells required")
            E = prep.exponents(cells, threads)
            emax = E.max(axis=1)
            ok = emax < m
            vals = prep.valuations_from_exponents(E[ok])
            for v in vals:
                counts[(m, int(v))] += 1
            if keep_cells:
                certified.extend((L, tuple(int(x) for x in c), m, int(v))
                                 for c, v in zip(cells[ok], vals))
            used += int(ok.sum())
            max_depth = max(max_depth, m)
            rest = cells[~ok]
            if not len(rest):
                break
            if children is None:
                children = all_residue_matrices(size, p, budget)
            if used + len(rest) * len(children) > budget:
                raise BudgetExceeded(f"more than {budget} cells required")
            cells = (rest[:, None, :] + p ** m * children[None, :, :]).reshape(-1, K)
            m += 1
        dn = deg_level_F(h, n, p)
        piece = Fraction(0)
        for (mm, v), cnt in sorted(counts.items()):
            piece += Fraction(cnt * dn, deg_level_F(h, mm, p)) * _pow_q(p, v)
        total += mass * piece
    return IntegrationResult(total, used, max_depth, certified)


def exhaustive_integrate(G, f: TestFunction, m: int, p: int, budget: int = DEFAULT_CELL_BUDGET,
                         threads: int = 1) -> Fraction:
    """Average of G over all representatives of the support modulo R_m."""
    if getattr(G, "constant", False):
        return G.value
    h = f.h
    I = frac_identity(2 * h)
    total = Fraction(0)
    for L, mass in f.pieces(p):
        C = coset_representatives(h, f.n, m, p, budget)
        V = G.prepare(L, I).valuations(C, threads)
        hist = Counter(int(v) for v in V)
        s = sum(cnt * _pow_q(p, v) for v, cnt in sorted(hist.items()))
        total += mass * s / len(C)
    return total


# ---------------------------------------------------------------------------

def _spread(g0, p):
    F = FieldDesc(p)
    e = snf(matrix(F, g0)).exponents
    return max(e) - min(e)


def decompose_double_coset(n: int, g0, p: int, side: str = "left",
                           limit: int = DEFAULT_CELL_BUDGET):
    """Representatives x_i with R_n g0 R_n = disjoint union of x_i R_n (or R_n x_i)."""
    g0 = _frac_matrix(g0)
    size = len(g0)
    h = size // 2
    k = _spread(g0, p)
    ginv = frac_inv(g0)
    C = coset_representatives(h, n, n + k, p, limit)
    reps = []
    inv_reps = []
    for row in C:
        r = tuple(tuple(Fraction(int(row[a * size + b])) for b in range(size)) for a in range(size))
        x = frac_mul(r, g0) if side == "left" else frac_mul(g0, r)
        xinv = frac_inv(x)
        dup = False
        for y, yinv in zip(reps, inv_reps):
            test = frac_mul(yinv, x) if side == "left" else frac_mul(x, yinv)
            if in_R(test, n, p):
                dup = True
                break
        if not dup:
            reps.append(x)
            inv_reps.append(xinv)
    return reps


def double_coset_index(n: int, g0, p: int, limit: int = DEFAULT_CELL_BUDGET) -> int:
    """[R_n : R_n cap g0 R_n g0^-1], counted through the stabilizer of g0 R_n."""
    g0 = _frac_matrix(g0)
    size = len(g0)
    h = size // 2
    k = _spread(g0, p)
    ginv = frac_inv(g0)
    C = coset_representatives(h, n, n + k, p, limit)
    stab = 0
    for row in C:
        r = tuple(tuple(Fraction(int(row[a * size + b])) for b in range(size)) for a in range(size))
        if in_R(frac_mul(frac_mul(ginv, r), g0), n, p):
            stab += 1
    return len(C) // stab
