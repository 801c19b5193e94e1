"""Pure-Python versions of the integer kernels (same semantics as ``_kernels``).

All arithmetic is modulo P = p**Nk.  An exponent of -1 marks a position
that could not be certified because the remaining block vanished mod P.
"""
import numpy as np


def _vp(x, p):
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def exponents_one(W, p, P):
    """Elementary-divisor exponents of the integer matrix W modulo P (W is modified)."""
    d = len(W)
    out = [-1] * d
    for k in range(d):
        best, bv = None, None
        for r in range(k, d):
            Wr = W[r]
            for c in range(k, d):
                x = Wr[c]
                if x:
                    v = _vp(x, p)
                    if bv is None or v < bv:
                        best, bv = (r, c), v
                        if v == 0:
                            break
            if bv == 0:
                break
        if best is None:
            break
        r, c = best
        if r != k:
            W[k], W[r] = W[r], W[k]
        if c != k:
            for row in W:
                row[k], row[c] = row[c], row[k]
        pv = p ** bv
        uinv = pow(W[k][k] // pv, -1, P)
        Wk = W[k]
        for r in range(k + 1, d):
            x = W[r][k]
            if x:
                f = (x // pv) * uinv % P
                Wr = W[r]
                for j in range(k + 1, d):
                    Wr[j] = (Wr[j] - f * Wk[j]) % P
                Wr[k] = 0
        out[k] = bv
    return out


def snf_exponents_batch(S, C, p, Nk, nthreads=1):
    S = np.asarray(S, dtype=np.int64)
    C = np.asarray(C, dtype=np.int64)
    K, d, _ = S.shape
    P = p ** Nk
    Sl = [[[int(x) for x in row] for row in S[k]] for k in range(K)]
    out = np.empty((C.shape[0], d), dtype=np.int32)
    for i in range(C.shape[0]):
        c = [int(x) % P for x in C[i]]
        W = [[0] * d for _ in range(d)]
        for k in range(K):
            ck = c[k]
            if ck:
                Sk = Sl[k]
                for r in range(d):
                    Wr, Sr = W[r], Sk[r]
                    for s in range(d):
                        Wr[s] += ck * Sr[s]
        W = [[x % P for x in row] for row in W]
        out[i] = exponents_one(W, p, P)
    return out


def form_valuations(Q, C, p, Nk, nthreads=1):
    Q = np.asarray(Q, dtype=np.int64)
    C = np.asarray(C, dtype=np.int64)
    K = Q.shape[0]
    P = p ** Nk
    terms = [(a, b, int(Q[a, b])) for a in range(K) for b in range(a, K) if Q[a, b]]
    out = np.empty(C.shape[0], dtype=np.int32)
    for i in range(C.shape[0]):
        c = [int(x) for x in C[i]]
        s = sum(q * c[a] * c[b] for a, b, q in terms) % P
        out[i] = _vp(s, p) if s else -1
    return out
