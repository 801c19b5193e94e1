# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled integer kernels; see ``_kernels_py`` for the reference semantics."""
import numpy as np
from libc.stdint cimport int32_t, int64_t, uint64_t
from libc.stdlib cimport free, malloc


cdef inline int vp64(uint64_t x, uint64_t p) noexcept nogil:
    cdef int v = 0
    while x % p == 0:
        x = x // p
        v += 1
    return v


cdef inline uint64_t red(int64_t x, uint64_t P) noexcept nogil:
    # C remainder keeps the sign of x
    cdef int64_t r = x % <int64_t>P
    if r < 0:
        r += <int64_t>P
    return <uint64_t>r


cdef inline uint64_t invmod(uint64_t a, uint64_t m) noexcept nogil:
    cdef int64_t t = 0, nt = 1, r = <int64_t>m, nr = <int64_t>(a % m), qq, tmp
    while nr != 0:
        qq = r // nr
        tmp = t - qq * nt
        t = nt
        nt = tmp
        tmp = r - qq * nr
        r = nr
        nr = tmp
    if t < 0:
        t += <int64_t>m
    return <uint64_t>t


cdef void exponents_one(uint64_t* W, int d, uint64_t p, uint64_t P, int32_t* out) noexcept nogil:
    cdef int k, r, c, j, br, bc, bv, v
    cdef uint64_t x, pv, uinv, f, tmp
    for k in range(d):
        out[k] = -1
    for k in range(d):
        bv = -1
        br = -1
        bc = -1
        for r in range(k, d):
            for c in range(k, d):
                x = W[r * d + c]
                if x != 0:
                    v = vp64(x, p)
                    if bv < 0 or v < bv:
                        bv = v
                        br = r
                        bc = c
                        if v == 0:
                            break
            if bv == 0:
                break
        if bv < 0:
            return
        if br != k:
            for j in range(d):
                tmp = W[k * d + j]
                W[k * d + j] = W[br * d + j]
                W[br * d + j] = tmp
        if bc != k:
            for r in range(d):
                tmp = W[r * d + k]
                W[r * d + k] = W[r * d + bc]
                W[r * d + bc] = tmp
        pv = 1
        for j in range(bv):
            pv *= p
        uinv = invmod(W[k * d + k] // pv, P)
        for r in range(k + 1, d):
            x = W[r * d + k]
            if x != 0:
                f = ((x // pv) * uinv) % P
                for j in range(k + 1, d):
                    W[r * d + j] = (W[r * d + j] + (P - (f * W[k * d + j]) % P)) % P
                W[r * d + k] = 0
        out[k] = bv


def snf_exponents_batch(S, C, long p, int Nk, int nthreads=1):
    cdef int64_t[:, :, ::1] Sv = np.ascontiguousarray(S, dtype=np.int64)
    cdef int64_t[:, ::1] Cv = np.ascontiguousarray(C, dtype=np.int64)
    cdef Py_ssize_t K = Sv.shape[0], d = Sv.shape[1], M = Cv.shape[0]
    out = np.empty((M, d), dtype=np.int32)
    cdef int32_t[:, ::1] o = out
    cdef uint64_t P = 1
    cdef int t
    for t in range(Nk):
        P *= <uint64_t>p
    cdef uint64_t* W = <uint64_t*>malloc(d * d * sizeof(uint64_t))
    cdef Py_ssize_t i, k, r, s
    cdef uint64_t ck
    with nogil:
        for i in range(M):
            for r in range(d * d):
                W[r] = 0
            for k in range(K):
                ck = red(Cv[i, k], P)
                if ck == 0:
                    continue
                for r in range(d):
                    for s in range(d):
                        W[r * d + s] = (W[r * d + s] + (ck * red(Sv[k, r, s], P)) % P) % P
            exponents_one(W, <int>d, <uint64_t>p, P, &o[i, 0])
    free(W)
    return out


def form_valuations(Q, C, long p, int Nk, int nthreads=1):
    cdef int64_t[:, ::1] Qv = np.ascontiguousarray(Q, dtype=np.int64)
    cdef int64_t[:, ::1] Cv = np.ascontiguousarray(C, dtype=np.int64)
    cdef Py_ssize_t K = Qv.shape[0], M = Cv.shape[0]
    out = np.empty(M, dtype=np.int32)
    cdef int32_t[::1] o = out
    cdef uint64_t P = 1
    cdef int t
    for t in range(Nk):
        P *= <uint64_t>p
    cdef Py_ssize_t i, a, b
    cdef uint64_t s, ca, cb, qab
    with nogil:
        for i in range(M):
            s = 0
            for a in range(K):
                ca = red(Cv[i, a], P)
                if ca == 0:
                    continue
                for b in range(a, K):
                    qab = red(Qv[a, b], P)
                    if qab == 0:
                        continue
                    cb = red(Cv[i, b], P)
                    s = (s + (((qab * ca) % P) * cb) % P) % P
            o[i] = vp64(s, <uint64_t>p) if s != 0 else -1
    return out
