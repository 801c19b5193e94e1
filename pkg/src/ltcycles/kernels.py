"""Kernel selection: the compiled extension when importable, else pure Python.

Set ``LTCYCLES_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _kernels_py

if os.environ.get("LTCYCLES_PURE_PYTHON"):
    _impl = _kernels_py
    COMPILED = False
else:
    try:
        from . import _kernels as _impl
        COMPILED = True
    except ImportError:
        _impl = _kernels_py
        COMPILED = False


def word_digits(p: int) -> int:
    """Largest k with p**k < 2**32, so residue products fit in 64 bits."""
    k = 0
    while p ** (k + 1) < 2 ** 32:
        k += 1
    return k


def _chunked(fn, first, C, p, Nk, threads):
    C = np.ascontiguousarray(C, dtype=np.int64)
    M = C.shape[0]
    if threads <= 1 or M < 2048:
        return fn(first, C, p, Nk)
    bounds = np.linspace(0, M, threads + 1).astype(int)
    with ThreadPoolExecutor(max_workers=threads) as ex:
        parts = list(ex.map(lambda ab: fn(first, C[ab[0]:ab[1]], p, Nk),
                            zip(bounds[:-1], bounds[1:])))
    return np.concatenate(parts)


def snf_exponents_batch(S, C, p: int, Nk: int, threads: int = 1, impl=None):
    impl = impl or _impl
    return _chunked(impl.snf_exponents_batch, np.ascontiguousarray(S, dtype=np.int64), C, p, Nk, threads)


def form_valuations(Q, C, p: int, Nk: int, threads: int = 1, impl=None):
    impl = impl or _impl
    return _chunked(impl.form_valuations, np.ascontiguousarray(Q, dtype=np.int64), C, p, Nk, threads)
