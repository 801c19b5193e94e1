"""Compiled vs pure-Python kernels on random batches.

    python benchmarks/bench_kernels.py [--rows 20000] [--threads 1]

Also runs one end-to-end integral (the linear AFL right-hand side at
v(b) = 2) under both kernels.
"""
import argparse
import random
import time

import numpy as np

from ltcycles import _kernels_py, kernels


def _time(fn, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def bench_snf(p, d, rows, threads):
    rng = np.random.default_rng(0)
    Nk = kernels.word_digits(p)
    P = p ** Nk
    S = rng.integers(0, P, size=(d * d // 2, d, d), dtype=np.int64)
    C = rng.integers(0, p ** 3, size=(rows, S.shape[0]), dtype=np.int64)
    t_py, a = _time(lambda: kernels.snf_exponents_batch(S, C, p, Nk, threads, impl=_kernels_py), 1)
    if not kernels.COMPILED:
        return t_py, None
    from ltcycles import _kernels
    t_c, b = _time(lambda: kernels.snf_exponents_batch(S, C, p, Nk, threads, impl=_kernels))
    assert np.array_equal(a, b), "compiled and pure-Python kernels disagree"
    return t_py, t_c


def bench_form(p, K, rows, threads):
    rng = np.random.default_rng(1)
    Nk = kernels.word_digits(p)
    Q = np.triu(rng.integers(-50, 50, size=(K, K), dtype=np.int64))
    C = rng.integers(0, p ** 4, size=(rows, K), dtype=np.int64)
    t_py, a = _time(lambda: kernels.form_valuations(Q, C, p, Nk, threads, impl=_kernels_py), 1)
    if not kernels.COMPILED:
        return t_py, None
    from ltcycles import _kernels
    t_c, b = _time(lambda: kernels.form_valuations(Q, C, p, Nk, threads, impl=_kernels))
    assert np.array_equal(a, b), "compiled and pure-Python kernels disagree"
    return t_py, t_c


def bench_afl(impl):
    from ltcycles import samples
    from ltcycles.cda import CyclicAlgebra
    from ltcycles.localfield import FieldDesc
    from ltcycles.orbital import verify_afl_h1
    saved = kernels._impl
    kernels._impl = impl
    try:
        D = CyclicAlgebra(FieldDesc(3), 1)
        j = samples.random_quaternion(D, random.Random(5), 2)
        t = time.perf_counter()
        r = verify_afl_h1(j)
        return time.perf_counter() - t, r.ratio
    finally:
        kernels._impl = saved


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--rows", type=int, default=20000)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    print(f"compiled kernels available: {kernels.COMPILED}")
    print(f"{'kernel':<28}{'python s':>10}{'compiled s':>12}{'speedup':>9}")
    for label, (t_py, t_c) in [
        ("snf p=3 d=4", bench_snf(3, 4, args.rows, args.threads)),
        ("snf p=3 d=8", bench_snf(3, 8, args.rows // 4, args.threads)),
        ("snf p=5 d=4", bench_snf(5, 4, args.rows, args.threads)),
        ("quadratic form p=3 K=4", bench_form(3, 4, args.rows * 5, args.threads)),
    ]:
        if t_c is None:
            print(f"{label:<28}{t_py:>10.3f}{'-':>12}{'-':>9}")
        else:
            print(f"{label:<28}{t_py:>10.3f}{t_c:>12.4f}{t_py / t_c:>8.1f}x")
    if kernels.COMPILED:
        from ltcycles import _kernels
        tp, rp = bench_afl(_kernels_py)
        tc, rc = bench_afl(_kernels)
        assert rp == rc
        print(f"{'AFL check, v(b)=2':<28}{tp:>10.3f}{tc:>12.4f}{tp / tc:>8.1f}x")


if __name__ == "__main__":
    main()
