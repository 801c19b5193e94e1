"""Seeded generators for the random families used by the CLI and the tests."""
from __future__ import annotations

import random

from .cda import CDAElement, CyclicAlgebra, FnElt


def random_unit_fn(D: CyclicAlgebra, rng: random.Random, spread: int = 50) -> FnElt:
    p = D.F.p
    while True:
        c = [rng.randrange(-spread, spread + 1) for _ in range(D.n)]
        if any(x % p for x in c):
            return D.T.element(c)


def random_quaternion(D: CyclicAlgebra, rng: random.Random, b_val: int = 0) -> CDAElement:
    """a + p^b_val u Pi with a, u random units of F_2; strict for the standard unramified pair."""
    if D.h != 1:
        raise ValueError("quaternion samples need h = 1")
    a = random_unit_fn(D, rng)
    b = random_unit_fn(D, rng)
    return D.from_fn(a) + D.scalar(D.F.p ** b_val) * D.from_fn(b) * D.Pi()


def random_element(D: CyclicAlgebra, rng: random.Random, spread: int = 20) -> CDAElement:
    while True:
        x = D.element([[rng.randrange(-spread, spread + 1) for _ in range(D.n)] for _ in range(D.n)])
        if not x.is_zero():
            return x


def random_integral_matrix(size: int, rng: random.Random, spread: int = 30):
    return [[rng.randrange(-spread, spread + 1) for _ in range(size)] for _ in range(size)]


def random_gl_O(size: int, p: int, rng: random.Random, spread: int = 30):
    """A random integer matrix with unit determinant at p."""
    from .integrate import frac_det
    from fractions import Fraction
    while True:
        g = random_integral_matrix(size, rng, spread)
        d = frac_det(tuple(tuple(Fraction(x) for x in row) for row in g))
        if d != 0 and d.numerator % p:
            return g
