"""Independent oracles and generators shared by the tests."""
from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
from hypothesis import strategies as st

from evoalg.algebra import BasisChange, StructMatrix


def direct_transform(m: StructMatrix, t: BasisChange) -> np.ndarray:
    """Re-derive the structural matrix by multiplying out e'_i e'_i in floats.

    Works from the product definition (coordinates squared, cross terms
    dropped) and a numpy linear solve, sharing no code with ``transform``.
    """
    a = np.array(m.to_lists(), dtype=float)
    tm = np.array(t.to_lists(), dtype=float)
    rows = []
    for i in range(2):
        old = sum(tm[i, k] ** 2 * a[k] for k in range(2))
        # express old-basis coordinates in the new basis: c @ tm = old
        rows.append(np.linalg.solve(tm.T, old))
    return np.array(rows)


def fractions(limit: int = 12):
    return st.fractions(min_value=-limit, max_value=limit, max_denominator=limit)


@st.composite
def exact_matrices(draw, limit: int = 12):
    return StructMatrix(*(draw(fractions(limit)) for _ in range(4)))


@st.composite
def rank1_matrices(draw):
    """Exact rank-one matrices: one row a multiple of the other."""
    p = draw(fractions())
    q = draw(fractions())
    if p == 0 and q == 0:
        p = Fraction(1)
    k = draw(fractions())
    if draw(st.booleans()):
        return StructMatrix(p, q, k * p, k * q)
    return StructMatrix(k * p, k * q, p, q)


def natural_change(m: StructMatrix, rng: random.Random, exact: bool = True) -> BasisChange:
    """Random invertible basis change that keeps the basis natural.

    Solves ``(t11 t21, t12 t22) M = 0``: for rank 2 the products vanish
    (diagonal or antidiagonal shape); for rank 1 they follow the left
    null vector of ``M``; for rank 0 anything invertible works.
    """
    if exact:
        def num():
            return Fraction(rng.randint(-9, 9), rng.randint(1, 5))
    else:
        # magnitudes bounded away from 0 keep the image well conditioned
        def num():
            return rng.choice((-1, 1)) * rng.uniform(0.25, 3.0)

    def nonzero():
        while True:
            x = num()
            if x != 0:
                return x

    a11, a12, a21, a22 = m.entries
    det = a11 * a22 - a12 * a21
    zero_matrix = all(v == 0 for v in m.entries) if exact else max(abs(v) for v in m.entries) < 1e-12
    if zero_matrix:
        while True:
            t = BasisChange(num(), num(), num(), num())
            if t.det() != 0:
                return t
    if (det != 0) if exact else abs(det) > 1e-9:
        if rng.random() < 0.5:
            return BasisChange(nonzero(), 0, 0, nonzero())
        return BasisChange(0, nonzero(), nonzero(), 0)
    # left null vector n of M: n @ M = 0
    if a11 != 0 or a12 != 0:
        n1, n2 = (-a21, a11) if a11 != 0 else (-a22, a12)
    else:
        n1, n2 = 1, 0
    while True:
        t11, t12, c = nonzero(), nonzero(), nonzero()
        t = BasisChange(t11, t12, c * n1 / t11, c * n2 / t12)
        if t.det() != 0:
            return t


def random_float_matrix(rng: random.Random, lo: float = -5.0, hi: float = 5.0) -> StructMatrix:
    return StructMatrix(*(rng.uniform(lo, hi) for _ in range(4)))
