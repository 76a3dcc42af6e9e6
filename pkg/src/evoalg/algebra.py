"""Two-dimensional evolution algebras given by structural matrices.

Row ``i`` of a :class:`StructMatrix` holds the coordinates of ``e_i e_i`` in
the natural basis; ``e_1 e_2 = e_2 e_1 = 0``.  A :class:`BasisChange` with rows
``T_i`` describes ``e'_i = T_i1 e_1 + T_i2 e_2``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .scalars import DEFAULT_TOL, Number, is_exact


class AlgebraError(ValueError):
    pass


class SingularChange(AlgebraError):
    pass


class NotNaturalBasis(AlgebraError):
    pass


def _coerce(values) -> tuple:
    if all(is_exact(v) for v in values):
        return tuple(Fraction(v) if isinstance(v, int) else v for v in values)
    return tuple(float(v) for v in values)


@dataclass(frozen=True, slots=True)
class StructMatrix:
    a11: Number
    a12: Number
    a21: Number
    a22: Number

    def __post_init__(self):
        raw = (self.a11, self.a12, self.a21, self.a22)
        if all(type(v) is float for v in raw):
            return
        vals = _coerce(raw)
        for name, v in zip(("a11", "a12", "a21", "a22"), vals):
            object.__setattr__(self, name, v)

    @classmethod
    def from_rows(cls, rows) -> StructMatrix:
        (a, b), (c, d) = rows
        return cls(a, b, c, d)

    @property
    def rows(self) -> tuple[tuple, tuple]:
        return (self.a11, self.a12), (self.a21, self.a22)

    @property
    def entries(self) -> tuple:
        return self.a11, self.a12, self.a21, self.a22

    @property
    def exact(self) -> bool:
        return not isinstance(self.a11, float)

    @property
    def scale(self) -> float:
        return max(abs(float(v)) for v in self.entries)

    def det(self) -> Number:
        return self.a11 * self.a22 - self.a12 * self.a21

    def scaled(self, c: Number) -> StructMatrix:
        return StructMatrix(*(c * v for v in self.entries))

    def to_float(self) -> StructMatrix:
        return StructMatrix(*(float(v) for v in self.entries))

    def to_lists(self) -> list[list[float]]:
        return [[float(self.a11), float(self.a12)], [float(self.a21), float(self.a22)]]


@dataclass(frozen=True, slots=True)
class Element:
    c1: Number
    c2: Number


@dataclass(frozen=True, slots=True)
class BasisChange:
    t11: Number
    t12: Number
    t21: Number
    t22: Number

    def __post_init__(self):
        raw = (self.t11, self.t12, self.t21, self.t22)
        if all(type(v) is float for v in raw):
            return
        vals = _coerce(raw)
        for name, v in zip(("t11", "t12", "t21", "t22"), vals):
            object.__setattr__(self, name, v)

    @classmethod
    def identity(cls) -> BasisChange:
        return cls(1, 0, 0, 1)

    @classmethod
    def swap(cls) -> BasisChange:
        return cls(0, 1, 1, 0)

    @classmethod
    def diagonal(cls, d1: Number, d2: Number) -> BasisChange:
        return cls(d1, 0 * d1, 0 * d2, d2)

    @property
    def entries(self) -> tuple:
        return self.t11, self.t12, self.t21, self.t22

    @property
    def rows(self) -> tuple[tuple, tuple]:
        return (self.t11, self.t12), (self.t21, self.t22)

    def det(self) -> Number:
        return self.t11 * self.t22 - self.t12 * self.t21

    def inverse(self) -> BasisChange:
        d = self.det()
        if d == 0:
            raise SingularChange("basis change is singular")
        return BasisChange(self.t22 / d, -self.t12 / d, -self.t21 / d, self.t11 / d)

    def __matmul__(self, inner: BasisChange) -> BasisChange:
        """``outer @ inner``: first change by ``inner``, then by ``outer``."""
        a, b, c, d = self.entries
        p, q, r, s = inner.entries
        return BasisChange(a * p + b * r, a * q + b * s, c * p + d * r, c * q + d * s)

    def to_float(self) -> BasisChange:
        return BasisChange(*(float(v) for v in self.entries))

    def to_lists(self) -> list[list[float]]:
        return [[float(self.t11), float(self.t12)], [float(self.t21), float(self.t22)]]


def product(u: Element, v: Element, m: StructMatrix) -> Element:
    """Evolution product ``u v``; cross terms vanish."""
    w1 = u.c1 * v.c1
    w2 = u.c2 * v.c2
    return Element(w1 * m.a11 + w2 * m.a21, w1 * m.a12 + w2 * m.a22)


def cross_product(m: StructMatrix, t: BasisChange) -> tuple:
    """Coordinates of ``e'_1 e'_2`` in the old basis."""
    x = t.t11 * t.t21
    y = t.t12 * t.t22
    return x * m.a11 + y * m.a21, x * m.a12 + y * m.a22


def _bound(m: StructMatrix, t: BasisChange, tol: float) -> float:
    tscale = max(1.0, max(abs(float(v)) for v in t.entries))
    return tol * max(1.0, m.scale) * tscale * tscale


def is_natural(m: StructMatrix, t: BasisChange, tol: float = DEFAULT_TOL) -> bool:
    """True when ``t`` is invertible and the new basis is again natural."""
    c1, c2 = cross_product(m, t)
    d = t.det()
    if m.exact and not isinstance(t.t11, float):
        return d != 0 and c1 == 0 and c2 == 0
    bound = _bound(m, t, tol)
    if abs(float(d)) <= tol * max(1.0, max(abs(float(v)) for v in t.entries)) ** 2:
        return False
    return abs(float(c1)) <= bound and abs(float(c2)) <= bound


def transform(
    m: StructMatrix, t: BasisChange, *, check: bool = True, tol: float = DEFAULT_TOL
) -> StructMatrix:
    """Structural matrix of the same algebra in the basis given by ``t``.

    ``M' = S(T) M T^{-1}`` with ``S(T)`` the entrywise square of ``T``.
    """
    d = t.det()
    if d == 0:
        raise SingularChange("basis change is singular")
    if check and not is_natural(m, t, tol):
        raise NotNaturalBasis("the new basis is not natural: e'_1 e'_2 != 0")
    t11, t12, t21, t22 = t.entries
    a11, a12, a21, a22 = m.entries
    # rows of S(T) M: e'_i e'_i in old coordinates
    s11, s12, s21, s22 = t11 * t11, t12 * t12, t21 * t21, t22 * t22
    w11 = s11 * a11 + s12 * a21
    w12 = s11 * a12 + s12 * a22
    w21 = s21 * a11 + s22 * a21
    w22 = s21 * a12 + s22 * a22
    # right-multiply by T^{-1} = adj(T) / det
    return StructMatrix(
        (w11 * t22 - w12 * t21) / d,
        (w12 * t11 - w11 * t12) / d,
        (w21 * t22 - w22 * t21) / d,
        (w22 * t11 - w21 * t12) / d,
    )


def rank(m: StructMatrix, tol: float = DEFAULT_TOL) -> int:
    """Dimension of the square ``E^2``."""
    if m.exact:
        if all(v == 0 for v in m.entries):
            return 0
        return 2 if m.det() != 0 else 1
    s = max(1.0, m.scale)
    if m.scale <= tol * s:
        return 0
    return 2 if abs(m.det()) > tol * s * s else 1


def max_abs_diff(a: StructMatrix, b: StructMatrix) -> float:
    return max(abs(float(x - y)) for x, y in zip(a.entries, b.entries))


def matrices_equal(a: StructMatrix, b: StructMatrix, tol: float = DEFAULT_TOL) -> bool:
    """Exact equality when both are exact, else relative closeness."""
    if a.exact and b.exact:
        return all(x == y for x, y in zip(a.entries, b.entries))
    return max_abs_diff(a, b) <= tol * max(1.0, a.scale, b.scale)
