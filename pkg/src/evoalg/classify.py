"""Canonical forms E0..E7 of two-dimensional real evolution algebras.

``classify`` walks the rank / diagonal / row-ratio decision tree and builds an
explicit natural basis change to the canonical table, which is re-checked with
:func:`evoalg.algebra.transform` before the record is returned.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import (
    BasisChange,
    StructMatrix,
    cross_product,
    max_abs_diff,
    transform,
)
from .scalars import DEFAULT_TOL, Number, cbrt, is_exact, sign, sqrt

TAGS = ("E0", "E1", "E2", "E3", "E4", "E5", "E6", "E7")


class ClassificationError(RuntimeError):
    """A witness failed its own verification (a bug, never expected)."""


class InvalidE6Params(ValueError):
    pass


class NumericallyAmbiguous(ValueError):
    def __init__(self, record: CanonicalRecord):
        super().__init__(
            f"classification of a near-boundary matrix defaulted to {record.cls}"
        )
        self.record = record


def _params_close(x: Number, y: Number, tol: float) -> bool:
    if is_exact(x) and is_exact(y):
        return x == y
    fx, fy = float(x), float(y)
    return abs(fx - fy) <= tol * max(1.0, abs(fx), abs(fy))


@dataclass(frozen=True)
class CanonicalClass:
    tag: str
    params: tuple = ()

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ValueError(f"unknown class tag {self.tag!r}")
        expected = {"E6": 2, "E7": 1}.get(self.tag, 0)
        if len(self.params) != expected:
            raise ValueError(f"{self.tag} takes {expected} parameter(s)")
        if self.tag == "E6":
            a2, a3 = self.params
            if a3 < a2:
                object.__setattr__(self, "params", (a3, a2))

    @classmethod
    def e6(cls, a2: Number, a3: Number) -> CanonicalClass:
        return cls("E6", (a2, a3))

    @classmethod
    def e7(cls, a4: Number) -> CanonicalClass:
        return cls("E7", (a4,))

    def matches(self, other: CanonicalClass, tol: float = DEFAULT_TOL) -> bool:
        if self.tag != other.tag:
            return False
        return all(_params_close(x, y, tol) for x, y in zip(self.params, other.params))

    def float_params(self) -> tuple[float, ...]:
        return tuple(float(p) for p in self.params)

    def __str__(self):
        if not self.params:
            return self.tag
        return f"{self.tag}({', '.join(format(float(p), '.12g') for p in self.params)})"


@dataclass(frozen=True)
class CanonicalRecord:
    cls: CanonicalClass
    witness: BasisChange
    verified: bool
    ambiguous: bool = False
    residual: float = 0.0
    notes: tuple[str, ...] = field(default=())


def canonical_matrix(c: CanonicalClass, tol: float = DEFAULT_TOL) -> StructMatrix:
    tag = c.tag
    if tag == "E0":
        return StructMatrix(0, 0, 0, 0)
    if tag == "E1":
        return StructMatrix(1, 0, 0, 0)
    if tag == "E2":
        return StructMatrix(1, 0, 1, 0)
    if tag == "E3":
        return StructMatrix(1, 1, -1, -1)
    if tag == "E4":
        return StructMatrix(0, 1, 0, 0)
    if tag == "E5":
        return StructMatrix(0, 1, 0, -1)
    if tag == "E6":
        a2, a3 = c.params
        gap = 1 - a2 * a3
        if (gap == 0) if is_exact(gap) else abs(gap) <= tol * max(1.0, abs(float(a2 * a3))):
            raise InvalidE6Params("E6 requires 1 - a2*a3 != 0")
        return StructMatrix(1, a2, a3, 1)
    a4 = c.params[0]
    return StructMatrix(0, 1, 1, a4)


class _Zero:
    """Zero tests for one classification; remembers near-boundary decisions."""

    __slots__ = ("exact", "tol", "ambiguous")

    def __init__(self, exact: bool, tol: float):
        self.exact = exact
        self.tol = tol
        self.ambiguous = False

    def __call__(self, x, bound: float = 1.0) -> bool:
        if self.exact:
            return x == 0
        if x == 0.0:
            return True
        if abs(x) <= self.tol * bound:
            self.ambiguous = True
            return True
        return False


_SWAP = BasisChange.swap()
_SWAP_FLOAT = _SWAP.to_float()


def _swap_for(m: StructMatrix) -> BasisChange:
    return _SWAP if m.exact else _SWAP_FLOAT


def _swapped(m: StructMatrix) -> StructMatrix:
    return StructMatrix(m.a22, m.a21, m.a12, m.a11)


def _rank2(m: StructMatrix, zero: _Zero, s: float):
    a1, a2, a3, a4 = m.entries
    if not zero(a1, s) and not zero(a4, s):
        d = BasisChange.diagonal(1 / a1, 1 / a4)
        p2 = a2 * a4 / (a1 * a1)
        p3 = a3 * a1 / (a4 * a4)
        if p3 < p2:
            return CanonicalClass.e6(p3, p2), _swap_for(m) @ d
        return CanonicalClass.e6(p2, p3), d
    swap = False
    if not zero(a1, s):
        # a4 == 0: exchange e1 and e2, then a1 == 0
        m = _swapped(m)
        a1, a2, a3, a4 = m.entries
        swap = True
    alpha = cbrt(1 / (a2 * a2 * a3))
    beta = cbrt(1 / (a2 * a3 * a3))
    w = BasisChange.diagonal(alpha, beta)
    if swap:
        w = w @ _swap_for(m)
    return CanonicalClass.e7(a4 * beta), w


def _rank1(m: StructMatrix, zero: _Zero, s: float):
    r1, r2 = m.rows
    swap = False
    if m.exact:
        swap = r1[0] == 0 and r1[1] == 0
    else:
        swap = max(abs(r2[0]), abs(r2[1])) > max(abs(r1[0]), abs(r1[1]))
    if swap:
        m = _swapped(m)
        r1, r2 = m.rows
    p, q = r1
    kappa = (r2[0] * p + r2[1] * q) / (p * p + q * q)
    if zero(kappa):
        kappa = 0 * kappa
    if kappa == 0:
        if zero(p, s):
            cls, t = CanonicalClass("E4"), BasisChange(1, 0, 0, q)
        else:
            cls, t = CanonicalClass("E1"), BasisChange(1 / p, q / (p * p), 0, 1)
    elif sign(kappa) > 0:
        n = p * p + kappa * q * q
        b = 1 / (n * sqrt(kappa))
        cls, t = CanonicalClass("E2"), BasisChange(p / n, q / n, -b * kappa * q, b * p)
    else:
        n = p * p + kappa * q * q
        if zero(n, s * s):
            cls, t = CanonicalClass("E3"), BasisChange.diagonal(1 / p, q / (p * p))
        else:
            b = 1 / (abs(n) * sqrt(-kappa))
            cls, t = CanonicalClass("E5"), BasisChange(-b * kappa * q, b * p, -p / n, -q / n)
    if swap:
        t = t @ _swap_for(m)
    return cls, t


def verify_witness(
    m: StructMatrix, t: BasisChange, target: StructMatrix, tol: float = DEFAULT_TOL
) -> tuple[bool, float]:
    """Check that ``t`` is a natural basis change taking ``m`` to ``target``.

    Returns ``(ok, residual)``; the residual is relative to the target scale
    (zero in exact arithmetic).
    """
    if t.det() == 0:
        return False, float("inf")
    image = transform(m, t, check=False)
    c1, c2 = cross_product(m, t)
    if m.exact and target.exact and image.exact:
        ok = c1 == 0 and c2 == 0 and all(
            x == y for x, y in zip(image.entries, target.entries)
        )
        return ok, 0.0 if ok else float("inf")
    tscale = max(1.0, max(abs(float(v)) for v in t.entries))
    cross = max(abs(float(c1)), abs(float(c2))) / (max(1.0, m.scale) * tscale * tscale)
    residual = max(max_abs_diff(image, target) / max(1.0, target.scale), cross)
    return residual <= tol, residual


def classify(
    m: StructMatrix, tol: float = DEFAULT_TOL, *, strict: bool = False
) -> CanonicalRecord:
    """Canonical class of ``m`` with a verified witness basis change.

    In floating mode a branch decided inside the tolerance band marks the
    record ``ambiguous``; with ``strict=True`` that raises
    :class:`NumericallyAmbiguous` instead.
    """
    zero = _Zero(m.exact, tol)
    s = max(1.0, m.scale)
    if all(zero(v, s) for v in m.entries):
        cls, t = CanonicalClass("E0"), BasisChange.identity()
    elif not zero(m.det(), s * s):
        cls, t = _rank2(m, zero, s)
    else:
        cls, t = _rank1(m, zero, s)
    ok, residual = verify_witness(m, t, canonical_matrix(cls, tol), tol)
    if not ok and not zero.ambiguous:
        raise ClassificationError(
            f"witness for {cls} failed verification (residual {residual:.3g})"
        )
    record = CanonicalRecord(cls, t, ok, zero.ambiguous, residual)
    if strict and zero.ambiguous:
        raise NumericallyAmbiguous(record)
    return record


def _form_matrix(kind: str, lam: Number, mu: Number) -> StructMatrix:
    if kind == "symmetric":
        return StructMatrix(lam, mu, mu, lam)
    if kind == "skew":
        return StructMatrix(lam, mu, -mu, lam)
    if kind == "affine":
        return StructMatrix(1 + lam, 1 - lam, 1 + mu, 1 - mu)
    raise ValueError(f"unknown matrix form {kind!r}")


def form_matrix(kind: str, lam: Number, mu: Number) -> StructMatrix:
    """Structural matrix of the symmetric, skew or affine two-parameter form."""
    return _form_matrix(kind, lam, mu)


def classify_form(
    kind: str, lam: Number, mu: Number, tol: float = DEFAULT_TOL
) -> CanonicalClass:
    """Closed-form class of ``[[l, m], [m, l]]``, ``[[l, m], [-m, l]]`` or
    ``[[1+l, 1-l], [1+m, 1-m]]`` (``kind`` = symmetric / skew / affine)."""
    m = _form_matrix(kind, lam, mu)
    exact = m.exact
    if exact:
        lam, mu = Fraction(lam), Fraction(mu)
    zero = _Zero(exact, tol)
    s = max(1.0, m.scale)
    if kind == "symmetric":
        if zero(lam, s) and zero(mu, s):
            return CanonicalClass("E0")
        if zero(lam - mu, s):
            return CanonicalClass("E2")
        if zero(lam + mu, s):
            return CanonicalClass("E3")
        if zero(lam, s):
            return CanonicalClass.e7(0 * mu)
        return CanonicalClass.e6(mu / lam, mu / lam)
    if kind == "skew":
        if zero(lam, s) and zero(mu, s):
            return CanonicalClass("E0")
        if zero(lam, s):
            return CanonicalClass.e7(0 * mu)
        return CanonicalClass.e6(mu / lam, -mu / lam)
    if zero(lam - mu, s):
        return CanonicalClass("E2")
    if zero(1 + lam, s):
        return CanonicalClass.e7((1 - mu) / cbrt(2 * (1 + mu) ** 2))
    if zero(1 - mu, s):
        return CanonicalClass.e7((1 + lam) / cbrt(2 * (1 - lam) ** 2))
    return CanonicalClass.e6(
        (1 + lam) * (1 + mu) / (1 - mu) ** 2, (1 - lam) * (1 - mu) / (1 + lam) ** 2
    )
