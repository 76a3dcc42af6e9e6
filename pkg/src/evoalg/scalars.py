"""Scalar arithmetic shared by every module.

Two representation modes coexist:

* exact: ``int``/``Fraction`` values, extended by :class:`Surd` when a square
  or cube root of a rational is not itself rational;
* floating: plain ``float`` with zero tests relative to a matrix scale.

A :class:`Surd` is a finite sum ``sum(c_k * r_k ** (1/6))`` with rational
``c_k`` and positive rational ``r_k``.  Terms whose radicand ratio is a sixth
power of a rational are merged, so (by linear independence of real radicals)
an expression is zero exactly when it has no terms left.  This is closed under
``+ - *`` and under division by a single-term value, which is all the
natural-basis computations of a 2x2 evolution algebra need.
"""
from __future__ import annotations

import math
from functools import lru_cache
from fractions import Fraction
from typing import Union

import gmpy2
import mpmath

DEFAULT_TOL = 1e-9

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13)


def _iroot(n: int, k: int) -> int | None:
    root, exact = gmpy2.iroot(gmpy2.mpz(n), k)
    return int(root) if exact else None


def exact_root(q: Fraction, k: int) -> Fraction | None:
    """Rational ``k``-th root of ``q >= 0`` or ``None`` when irrational."""
    if q < 0:
        raise ValueError("exact_root expects a non-negative rational")
    num = _iroot(q.numerator, k)
    if num is None:
        return None
    den = _iroot(q.denominator, k)
    if den is None:
        return None
    return Fraction(num, den)


@lru_cache(maxsize=65536)
def _normalize_term(coeff: Fraction, radicand: Fraction) -> tuple[Fraction, int]:
    """Rewrite ``coeff * radicand**(1/6)`` with a small positive integer radicand."""
    den = radicand.denominator
    coeff = coeff / den
    rad = radicand.numerator * den**5
    for p in _SMALL_PRIMES:
        p6 = p**6
        while rad % p6 == 0:
            rad //= p6
            coeff *= p
    root = _iroot(rad, 6)
    if root is not None:
        return coeff * root, 1
    return coeff, rad


@lru_cache(maxsize=65536)
def _like_factor(rad_a: int, rad_b: int) -> Fraction | None:
    """``(rad_b / rad_a) ** (1/6)`` when rational, else ``None``."""
    if rad_a == rad_b:
        return Fraction(1)
    return exact_root(Fraction(rad_b, rad_a), 6)


class Surd:
    """Exact real number in the sixth-root radical extension of the rationals.

    Instances are only produced for irrational values; arithmetic that lands
    back on a rational returns a ``Fraction``.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: dict[int, Fraction]):
        self._terms = terms

    # construction -----------------------------------------------------------

    @staticmethod
    def _build(pairs) -> Number:
        terms: dict[int, Fraction] = {}
        for coeff, rad in pairs:
            if coeff == 0:
                continue
            coeff, rad = _normalize_term(Fraction(coeff), Fraction(rad))
            if rad in terms:
                terms[rad] += coeff
                continue
            for key in terms:
                factor = _like_factor(key, rad)
                if factor is not None:
                    terms[key] += coeff * factor
                    break
            else:
                terms[rad] = coeff
        terms = {k: c for k, c in terms.items() if c != 0}
        if not terms:
            return Fraction(0)
        if len(terms) == 1 and 1 in terms:
            return terms[1]
        return Surd(terms)

    @staticmethod
    def _from_terms(terms: dict[int, Fraction]) -> Number:
        if not terms:
            return Fraction(0)
        if len(terms) == 1 and 1 in terms:
            return Fraction(terms[1])
        return Surd(terms)

    @staticmethod
    def sixth_root(q: Fraction) -> Number:
        """Real ``q ** (1/6)`` for ``q >= 0``."""
        return Surd._build([(Fraction(1), Fraction(q))])

    @staticmethod
    def _pairs_of(x) -> list:
        if isinstance(x, Surd):
            return [(c, r) for r, c in x._terms.items()]
        return [(Fraction(x), 1)]

    # arithmetic -------------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, float):
            return float(self) + other
        if isinstance(other, (int, Fraction)):
            # rationals live on radicand 1, already normalized
            terms = dict(self._terms)
            terms[1] = terms.get(1, 0) + other
            if terms[1] == 0:
                del terms[1]
            return Surd._from_terms(terms)
        if not isinstance(other, Surd):
            return NotImplemented
        return Surd._build(Surd._pairs_of(self) + Surd._pairs_of(other))

    __radd__ = __add__

    def __neg__(self):
        return Surd({r: -c for r, c in self._terms.items()})

    def __pos__(self):
        return self

    def __sub__(self, other):
        if isinstance(other, float):
            return float(self) - other
        if not isinstance(other, (int, Fraction, Surd)):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, float):
            return float(self) * other
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return Fraction(0)
            return Surd({r: c * other for r, c in self._terms.items()})
        if not isinstance(other, Surd):
            return NotImplemented
        pairs = []
        for c1, r1 in Surd._pairs_of(self):
            for c2, r2 in Surd._pairs_of(other):
                pairs.append((c1 * c2, Fraction(r1) * r2))
        return Surd._build(pairs)

    __rmul__ = __mul__

    def _reciprocal(self):
        if len(self._terms) != 1:
            raise ArithmeticError("cannot divide by a multi-term radical expression")
        (rad, coeff), = self._terms.items()
        # 1 / (c * r^(1/6)) = (1 / (c*r)) * (r^5)^(1/6)
        return Surd._build([(1 / (coeff * rad), Fraction(rad) ** 5)])

    def __truediv__(self, other):
        if isinstance(other, float):
            return float(self) / other
        if isinstance(other, Surd):
            return self * other._reciprocal()
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        if other == 0:
            raise ZeroDivisionError("Surd division by zero")
        return self * (1 / Fraction(other))

    def __rtruediv__(self, other):
        if isinstance(other, float):
            return other / float(self)
        return self._reciprocal() * other

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return (1 / self) ** (-exponent)
        result: Number = Fraction(1)
        for _ in range(exponent):
            result = result * self
        return result

    # comparison -------------------------------------------------------------

    def sign(self) -> int:
        if len(self._terms) == 1:
            (coeff,) = self._terms.values()
            return 1 if coeff > 0 else -1
        digits = 30
        while True:
            with mpmath.workdps(digits):
                value = mpmath.fsum(
                    mpmath.mpf(c.numerator) / c.denominator * mpmath.root(r, 6)
                    for r, c in self._terms.items()
                )
                if abs(value) > mpmath.mpf(10) ** (-(digits - 5)):
                    return 1 if value > 0 else -1
            digits *= 2

    def __eq__(self, other):
        if isinstance(other, float):
            return float(self) == other
        if not isinstance(other, (int, Fraction, Surd)):
            return NotImplemented
        diff = self - other
        return not isinstance(diff, Surd) and diff == 0

    def __hash__(self):
        if len(self._terms) == 1:
            (rad, coeff), = self._terms.items()
            return hash(("surd", coeff > 0, coeff**6 * rad))
        return hash("surd")

    def _cmp(self, other) -> int:
        diff = self - other
        if isinstance(diff, float):
            return (diff > 0) - (diff < 0)
        if isinstance(diff, Surd):
            return diff.sign()
        return (diff > 0) - (diff < 0)

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __float__(self):
        total = 0.0
        for rad, coeff in self._terms.items():
            total += float(coeff) * math.exp(math.log(rad) / 6)
        return total

    def __repr__(self):
        return f"Surd({self})"

    def __str__(self):
        parts = []
        for rad, coeff in self._terms.items():
            if rad == 1:
                parts.append(str(coeff))
                continue
            r3 = _iroot(rad, 3)
            r2 = _iroot(rad, 2)
            if r3 is not None:
                radical = f"sqrt({r3})"
            elif r2 is not None:
                radical = f"cbrt({r2})"
            else:
                radical = f"{rad}^(1/6)"
            parts.append(radical if coeff == 1 else f"{coeff}*{radical}")
        return " + ".join(parts)


Number = Union[int, Fraction, Surd, float]


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, Surd)) and not isinstance(x, bool)


def sign(x) -> int:
    if isinstance(x, Surd):
        return x.sign()
    return (x > 0) - (x < 0)


def _float_cbrt(x: float) -> float:
    if x == 0.0 or not math.isfinite(x):
        return x
    y = math.copysign(abs(x) ** (1.0 / 3.0), x)
    # one Newton step recovers the last ulps lost by pow
    return y - (y * y * y - x) / (3.0 * y * y)


def real_root(x: Number, k: int) -> Number:
    """Real ``k``-th root (``k`` in 2, 3) in the mode of ``x``.

    Exact inputs stay exact; a root that leaves the sixth-root extension
    raises ``ArithmeticError``.
    """
    if k not in (2, 3):
        raise ValueError("only square and cube roots are supported")
    if isinstance(x, float):
        if k == 2:
            if x < 0:
                raise ValueError("square root of a negative number")
            return math.sqrt(x)
        return _float_cbrt(x)
    s = sign(x)
    if s == 0:
        return Fraction(0)
    if s < 0 and k == 2:
        raise ValueError("square root of a negative number")
    ax = -x if s < 0 else x
    if isinstance(ax, Surd):
        if len(ax._terms) != 1:
            raise ArithmeticError("root of a multi-term radical expression")
        (rad, coeff), = ax._terms.items()
        sixth = coeff**6 * rad  # ax ** 6, rational
    else:
        sixth = Fraction(ax) ** 6
    # |root| ** 6 = sixth ** (1/k)
    inner = exact_root(Fraction(sixth), k)
    if inner is None:
        raise ArithmeticError("root leaves the supported radical extension")
    root = Surd.sixth_root(inner)
    return -root if s < 0 else root


def sqrt(x: Number) -> Number:
    return real_root(x, 2)


def cbrt(x: Number) -> Number:
    return real_root(x, 3)


def parse_scalar(text: str) -> Number:
    """``"p/q"`` and integer literals parse exactly, decimals as floats."""
    text = text.strip()
    if not text:
        raise ValueError("empty number")
    if "/" in text:
        num, den = text.split("/", 1)
        return Fraction(int(num), int(den))
    try:
        return Fraction(int(text))
    except ValueError:
        value = float(text)
        if not math.isfinite(value):
            raise ValueError(f"non-finite number {text!r}")
        return value


def as_float(x: Number) -> float:
    return float(x)
