"""Class dynamics of the built-in chains over the time domain ``0 <= s <= t``.

``expected_class`` holds the closed forms for the three families (with the
degenerate strata filled in), ``trace`` classifies a grid of times and
compares, ``find_boundaries`` brackets class changes by bisection.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .algebra import StructMatrix, rank
from .cea import F1, F2, F3, Family, OutOfDomain, evaluate, f3_coefficients
from .classify import CanonicalClass, classify
from .scalars import DEFAULT_TOL, cbrt


class UnsupportedFamily(TypeError):
    pass


@dataclass(frozen=True)
class TraceRecord:
    s: float
    t: float
    cls: CanonicalClass
    expected: CanonicalClass | None
    agrees: bool | None
    boundary: bool = False
    ambiguous: bool = False


@dataclass(frozen=True)
class Boundary:
    s: float
    t: float
    variable: str
    before: CanonicalClass
    after: CanonicalClass


def _near_zero(x: float, scale: float, tol: float) -> bool:
    return abs(x) <= tol * max(1.0, scale)


def expected_class(f: Family, s: float, t: float, tol: float = DEFAULT_TOL) -> CanonicalClass:
    """Closed-form canonical class of a built-in chain at ``(s, t)``."""
    if isinstance(f, F1):
        u = t - s if f.exponent_mode == "t-s" else t
        big, small = f.lam**u, f.mu**u
        half = (big + small) / 2
        if _near_zero(half, half, tol):
            return CanonicalClass("E0")
        if _near_zero(big * small, half * half, tol):
            return CanonicalClass("E2") if big > small else CanonicalClass("E3")
        theta = (big - small) / (big + small)
        return CanonicalClass.e6(theta, theta)
    if isinstance(f, F2):
        u = t - s
        c, sn = math.cos(u), math.sin(u)
        if _near_zero(c, max(abs(c), abs(sn)), tol):
            return CanonicalClass.e7(0.0)
        return CanonicalClass.e6(sn / c, -sn / c)
    if isinstance(f, F3):
        a, b = f3_coefficients(f, s, t, tol)
        xi, zeta = a + b, a - b
        scale = max(abs(1 + xi), abs(1 - xi), abs(1 + zeta), abs(1 - zeta)) / 2
        xi_stratum = _near_zero((1 + xi) / 2, scale, tol)
        zeta_stratum = _near_zero((1 - zeta) / 2, scale, tol)
        if xi_stratum:
            return CanonicalClass.e7((1 - zeta) / cbrt(2 * (1 + zeta) ** 2))
        if zeta_stratum:
            return CanonicalClass.e7((1 + xi) / cbrt(2 * (1 - xi) ** 2))
        return CanonicalClass.e6(
            (1 + xi) * (1 + zeta) / (1 - zeta) ** 2, (1 - xi) * (1 - zeta) / (1 + xi) ** 2
        )
    raise UnsupportedFamily(f"no closed form for {type(f).__name__}")


def _signature(m: StructMatrix, cls: CanonicalClass, tol: float) -> tuple:
    """Class tag refined by the signs that only change across a stratum."""
    if rank(m, tol) < 2:
        return (cls.tag,)
    s = max(1.0, m.scale)

    def sgn(x, bound):
        return 0 if abs(x) <= tol * bound else (1 if x > 0 else -1)

    return (cls.tag, sgn(m.a11, s), sgn(m.a22, s), sgn(m.det(), s * s))


def time_grid(t0: float, t1: float, step: float) -> list[float]:
    if step <= 0:
        raise ValueError("step must be positive")
    n = int(math.floor((t1 - t0) / step + 1e-9))
    return [t0 + k * step for k in range(n + 1)]


def trace(
    f: Family, s: float, t0: float, t1: float, step: float, tol: float = DEFAULT_TOL
) -> list[TraceRecord]:
    """Classify ``M[s, t]`` for ``t = t0, t0 + step, ..., <= t1``.

    ``boundary`` marks records whose neighbour lies across a class stratum
    (different tag, or an E7 / rank-drop stratum crossed in between).
    """
    if t0 < s:
        raise OutOfDomain("trace grid starts before s")
    rows = []
    for t in time_grid(t0, t1, step):
        m = evaluate(f, s, t, tol)
        rec = classify(m, tol)
        try:
            exp = expected_class(f, s, t, tol)
        except UnsupportedFamily:
            exp = None
        agrees = None if exp is None else exp.matches(rec.cls, tol)
        rows.append((t, rec, exp, agrees, _signature(m, rec.cls, tol)))
    flags = [False] * len(rows)
    for i in range(1, len(rows)):
        if rows[i][4] != rows[i - 1][4]:
            flags[i] = flags[i - 1] = True
    return [
        TraceRecord(s, t, rec.cls, exp, agrees, flag, rec.ambiguous)
        for (t, rec, exp, agrees, _), flag in zip(rows, flags)
    ]


def find_boundaries(
    f: Family,
    fixed: float,
    lo: float,
    hi: float,
    *,
    variable: str = "t",
    step: float | None = None,
    xtol: float = 1e-6,
    tol: float = DEFAULT_TOL,
) -> list[Boundary]:
    """Locate class-stratum crossings as the free time runs over ``[lo, hi]``.

    With ``variable="t"`` the start time ``s = fixed``; with ``"s"`` the end
    time ``t = fixed``.  Each crossing is bracketed on a grid and bisected to
    ``xtol``.
    """
    if variable not in ("s", "t"):
        raise ValueError("variable must be 's' or 't'")

    def at(x: float):
        s, t = (fixed, x) if variable == "t" else (x, fixed)
        m = evaluate(f, s, t, tol)
        cls = classify(m, tol).cls
        return cls, _signature(m, cls, tol)

    step = step or (hi - lo) / 400
    xs = time_grid(lo, hi, step)
    if xs[-1] < hi:
        xs.append(hi)
    found = []
    prev_x, (prev_cls, prev_sig) = xs[0], at(xs[0])
    for x in xs[1:]:
        cls, sig = at(x)
        if sig != prev_sig:
            a, b = prev_x, x
            while b - a > xtol:
                mid = 0.5 * (a + b)
                if at(mid)[1] == prev_sig:
                    a = mid
                else:
                    b = mid
            point = 0.5 * (a + b)
            s, t = (fixed, point) if variable == "t" else (point, fixed)
            found.append(Boundary(s, t, variable, prev_cls, cls))
        prev_x, prev_cls, prev_sig = x, cls, sig
    return found
