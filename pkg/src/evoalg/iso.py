"""Isomorphism of two-dimensional evolution algebras through natural bases.

A basis change ``e'_1 = x e_1 + y e_2``, ``e'_2 = z e_1 + v e_2`` maps the
algebra with structural matrix ``[[al, be], [ga, de]]`` to ``[[a, b], [c, d]]``
exactly when

    al*x*z + ga*y*v = 0          be*x*z + de*y*v = 0
    al*x^2 + ga*y^2 = a*x + b*z  be*x^2 + de*y^2 = a*y + b*v
    al*z^2 + ga*v^2 = c*x + d*z  be*z^2 + de*v^2 = c*y + d*v

with ``x*v - y*z != 0``.  :func:`iso` decides this analytically (with a
least-squares net in floating mode); :func:`brute_force_iso` is an
independent sympy-based search used by the tests.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import least_squares

from .algebra import BasisChange, StructMatrix, rank
from .classify import classify, verify_witness
from .scalars import DEFAULT_TOL, Number, Surd, cbrt, is_exact, sqrt


class Inconclusive(RuntimeError):
    pass


class SearchExhausted(RuntimeError):
    pass


@dataclass(frozen=True)
class IsoResult:
    isomorphic: bool
    witness: BasisChange | None = None
    method: str = "analytic"


_SWAP = BasisChange.swap()


def system_residuals(left: StructMatrix, right: StructMatrix, xyzv) -> list:
    """Left-hand minus right-hand sides of the six isomorphism equations."""
    x, y, z, v = xyzv
    al, be, ga, de = left.entries
    a, b, c, d = right.entries
    return [
        al * x * z + ga * y * v,
        be * x * z + de * y * v,
        al * x * x + ga * y * y - (a * x + b * z),
        be * x * x + de * y * y - (a * y + b * v),
        al * z * z + ga * v * v - (c * x + d * z),
        be * z * z + de * v * v - (c * y + d * v),
    ]


def _is_zero(x, bound: float, tol: float) -> bool:
    if is_exact(x):
        return x == 0
    return abs(x) <= tol * bound


def _roots(value, k: int) -> list:
    """Real ``k``-th roots (both signs for squares); empty when none exist."""
    try:
        if k == 2:
            if value < 0:
                return []
            r = sqrt(value)
            return [r, -r] if r != 0 else [r]
        return [cbrt(value)]
    except ArithmeticError:
        return []


def _diagonal_candidates(a: StructMatrix, b: StructMatrix, tol: float):
    """All ``(x, v)`` with ``transform(a, diag(x, v)) == b`` when ``a`` has rank 2."""
    a1, a2, a3, a4 = a.entries
    b1, b2, b3, b4 = b.entries
    sa, sb = max(1.0, a.scale), max(1.0, b.scale)
    z = lambda val, s: _is_zero(val, s, tol)  # noqa: E731
    xs = None if z(a1, sa) else [b1 / a1]
    vs = None if z(a4, sa) else [b4 / a4]
    if xs is None and not z(b1, sb):
        return
    if vs is None and not z(b4, sb):
        return
    if xs is not None and vs is not None:
        yield xs[0], vs[0]
    elif xs is not None:
        x = xs[0]
        for v in _roots(b3 * x / a3, 2):
            yield x, v
    elif vs is not None:
        v = vs[0]
        for x in _roots(b2 * v / a2, 2):
            yield x, v
    else:
        if z(b2, sb) or z(b3, sb):
            return
        for x in _roots(b2 * b2 * b3 / (a2 * a2 * a3), 3):
            if not z(x, 1.0):
                yield x, x * x * a2 / b2


def _analytic_rank2(left: StructMatrix, right: StructMatrix, tol: float):
    for shape in ("diagonal", "antidiagonal"):
        src = left if shape == "diagonal" else StructMatrix(
            left.a22, left.a21, left.a12, left.a11
        )
        for x, v in _diagonal_candidates(src, right, tol):
            if _is_zero(x, 1.0, tol) or _is_zero(v, 1.0, tol):
                continue
            t = BasisChange.diagonal(x, v)
            if shape == "antidiagonal":
                t = t @ _SWAP
            ok, _ = verify_witness(left, t, right, tol)
            if ok:
                return t
    return None


def _numeric(left: StructMatrix, right: StructMatrix, tol: float):
    lf, rf = left.to_float(), right.to_float()
    scale = max(1.0, lf.scale, rf.scale)
    best = None
    starts = []
    for s1, s2 in itertools.product((1.0, -1.0), repeat=2):
        starts.append((s1, 0.0, 0.0, s2))
        starts.append((0.0, s1, s2, 0.0))
    for start in starts:
        sol = least_squares(
            lambda p: np.asarray(system_residuals(lf, rf, p), dtype=float),
            np.asarray(start),
            xtol=1e-15,
            ftol=1e-15,
            gtol=1e-15,
            max_nfev=2000,
        )
        res = float(np.max(np.abs(sol.fun))) / scale
        t = BasisChange(*(float(p) for p in sol.x))
        tnorm = max(1.0, max(abs(p) for p in sol.x))
        if abs(t.det()) <= 1e-6 * tnorm * tnorm:
            continue
        if res <= 1e-9:
            ok, _ = verify_witness(lf, t, rf, tol)
            if ok:
                return t, res
        if best is None or res < best:
            best = res
    if best is not None and best <= 1e-6:
        raise Inconclusive(
            f"numeric search stalled at residual {best:.3g} without a verified witness"
        )
    return None, best


def iso(
    left: StructMatrix,
    right: StructMatrix,
    tol: float = DEFAULT_TOL,
    *,
    numeric_fallback: bool = True,
) -> IsoResult:
    """Decide whether two evolution algebras are isomorphic; return a witness."""
    r = rank(left, tol)
    if r != rank(right, tol):
        return IsoResult(False)
    exact = left.exact and right.exact
    if r == 2:
        t = _analytic_rank2(left, right, tol)
        if t is not None:
            return IsoResult(True, t, "analytic")
    else:
        rec_l = classify(left, tol)
        rec_r = classify(right, tol)
        if rec_l.cls.tag == rec_r.cls.tag:
            t = rec_r.witness.inverse() @ rec_l.witness
            ok, _ = verify_witness(left, t, right, tol)
            if ok:
                return IsoResult(True, t, "analytic")
    if exact or not numeric_fallback:
        return IsoResult(False)
    t, _ = _numeric(left, right, tol)
    if t is not None:
        return IsoResult(True, t, "numeric")
    return IsoResult(False)


# --------------------------------------------------------------------------
# independent brute-force oracle (tests only)


def _to_sympy(value):
    import sympy as sp

    if isinstance(value, Surd):
        return sp.Add(
            *(sp.Rational(c.numerator, c.denominator) * sp.root(r, 6) for r, c in value._terms.items())
        )
    if isinstance(value, (int, Fraction)):
        f = Fraction(value)
        return sp.Rational(f.numerator, f.denominator)
    return sp.Rational(value)


def _from_sympy(value) -> Number:
    import sympy as sp

    value = sp.nsimplify(value) if value.is_Float else value
    if value.is_Rational:
        return Fraction(int(value.p), int(value.q))
    return float(value)


@dataclass
class BruteForceGrid:
    free_values: tuple = (1, -1, 2, -2, Fraction(1, 2), Fraction(-1, 2), 3, Fraction(1, 3))
    sample_values: tuple = (0, 1, -1, 2, -2, Fraction(1, 2), Fraction(-1, 2))


def brute_force_iso(
    left: StructMatrix, right: StructMatrix, grid: BruteForceGrid | None = None
) -> IsoResult:
    """Exhaustive search for a natural isomorphism using sympy.

    Rank 2: solve the equations on the diagonal and antidiagonal shapes in
    radicals.  Rank <= 1: pool solutions from two sympy solvers plus a dense
    grid over the first row, substituting grid values for free parameters.
    Every candidate is checked exactly.  Raises :class:`SearchExhausted` when
    nothing verifies (a weaker claim than non-isomorphism).
    """
    import sympy as sp

    grid = grid or BruteForceGrid()
    L = sp.Matrix(2, 2, [_to_sympy(e) for e in left.entries])
    R = sp.Matrix(2, 2, [_to_sympy(e) for e in right.entries])
    x, y, z, v = sp.symbols("x y z v")
    unknowns = (x, y, z, v)

    def equations(subs=None):
        (al, be), (ga, de) = L.tolist()
        (a, b), (c, d) = R.tolist()
        eqs = [
            al * x * z + ga * y * v,
            be * x * z + de * y * v,
            al * x**2 + ga * y**2 - (a * x + b * z),
            be * x**2 + de * y**2 - (a * y + b * v),
            al * z**2 + ga * v**2 - (c * x + d * z),
            be * z**2 + de * v**2 - (c * y + d * v),
        ]
        if subs:
            eqs = [sp.expand(e.subs(subs)) for e in eqs]
        return [e for e in eqs if e != 0]

    def exact_zero(expr) -> bool:
        expr = sp.nsimplify(expr) if expr.has(sp.Float) else expr
        if abs(sp.N(expr, 60)) > sp.Float(10) ** -45:
            return False
        return sp.simplify(expr) == 0

    def check(sol: dict):
        vals = [sp.sympify(sol.get(u, 0)) for u in unknowns]
        if any(not val.is_number for val in vals):
            return None
        if any(abs(sp.im(sp.N(val, 30))) > 1e-25 for val in vals):
            return None
        vals = [sp.re(val) if val.has(sp.I) else val for val in vals]
        xv, yv, zv, vv = vals
        if exact_zero(xv * vv - yv * zv):
            return None
        lhs = equations({x: xv, y: yv, z: zv, v: vv})
        if all(exact_zero(e) for e in lhs):
            return BasisChange(*(_from_sympy(val) for val in vals))
        return None

    def expand_free(solutions):
        for sol in solutions:
            sol = dict(sol)
            free = sorted(
                {s for val in sol.values() for s in sp.sympify(val).free_symbols}
                | {u for u in unknowns if u not in sol},
                key=str,
            )
            if not free:
                yield sol
                continue
            for combo in itertools.product(grid.free_values, repeat=len(free)):
                subs = {s: sp.Rational(Fraction(c).numerator, Fraction(c).denominator)
                        for s, c in zip(free, combo)}
                full = {u: sp.sympify(sol.get(u, u)).subs(subs) for u in unknowns}
                yield full

    r_left, r_right = L.rank(), R.rank()
    if r_left != r_right:
        raise SearchExhausted("ranks differ; no natural isomorphism can exist")

    def first_verified(solutions):
        for sol in expand_free(solutions):
            t = check(sol)
            if t is not None:
                return t
        return None

    if r_left == 2:
        for shape in ({y: 0, z: 0}, {x: 0, v: 0}):
            free = [u for u in unknowns if u not in shape]
            sols = sp.solve(equations(shape), free, dict=True)
            t = first_verified([{**shape, **s} for s in sols])
            if t is not None:
                return IsoResult(True, t, "brute_force")
        raise SearchExhausted("no diagonal or antidiagonal witness")

    pools = []
    try:
        pools.append([dict(zip(unknowns, tup)) for tup in sp.nonlinsolve(equations(), list(unknowns))])
    except (NotImplementedError, ValueError):
        pass
    w = sp.Symbol("w")
    try:
        sols = sp.solve(equations() + [w * (x * v - y * z) - 1], [*unknowns, w], dict=True)
        pools.append([{u: s[u] for u in unknowns if u in s} for s in sols])
    except NotImplementedError:
        pass
    for pool in pools:
        t = first_verified(pool)
        if t is not None:
            return IsoResult(True, t, "brute_force")
    for xv, yv in itertools.product(grid.sample_values, repeat=2):
        if xv == 0 and yv == 0:
            continue
        fixed = {x: _to_sympy(xv), y: _to_sympy(yv)}
        eqs = equations(fixed)
        if any(e.is_number for e in eqs):
            continue
        try:
            sols = sp.solve(eqs, [z, v], dict=True)
        except NotImplementedError:
            continue
        t = first_verified([{**fixed, **s} for s in sols])
        if t is not None:
            return IsoResult(True, t, "brute_force")
    raise SearchExhausted("no witness within the search grid")
