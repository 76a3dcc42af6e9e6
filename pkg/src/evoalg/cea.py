"""Chains of evolution algebras: two-time families ``(s, t) -> M[s, t]``.

Built-in families:

* :class:`F1` -- ``(1/2)[[L+m, L-m], [L-m, L+m]]`` with ``L = lam**u``,
  ``m = mu**u``; ``u = t - s`` by default, ``u = t`` with
  ``exponent_mode="t"`` (that variant fails Chapman-Kolmogorov).
* :class:`F2` -- the rotation ``[[cos u, sin u], [-sin u, cos u]]``,
  ``u = t - s``; ``half_factor=True`` scales it by 1/2 (fails CK with
  residual ``sqrt(2)/4``).
* :class:`F3` -- ``(1/2)[[1+A+B, 1-A-B], [1+A-B, 1-A+B]]`` with
  ``A = phi(t)(psi(t) - psi(s))`` and ``B = phi(t)/phi(s)``.
* :class:`Custom` -- four expressions in ``s`` and ``t``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from .algebra import StructMatrix
from .expr import Expr, evaluate as eval_expr, parse, to_source
from .scalars import DEFAULT_TOL

SAMPLING_SEED = 20120213


class OutOfDomain(ValueError):
    pass


class PhiVanishes(ArithmeticError):
    pass


@dataclass(frozen=True)
class F1:
    lam: float
    mu: float
    exponent_mode: str = "t-s"

    def __post_init__(self):
        if self.lam < 0 or self.mu < 0:
            raise ValueError("F1 requires lam >= 0 and mu >= 0")
        if self.exponent_mode not in ("t-s", "t"):
            raise ValueError("exponent_mode must be 't-s' or 't'")

    @property
    def printed_variant(self) -> bool:
        return self.exponent_mode == "t"

    def describe(self) -> dict:
        return {"family": "f1", "lambda": self.lam, "mu": self.mu,
                "exponent_mode": self.exponent_mode}


@dataclass(frozen=True)
class F2:
    half_factor: bool = False

    @property
    def printed_variant(self) -> bool:
        return self.half_factor

    def describe(self) -> dict:
        return {"family": "f2", "half_factor": self.half_factor}


@dataclass(frozen=True)
class F3:
    phi: Expr
    psi: Expr

    @classmethod
    def from_text(cls, phi: str, psi: str) -> F3:
        return cls(parse(phi), parse(psi))

    printed_variant = False

    def describe(self) -> dict:
        return {"family": "f3", "phi": to_source(self.phi), "psi": to_source(self.psi)}


@dataclass(frozen=True)
class Custom:
    entries: tuple[Expr, Expr, Expr, Expr]

    @classmethod
    def from_text(cls, m11: str, m12: str, m21: str, m22: str) -> Custom:
        return cls(tuple(parse(src, ("s", "t")) for src in (m11, m12, m21, m22)))

    printed_variant = False

    def describe(self) -> dict:
        return {"family": "custom", "entries": [to_source(e) for e in self.entries]}


Family = F1 | F2 | F3 | Custom


def evaluate(f: Family, s: float, t: float, tol: float = DEFAULT_TOL) -> StructMatrix:
    """Structural matrix of the chain at times ``0 <= s <= t``."""
    if s < 0 or t < s:
        raise OutOfDomain(f"(s, t) = ({s}, {t}) is outside 0 <= s <= t")
    if isinstance(f, F1):
        u = t - s if f.exponent_mode == "t-s" else t
        big, small = f.lam**u, f.mu**u
        return StructMatrix(
            (big + small) / 2, (big - small) / 2, (big - small) / 2, (big + small) / 2
        )
    if isinstance(f, F2):
        u = t - s
        c, sn = math.cos(u), math.sin(u)
        k = 0.5 if f.half_factor else 1.0
        return StructMatrix(k * c, k * sn, -k * sn, k * c)
    if isinstance(f, F3):
        a, b = f3_coefficients(f, s, t, tol)
        return StructMatrix(
            (1 + a + b) / 2, (1 - a - b) / 2, (1 + a - b) / 2, (1 - a + b) / 2
        )
    if isinstance(f, Custom):
        vals = [eval_expr(e, s=s, t=t) for e in f.entries]
        return StructMatrix(*vals)
    raise TypeError(f"not a CEA family: {f!r}")


def f3_coefficients(f: F3, s: float, t: float, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """``(A, B)`` with ``A = phi(t)(psi(t) - psi(s))`` and ``B = phi(t)/phi(s)``."""
    phi_s = eval_expr(f.phi, s)
    if abs(phi_s) <= tol:
        raise PhiVanishes(f"phi({s}) = {phi_s} vanishes")
    phi_t = eval_expr(f.phi, t)
    a = phi_t * (eval_expr(f.psi, t) - eval_expr(f.psi, s))
    return a, phi_t / phi_s


def _as_array(m: StructMatrix) -> np.ndarray:
    return np.array([[m.a11, m.a12], [m.a21, m.a22]], dtype=float)


def _frobenius(a: np.ndarray) -> float:
    return float(np.sqrt(np.sum(a * a)))


def low_discrepancy(n: int, dim: int, lo: float, hi: float) -> np.ndarray:
    """Deterministic scrambled Halton points in ``[lo, hi]^dim``."""
    sampler = qmc.Halton(d=dim, scramble=True, seed=SAMPLING_SEED)
    return lo + (hi - lo) * sampler.random(n)


def ck_triples(n: int = 1000, window: tuple[float, float] = (0.0, 3.0)) -> list[tuple]:
    pts = np.sort(low_discrepancy(n, 3, *window), axis=1)
    return [tuple(float(v) for v in row) for row in pts]


@dataclass
class CKReport:
    samples: list[tuple[float, float, float, float]]
    max_residual: float
    max_relative: float
    passed: bool
    tolerance: float

    def to_dict(self) -> dict:
        return {"n_samples": len(self.samples), "max_residual": self.max_residual,
                "max_relative_residual": self.max_relative, "pass": self.passed,
                "tolerance": self.tolerance}


def ck_check(f: Family, triples=None, tol: float = DEFAULT_TOL) -> CKReport:
    """Chapman-Kolmogorov residuals ``||M[s,t] - M[s,tau] M[tau,t]||_F``.

    A sample passes when its residual is at most ``tol * max(1, ||M[s,t]||_F)``.
    """
    if triples is None:
        triples = ck_triples()
    samples, worst, worst_rel = [], 0.0, 0.0
    for s, tau, t in triples:
        if not s <= tau <= t:
            raise OutOfDomain(f"triple ({s}, {tau}, {t}) is not ordered")
        whole = _as_array(evaluate(f, s, t, tol))
        left = _as_array(evaluate(f, s, tau, tol))
        right = _as_array(evaluate(f, tau, t, tol))
        res = _frobenius(whole - left @ right)
        samples.append((s, tau, t, res))
        worst = max(worst, res)
        worst_rel = max(worst_rel, res / max(1.0, _frobenius(whole)))
    return CKReport(samples, worst, worst_rel, worst_rel <= tol, tol)


@dataclass
class ShiftReport:
    """Outcome of a shift test (homogeneity)."""

    max_residual: float
    passed: bool
    tolerance: float
    n_samples: int

    def to_dict(self) -> dict:
        return {"n_samples": self.n_samples, "max_residual": self.max_residual,
                "pass": self.passed, "tolerance": self.tolerance}


def homogeneity_samples(n: int = 200, window: tuple[float, float] = (0.0, 2.0)) -> list[tuple]:
    lo, hi = window
    pts = low_discrepancy(n, 3, 0.0, 1.0)
    out = []
    for a, b, c in pts:
        s, t = sorted((lo + (hi - lo) * a, lo + (hi - lo) * b))
        out.append((float(s), float(t), float(c * (hi - lo))))
    return out


def homogeneity_check(f: Family, samples=None, tol: float = DEFAULT_TOL) -> ShiftReport:
    """Max of ``||M[s+h, t+h] - M[s, t]||_F``; passes when at most ``tol``."""
    if samples is None:
        samples = homogeneity_samples()
    worst = 0.0
    for s, t, h in samples:
        diff = _as_array(evaluate(f, s + h, t + h, tol)) - _as_array(evaluate(f, s, t, tol))
        worst = max(worst, _frobenius(diff))
    return ShiftReport(worst, worst <= tol, tol, len(samples))


@dataclass
class PeriodReport:
    period: float | None
    residual: float | None
    degenerate: bool = False
    variable: str = "t"
    candidates_checked: int = 0
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"variable": self.variable, "period": self.period, "residual": self.residual,
                "degenerate": self.degenerate}


def _period_samples(variable: str, p_max: float, n: int, width: float) -> list[tuple]:
    pts = low_discrepancy(n, 2, 0.0, width)
    if variable == "t":
        return [(float(a), float(a + b)) for a, b in pts]
    return [(float(a), float(a + p_max + b)) for a, b in pts]


def periodicity_scan(
    f: Family,
    variable: str = "t",
    p_range: tuple[float, float] = (0.0, 10.0),
    samples=None,
    *,
    n_samples: int = 16,
    grid: int = 2000,
    xtol: float = 1e-9,
    match_tol: float = 1e-6,
    tol: float = DEFAULT_TOL,
) -> PeriodReport:
    """Smallest period in ``(p_min, p_max]`` for shifts in ``s`` or ``t``.

    The shift discrepancy ``D(P) = max ||M(shifted by P) - M||_F`` is scanned
    on a grid; each interior local minimum is refined by bisection on the sign
    of the local slope until the bracket is below ``xtol`` and accepted when
    ``D`` there is at most ``match_tol``.  A family with ``D`` already zero at
    the first grid point is reported as degenerate (every shift is a period).
    """
    if variable not in ("s", "t"):
        raise ValueError("variable must be 's' or 't'")
    p_min, p_max = p_range
    if not 0 <= p_min < p_max:
        raise ValueError("period range must satisfy 0 <= p_min < p_max")
    if samples is None:
        samples = _period_samples(variable, p_max, n_samples, 2.0)
    base = [_as_array(evaluate(f, s, t, tol)) for s, t in samples]

    def discrepancy(p: float) -> float:
        worst = 0.0
        for (s, t), m in zip(samples, base):
            shifted = evaluate(f, s, t + p, tol) if variable == "t" else evaluate(f, s + p, t, tol)
            worst = max(worst, _frobenius(_as_array(shifted) - m))
        return worst

    h = (p_max - p_min) / grid
    ps = [p_min + k * h for k in range(1, grid + 1)]
    ds = [discrepancy(p) for p in ps]
    report = PeriodReport(None, None, variable=variable)
    if ds[0] <= tol:
        report.period, report.residual, report.degenerate = ps[0], ds[0], True
        report.notes.append("shift discrepancy vanishes at the first grid point")
        return report
    eps = min(1e-10, xtol / 10)
    for k in range(1, len(ps)):
        right = ds[k + 1] if k + 1 < len(ds) else math.inf
        if not (ds[k - 1] > ds[k] <= right):
            continue
        report.candidates_checked += 1
        a, b = ps[k - 1], ps[k + 1] if k + 1 < len(ps) else p_max
        while b - a > xtol:
            mid = 0.5 * (a + b)
            if discrepancy(mid + eps) < discrepancy(mid - eps):
                a = mid
            else:
                b = mid
        p = 0.5 * (a + b)
        d = discrepancy(p)
        if d <= match_tol:
            report.period, report.residual = p, d
            return report
    return report
