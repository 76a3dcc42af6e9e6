"""Pins the resolution of each closed-form variant listed in docs/formula_notes.md."""
import math
from fractions import Fraction

import numpy as np
import pytest

from evoalg.algebra import BasisChange, StructMatrix, transform
from evoalg.cea import F1, F2, F3, ck_check, ck_triples, evaluate, f3_coefficients, homogeneity_check
from evoalg.classify import (
    CanonicalClass,
    InvalidE6Params,
    canonical_matrix,
    classify,
    classify_form,
    form_matrix,
    verify_witness,
)
from evoalg.dynamics import expected_class, find_boundaries
from evoalg.iso import SearchExhausted, brute_force_iso, iso
from evoalg.scalars import cbrt

F = Fraction
C = CanonicalClass


# 1. symmetric form on the line lam = -mu ---------------------------------------


def test_symmetric_form_on_antidiagonal_line_is_e3():
    for lam in (F(1, 2), F(3), F(-7, 5)):
        m = form_matrix("symmetric", lam, -lam)
        assert classify_form("symmetric", lam, -lam) == C("E3")
        assert classify(m).cls == C("E3")
        assert iso(m, canonical_matrix(C("E3"))).isomorphic
    # the naive ratio formula would give E6(-1, -1), which is not a valid E6
    with pytest.raises(InvalidE6Params):
        canonical_matrix(C.e6(-1, -1))
    assert brute_force_iso(StructMatrix(F(1, 2), F(-1, 2), F(-1, 2), F(1, 2)),
                           canonical_matrix(C("E3"))).isomorphic


# 2. E7 parameters on the affine-form strata ------------------------------------


def e7_from_lam_minus_one(mu):
    return (1 - mu) / cbrt(2 * (1 + mu) ** 2)


def e7_variant_lam_minus_one(mu):
    return (1 - mu) / cbrt(2 * (1 + mu**2))


def e7_from_mu_one(lam):
    return (1 + lam) / cbrt(2 * (1 - lam) ** 2)


def e7_variant_mu_one(lam):
    return lam / cbrt((1 - lam) ** 2)


STRATUM_POINTS = (
    [("lam=-1", -1.0, mu) for mu in (-3.0, -2.0, -0.5, 0.25, 0.5, 0.75, 2.0, 3.0, 5.0, 0.1)]
    + [("mu=1", lam, 1.0) for lam in (-3.0, -2.0, -0.5, 0.0, 0.25, 0.5, 2.0, 3.0, 5.0, -0.9)]
)


def test_twenty_stratum_points():
    assert len(STRATUM_POINTS) == 20


@pytest.mark.parametrize("line, lam, mu", STRATUM_POINTS)
def test_e7_parameters_by_iso_oracle(line, lam, mu):
    m = form_matrix("affine", lam, mu)
    if line == "lam=-1":
        derived, variant = e7_from_lam_minus_one(mu), e7_variant_lam_minus_one(mu)
    else:
        derived, variant = e7_from_mu_one(lam), e7_variant_mu_one(lam)
    res = iso(m, canonical_matrix(C.e7(derived)))
    assert res.isomorphic
    assert verify_witness(m, res.witness, canonical_matrix(C.e7(derived)))[0]
    assert classify_form("affine", lam, mu).matches(C.e7(derived))
    if abs(variant - derived) > 1e-6:
        assert not iso(m, canonical_matrix(C.e7(variant))).isomorphic


@pytest.mark.parametrize("lam, mu", [(F(-1), F(1, 2)), (F(2), F(1))])
def test_e7_parameters_exact_brute_force(lam, mu):
    m = form_matrix("affine", lam, mu)
    if lam == -1:
        derived, variant = e7_from_lam_minus_one(mu), e7_variant_lam_minus_one(mu)
    else:
        derived, variant = e7_from_mu_one(lam), e7_variant_mu_one(lam)
    assert classify(m).cls == C.e7(derived)
    assert brute_force_iso(m, canonical_matrix(C.e7(derived))).isomorphic
    with pytest.raises(SearchExhausted):
        brute_force_iso(m, canonical_matrix(C.e7(variant)))


def test_lam_minus_one_mu_zero_variants_coincide():
    # the one point where both forms agree
    assert e7_from_lam_minus_one(F(0)) == e7_variant_lam_minus_one(F(0)) == 1 / cbrt(F(2))


# 3. chain (family F3) coefficients -------------------------------------------


def test_f3_matrix_is_half_the_affine_form_without_leading_one():
    f = F3.from_text("exp(t)", "t")
    for s, t in [(0.0, 0.4), (0.3, 1.1), (1.0, 2.5)]:
        a, b = f3_coefficients(f, s, t)
        half = form_matrix("affine", a + b, a - b).scaled(0.5)
        assert np.allclose(evaluate(f, s, t).to_lists(), half.to_lists(), atol=1e-12)
        got = classify(evaluate(f, s, t)).cls
        xi, zeta = a + b, a - b
        assert got.matches(expected_class(f, s, t))
        shifted = C.e6((2 + xi) * (2 + zeta) / zeta**2, -xi * -zeta / (2 + xi) ** 2)
        assert not got.matches(shifted)


def test_f3_e7_stratum_is_reached():
    f = F3.from_text("exp(t)", "t")
    (b,) = find_boundaries(f, 0.0, 0.0, 2.0)
    a, bb = f3_coefficients(f, 0.0, b.t)
    zeta = a - bb
    assert abs(zeta - 1) < 1e-5
    # on the line the class is E7 with the derived parameter
    m = evaluate(f, 0.0, b.t)
    xi = a + bb
    assert classify(m, 1e-4).cls.matches(C.e7(e7_from_mu_one(xi)), 1e-4)


# 4. exponent of family F1 ----------------------------------------------------


def test_f1_exponent_must_be_elapsed_time():
    printed = ck_check(F1(2, 0.5, "t"), [(0.0, 1.0, 2.0)])
    assert printed.max_residual == pytest.approx(math.sqrt(16 + 1 / 64), abs=1e-12)
    assert not homogeneity_check(F1(2, 0.5, "t")).passed
    assert ck_check(F1(2, 0.5)).passed
    assert homogeneity_check(F1(2, 0.5)).passed


def test_f1_extreme_rates_leave_e6():
    assert expected_class(F1(1, 0), 0, 1) == C("E2")
    assert classify(StructMatrix(F(1, 2), F(1, 2), F(1, 2), F(1, 2))).cls == C("E2")
    assert classify(StructMatrix(F(1, 2), F(-1, 2), F(-1, 2), F(1, 2))).cls == C("E3")


# 5. scale factor of family F2 --------------------------------------------------


def test_f2_has_no_half_factor():
    rep = ck_check(F2(half_factor=True), ck_triples(100))
    assert all(abs(r - math.sqrt(2) / 4) <= 1e-12 for *_, r in rep.samples)
    assert ck_check(F2()).max_residual <= 1e-12


# 6. witness signs for E5 -------------------------------------------------------


def test_e5_witness_signs():
    m = StructMatrix(1, 0, -1, 0)
    e5 = canonical_matrix(C("E5"))
    assert transform(m, BasisChange(0, -1, 1, 0)) == StructMatrix(0, -1, 0, 1)
    assert transform(m, BasisChange(0, 1, -1, 0)) == e5
    rec = classify(m)
    assert rec.cls == C("E5") and transform(m, rec.witness) == e5


def test_e5_sign_flip_image():
    assert transform(canonical_matrix(C("E5")), BasisChange(1, 0, 0, -1)) == StructMatrix(0, -1, 0, 1)

