import numpy as np
import pytest

from specrev.gallery import GALLERY, make_infinite_end_model
from specrev.geometry import area, gauss_bonnet_check, total_area
from specrev.spectral import first_eigenvalue, supersolution_residual
from specrev.fundamental import (
    CurveData,
    TestFunction,
    admissibility_violation,
    audit_bonnet_myers,
    audit_collar,
    audit_isoperimetric_1,
    audit_isoperimetric_2,
    audit_volume_comparison,
    ball_area,
    constant_test_function,
    evaluate_fundamental,
    iso2_constants,
    linear_test_function,
    polynomial_test_function,
    sample_test_function,
    volume_cutoff_test_function,
    volume_upper_constant,
)


def equator_curve():
    sph = GALLERY["round_sphere"].build()
    return sph, CurveData.coordinate_circle(sph, np.pi / 2)


def test_curve_data_round_sphere():
    sph, eq = equator_curve()
    assert abs(eq.rho_minus - np.pi / 2) < 1e-14
    assert abs(eq.rho_plus - np.pi / 2) < 1e-14
    assert abs(eq.gamma_len - 2 * np.pi) < 1e-12
    assert abs(eq.kappa_total) < 1e-12
    # L(s) = 2 pi cos(s), Gamma = -2 pi sin(s), G = 2 pi sin(s)
    ss = np.linspace(-1.2, 1.2, 7)
    assert np.max(np.abs(eq.L(ss) - 2 * np.pi * np.cos(ss))) < 1e-12
    assert np.max(np.abs(eq.Gamma(ss) + 2 * np.pi * np.sin(ss))) < 1e-12
    assert np.max(np.abs(eq.G(ss) - 2 * np.pi * np.sin(ss))) < 1e-12
    assert abs(eq.area_minus() - 2 * np.pi) < 1e-9
    assert abs(eq.area_plus() - 2 * np.pi) < 1e-9
    with pytest.raises(ValueError):
        CurveData.coordinate_circle(sph, 0.0)
    with pytest.raises(ValueError):
        CurveData.coordinate_circle(GALLERY["cone"].build(), 1.0)


def test_linear_profile_oracle_on_equator():
    # beta=1, lam=0: LHS = int 2 pi cos(s) (2/pi)^2 ds = 16/pi, RHS = 16
    sph, eq = equator_curve()
    tf = linear_test_function(eq.rho_minus, eq.rho_plus)
    rec = evaluate_fundamental(sph, 1.0, 0.0, eq, tf)
    assert rec.passed
    assert abs(rec.lhs - 16.0 / np.pi) < 1e-10
    assert abs(rec.rhs - 16.0) < 1e-12


def test_linear_profile_matches_area_form():
    # for the linear profile LHS = (2b-1) * (|Om-|/rho-^2 + |Om+|/rho+^2)
    sph = GALLERY["round_sphere"].build()
    cur = CurveData.coordinate_circle(sph, 1.1)
    tf = linear_test_function(cur.rho_minus, cur.rho_plus)
    beta = 0.7
    rec = evaluate_fundamental(sph, beta, 0.0, cur, tf)
    z = cur.area_minus() / cur.rho_minus**2 + cur.area_plus() / cur.rho_plus**2
    assert abs(rec.lhs - (2 * beta - 1) * z) < 1e-9 * abs(rec.lhs)
    kink = 2 * beta * cur.gamma_len * (1 / cur.rho_minus + 1 / cur.rho_plus)
    assert abs(rec.rhs - kink) < 1e-12 * kink
    assert rec.passed


def test_constant_profile_saturates_total_area_bound():
    # constant K=1 sphere has lam1 = beta, where lam*|Sigma| = 4 pi beta exactly
    sph, eq = equator_curve()
    for beta in (1.0, 0.6):
        rec = evaluate_fundamental(sph, beta, beta, eq, constant_test_function())
        assert rec.passed
        assert abs(rec.lhs - 4 * np.pi * beta) < 1e-8
        assert abs(rec.rhs - 4 * np.pi * beta) < 1e-12
        assert abs(rec.margin) < 1e-8


def test_polynomial_and_cutoff_profiles_pass_on_sphere():
    sph, eq = equator_curve()
    rec = evaluate_fundamental(
        sph, 0.4, 0.0, eq, polynomial_test_function(eq.rho_minus, eq.rho_plus, 0.5, 2.0)
    )
    assert rec.passed and rec.margin >= -1e-6
    rec = evaluate_fundamental(
        sph, 0.7, 0.0, eq, volume_cutoff_test_function(0.8 * eq.rho_plus, 2.5)
    )
    assert rec.passed and rec.margin >= -1e-6


def test_inadmissible_profiles_are_rejected():
    sph, eq = equator_curve()

    def up(s):
        return 1.0 + np.asarray(s, float)

    def one(s):
        return np.ones_like(np.asarray(s, float))

    def zero(s):
        return np.zeros_like(np.asarray(s, float))

    increasing = TestFunction("bad", up, one, zero, 1.0, 1.0)
    assert admissibility_violation(increasing, eq.rho_minus, eq.rho_plus) is not None
    with pytest.raises(ValueError):
        evaluate_fundamental(sph, 1.0, 0.0, eq, increasing)

    def neg(s):
        return -np.ones_like(np.asarray(s, float))

    negative = TestFunction("bad", neg, zero, zero, 0.0, 0.0)
    assert "phi < 0" in admissibility_violation(negative, eq.rho_minus, eq.rho_plus)


def test_constructor_input_validation():
    with pytest.raises(ValueError):
        polynomial_test_function(1.0, 1.0, -0.1, 2.0)
    with pytest.raises(ValueError):
        polynomial_test_function(1.0, 1.0, 0.5, 1.0)
    with pytest.raises(ValueError):
        volume_cutoff_test_function(0.0, 2.0)
    with pytest.raises(ValueError):
        volume_cutoff_test_function(0.5, 0.9)


def test_random_profiles_hold_at_certified_level():
    # on the unit sphere lam1(-Lap + b*K) = b; every admissible profile must pass
    sph = GALLERY["round_sphere"].build()
    rng = np.random.default_rng(42)
    for _ in range(50):
        beta = rng.uniform(0.3, 1.2)
        r0 = rng.uniform(0.4, np.pi - 0.4)
        cur = CurveData.coordinate_circle(sph, r0)
        tf = sample_test_function(rng, cur.rho_minus, cur.rho_plus)
        rec = evaluate_fundamental(sph, beta, beta, cur, tf)
        assert rec.passed, (beta, r0, tf.family, tf.params, rec.margin)


def test_iso2_constants_frozen_values():
    k = iso2_constants(0.4, 0.1)
    assert abs(k["p"] - 1.5) < 1e-12
    assert abs(k["C1"] - 0.15) < 1e-12
    assert abs(k["C1"] - k["p"] * 0.1) < 1e-12
    k = iso2_constants(0.3, 0.05)
    assert abs(k["p"] - 3.25) < 1e-12
    assert abs(k["C1"] - 0.1625) < 1e-12
    assert k["C2"] > 0 and k["C3"] > 0 and k["C_chain"] > 0


def test_audit_isoperimetric_1_round_sphere():
    sph = GALLERY["round_sphere"].build()
    rec = audit_isoperimetric_1(sph, 1.0)
    assert rec.passed
    assert abs(rec.lhs - 2 * np.pi) < 1e-4
    assert abs(rec.rhs - 1.0 / (4 * np.pi)) < 1e-9
    rec = audit_isoperimetric_1(sph, 0.6)
    assert rec.passed
    assert abs(rec.rhs - 0.04 / 5.76 * 4 / np.pi) < 1e-9
    with pytest.raises(ValueError):
        audit_isoperimetric_1(sph, 0.5)


def test_audit_collar_round_sphere():
    sph = GALLERY["round_sphere"].build()
    rec = audit_collar(sph, 1.0, np.pi / 2, np.pi / 4)
    assert rec.passed
    assert abs(rec.lhs - 4 * np.pi * np.sin(np.pi / 4)) < 1e-8
    assert abs(rec.rhs - 2 * np.pi**2) < 1e-12
    with pytest.raises(ValueError):
        audit_collar(sph, 0.5, np.pi / 2, 0.3)


def test_audit_collar_skips_on_negative_band_state():
    # the hyperbolic neck carries a negative Dirichlet ground state
    dmb = GALLERY["hyperbolic_dumbbell"].build()
    rec = audit_collar(dmb, 1.0, dmb.length / 2, 3.0)
    assert rec.status == "skipped"
    assert rec.params["lam_dirichlet"] < -1.0


def test_audit_isoperimetric_2_round_sphere():
    sph = GALLERY["round_sphere"].build()
    rec = audit_isoperimetric_2(sph, 0.4, 0.1)
    assert rec.passed
    for name in (
        "check_fundamental",
        "check_reduction",
        "check_kink_half",
        "check_chain",
        "check_headline",
        "check_headline_stated",
    ):
        assert rec.params[name] == 1.0
    assert abs(rec.params["p"] - 1.5) < 1e-12
    rec = audit_isoperimetric_2(sph, 0.3, 0.05)
    assert rec.passed
    with pytest.raises(ValueError):
        audit_isoperimetric_2(sph, 0.25, 0.1)
    with pytest.raises(ValueError):
        audit_isoperimetric_2(sph, 0.6, 0.1)
    with pytest.raises(ValueError):
        audit_isoperimetric_2(sph, 0.4, 0.0)


def test_volume_upper_constant_frozen_values():
    assert abs(volume_upper_constant(1.0) - 24.866843766549028) < 1e-6
    assert abs(volume_upper_constant(0.4) - 91.1199114628539) < 1e-5
    assert abs(volume_upper_constant(0.3) - 1196.657) < 0.01
    with pytest.raises(ValueError):
        volume_upper_constant(0.25)


def test_ball_area_pole_and_interior_agree_on_sphere():
    sph = GALLERY["round_sphere"].build()
    # pole-centered areas are the exact caps 2 pi (1 - cos r)
    for r in (0.5, 1.0, 2.0):
        assert abs(ball_area(sph, 0.0, r) - 2 * np.pi * (1 - np.cos(r))) < 1e-8
    # an equator center uses the grid; rotational symmetry gives the same law
    got = ball_area(sph, np.pi / 2, 1.0)
    assert abs(got - 2 * np.pi * (1 - np.cos(1.0))) < 0.05 * got


def test_audit_volume_comparison_round_sphere():
    sph = GALLERY["round_sphere"].build()
    rec = audit_volume_comparison(sph, 1.0)
    assert rec.passed
    assert rec.params["C_lo"] > 0
    # the smallest ladder ball is nearly Euclidean: |B(r)|/r^2 -> pi
    r0 = rec.params["radii"][0]
    assert abs(rec.params["areas"][0] / r0**2 - np.pi) < 0.02
    assert rec.lhs <= rec.params["C_up"]
    with pytest.raises(ValueError):
        audit_volume_comparison(sph, 0.2)


def test_audit_volume_comparison_skips_without_certificate():
    dmb = GALLERY["hyperbolic_dumbbell"].build()
    rec = audit_volume_comparison(dmb, 1.0)
    assert rec.status == "skipped"
    assert rec.params["lam1"] < -1e-8


def test_audit_bonnet_myers_round_sphere():
    sph = GALLERY["round_sphere"].build()
    rec = audit_bonnet_myers(sph, 1.0)
    assert rec.passed
    assert abs(rec.lhs - np.pi) < 1e-9
    assert abs(rec.rhs - 2 * np.pi / np.sqrt(3)) < 1e-6
    rec = audit_bonnet_myers(sph, 0.5)
    assert rec.passed
    assert abs(rec.rhs - np.pi * np.sqrt(2)) < 1e-6
    rec = audit_bonnet_myers(GALLERY["hyperbolic_dumbbell"].build(), 1.0)
    assert rec.status == "skipped"
    with pytest.raises(ValueError):
        audit_bonnet_myers(sph, 0.25)


def test_audit_margins_are_scale_invariant():
    s1 = GALLERY["round_sphere"].build()
    s3 = GALLERY["round_sphere"].build(radius=3.0)
    pairs = [
        (audit_isoperimetric_1(s1, 0.8), audit_isoperimetric_1(s3, 0.8)),
        (
            audit_collar(s1, 1.0, np.pi / 2, np.pi / 4),
            audit_collar(s3, 1.0, 3 * np.pi / 2, 3 * np.pi / 4),
        ),
        (audit_volume_comparison(s1, 0.6), audit_volume_comparison(s3, 0.6)),
        (audit_bonnet_myers(s1, 1.0), audit_bonnet_myers(s3, 1.0)),
    ]
    for a, b in pairs:
        assert a.passed and b.passed
        assert abs(a.margin - b.margin) < 1e-8


def test_flare_model_construction():
    m, phi = make_infinite_end_model()
    xc = np.pi / 3
    # C1 glue of the spherical cap to the power-law flare
    assert abs(m.f(xc - 1e-12) - m.f(xc + 1e-12)) < 1e-9
    assert abs(m.df(xc - 1e-12) - m.df(xc + 1e-12)) < 1e-9
    assert abs(m.f(0.0)) < 1e-12
    # closed-form area: cap pi plus 2 pi A (t^-0.5) / 0.5 between the ends
    p = 1.5
    t0 = p * np.tan(xc)
    A = np.sin(xc) * t0**p
    exact = np.pi + 2 * np.pi * A * (1e-4**-0.5 - t0**-0.5) / (p - 1.0)
    assert abs(total_area(m) - exact) < 1e-5 * exact
    # the certificate is a strict positive supersolution at lam = 0
    worst, loc = supersolution_residual(m, 0.4, 0.0, phi)
    assert worst < 0
    assert abs(worst + (1 + p) * (1 + p - 4 * 0.4 * p) / (4 * t0**2)) < 1e-9
    assert abs(loc - xc) < 1e-6
    # curvature integral closes at a mild truncation where quadrature resolves it
    mild, _ = make_infinite_end_model(t_trunc=0.05)
    assert gauss_bonnet_check(mild).passed
    with pytest.raises(ValueError):
        make_infinite_end_model(p=0.9)
    with pytest.raises(ValueError):
        make_infinite_end_model(beta=0.6, p=1.5)


def test_flare_model_breaks_upper_volume_bound():
    # bounded diameter with area blowing up as the truncation shrinks: the
    # pole ball at full radius beats C_up(0.4) by a wide factor
    m, _ = make_infinite_end_model()
    rec = audit_volume_comparison(m, 0.4, require_certificate=False)
    assert not rec.passed
    assert rec.lhs > 3 * rec.params["C_up"]
    assert rec.margin < -2.0
