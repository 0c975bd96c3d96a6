import numpy as np
import pytest

from specrev.gallery import (
    CounterexampleParams,
    make_appendix_b,
    make_beta_quarter_model,
    make_capped_cylinder,
    make_hyperbolic_dumbbell,
    make_round_sphere,
    make_spheroid_family,
)
from specrev.geometry import ProfilePiece, RadialField, RadialProfile, WarpedMetric
from specrev.spectral import (
    eigenvalue_perturbation,
    first_eigenvalue,
    rayleigh_quotient,
    refine_eigenpair_ode,
    supersolution_residual,
)


def _hemisphere():
    return WarpedMetric(
        RadialProfile(
            [ProfilePiece(0.0, np.pi / 2, np.sin, np.cos, lambda r: -np.sin(r))],
            "half_open",
        )
    )


@pytest.mark.parametrize("beta", [0.3, 0.7, 1.0])
@pytest.mark.parametrize("n", [256, 2048])
def test_round_sphere_eigenvalue_exact_on_any_grid(beta, n):
    # the scheme reproduces lambda_1 = beta on the unit sphere to rounding,
    # independent of resolution: phi = const solves the pencil exactly
    m = make_round_sphere(1.0)
    res = first_eigenvalue(m, beta, n=n)
    assert abs(res.lam - beta) < 1e-9


def test_round_sphere_radius_scaling():
    res1 = first_eigenvalue(make_round_sphere(1.0), 0.5, n=512)
    res2 = first_eigenvalue(make_round_sphere(7.0), 0.5, n=512)
    assert abs(res2.lam - res1.lam / 49.0) <= 1e-10 * abs(res1.lam)


def test_laplace_spectrum_on_sphere():
    # beta = 0: ground state is constant (lam = 0); the first radial overtone
    # of the Laplacian on the unit sphere is l(l+1) = 2
    res = first_eigenvalue(make_round_sphere(1.0), 0.0, n=2048, k=2)
    assert abs(res.eigenvalues[0]) < 1e-9
    assert abs(res.eigenvalues[1] - 2.0) < 1e-5


def test_dirichlet_hemisphere():
    # phi = cos r vanishes at the equator and satisfies Delta phi = -2 phi
    res = first_eigenvalue(_hemisphere(), 0.0, n=2048, boundary="dirichlet")
    assert abs(res.lam - 2.0) < 1e-5


def test_eigenfunction_normalization_and_sign():
    res = first_eigenvalue(make_spheroid_family(0.1), 0.6, n=1024)
    total = 2 * np.pi * np.sum(res.values**2 * res.mass)
    assert abs(total - 1.0) < 1e-12
    assert np.min(res.values) > 0  # ground state has a sign


def test_grid_convergence_second_order():
    m = make_spheroid_family(0.15)
    lams = [first_eigenvalue(m, 0.6, n=n).lam for n in (512, 1024, 2048)]
    d1 = abs(lams[1] - lams[0])
    d2 = abs(lams[2] - lams[1])
    assert 2.5 < d1 / d2 < 5.5  # ~4 for an O(h^2) scheme


def test_negative_control_dumbbell():
    m = make_hyperbolic_dumbbell()
    for beta in (0.3, 0.4, 0.45):
        assert first_eigenvalue(m, beta, n=1024).lam < -0.05


def test_capped_cylinder_positive():
    m = make_capped_cylinder(2.0)
    assert first_eigenvalue(m, 1.0, n=1024).lam > 0.1


def test_rayleigh_quotient_matches_eigenvalue():
    m = make_spheroid_family(0.1)
    res = first_eigenvalue(m, 0.6, n=2048)
    rq = rayleigh_quotient(m, 0.6, res.eigenfunction)
    assert abs(rq - res.lam) < 1e-6
    # any other trial function lies above the minimum
    bump = RadialField(
        lambda r: 1.0 + 0.3 * np.cos(np.asarray(r, float)),
        lambda r: -0.3 * np.sin(np.asarray(r, float)),
        lambda r: -0.3 * np.cos(np.asarray(r, float)),
    )
    assert rayleigh_quotient(m, 0.6, bump) > res.lam - 1e-9


def test_supersolution_residual_borderline_model():
    # the Gaussian certificate solves the eigen-identity exactly, so the
    # normalized residual equals lam - lam_exact
    m, phi = make_beta_quarter_model(lam=0.8, r_trunc=4.0)
    res, _ = supersolution_residual(m, 0.25, 0.8, phi)
    assert abs(res) < 1e-10
    res_above, _ = supersolution_residual(m, 0.25, 0.9, phi)
    assert abs(res_above - 0.1) < 1e-10


@pytest.mark.parametrize("beta", [0.3, 0.4, 0.45])
def test_appendix_b_certificate_certifies(beta):
    pars = CounterexampleParams.build(beta, 100.0)
    m, phi = make_appendix_b(pars)
    res, _ = supersolution_residual(m, beta, 0.0, phi)
    assert res <= 1e-10
    lam = first_eigenvalue(m, beta, n=4096).lam
    assert lam >= -1e-6


def test_supersolution_rejects_convex_kink():
    # tent with an upward kink at the equator cannot be a supersolution
    m = make_round_sphere(1.0)
    from specrev.geometry import piecewise_field

    segs = [
        (0.0, np.pi / 2, lambda r: 1.0 + 0.0 * np.asarray(r, float), lambda r: np.zeros_like(np.asarray(r, float)), lambda r: np.zeros_like(np.asarray(r, float))),
        (np.pi / 2, np.pi, lambda r: 1.0 + 0.5 * (np.asarray(r, float) - np.pi / 2), lambda r: 0.5 * np.ones_like(np.asarray(r, float)), lambda r: np.zeros_like(np.asarray(r, float))),
    ]
    phi = piecewise_field(segs)
    res, at = supersolution_residual(m, 0.5, 0.0, phi)
    assert res == np.inf and abs(at - np.pi / 2) < 1e-12


def test_ode_refinement_round_sphere():
    m = make_round_sphere(1.0)
    lam, phi = refine_eigenpair_ode(m, 0.7)
    assert abs(lam - 0.7) < 1e-12
    rr = np.linspace(0.3, np.pi - 0.3, 11)
    assert np.max(np.abs(phi.d(rr))) < 1e-10  # ground state is constant


def test_ode_refinement_agrees_with_grid():
    m = make_spheroid_family(0.1)
    lam_ode, phi = refine_eigenpair_ode(m, 0.6)
    lam_fd = first_eigenvalue(m, 0.6, n=4096).lam
    assert abs(lam_ode - lam_fd) < 1e-7
    # the refined pair certifies any lam below lam_ode minus the noise floor
    res, _ = supersolution_residual(m, 0.6, lam_ode - 1e-7, phi)
    assert res < 0
    # normalized in L^2(dA)
    nrm = 2 * np.pi * rayleigh_denominator(m, phi)
    assert abs(nrm - 1.0) < 1e-8


def rayleigh_denominator(metric, phi):
    from specrev.quadrature import split_quad

    return split_quad(
        lambda r: phi(r) ** 2 * metric.f(r),
        metric.r_min,
        metric.r_max,
        metric.breakpoints,
        n_panels=64,
    )


def test_perturbation_mean_zero_on_round_sphere():
    # phi is constant, so the curvature variation integrates Delta h over the
    # sphere (zero) and the volume term vanishes for mean-zero h
    m = make_round_sphere(1.0)
    h = RadialField(np.cos, lambda r: -np.sin(np.asarray(r, float)), lambda r: -np.cos(np.asarray(r, float)))
    out = eigenvalue_perturbation(m, 0.5, h, t=1e-4, scheme="central", n=1024)
    tol = 1e-3 * max(abs(out["analytic"]), abs(out["fd"]), out["lam0"])
    assert abs(out["analytic"] - out["fd"]) <= tol
    assert abs(out["analytic"]) < 1e-9
    assert abs(out["fd"]) < 1e-6


def test_perturbation_full_variation_matches_fd():
    m = make_spheroid_family(0.1)
    h = RadialField(
        lambda r: 0.2 * np.cos(2 * np.asarray(r, float)),
        lambda r: -0.4 * np.sin(2 * np.asarray(r, float)),
        lambda r: -0.8 * np.cos(2 * np.asarray(r, float)),
    )
    out = eigenvalue_perturbation(m, 0.6, h, t=1e-4, scheme="central", n=2048)
    scale = max(abs(out["analytic_full"]), abs(out["fd"]), out["lam0"])
    assert abs(out["analytic_full"] - out["fd"]) <= 1e-3 * scale
    fwd = eigenvalue_perturbation(m, 0.6, h, t=1e-4, scheme="forward", n=2048)
    # forward difference carries an O(t) bias but the same limit
    assert abs(fwd["fd"] - out["fd"]) < 5e-3 * scale


def test_boundary_argument_validation():
    m = make_round_sphere(1.0)
    with pytest.raises(ValueError):
        first_eigenvalue(m, 0.5, n=128, boundary="robin")
    with pytest.raises(ValueError):
        first_eigenvalue(_hemisphere(), 0.0, n=128, boundary=("auto", "pole"))
