import numpy as np
import pytest

from specrev.gallery import GALLERY, make_round_sphere, make_spheroid_family
from specrev.geometry import RadialField, total_area
from specrev.spectral import first_eigenvalue
from specrev.conformal import (
    anti_harnack_audit,
    audit_tilde_diameter,
    build_conformal,
    duality_transform,
    eigenfunction_bundle,
    embed,
    projection_distortion,
    rigidity_experiment,
)


def constant_one():
    return RadialField(
        lambda r: np.ones_like(np.asarray(r, float)),
        lambda r: np.zeros_like(np.asarray(r, float)),
        lambda r: np.zeros_like(np.asarray(r, float)),
        name="one",
    )


def cosine_field(a):
    return RadialField(
        lambda r: 1.0 + a * np.cos(np.asarray(r, float)),
        lambda r: -a * np.sin(np.asarray(r, float)),
        lambda r: -a * np.cos(np.asarray(r, float)),
        name="cosine",
    )


_CACHE = {}


def appendix_b_bundle():
    # beta(p+1) <= 1 certificate with concave kinks; heavy build shared here
    if "b" not in _CACHE:
        metric, phi = GALLERY["appendix_b"].build()
        _CACHE["b"] = (metric, phi, build_conformal(metric, 0.4, phi, target_area=1.0))
    return _CACHE["b"]


def test_identity_bundle_is_exact_on_round_sphere():
    g = make_round_sphere(1.0)
    b = build_conformal(g, 1.0, constant_one(), target_area=4 * np.pi)
    # u = 0: tilde = g, margin = K - lam/beta = 1, zero energy in both gauges
    assert abs(b.margin_min - 1.0) < 1e-12
    assert b.dirichlet_energy == 0.0
    assert b.energy_tilde == 0.0
    assert abs(total_area(b.tilde_metric) - 4 * np.pi) < 1e-8
    assert b.curvature_crosscheck() < 1e-12
    assert b.kink_width == 0.0
    rr = np.linspace(0.3, 2.8, 17)
    assert np.max(np.abs(b.change.s_of_r(rr) - rr)) < 1e-10


def test_identity_embedding_has_unit_distortion():
    g = make_round_sphere(1.0)
    b = build_conformal(g, 1.0, constant_one(), target_area=4 * np.pi)
    emb = embed(b)
    assert emb.mollify_eps == 0.0
    assert abs(emb.d1 - 1.0) < 1e-6
    assert abs(emb.d2 - 1.0) < 1e-9
    lip, lip_inv = projection_distortion(emb)
    assert abs(lip - 1.0) < 1e-6
    assert abs(lip_inv - 1.0) < 1e-6
    # centered polar heights reach +-1
    assert abs(emb.z[0] + 1.0) < 1e-7
    assert abs(emb.z[-1] - 1.0) < 1e-7


def test_radius_two_sphere_distortion_halves_and_doubles():
    # projecting |x| = 2 onto the unit sphere: stretch 1/2 outward, 2 back
    g = make_round_sphere(2.0)
    b = build_conformal(g, 1.0, constant_one(), target_area=16 * np.pi)
    emb = embed(b)
    lip, lip_inv = projection_distortion(emb)
    assert abs(lip - 0.5) < 1e-7
    assert abs(lip_inv - 2.0) < 1e-6
    assert abs(emb.d1 - 2.0) < 1e-6
    assert abs(emb.d2 - 2.0) < 1e-9


def test_unit_area_normalization_and_diameter_record():
    # any round sphere normalizes to the area-1 sphere: diam = sqrt(pi)/2
    for radius in (1.0, 2.0):
        g = make_round_sphere(radius)
        b = build_conformal(g, 1.0, constant_one(), target_area=1.0)
        assert abs(total_area(b.tilde_metric) - 1.0) < 1e-9
        rec = audit_tilde_diameter(b)
        assert rec.status == "pass"
        assert abs(rec.params["diam_tilde"] - np.sqrt(np.pi) / 2) < 1e-12
    assert abs(rec.params["x"] - 4.0 / np.pi) < 1e-10


def test_tilde_diameter_envelope_and_skip_paths():
    g = make_round_sphere(1.0)
    b = build_conformal(g, 1.0, constant_one(), target_area=1.0)
    rec = audit_tilde_diameter(b, base_ratio=0.5, envelope=1.0)
    assert rec.status == "pass" and rec.margin > 0
    rec = audit_tilde_diameter(b, base_ratio=0.5, envelope=0.5)
    assert rec.status == "fail"
    # x = 4/pi < 2: below the base ratio the envelope does not apply
    rec = audit_tilde_diameter(b, base_ratio=2.0, envelope=1.0)
    assert rec.status == "skipped"
    b4 = build_conformal(g, 1.0, constant_one(), target_area=4 * np.pi)
    with pytest.raises(ValueError):
        audit_tilde_diameter(b4)


def test_supersolution_gate_rejects_bad_certificates():
    g = make_round_sphere(1.0)
    # Lap(phi) - K phi = -1 - 3a cos r > 0 near r = pi once a > 1/3
    with pytest.raises(ValueError):
        build_conformal(g, 1.0, cosine_field(0.5), target_area=1.0)
    # sign-changing phi
    bad = RadialField(
        lambda r: np.cos(np.asarray(r, float)),
        lambda r: -np.sin(np.asarray(r, float)),
        lambda r: -np.cos(np.asarray(r, float)),
        name="signchange",
    )
    with pytest.raises(ValueError):
        build_conformal(g, 1.0, bad, target_area=1.0)


def test_convex_kink_is_rejected():
    g = make_round_sphere(1.0)
    rm = np.pi / 2

    def val(r):
        r = np.asarray(r, float)
        return np.where(r < rm, 1.0, 1.0 + 0.3 * (r - rm))

    def dval(r):
        r = np.asarray(r, float)
        return np.where(r < rm, 0.0, 0.3)

    def d2val(r):
        return np.zeros_like(np.asarray(r, float))

    kinked = RadialField(val, dval, d2val, breakpoints=(rm,), name="vee")
    with pytest.raises(ValueError):
        build_conformal(g, 1.0, kinked, target_area=1.0)


def test_topology_gate_requires_sphere():
    collar, _ = GALLERY["beta_quarter"].build()
    with pytest.raises(ValueError):
        build_conformal(collar, 0.25, constant_one(), target_area=1.0)


def test_eigenfunction_bundle_spheroid_certificate():
    g = make_spheroid_family(0.1)
    b = eigenfunction_bundle(g, 1.0, target_area=1.0)
    assert b.lam == 0.0
    # strict certificate well away from zero, frozen from the grid solve
    assert abs(b.margin_min - 10.4784381) < 1e-3
    assert abs(b.dirichlet_energy - 0.117590607759) < 1e-6
    # conformal invariance of the Dirichlet energy ties both gauges together
    assert abs(b.dirichlet_energy - b.energy_tilde) < 1e-8
    assert b.curvature_crosscheck() < 1e-10
    emb = embed(b)
    assert emb.mollify_eps == 0.0
    lip, lip_inv = projection_distortion(emb)
    assert emb.d1 <= emb.d2
    assert lip <= 1.0 / emb.d1 + 1e-9
    assert lip_inv <= emb.d2**2 / emb.d1 * (1 + 1e-6)
    # nearly round: the normalized ball is pinched between close radii
    assert emb.d2 / emb.d1 < 1.1


def test_eigenfunction_bundle_rejects_negative_ground_state():
    dmb = GALLERY["hyperbolic_dumbbell"].build()
    assert first_eigenvalue(dmb, 1.0).lam < -1.0
    with pytest.raises(ValueError):
        eigenfunction_bundle(dmb, 1.0, target_area=1.0)


def test_rigidity_mode_needs_eigenvalue_at_beta():
    g = make_round_sphere(1.0)
    b = eigenfunction_bundle(g, 1.0, target_area=4 * np.pi, mode="rigidity")
    assert b.lam == 1.0
    assert abs(b.margin_min) < 1e-6
    # unscaled spheroid: lam1 = 0.9906 != beta, the tight mode must refuse
    with pytest.raises(ValueError):
        eigenfunction_bundle(make_spheroid_family(0.1), 1.0, target_area=1.0, mode="rigidity")
    with pytest.raises(ValueError):
        eigenfunction_bundle(g, 1.0, target_area=1.0, mode="nonsense")


def test_appendix_b_bundle_rounds_kinks_and_stays_certified():
    metric, phi, b = appendix_b_bundle()
    # concave kinks forced a Hermite bridge; the certificate survives it
    assert b.kink_width > 0
    assert 0 < b.margin_min < 1e-3
    assert abs(total_area(b.tilde_metric) - 1.0) < 1e-6
    assert abs(b.dirichlet_energy - b.energy_tilde) < 1e-8
    assert b.curvature_crosscheck() < 1e-10
    # conformal energy budget of a nonnegative-eigenvalue certificate
    assert b.dirichlet_energy <= 4 * np.pi / 0.4
    rec = audit_tilde_diameter(b)
    assert rec.params["diam_tilde"] > 10


def test_appendix_b_embedding_mollifies_flat_caps():
    metric, phi, b = appendix_b_bundle()
    # tight caps have K_tilde = 0: un-mollified embedding must refuse
    with pytest.raises(ValueError):
        embed(b, mollify_eps=0.0)
    emb = embed(b)
    assert emb.mollify_eps == 1e-4
    lip, lip_inv = projection_distortion(emb)
    # collapsed sharpness family: huge distortion, bounds still honored
    assert lip > 100
    assert lip_inv > 1e4
    assert lip <= 1.0 / emb.d1 + 1e-9
    assert lip_inv <= emb.d2**2 / emb.d1 * (1 + 1e-6)


def test_anti_harnack_round_sphere_frozen_bound():
    g = make_round_sphere(1.0)
    rec = anti_harnack_audit(g, 1.0, constant_one())
    assert rec.passed
    assert abs(rec.lhs - 1.0) < 1e-12
    # diam * Ch = pi * (1/1): bound = pi^{-1/2}
    assert abs(rec.rhs - 0.5641895835477573) < 1e-6
    # the bound is scale invariant
    rec3 = anti_harnack_audit(make_round_sphere(3.0), 1.0, constant_one())
    assert abs(rec3.rhs - rec.rhs) < 1e-6


def test_anti_harnack_appendix_b_contrast():
    metric, phi, _ = appendix_b_bundle()
    rec = anti_harnack_audit(metric, 0.4, phi)
    assert rec.passed
    assert abs(rec.lhs - 23.5659386891555) < 1e-6
    assert rec.lhs > rec.rhs > 1.0


def test_duality_is_an_involution():
    g = make_round_sphere(1.0)
    phi = cosine_field(0.3)
    g_b, phi_b = duality_transform(g, 1.0, phi)
    g_bb, phi_bb = duality_transform(g_b, 1.0, phi_b)
    assert abs(total_area(g_bb) - total_area(g)) < 1e-9
    assert abs(g_bb.length - g.length) < 1e-10
    # compare profiles through matched fractional coordinates
    tt = np.linspace(1e-3, np.pi - 1e-3, 777)
    f1 = g.f(g.r_min + tt * g.length / np.pi)
    f2 = g_bb.f(g_bb.r_min + tt * g_bb.length / np.pi)
    assert np.max(np.abs(f1 - f2)) < 1e-10
    with pytest.raises(ValueError):
        duality_transform(g, 1.0, cosine_field(0.5))


def test_rigidity_experiment_deviations_shrink(tmp_path):
    members = [(eps, make_spheroid_family(eps)) for eps in (0.1, 0.05)]
    rep = rigidity_experiment(members, beta=1.0, n_pairs=4, seed=0, n=1024, grid_n=128)
    assert rep.excluded == []
    assert [row["eps"] for row in rep.rows] == [0.1, 0.05]
    for row in rep.rows:
        assert row["delta"] > 0
        assert row["energy"] <= row["delta"] + max(1e-6, 0.05 * row["delta"])
        assert row["d1"] <= 1.0 + 1e-9 <= row["d2"] + 2e-2
    dev = rep.deviation_series()
    for key, series in dev.items():
        assert series[-1] < 0.05, key
    ok, bad = rep.check()
    assert ok and bad == []
    out = tmp_path / "rigidity.csv"
    rep.to_csv(out)
    text1 = out.read_text()
    rep.to_csv(out)
    assert out.read_text() == text1
    header = text1.splitlines()[0]
    assert header.split(",") == list(rep.KEYS)
    assert len(text1.splitlines()) == 3


def test_rigidity_experiment_excludes_and_validates():
    dmb = GALLERY["hyperbolic_dumbbell"].build()
    members = [(0.05, make_spheroid_family(0.05)), (9.9, dmb)]
    rep = rigidity_experiment(members, beta=1.0, n_pairs=2, n=1024, grid_n=96)
    assert len(rep.rows) == 1
    assert len(rep.excluded) == 1
    assert "9.9" in str(rep.excluded[0][0])
    with pytest.raises(ValueError):
        rigidity_experiment([], beta=0.25)
