"""Integral inequality for distance test functions, and the audits built on it.

Testing the spectral condition with phi(d(x)), d the signed distance to a
coordinate circle, turns it into a one-dimensional inequality between an
energy of phi weighted by level lengths L(s) and boundary terms carried by
the Euler characteristics of the two sides plus the kink of phi at the curve.
Specializing phi gives isoperimetric lower bounds, a collar area bound,
quadratic volume comparison, and a diameter bound, audited here.
"""

import numpy as np
from dataclasses import dataclass, field
from scipy.optimize import minimize_scalar

from .geometry import ProfilePiece, RadialProfile, WarpedMetric, area, level_length
from .quadrature import split_quad
from .records import passed_record, skipped_record
from .spectral import first_eigenvalue
from .distances import diameter, isoperimetric_scan

_TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class CurveData:
    """Level-set bookkeeping for a coordinate circle r = r0 on a closed
    surface of revolution. Signed distance s > 0 points toward larger r.

    Coordinate circles have no cut locus short of the far poles, so the
    level length L(s), its derivative Gamma(s) = 2*pi*f'(r0+s), and the
    accumulated curvature G(s) are all exact.
    """

    metric: object
    r0: float
    rho_minus: float
    rho_plus: float
    gamma_len: float
    kappa_total: float
    chi_minus: float = 1.0
    chi_plus: float = 1.0

    @classmethod
    def coordinate_circle(cls, metric, r0):
        if metric.topology != "sphere":
            raise ValueError("level-set data needs a closed sphere-type profile")
        r0 = float(r0)
        if not (metric.r_min < r0 < metric.r_max):
            raise ValueError("base circle must be strictly interior")
        return cls(
            metric=metric,
            r0=r0,
            rho_minus=r0 - metric.r_min,
            rho_plus=metric.r_max - r0,
            gamma_len=level_length(metric, r0),
            kappa_total=_TWO_PI * float(metric.df(r0)),
        )

    def L(self, s):
        return _TWO_PI * self.metric.f(self.r0 + np.asarray(s, float))

    def Gamma(self, s):
        return _TWO_PI * self.metric.df(self.r0 + np.asarray(s, float))

    def G(self, s):
        # int_0^s (integrated curvature of the level circle) dt; closed form
        # because the circle integral of K = -f''/f is -2*pi*f''
        return self.kappa_total - self.Gamma(s)

    def area_minus(self, n=2048):
        return area(self.metric, self.metric.r_min, self.r0, n=n)

    def area_plus(self, n=2048):
        return area(self.metric, self.r0, self.metric.r_max, n=n)

    def s_breakpoints(self):
        lo, hi = -self.rho_minus, self.rho_plus
        pts = [b - self.r0 for b in self.metric.breakpoints]
        return tuple(sorted({0.0, *(s for s in pts if lo < s < hi)}))


@dataclass(frozen=True)
class TestFunction:
    """Profile phi(s) on [-rho_minus, rho_plus] with analytic derivatives.

    Admissibility: phi >= 0 and continuous, nonincreasing for s > 0,
    nondecreasing for s < 0. The one-sided slopes at s = 0 are stored
    analytically because the kink term dominates several specializations.
    """

    __test__ = False  # not a pytest class despite the name

    family: str
    phi: object
    dphi: object
    d2phi: object
    dminus0: float
    dplus0: float
    breaks: tuple = ()
    params: dict = field(default_factory=dict)


def linear_test_function(rho_minus, rho_plus):
    rm, rp = float(rho_minus), float(rho_plus)

    def phi(s):
        s = np.asarray(s, float)
        return np.where(s <= 0, (rm + s) / rm, (rp - s) / rp)

    def dphi(s):
        s = np.asarray(s, float)
        return np.where(s <= 0, 1.0 / rm, -1.0 / rp)

    def d2phi(s):
        return np.zeros_like(np.asarray(s, float))

    return TestFunction(
        family="linear",
        phi=phi,
        dphi=dphi,
        d2phi=d2phi,
        dminus0=1.0 / rm,
        dplus0=-1.0 / rp,
        breaks=(0.0,),
        params={},
    )


def polynomial_test_function(rho_minus, rho_plus, sigma, p):
    rm, rp = float(rho_minus), float(rho_plus)
    sig, p = float(sigma), float(p)
    if sig <= 0 or p <= 1:
        raise ValueError("need sigma > 0 and p > 1")
    cm = ((1.0 + sig) * rm) ** -p
    cp = ((1.0 + sig) * rp) ** -p

    def phi(s):
        s = np.asarray(s, float)
        return np.where(
            s <= 0,
            cm * ((1.0 + sig) * rm + s) ** p,
            cp * ((1.0 + sig) * rp - s) ** p,
        )

    def dphi(s):
        s = np.asarray(s, float)
        return np.where(
            s <= 0,
            p * cm * ((1.0 + sig) * rm + s) ** (p - 1.0),
            -p * cp * ((1.0 + sig) * rp - s) ** (p - 1.0),
        )

    def d2phi(s):
        s = np.asarray(s, float)
        return np.where(
            s <= 0,
            p * (p - 1.0) * cm * ((1.0 + sig) * rm + s) ** (p - 2.0),
            p * (p - 1.0) * cp * ((1.0 + sig) * rp - s) ** (p - 2.0),
        )

    return TestFunction(
        family="polynomial",
        phi=phi,
        dphi=dphi,
        d2phi=d2phi,
        dminus0=p / ((1.0 + sig) * rm),
        dplus0=-p / ((1.0 + sig) * rp),
        breaks=(0.0,),
        params={"sigma": sig, "p": p},
    )


def volume_cutoff_test_function(support, p):
    """phi = 1 behind the curve, (1 - s/support)^p ahead, 0 past the support."""
    sup, p = float(support), float(p)
    if sup <= 0 or p <= 1:
        raise ValueError("need support > 0 and p > 1")

    def _pow(s, q, coeff):
        # evaluate coeff * core^q with core clamped away from 0**negative
        core = np.clip(1.0 - np.asarray(s, float) / sup, 0.0, None)
        safe = np.where(core > 0.0, core, 1.0)
        return np.where(core > 0.0, coeff * safe**q, 0.0)

    def phi(s):
        s = np.asarray(s, float)
        return np.where(s <= 0, 1.0, _pow(s, p, 1.0))

    def dphi(s):
        s = np.asarray(s, float)
        return np.where(s <= 0, 0.0, _pow(s, p - 1.0, -p / sup))

    def d2phi(s):
        s = np.asarray(s, float)
        return np.where(s <= 0, 0.0, _pow(s, p - 2.0, p * (p - 1.0) / sup**2))

    return TestFunction(
        family="volume_cutoff",
        phi=phi,
        dphi=dphi,
        d2phi=d2phi,
        dminus0=0.0,
        dplus0=-p / sup,
        breaks=(0.0, sup),
        params={"support": sup, "p": p},
    )


def constant_test_function():
    def phi(s):
        return np.ones_like(np.asarray(s, float))

    def zero(s):
        return np.zeros_like(np.asarray(s, float))

    return TestFunction(
        family="constant", phi=phi, dphi=zero, d2phi=zero, dminus0=0.0, dplus0=0.0
    )


def admissibility_violation(tf, rho_minus, rho_plus, n=512):
    """Message describing the violated sign/monotonicity condition, or None."""
    rm, rp = float(rho_minus), float(rho_plus)
    scale = max(1.0, abs(tf.dminus0), abs(tf.dplus0))
    s_neg = np.linspace(-rm, 0.0, n // 2 + 2)[1:-1]
    s_pos = np.linspace(0.0, rp, n // 2 + 2)[1:-1]
    allv = np.concatenate([s_neg, s_pos, [-rm, rp]])
    vals = tf.phi(allv)
    if np.any(vals < -1e-12 * scale):
        return "phi < 0 at s=%g" % allv[int(np.argmin(vals))]
    dneg = tf.dphi(s_neg)
    if np.any(dneg < -1e-9 * scale):
        return "phi' < 0 at s=%g < 0 (must be nondecreasing behind the curve)" % (
            s_neg[int(np.argmin(dneg))]
        )
    dpos = tf.dphi(s_pos)
    if np.any(dpos > 1e-9 * scale):
        return "phi' > 0 at s=%g > 0 (must be nonincreasing ahead of the curve)" % (
            s_pos[int(np.argmax(dpos))]
        )
    return None


def evaluate_fundamental(metric, beta, lam, curve, tf, n_panels=64):
    """Audit: weighted energy of phi stays below the topology and kink terms.

    LHS = (2b-1)*int L phi'^2 + 2b*int L phi phi'' + lam*int L phi^2,
    RHS = 2*pi*b*[chi+ phi(rho+)^2 + chi- phi(-rho-)^2]
          + 2b*|gamma|*phi(0)*(phi'(0-) - phi'(0+)).
    Holds whenever the spectral condition is certified at lam.
    """
    beta = float(beta)
    lam = float(lam)
    bad = admissibility_violation(tf, curve.rho_minus, curve.rho_plus)
    if bad is not None:
        raise ValueError("inadmissible test function: " + bad)
    lo, hi = -curve.rho_minus, curve.rho_plus
    breaks = sorted({*curve.s_breakpoints(), *(b for b in tf.breaks if lo < b < hi)})
    i_grad = split_quad(lambda s: curve.L(s) * tf.dphi(s) ** 2, lo, hi, breaks, n_panels)
    i_bend = split_quad(
        lambda s: curve.L(s) * tf.phi(s) * tf.d2phi(s), lo, hi, breaks, n_panels
    )
    i_mass = split_quad(lambda s: curve.L(s) * tf.phi(s) ** 2, lo, hi, breaks, n_panels)
    lhs = (2.0 * beta - 1.0) * i_grad + 2.0 * beta * i_bend + lam * i_mass
    phi0 = float(tf.phi(0.0))
    rhs = 2.0 * np.pi * beta * (
        curve.chi_plus * float(tf.phi(hi)) ** 2
        + curve.chi_minus * float(tf.phi(lo)) ** 2
    ) + 2.0 * beta * curve.gamma_len * phi0 * (tf.dminus0 - tf.dplus0)
    tol = 1e-6 * max(abs(lhs), abs(rhs), 1.0)
    return passed_record(
        audit="fundamental_inequality",
        statement="tested energy <= topology + kink terms",
        lhs=lhs,
        rhs=rhs,
        margin=rhs - lhs,
        ok=rhs - lhs >= -tol,
        params={
            "beta": beta,
            "lam": lam,
            "r0": curve.r0,
            "family": tf.family,
            **tf.params,
        },
    )


def sample_test_function(rng, rho_minus, rho_plus):
    """Random admissible profile from the implemented families."""
    pick = rng.integers(0, 4)
    if pick == 0:
        return linear_test_function(rho_minus, rho_plus)
    if pick == 1:
        return polynomial_test_function(
            rho_minus, rho_plus, sigma=rng.uniform(0.05, 2.0), p=rng.uniform(1.1, 4.0)
        )
    if pick == 2:
        return volume_cutoff_test_function(
            support=rng.uniform(0.1, 1.0) * rho_plus, p=rng.uniform(2.0, 4.0)
        )
    return constant_test_function()


def iso2_constants(beta, epsilon):
    """Explicit constants of the polynomial-profile chain for 1/4 < beta <= 1/2.

    p is the smallest decay power making the quadratic form coefficient
    C1 = (4b-1)p^2 - 2bp positive by exactly epsilon*p; the remaining
    constants track the chain down to the final comparison constant.
    """
    b, eps = float(beta), float(epsilon)
    p = (2.0 * b + eps) / (4.0 * b - 1.0)
    c1 = (4.0 * b - 1.0) * p**2 - 2.0 * b * p
    c2 = np.sqrt(np.pi * c1 / (2.0 * b)) / (2.0 * p)
    c3 = c2 / 2.0 ** (2.0 * p - 1.0)
    c_chain = c3**2 * min(1.0, (c1 / (8.0 * np.pi * b)) ** (2.0 * p - 1.0))
    return {"p": p, "C1": c1, "C2": c2, "C3": c3, "C_chain": c_chain}


def audit_isoperimetric_1(metric, beta, n=4096):
    """Scan upper bound against the linear-profile lower bound (beta > 1/2):
    IN_ub >= (2b-1)^2/(16 b^2) * area/diam^2."""
    beta = float(beta)
    if beta <= 0.5:
        raise ValueError("the linear-profile bound needs beta > 1/2")
    scan = isoperimetric_scan(metric, n=n)
    diam = diameter(metric)
    x = scan.area_total / diam**2
    rhs = (2.0 * beta - 1.0) ** 2 / (16.0 * beta**2) * x
    return passed_record(
        audit="isoperimetric_linear",
        statement="IN_ub >= (2b-1)^2/(16b^2) * area/diam^2",
        lhs=scan.in_ub,
        rhs=rhs,
        margin=scan.in_ub - rhs,
        ok=scan.in_ub >= rhs * (1.0 - 1e-12),
        params={"beta": beta, "area": scan.area_total, "diam": diam, "x": x},
    )


def collar_restriction(metric, r_lo, r_hi):
    """Sub-metric on [r_lo, r_hi] with boundary circles at both ends."""
    L = metric.length
    if not (metric.r_min < r_lo < r_hi < metric.r_max):
        raise ValueError("collar window must be strictly interior")
    cuts = [r_lo] + [b for b in metric.breakpoints if r_lo < b < r_hi] + [r_hi]
    pieces = [
        ProfilePiece(a, b, metric.f, metric.df, metric.d2f, name="clip")
        for a, b in zip(cuts[:-1], cuts[1:])
        if b - a > 1e-12 * L
    ]
    return WarpedMetric(RadialProfile(pieces, "collar", name="collar_clip"))


def audit_collar(metric, beta, r0, rho, n=2048):
    """Band area against (4b/(2b-1)) * rho * |gamma| (beta > 1/2).

    Applies only when the band itself carries a nonnegative Dirichlet
    ground state; otherwise the audit is recorded as skipped.
    """
    beta = float(beta)
    r0, rho = float(r0), float(rho)
    if beta <= 0.5:
        raise ValueError("the collar bound needs beta > 1/2")
    sub = collar_restriction(metric, r0 - rho, r0 + rho)
    lam_d = first_eigenvalue(sub, beta, n=n, boundary="dirichlet").lam
    gamma_len = level_length(metric, r0)
    band = area(metric, r0 - rho, r0 + rho, n=n)
    bound = 4.0 * beta / (2.0 * beta - 1.0) * rho * gamma_len
    if lam_d < -1e-8 * max(1.0, abs(lam_d)):
        return skipped_record(
            audit="collar_area",
            statement="band area <= 4b/(2b-1) * rho * |gamma|",
            reason="negative Dirichlet ground state on the band; bound not implied",
            params={"beta": beta, "r0": r0, "rho": rho, "lam_dirichlet": lam_d},
        )
    return passed_record(
        audit="collar_area",
        statement="band area <= 4b/(2b-1) * rho * |gamma|",
        lhs=band,
        rhs=bound,
        margin=(bound - band) / bound,
        ok=band <= bound * (1.0 + 1e-12),
        params={"beta": beta, "r0": r0, "rho": rho, "lam_dirichlet": lam_d},
    )


def audit_isoperimetric_2(metric, beta, epsilon, n=4096):
    """Polynomial-profile chain for 1/4 < beta <= 1/2, evaluated at the
    scan-minimizing circle, ending in the comparison
    IN_ub >= C_chain * min(1, (area/diam^2)^(2p-1))."""
    beta = float(beta)
    eps = float(epsilon)
    if not (0.25 < beta <= 0.5):
        raise ValueError("the polynomial-profile bound needs 1/4 < beta <= 1/2")
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    k = iso2_constants(beta, eps)
    p, c1, c_chain = k["p"], k["C1"], k["C_chain"]
    scan = isoperimetric_scan(metric, n=n)
    diam = diameter(metric)
    x = scan.area_total / diam**2
    curve = CurveData.coordinate_circle(metric, scan.r_in)
    om, op = curve.area_minus(n=n), curve.area_plus(n=n)
    rm, rp = curve.rho_minus, curve.rho_plus
    if rm > rp:
        om, op, rm, rp = op, om, rp, rm
    Z = om / rm**2 + op / rp**2
    sigma = np.sqrt(c1 * Z / (8.0 * np.pi * beta))
    base = evaluate_fundamental(
        metric,
        beta,
        0.0,
        curve,
        polynomial_test_function(curve.rho_minus, curve.rho_plus, sigma, p),
    )
    w = sigma ** (2.0 * p - 2.0) / (1.0 + sigma) ** (2.0 * p)
    kink_side = 2.0 * p * beta / (1.0 + sigma) * curve.gamma_len * (1.0 / rm + 1.0 / rp)
    reduction_ok = c1 * w * Z <= 4.0 * np.pi * beta * sigma**2 * w + kink_side + 1e-12
    half_ok = kink_side >= 0.5 * c1 * w * Z * (1.0 - 1e-12)
    chain_lhs = curve.gamma_len**2 / om
    chain_rhs = c_chain * min(1.0, Z ** (2.0 * p - 1.0))
    head_proof = c_chain * min(1.0, x ** (2.0 * p - 1.0))
    head_stated = c_chain * min(1.0, x ** (1.0 / (4.0 * beta - 1.0) + eps))
    checks = {
        "fundamental": base.passed,
        "reduction": bool(reduction_ok),
        "kink_half": bool(half_ok),
        "chain": chain_lhs >= chain_rhs * (1.0 - 1e-12),
        "headline": scan.in_ub >= head_proof * (1.0 - 1e-12),
        "headline_stated": scan.in_ub >= head_stated * (1.0 - 1e-12),
    }
    margin = min(
        base.margin,
        kink_side - 0.5 * c1 * w * Z,
        chain_lhs - chain_rhs,
        scan.in_ub - head_proof,
        scan.in_ub - head_stated,
    )
    return passed_record(
        audit="isoperimetric_polynomial",
        statement="IN_ub >= C(b,eps) * min(1, (area/diam^2)^(2p-1))",
        lhs=scan.in_ub,
        rhs=head_proof,
        margin=margin,
        ok=all(checks.values()),
        params={
            "beta": beta,
            "eps": eps,
            "r0": scan.r_in,
            "Z": Z,
            "sigma": sigma,
            "x": x,
            **k,
            **{"check_" + name: float(v) for name, v in checks.items()},
        },
    )


def volume_upper_constant(beta):
    """min over q of 4^q * 4*pi*b / ((4b-1) q^2 - 2b q), the quadratic-area
    comparison constant from the cutoff-profile calculation."""
    b = float(beta)
    if b <= 0.25:
        raise ValueError("comparison constant exists only for beta > 1/4")
    q_lo = 2.0 * b / (4.0 * b - 1.0)

    def cost(q):
        c1 = (4.0 * b - 1.0) * q**2 - 2.0 * b * q
        return 4.0**q * 4.0 * np.pi * b / c1

    res = minimize_scalar(cost, bounds=(q_lo * (1.0 + 1e-9) + 1e-9, 60.0), method="bounded")
    return float(res.fun)


def ball_area(metric, center_r, radius, grid=None, n=2048):
    """Area of the metric ball around (center_r, 0).

    At a pole the ball is a coordinate disk and the area is exact; interior
    centers fall back to a distance field on the shared geodesic grid.
    """
    c = float(center_r)
    rad = float(radius)
    L = metric.length
    if metric.profile.pole_low and abs(c - metric.r_min) < 1e-9 * L:
        return area(metric, metric.r_min, min(metric.r_min + rad, metric.r_max))
    if metric.profile.pole_high and abs(metric.r_max - c) < 1e-9 * L:
        return area(metric, max(metric.r_max - rad, metric.r_min), metric.r_max)
    from .distances import shared_grid

    g = grid if grid is not None else shared_grid(metric)
    _, _, dist = g.distance_field((c, 0.0))
    return float(np.sum(g.cell_areas()[dist <= rad]))


def audit_volume_comparison(
    metric,
    beta,
    x_r=None,
    radii=None,
    eps_iso=0.1,
    n=2048,
    require_certificate=True,
):
    """Ball areas against c*r^2 from both sides over a ladder of radii.

    Upper: |B(x,r)| <= C_up(beta) * r^2 with C_up from the cutoff profile.
    Lower (closed surfaces): |B(x,r)| >= C_lo * r^2 with
    C_lo = min(IN_bound/4, x/2), the integrated form of the isoperimetric
    bound, where x = area/diam^2 and IN_bound is the relevant lower bound
    for the given beta.
    """
    beta = float(beta)
    if beta <= 0.25:
        raise ValueError("volume comparison needs beta > 1/4")
    if x_r is None:
        if metric.profile.pole_low:
            x_r = metric.r_min
        elif metric.profile.pole_high:
            x_r = metric.r_max
        else:
            x_r = 0.5 * (metric.r_min + metric.r_max)
    x_r = float(x_r)
    lam1 = None
    if require_certificate:
        lam1 = first_eigenvalue(metric, beta, n=n).lam
        if lam1 < -1e-8:
            return skipped_record(
                audit="volume_comparison",
                statement="C_lo * r^2 <= |B(x,r)| <= C_up * r^2",
                reason="spectral condition not satisfied; comparison not implied",
                params={"beta": beta, "x_r": x_r, "lam1": lam1},
            )
    span = max(metric.r_max - x_r, x_r - metric.r_min)
    if radii is None:
        radii = [span * 0.5**k for k in range(5)]
    radii = sorted(float(r) for r in radii)
    c_up = volume_upper_constant(beta)
    c_lo = 0.0
    x_ratio = None
    if metric.topology == "sphere":
        scan = isoperimetric_scan(metric, n=max(n, 4096))
        diam = diameter(metric)
        x_ratio = scan.area_total / diam**2
        if beta > 0.5:
            in_bound = (2.0 * beta - 1.0) ** 2 / (16.0 * beta**2) * x_ratio
        else:
            k = iso2_constants(beta, eps_iso)
            in_bound = k["C_chain"] * min(1.0, x_ratio ** (2.0 * k["p"] - 1.0))
        c_lo = min(in_bound / 4.0, x_ratio / 2.0)
    areas = [ball_area(metric, x_r, r, n=n) for r in radii]
    up_margin = min((c_up * r**2 - a) / (c_up * r**2) for r, a in zip(radii, areas))
    lo_margin = 1.0
    if c_lo > 0.0:
        lo_margin = min(
            (a - c_lo * r**2) / max(a, c_lo * r**2) for r, a in zip(radii, areas)
        )
    ok = up_margin >= -1e-12 and lo_margin >= -1e-12
    return passed_record(
        audit="volume_comparison",
        statement="C_lo * r^2 <= |B(x,r)| <= C_up * r^2",
        lhs=max(a / r**2 for r, a in zip(radii, areas)),
        rhs=c_up,
        margin=min(up_margin, lo_margin),
        ok=ok,
        params={
            "beta": beta,
            "x_r": x_r,
            "C_up": c_up,
            "C_lo": c_lo,
            "x": x_ratio,
            "lam1": lam1,
            "radii": tuple(radii),
            "areas": tuple(areas),
        },
        notes="" if metric.topology == "sphere" else "lower bound skipped: not a closed surface",
    )


def audit_bonnet_myers(metric, beta, n=2048):
    """diam <= 2*pi*b / sqrt(lam1 * (4b-1)) whenever lam1 > 0 (beta > 1/4)."""
    beta = float(beta)
    if beta <= 0.25:
        raise ValueError("the diameter bound needs beta > 1/4")
    lam1 = first_eigenvalue(metric, beta, n=n).lam
    if lam1 <= 0.0:
        return skipped_record(
            audit="bonnet_myers",
            statement="diam <= 2*pi*b/sqrt(lam1*(4b-1))",
            reason="ground state not positive; no diameter bound implied",
            params={"beta": beta, "lam1": lam1},
        )
    diam = diameter(metric)
    bound = 2.0 * np.pi * beta / np.sqrt(lam1 * (4.0 * beta - 1.0))
    return passed_record(
        audit="bonnet_myers",
        statement="diam <= 2*pi*b/sqrt(lam1*(4b-1))",
        lhs=diam,
        rhs=bound,
        margin=(bound - diam) / bound,
        ok=diam <= bound * (1.0 + 1e-12),
        params={"beta": beta, "lam1": lam1},
    )
