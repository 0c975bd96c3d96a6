"""Warped product metrics g = dr^2 + f(r)^2 dtheta^2 on surfaces of revolution.

A profile is an ordered list of smooth pieces, each carrying analytic
evaluators for the warp f and its first two radial derivatives. Pieces must
join with f and f' continuous; f'' may jump, so curvature is evaluated one
sided per piece and quadratures always split at piece boundaries.

Closed topologies are encoded by the pole conditions f = 0, |f'| = 1 at the
profile ends. A metric pairs a profile with a homothety scale: lengths carry
one factor of scale, areas two, curvature minus two.
"""

from __future__ import annotations

import numpy as np

from scipy.interpolate import CubicSpline

from .quadrature import cumulative_simpson_grid, gl_panels, simpson_tracked, split_points
from .records import passed_record

TOPOLOGIES = ("sphere", "collar", "half_open")

_POLE_TOL = 1e-9


class ProfileError(ValueError):
    pass


class ProfilePiece:
    """One smooth piece of a profile: closed interval plus f, f', f''."""

    def __init__(self, a, b, f, df, d2f, name=""):
        if not b > a:
            raise ProfileError("piece interval is empty: [%g, %g]" % (a, b))
        self.a = float(a)
        self.b = float(b)
        self.f = f
        self.df = df
        self.d2f = d2f
        self.name = name

    def shifted(self, offset, name=None):
        off = float(offset)
        return ProfilePiece(
            self.a + off,
            self.b + off,
            lambda r, _f=self.f: _f(np.asarray(r) - off),
            lambda r, _g=self.df: _g(np.asarray(r) - off),
            lambda r, _h=self.d2f: _h(np.asarray(r) - off),
            name=self.name if name is None else name,
        )

    def mirrored(self, pivot, name=None):
        """Even reflection across r = pivot (valid when this piece ends there)."""
        piv = float(pivot)
        return ProfilePiece(
            2 * piv - self.b,
            2 * piv - self.a,
            lambda r, _f=self.f: _f(2 * piv - np.asarray(r)),
            lambda r, _g=self.df: -np.asarray(_g(2 * piv - np.asarray(r))),
            lambda r, _h=self.d2f: _h(2 * piv - np.asarray(r)),
            name=(self.name + "_mirror") if name is None else name,
        )


def constant_piece(a, b, value, name=""):
    c = float(value)
    return ProfilePiece(
        a,
        b,
        lambda r: np.full_like(np.asarray(r, dtype=float), c),
        lambda r: np.zeros_like(np.asarray(r, dtype=float)),
        lambda r: np.zeros_like(np.asarray(r, dtype=float)),
        name=name,
    )


class RadialProfile:
    """Piecewise smooth warp function on [0, L] with topology bookkeeping."""

    def __init__(self, pieces, topology, allow_cone=False, tol_glue=1e-8, name=""):
        if topology not in TOPOLOGIES:
            raise ProfileError("unknown topology %r" % (topology,))
        if not pieces:
            raise ProfileError("profile needs at least one piece")
        self.pieces = list(pieces)
        self.topology = topology
        self.allow_cone = bool(allow_cone)
        self.tol_glue = float(tol_glue)
        self.name = name
        self._starts = np.array([p.a for p in self.pieces])
        self.glue_error = 0.0
        self._validate()

    @property
    def r_min(self):
        return self.pieces[0].a

    @property
    def r_max(self):
        return self.pieces[-1].b

    @property
    def total_length(self):
        return self.r_max - self.r_min

    @property
    def breakpoints(self):
        return np.array([p.a for p in self.pieces[1:]])

    def _validate(self):
        L = self.total_length
        prev = None
        for p in self.pieces:
            if prev is not None:
                if abs(p.a - prev.b) > 1e-12 * max(1.0, L):
                    raise ProfileError(
                        "pieces not contiguous at %g vs %g" % (prev.b, p.a)
                    )
                fv = float(prev.f(prev.b)) - float(p.f(p.a))
                dv = float(prev.df(prev.b)) - float(p.df(p.a))
                jump = max(abs(fv), abs(dv))
                self.glue_error = max(self.glue_error, jump)
                if jump > self.tol_glue:
                    raise ProfileError(
                        "C1 glue failure at r=%g: |df|=%.3g > %g"
                        % (p.a, jump, self.tol_glue)
                    )
            prev = p
        # positivity away from poles
        for p in self.pieces:
            rs = np.linspace(p.a, p.b, 257)[1:-1]
            if np.any(p.f(rs) <= 0):
                raise ProfileError("warp f is not positive inside piece %r" % p.name)
        has_pole = {"sphere": (True, True), "half_open": (True, False), "collar": (False, False)}
        pole_lo, pole_hi = has_pole[self.topology]
        self.pole_low = pole_lo
        self.pole_high = pole_hi
        for is_pole, r_end, piece, slope_sign in (
            (pole_lo, self.r_min, self.pieces[0], +1.0),
            (pole_hi, self.r_max, self.pieces[-1], -1.0),
        ):
            f_end = float(piece.f(r_end))
            df_end = float(piece.df(r_end))
            if is_pole:
                if abs(f_end) > _POLE_TOL * max(1.0, L):
                    raise ProfileError("pole requires f=0, got f(%g)=%g" % (r_end, f_end))
                if self.allow_cone:
                    if slope_sign * df_end <= 0:
                        raise ProfileError("cone apex requires inward-positive slope")
                elif abs(slope_sign * df_end - 1.0) > 1e-8:
                    raise ProfileError(
                        "smooth pole requires |f'|=1, got f'(%g)=%g" % (r_end, df_end)
                    )
            else:
                if f_end <= 0:
                    raise ProfileError("boundary circle requires f>0 at r=%g" % r_end)

    def _piece_index(self, r):
        idx = np.searchsorted(self._starts, r, side="right") - 1
        return np.clip(idx, 0, len(self.pieces) - 1)

    def _eval(self, r, which):
        r = np.asarray(r, dtype=float)
        scalar = r.ndim == 0
        rr = np.atleast_1d(r)
        out = np.empty_like(rr)
        idx = self._piece_index(rr)
        for i, piece in enumerate(self.pieces):
            m = idx == i
            if m.any():
                fn = (piece.f, piece.df, piece.d2f)[which]
                out[m] = fn(rr[m])
        return float(out[0]) if scalar else out

    def f(self, r):
        return self._eval(r, 0)

    def df(self, r):
        return self._eval(r, 1)

    def d2f(self, r):
        return self._eval(r, 2)

    def reversed(self):
        """Profile traversed from the far end (an isometry of the surface)."""
        piv = 0.5 * (self.r_min + self.r_max)
        pieces = [p.mirrored(piv) for p in reversed(self.pieces)]
        return RadialProfile(
            pieces,
            self.topology,
            allow_cone=self.allow_cone,
            tol_glue=self.tol_glue,
            name=self.name + "_reversed",
        )


class WarpedMetric:
    """A profile together with a homothety scale. All public radii are physical."""

    def __init__(self, profile, scale=1.0):
        if scale <= 0:
            raise ProfileError("scale must be positive")
        self.profile = profile
        self.scale = float(scale)

    @property
    def topology(self):
        return self.profile.topology

    @property
    def r_min(self):
        return self.scale * self.profile.r_min

    @property
    def r_max(self):
        return self.scale * self.profile.r_max

    @property
    def length(self):
        return self.scale * self.profile.total_length

    @property
    def breakpoints(self):
        return self.scale * self.profile.breakpoints

    @property
    def name(self):
        return self.profile.name

    def to_ref(self, r):
        return np.asarray(r, dtype=float) / self.scale

    def f(self, r):
        return self.scale * self.profile.f(self.to_ref(r))

    def df(self, r):
        return self.profile.df(self.to_ref(r))

    def d2f(self, r):
        return self.profile.d2f(self.to_ref(r)) / self.scale

    def rescaled(self, c):
        return WarpedMetric(self.profile, self.scale * c)

    def interior_span(self, pad_frac=1e-6):
        pad = pad_frac * self.length
        return self.r_min + pad, self.r_max - pad


def level_length(metric, r):
    """Circumference of the coordinate circle at radius r."""
    return 2.0 * np.pi * metric.f(r)


def gauss_curvature(metric, r):
    """K = -f''/f, with one-sided quadratic extrapolation at the poles.

    At a pole f -> 0 makes the quotient indeterminate; the limit is recovered
    from the first three interior nodes of a 512-cell pad on the pole piece.
    """
    r = np.asarray(r, dtype=float)
    scalar = r.ndim == 0
    rr = np.atleast_1d(r).copy()
    out = np.empty_like(rr)
    pad_lo = (metric.scale * (metric.profile.pieces[0].b - metric.profile.pieces[0].a)) / 512.0
    pad_hi = (metric.scale * (metric.profile.pieces[-1].b - metric.profile.pieces[-1].a)) / 512.0
    near_lo = metric.profile.pole_low & (rr - metric.r_min < 1e-3 * pad_lo)
    near_hi = metric.profile.pole_high & (metric.r_max - rr < 1e-3 * pad_hi)
    mid = ~(near_lo | near_hi)
    if mid.any():
        rm = rr[mid]
        out[mid] = -metric.d2f(rm) / metric.f(rm)
    for mask, r0, pad, sgn in (
        (near_lo, metric.r_min, pad_lo, +1.0),
        (near_hi, metric.r_max, pad_hi, -1.0),
    ):
        if mask.any():
            nodes = r0 + sgn * pad * np.array([1.0, 2.0, 3.0])
            kv = -metric.d2f(nodes) / metric.f(nodes)
            coef = np.polyfit(nodes - r0, kv, 2)
            out[mask] = np.polyval(coef, rr[mask] - r0)
    return float(out[0]) if scalar else out


def area(metric, r_lo=None, r_hi=None, n=2048, with_error=False):
    """Area 2*pi*int f dr between coordinate radii, piecewise composite Simpson."""
    r_lo = metric.r_min if r_lo is None else float(r_lo)
    r_hi = metric.r_max if r_hi is None else float(r_hi)
    if not (metric.r_min - 1e-9 * metric.length <= r_lo <= r_hi <= metric.r_max + 1e-9 * metric.length):
        raise ValueError("area range [%g, %g] outside the profile" % (r_lo, r_hi))
    pts = split_points(r_lo, r_hi, metric.breakpoints)
    total, err = 0.0, 0.0
    for a_, b_ in zip(pts[:-1], pts[1:]):
        npc = max(16, int(n * (b_ - a_) / max(metric.length, 1e-300)) or 16)
        v, e = simpson_tracked(metric.f, a_, b_, npc)
        total += v
        err += e
    total *= 2.0 * np.pi
    err *= 2.0 * np.pi
    if with_error:
        return total, err
    return total


def total_area(metric, n=2048):
    return area(metric, metric.r_min, metric.r_max, n=n)


def gauss_bonnet_check(metric, n=4096):
    """Integrated curvature (plus boundary turning) against 2*pi*Euler characteristic."""
    chi = {"sphere": 2.0, "half_open": 1.0, "collar": 0.0}[metric.topology]
    pts = split_points(metric.r_min, metric.r_max, metric.breakpoints)
    total = 0.0
    for a_, b_ in zip(pts[:-1], pts[1:]):
        npanels = max(8, int(n * (b_ - a_) / metric.length / 10) or 8)
        total += gl_panels(lambda r: -metric.d2f(r), a_, b_, n_panels=npanels)
    total *= 2.0 * np.pi
    # boundary turning: outward normal is -dr at r_min, +dr at r_max
    boundary = 0.0
    if not metric.profile.pole_low:
        boundary -= 2.0 * np.pi * metric.df(metric.r_min)
    if not metric.profile.pole_high:
        boundary += 2.0 * np.pi * metric.df(metric.r_max)
    got = total + boundary
    target = 2.0 * np.pi * chi
    margin = abs(got - target)
    return passed_record(
        "gauss_bonnet",
        "int K dA + boundary turning == 2 pi chi",
        got,
        target,
        -margin,
        margin <= 1e-6 * max(1.0, abs(target)),
        params={"chi": chi},
    )


class RadialField:
    """Radial scalar with analytic first and second derivative evaluators."""

    def __init__(self, fn, dfn, d2fn, breakpoints=(), name=""):
        self._fn = fn
        self._dfn = dfn
        self._d2fn = d2fn
        self.breakpoints = np.asarray(breakpoints, dtype=float)
        self.name = name

    def __call__(self, r):
        return self._fn(np.asarray(r, dtype=float))

    def d(self, r):
        return self._dfn(np.asarray(r, dtype=float))

    def d2(self, r):
        return self._d2fn(np.asarray(r, dtype=float))

    def scaled_coords(self, c):
        """Same function viewed in coordinates r' = c*r (values unchanged)."""
        c = float(c)
        return RadialField(
            lambda r: self._fn(np.asarray(r) / c),
            lambda r: self._dfn(np.asarray(r) / c) / c,
            lambda r: self._d2fn(np.asarray(r) / c) / c**2,
            breakpoints=self.breakpoints * c,
            name=self.name,
        )

    @classmethod
    def from_constant(cls, value):
        v = float(value)
        return cls(
            lambda r: np.full_like(np.asarray(r, dtype=float), v),
            lambda r: np.zeros_like(np.asarray(r, dtype=float)),
            lambda r: np.zeros_like(np.asarray(r, dtype=float)),
            name="const",
        )

    @classmethod
    def from_samples(cls, r, values, bc_type="not-a-knot", name="spline"):

        sp = CubicSpline(np.asarray(r, float), np.asarray(values, float), bc_type=bc_type)
        return cls(sp, sp.derivative(1), sp.derivative(2), name=name)


def field_map(field, g, dg, d2g, name=""):
    """Composition g(field(r)) with chain-rule derivatives."""
    return RadialField(
        lambda r: g(field(r)),
        lambda r: dg(field(r)) * field.d(r),
        lambda r: d2g(field(r)) * field.d(r) ** 2 + dg(field(r)) * field.d2(r),
        breakpoints=field.breakpoints,
        name=name or field.name,
    )


def field_log(field, coef=1.0, name=""):
    c = float(coef)
    return field_map(field, lambda x: c * np.log(x), lambda x: c / x, lambda x: -c / x**2, name=name)


def field_pow(field, a, name=""):
    a = float(a)
    return field_map(
        field,
        lambda x: x**a,
        lambda x: a * x ** (a - 1.0),
        lambda x: a * (a - 1.0) * x ** (a - 2.0),
        name=name,
    )


def field_shift_scale(field, mul=1.0, add=0.0, name=""):
    m, c = float(mul), float(add)
    return RadialField(
        lambda r: m * field(r) + c,
        lambda r: m * field.d(r),
        lambda r: m * field.d2(r),
        breakpoints=field.breakpoints,
        name=name or field.name,
    )


def radial_laplacian(metric, field, r):
    """Laplace-Beltrami of a radial function: u'' + (f'/f) u'."""
    r = np.asarray(r, dtype=float)
    return field.d2(r) + metric.df(r) / metric.f(r) * field.d(r)


def profile_from_table(r, f, topology, name="table", tol_glue=1e-4):
    """Cubic-spline profile through a sampled (r, f) table."""

    r = np.asarray(r, dtype=float)
    f = np.asarray(f, dtype=float)
    if r.ndim != 1 or r.size < 4 or r.size != f.size:
        raise ProfileError("table needs matching 1-d arrays with >= 4 samples")
    if np.any(np.diff(r) <= 0):
        raise ProfileError("table radii must be strictly increasing")
    sp = CubicSpline(r, f)
    piece = ProfilePiece(r[0], r[-1], sp, sp.derivative(1), sp.derivative(2), name=name)
    return RadialProfile([piece], topology, tol_glue=tol_glue, name=name)


def mesh(metric, n=None, min_per_piece=16):
    """Cell-centered mesh honoring piece boundaries.

    The n budget is split evenly across pieces (default 512 cells per piece).
    Cell edges land exactly on breakpoints so no stencil straddles a curvature
    jump. Returns (edges, centers, widths).
    """
    pieces = metric.profile.pieces
    if n is None:
        per = 512
    else:
        per = int(n) // len(pieces)
        if per < min_per_piece:
            raise ValueError(
                "grid too coarse: %d cells over %d pieces" % (int(n), len(pieces))
            )
    edges = [np.array([metric.r_min])]
    for p in pieces:
        a_, b_ = metric.scale * p.a, metric.scale * p.b
        edges.append(np.linspace(a_, b_, per + 1)[1:])
    edges = np.concatenate(edges)
    centers = 0.5 * (edges[:-1] + edges[1:])
    widths = np.diff(edges)
    return edges, centers, widths


def piecewise_field(segments, name=""):
    """Radial field from [(a, b, f, df, d2f), ...] contiguous segments.

    Values and first derivatives should agree at interior joins (kinks in the
    first derivative are tolerated by downstream quadratures, which split at
    the recorded breakpoints).
    """
    segments = list(segments)
    if not segments:
        raise ValueError("need at least one segment")
    starts = np.array([float(s[0]) for s in segments])
    if np.any(np.diff(starts) <= 0):
        raise ValueError("segments must be ordered by start")

    def make(which):
        def ev(r):
            rr = np.asarray(r, dtype=float)
            flat = np.atleast_1d(rr).astype(float)
            out = np.empty_like(flat)
            idx = np.clip(np.searchsorted(starts, flat, side="right") - 1, 0, len(segments) - 1)
            for i, seg in enumerate(segments):
                m = idx == i
                if np.any(m):
                    out[m] = seg[2 + which](flat[m])
            return out.reshape(rr.shape)

        return ev

    breaks = [float(s[0]) for s in segments[1:]]
    return RadialField(make(0), make(1), make(2), breakpoints=breaks, name=name)


def mirror_segment(seg, pivot):
    """Even reflection of a field segment about r = pivot."""
    a, b, f, df, d2f = seg
    p = float(pivot)
    return (
        2.0 * p - b,
        2.0 * p - a,
        lambda r, _f=f: _f(2.0 * p - np.asarray(r, dtype=float)),
        lambda r, _df=df: -_df(2.0 * p - np.asarray(r, dtype=float)),
        lambda r, _d2f=d2f: _d2f(2.0 * p - np.asarray(r, dtype=float)),
    )


def shift_segment(seg, offset):
    a, b, f, df, d2f = seg
    o = float(offset)
    return (
        a + o,
        b + o,
        lambda r, _f=f: _f(np.asarray(r, dtype=float) - o),
        lambda r, _df=df: _df(np.asarray(r, dtype=float) - o),
        lambda r, _d2f=d2f: _d2f(np.asarray(r, dtype=float) - o),
    )


class ConformalChange:
    """Coordinate change to the arclength gauge of e^{2u} g, u radial.

    Holds the forward map s(r) (new arclength), its splined inverse r(s), and
    the reparametrized profile of the conformal metric. Fields defined in the
    old coordinate can be pushed to the new one with pushforward().
    """

    def __init__(self, metric, u_field, samples_per_piece=4097, tol_glue=1e-4):
        self.metric = metric
        self.u = u_field
        cuts = np.unique(
            np.concatenate(
                [
                    np.array([metric.r_min, metric.r_max]),
                    metric.breakpoints,
                    np.asarray(u_field.breakpoints, dtype=float),
                ]
            )
        )
        cuts = cuts[(cuts >= metric.r_min - 1e-12) & (cuts <= metric.r_max + 1e-12)]
        pieces = []
        fwd = []
        inv = []
        s_off = 0.0
        for a_, b_ in zip(cuts[:-1], cuts[1:]):
            rs = np.linspace(a_, b_, samples_per_piece)
            eu = np.exp(u_field(rs))
            s = s_off + cumulative_simpson_grid(eu, rs)
            sp_fwd = CubicSpline(rs, s)
            sp_inv = CubicSpline(s, rs)
            fwd.append((a_, sp_fwd))
            inv.append((s_off, sp_inv))

            def fval(sv, _inv=sp_inv):
                r = _inv(np.asarray(sv, dtype=float))
                return np.exp(u_field(r)) * metric.f(r)

            def dval(sv, _inv=sp_inv):
                r = _inv(np.asarray(sv, dtype=float))
                return metric.df(r) + u_field.d(r) * metric.f(r)

            def d2val(sv, _inv=sp_inv):
                r = _inv(np.asarray(sv, dtype=float))
                return np.exp(-u_field(r)) * (
                    metric.d2f(r) + u_field.d2(r) * metric.f(r) + u_field.d(r) * metric.df(r)
                )

            pieces.append(ProfilePiece(s_off, s[-1], fval, dval, d2val, name="reparam"))
            s_off = float(s[-1])
        self._fwd = fwd
        self._inv = inv
        self.new_length = s_off
        self.profile = RadialProfile(
            pieces,
            metric.topology,
            allow_cone=metric.profile.allow_cone,
            tol_glue=tol_glue,
            name=(metric.name or "metric") + "_conf",
        )

    def _lookup(self, table, x):
        xx = np.asarray(x, dtype=float)
        flat = np.atleast_1d(xx).astype(float)
        starts = np.array([t[0] for t in table])
        idx = np.clip(np.searchsorted(starts, flat, side="right") - 1, 0, len(table) - 1)
        out = np.empty_like(flat)
        for i, (_, sp) in enumerate(table):
            m = idx == i
            if np.any(m):
                out[m] = sp(flat[m])
        return out.reshape(xx.shape)

    def s_of_r(self, r):
        return self._lookup(self._fwd, r)

    def r_of_s(self, s):
        return self._lookup(self._inv, s)

    def pushforward(self, field, name=""):
        """Field in the new coordinate: values preserved, derivatives by chain rule.

        d/ds = e^{-u} d/dr along the map, so the pushed derivatives are
        g' e^{-u} and e^{-2u} (g'' - u' g').
        """
        u = self.u

        def val(sv):
            return field(self.r_of_s(sv))

        def dval(sv):
            r = self.r_of_s(sv)
            return field.d(r) * np.exp(-u(r))

        def d2val(sv):
            r = self.r_of_s(sv)
            return np.exp(-2.0 * u(r)) * (field.d2(r) - u.d(r) * field.d(r))

        breaks = np.unique(
            np.concatenate([self.s_of_r(np.asarray(field.breakpoints, float)).ravel() if len(field.breakpoints) else np.array([]), self.profile.breakpoints])
        )
        return RadialField(val, dval, d2val, breakpoints=breaks, name=name or field.name)


def reparametrized_profile(metric, u_field, samples_per_piece=4097, tol_glue=1e-4):
    """Arclength profile of the conformal metric e^{2u} g, u radial.

    New arclength s(r) = int e^u dr; the new warp is e^u f with derivatives
    taken by the chain rule through the (splined) inverse map r(s).
    """
    return ConformalChange(metric, u_field, samples_per_piece, tol_glue).profile
