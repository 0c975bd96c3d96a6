"""Intrinsic distances on surfaces of revolution.

Two independent engines: a Clairaut-integral geodesic solver (candidate
routes classified by winding and turning point, lengths by regularized
Gauss-Legendre quadrature) and a 16-neighborhood Dijkstra grid with
shortcut smoothing. The grid engine exists to cross-check the analytic one,
so it shares no quadrature machinery with it beyond the profile itself.

Coordinates are (r, theta) with r the meridian arclength from the low end.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as _csgraph_dijkstra

from .geometry import area, mesh
from .quadrature import _gl_nodes, split_points
from .records import passed_record

_TWO_PI = 2.0 * np.pi


def _wrap_angle(dth):
    return (dth + np.pi) % _TWO_PI - np.pi


def _clairaut_integrals(metric, c, a, b, n_panels=48, order=10):
    """(dtheta, length) along a monotone radial arc with Clairaut constant c.

    Each smooth subsegment is mapped through r = lo + (hi-lo)*s^2*(3-2s),
    whose Jacobian vanishes at both ends; that absorbs the 1/sqrt turning
    singularity at an endpoint where f -> c, and is harmless elsewhere.
    """
    lo, hi = (a, b) if a <= b else (b, a)
    if hi - lo < 1e-15 * max(1.0, metric.length):
        return 0.0, 0.0
    c2 = c * c
    x, w = _gl_nodes(order)
    th_total = 0.0
    len_total = 0.0
    for p, q in zip(*(lambda pts: (pts[:-1], pts[1:]))(split_points(lo, hi, metric.breakpoints))):
        edges = np.linspace(0.0, 1.0, n_panels + 1)
        mid = 0.5 * (edges[:-1] + edges[1:])
        half = 0.5 * (edges[1:] - edges[:-1])
        s = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        jac = (q - p) * 6.0 * s * (1.0 - s)
        r = p + (q - p) * s**2 * (3.0 - 2.0 * s)
        f = metric.f(r)
        root = np.sqrt(np.maximum(f * f - c2, 1e-300))
        ww = (w[None, :] * half[:, None]).ravel()
        len_total += float(np.sum(f / root * jac * ww))
        if c != 0.0:
            th_total += float(np.sum(c / (f * root) * jac * ww))
    return th_total, len_total


def _direct_candidates(metric, r1, r2, target, n_panels=48):
    """Monotone-in-r geodesic matching the angular target, if one exists."""
    r_lo, r_hi = sorted((r1, r2))
    L = metric.length
    if r_hi - r_lo < 1e-12 * L or target <= 0.0:
        return []
    grid = np.linspace(r_lo, r_hi, 1025)
    c_max = float(np.min(metric.f(grid))) * (1.0 - 1e-9)
    if c_max <= 0.0:
        return []
    th_hi, _ = _clairaut_integrals(metric, c_max, r_lo, r_hi, n_panels)
    if th_hi < target:
        return []

    def g(c):
        return _clairaut_integrals(metric, c, r_lo, r_hi, n_panels)[0] - target

    c_star = brentq(g, 1e-12 * c_max, c_max, xtol=1e-14, rtol=1e-13)
    return [_clairaut_integrals(metric, c_star, r_lo, r_hi, n_panels)[1]]


def _bounce_candidates(metric, r1, r2, target, side, samples=96, n_panels=48):
    """Geodesics with one turning point beyond (side=+1) or before (side=-1)
    both endpoints. The turning radius r* must satisfy f > f(r*) strictly on
    the whole approach, which a prefix minimum encodes."""
    if target <= 0.0:
        return []
    r_lo, r_hi = sorted((r1, r2))
    L = metric.length
    pad = 1e-6 * L
    if side > 0:
        lo, hi = r_hi + pad, metric.r_max - pad
    else:
        lo, hi = metric.r_min + pad, r_lo - pad
    if hi <= lo:
        return []
    rs = np.linspace(lo, hi, samples)
    frs = metric.f(rs)
    span = np.linspace(r_lo, r_hi, 513)
    base_min = float(np.min(metric.f(span))) if r_hi > r_lo else float(metric.f(r_lo))
    # prefix minimum over the approach EXCLUDING the sample itself: the
    # turning radius must undercut everything strictly before it
    if side > 0:
        prev = np.concatenate([[np.inf], np.minimum.accumulate(frs)[:-1]])
    else:
        prev = np.concatenate([[np.inf], np.minimum.accumulate(frs[::-1])[:-1]])[::-1]
    run = np.minimum(prev, base_min)
    valid = frs < run * (1.0 - 1e-12) + 1e-300
    # the prefix minimum makes "valid" monotone along the search direction,
    # but junction plateaus can interleave; keep all valid samples
    idx = np.nonzero(valid)[0]
    if len(idx) == 0:
        return []

    def theta_b(r_star):
        c = float(metric.f(r_star))
        t1, _ = _clairaut_integrals(metric, c, r1, r_star, n_panels)
        t2, _ = _clairaut_integrals(metric, c, r2, r_star, n_panels)
        return t1 + t2

    def length_b(r_star):
        c = float(metric.f(r_star))
        _, l1 = _clairaut_integrals(metric, c, r1, r_star, n_panels)
        _, l2 = _clairaut_integrals(metric, c, r2, r_star, n_panels)
        return l1 + l2

    vals = np.array([theta_b(rs[i]) - target for i in idx])
    out = []
    for a_i, b_i, fa, fb in zip(idx[:-1], idx[1:], vals[:-1], vals[1:]):
        if b_i != a_i + 1 or not np.isfinite(fa) or not np.isfinite(fb):
            continue
        if fa == 0.0:
            out.append(length_b(rs[a_i]))
        elif fa * fb < 0.0:
            r_star = brentq(lambda t: theta_b(t) - target, rs[a_i], rs[b_i], xtol=1e-13)
            out.append(length_b(r_star))
    if len(vals) and vals[-1] == 0.0:
        out.append(length_b(rs[idx[-1]]))
    return out


def geodesic_distance(metric, p1, p2, n_panels=48, bounce_samples=96):
    """Intrinsic distance between points (r, theta) via Clairaut candidates.

    Candidate routes: meridian segment, both pole routes, and for each of
    the two angular windings a monotone route plus single-turning routes on
    either side. The shortest candidate is returned; the grid engine is the
    independent check that no shorter route class was missed.
    """
    (r1, th1), (r2, th2) = p1, p2
    lo, hi = metric.r_min, metric.r_max
    r1 = float(np.clip(r1, lo, hi))
    r2 = float(np.clip(r2, lo, hi))
    dth = abs(_wrap_angle(float(th2) - float(th1)))
    cands = []
    if metric.profile.pole_low:
        cands.append((r1 - lo) + (r2 - lo))
    if metric.profile.pole_high:
        cands.append((hi - r1) + (hi - r2))
    if dth < 1e-12:
        cands.append(abs(r1 - r2))
        targets = [_TWO_PI]
    else:
        targets = [dth, _TWO_PI - dth]
    # a parallel with f' = 0 is a closed geodesic; its arcs join same-radius points
    if abs(r1 - r2) < 1e-10 * metric.length and abs(metric.df(r1)) < 1e-8:
        f_here = metric.f(r1)
        cands.append(f_here * dth)
        cands.append(f_here * (_TWO_PI - dth))
    for t in targets:
        cands.extend(_direct_candidates(metric, r1, r2, t, n_panels))
        cands.extend(_bounce_candidates(metric, r1, r2, t, +1, bounce_samples, n_panels))
        cands.extend(_bounce_candidates(metric, r1, r2, t, -1, bounce_samples, n_panels))
    if not cands:
        raise RuntimeError("no geodesic candidate found (open profile without poles?)")
    return float(min(cands))


def sphere_distance_closed_form(radius, p1, p2):
    """Great-circle oracle: r is the colatitude arclength from the north pole."""
    (r1, th1), (r2, th2) = p1, p2
    a1, a2 = r1 / radius, r2 / radius
    cosd = np.cos(a1) * np.cos(a2) + np.sin(a1) * np.sin(a2) * np.cos(th2 - th1)
    return float(radius * np.arccos(np.clip(cosd, -1.0, 1.0)))


_MOVES = ((0, 1), (1, 0), (1, 1), (1, -1), (1, 2), (1, -2), (2, 1), (2, -1))


class GeodesicGrid:
    """Dijkstra metric graph on a polar (r, theta) grid.

    Nodes are grid points plus one supernode per pole; edge weights are
    3-point Simpson lengths of straight coordinate segments, which depend
    only on the radii, so each move type costs one row-wise evaluation.
    Shortest paths are straightened by greedy shortcutting before the final
    length is reported, which removes most of the 16-direction anisotropy.
    """

    def __init__(self, metric, n_r=256, n_theta=256):
        self.metric = metric
        self.n_r = int(n_r)
        self.n_theta = int(n_theta)
        prof = metric.profile
        lo, hi = metric.r_min, metric.r_max
        self.h_r = (hi - lo) / self.n_r
        self.h_th = _TWO_PI / self.n_theta
        k_first = 1 if prof.pole_low else 0
        k_last = self.n_r - 1 if prof.pole_high else self.n_r
        self.rows = lo + self.h_r * np.arange(k_first, k_last + 1)
        self.n_rows = len(self.rows)
        self.n_grid = self.n_rows * self.n_theta
        self.pole_lo_node = self.n_grid if prof.pole_low else -1
        self.pole_hi_node = (self.n_grid + (1 if prof.pole_low else 0)) if prof.pole_high else -1
        n_total = self.n_grid + (prof.pole_low + prof.pole_high)
        self._build_graph(n_total)
        self._source_cache = {}

    def _edge_weight_rows(self, k, dk, dj):
        # 3-point Simpson along the straight segment; only r enters f
        ra = self.rows[k]
        rb = self.rows[k + dk]
        rm = 0.5 * (ra + rb)
        dth = dj * self.h_th
        dr = rb - ra

        def g(r):
            return np.sqrt(dr**2 + self.metric.f(r) ** 2 * dth**2)

        return (g(ra) + 4.0 * g(rm) + g(rb)) / 6.0

    def _build_graph(self, n_total):
        nt = self.n_theta
        js = np.arange(nt)
        rows_i, cols_i, data = [], [], []
        for dk, dj in _MOVES:
            ks = np.arange(0, self.n_rows - dk)
            if len(ks) == 0:
                continue
            w_k = np.array([self._edge_weight_rows(k, dk, dj) for k in ks])
            src = (ks[:, None] * nt + js[None, :]).ravel()
            dst = ((ks[:, None] + dk) * nt + ((js[None, :] + dj) % nt)).ravel()
            rows_i.append(src)
            cols_i.append(dst)
            data.append(np.repeat(w_k, nt))
        # pole supernodes connect to every node of the adjacent row by a meridian
        if self.pole_lo_node >= 0:
            w = self.rows[0] - self.metric.r_min
            rows_i.append(np.full(nt, self.pole_lo_node))
            cols_i.append(js.copy())
            data.append(np.full(nt, w))
        if self.pole_hi_node >= 0:
            w = self.metric.r_max - self.rows[-1]
            base = (self.n_rows - 1) * nt
            rows_i.append(np.full(nt, self.pole_hi_node))
            cols_i.append(base + js)
            data.append(np.full(nt, w))
        r = np.concatenate(rows_i)
        c = np.concatenate(cols_i)
        d = np.concatenate(data)
        self.graph = csr_matrix((d, (r, c)), shape=(n_total, n_total))

    def snap(self, p):
        """Nearest node index for a coordinate pair (r, theta)."""
        r, th = p
        if self.pole_lo_node >= 0 and r <= self.rows[0] - 0.5 * self.h_r:
            return self.pole_lo_node
        if self.pole_hi_node >= 0 and r >= self.rows[-1] + 0.5 * self.h_r:
            return self.pole_hi_node
        k = int(np.clip(np.rint((r - self.rows[0]) / self.h_r), 0, self.n_rows - 1))
        j = int(np.rint((th % _TWO_PI) / self.h_th)) % self.n_theta
        return k * self.n_theta + j

    def node_coords(self, idx):
        if idx == self.pole_lo_node:
            return (self.metric.r_min, 0.0)
        if idx == self.pole_hi_node:
            return (self.metric.r_max, 0.0)
        k, j = divmod(int(idx), self.n_theta)
        return (float(self.rows[k]), float(j * self.h_th))

    def _solve_from(self, src):
        if src not in self._source_cache:
            dist, pred = _csgraph_dijkstra(
                self.graph, directed=False, indices=src, return_predecessors=True
            )
            self._source_cache[src] = (dist, pred)
        return self._source_cache[src]

    def _path_nodes(self, src, dst):
        _, pred = self._solve_from(src)
        path = [dst]
        while path[-1] != src:
            nxt = pred[path[-1]]
            if nxt < 0:
                raise RuntimeError("target unreachable in grid graph")
            path.append(int(nxt))
        return path[::-1]

    def _seg_len(self, pa, pb, n=9):
        (ra, ta), (rb, tb) = pa, pb
        t = np.linspace(0.0, 1.0, n)
        r = ra + (rb - ra) * t
        g = np.sqrt((rb - ra) ** 2 + self.metric.f(r) ** 2 * (tb - ta) ** 2)
        # composite Simpson (n odd)
        h = 1.0 / (n - 1)
        return float(h / 3.0 * (g[0] + g[-1] + 4 * g[1:-1:2].sum() + 2 * g[2:-2:2].sum()))

    def _smooth_length(self, coords, window=32, passes=3):
        pts = list(coords)
        for _ in range(passes):
            if len(pts) <= 2:
                break
            seg = [self._seg_len(pts[i], pts[i + 1]) for i in range(len(pts) - 1)]
            cum = np.concatenate([[0.0], np.cumsum(seg)])
            out = [pts[0]]
            keep_idx = [0]
            i = 0
            while i < len(pts) - 1:
                jmax = min(i + window, len(pts) - 1)
                chosen = i + 1
                for j in range(jmax, i, -1):
                    n = 2 * (j - i) + 3
                    direct = self._seg_len(pts[i], pts[j], n=n | 1)
                    if direct <= cum[j] - cum[i] + 1e-13:
                        chosen = j
                        break
                out.append(pts[chosen])
                keep_idx.append(chosen)
                i = chosen
            pts = out
        total = 0.0
        for i in range(len(pts) - 1):
            total += self._seg_len(pts[i], pts[i + 1], n=33)
        return total

    def _resample(self, pts, m):
        seg = np.array([self._seg_len(pts[i], pts[i + 1]) for i in range(len(pts) - 1)])
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        if cum[-1] <= 0:
            return pts
        targets = np.linspace(0.0, cum[-1], m + 1)
        rr = np.array([p[0] for p in pts])
        tt = np.array([p[1] for p in pts])
        return list(zip(np.interp(targets, cum, rr), np.interp(targets, cum, tt)))

    def _relax_sweeps(self, pts, sweeps, levels=10):
        lo, hi = self.metric.r_min, self.metric.r_max
        pad = 1e-9 * (hi - lo)
        for sweep in range(sweeps):
            order = range(1, len(pts) - 1)
            if sweep % 2:
                order = reversed(list(order))
            changed = 0.0
            for i in order:
                a, b = pts[i - 1], pts[i + 1]
                cur = pts[i]
                base = self._seg_len(a, cur) + self._seg_len(cur, b)
                base0 = base
                step_r = 0.5 * (abs(b[0] - a[0]) + self.h_r)
                f_here = max(float(self.metric.f(min(max(cur[0], lo + pad), hi - pad))), 1e-9)
                step_t = min(0.5 * (abs(b[1] - a[1]) + self.h_r / f_here), _TWO_PI)
                for _lv in range(levels):
                    moved = False
                    for dr, dt in ((step_r, 0.0), (-step_r, 0.0), (0.0, step_t), (0.0, -step_t)):
                        cand = [min(max(cur[0] + dr, lo + pad), hi - pad), cur[1] + dt]
                        val = self._seg_len(a, cand) + self._seg_len(cand, b)
                        if val < base - 1e-15:
                            cur, base, moved = cand, val, True
                    if not moved:
                        step_r *= 0.5
                        step_t *= 0.5
                pts[i] = cur
                changed += base0 - base
            if changed < 1e-12 * max(1.0, self.metric.length):
                break
        return pts

    def _poly_len(self, pts, n=33):
        return sum(self._seg_len(pts[i], pts[i + 1], n=n) for i in range(len(pts) - 1))

    def _relax(self, pts):
        """Multilevel discrete-geodesic relaxation: compass-search each interior
        vertex to shorten its two adjacent segments, coarse to fine, so the
        path can shift laterally in a few sweeps instead of one cell per sweep.

        Several coarse seeds compete (the grid path, the straight chord, and
        detours over each pole) because near-pole geodesics are separated from
        the raw path by a barrier that vertex-local moves cross very slowly.
        """
        p0, p1 = list(pts[0]), list(pts[-1])
        seeds = [[list(p) for p in pts], [p0, p1]]
        if self.pole_lo_node >= 0:
            rm = self.metric.r_min
            seeds.append([p0, [rm, p0[1]], [rm, p1[1]], p1])
        if self.pole_hi_node >= 0:
            rm = self.metric.r_max
            seeds.append([p0, [rm, p0[1]], [rm, p1[1]], p1])
        best, best_val = None, np.inf
        for seed in seeds:
            cur = seed
            for m in (4, 8):
                cur = self._relax_sweeps(self._resample(cur, m), sweeps=10)
            val = self._poly_len(cur, n=9)
            if val < best_val:
                best, best_val = cur, val
        for m in (16, 32):
            best = self._relax_sweeps(self._resample(best, m), sweeps=16)
        return self._poly_len(best, n=33)

    def distance(self, p1, p2, smooth=True):
        src, dst = self.snap(p1), self.snap(p2)
        if src == dst:
            return 0.0
        dist, _ = self._solve_from(src)
        raw = float(dist[dst])
        if not smooth:
            return raw
        nodes = self._path_nodes(src, dst)
        coords = [self.node_coords(i) for i in nodes]
        # unwrap theta so the polyline does not jump across the 2 pi cut
        unwrapped = [coords[0]]
        for r, th in coords[1:]:
            prev_th = unwrapped[-1][1]
            unwrapped.append((r, prev_th + _wrap_angle(th - prev_th)))
        best = min(raw, self._smooth_length(unwrapped))
        relaxed = self._relax(unwrapped)
        return min(best, relaxed)

    def distance_field(self, p0):
        """Distances from p0 to every node; returns (node_r, node_theta, dist)."""
        src = self.snap(p0)
        dist, _ = self._solve_from(src)
        rr = np.repeat(self.rows, self.n_theta)
        tt = np.tile(np.arange(self.n_theta) * self.h_th, self.n_rows)
        extra_r, extra_t = [], []
        if self.pole_lo_node >= 0:
            extra_r.append(self.metric.r_min)
            extra_t.append(0.0)
        if self.pole_hi_node >= 0:
            extra_r.append(self.metric.r_max)
            extra_t.append(0.0)
        rr = np.concatenate([rr, extra_r])
        tt = np.concatenate([tt, extra_t])
        return rr, tt, dist

    def cell_areas(self):
        """Area represented by each node's coordinate cell (poles get caps)."""
        f_rows = self.metric.f(self.rows)
        a = np.repeat(f_rows * self.h_r * self.h_th, self.n_theta)
        extras = []
        if self.pole_lo_node >= 0:
            extras.append(area(self.metric, self.metric.r_min, self.rows[0] - 0.5 * self.h_r))
        if self.pole_hi_node >= 0:
            extras.append(area(self.metric, self.rows[-1] + 0.5 * self.h_r, self.metric.r_max))
        return np.concatenate([a, extras]) if extras else a


_GRID_CACHE = {}


def shared_grid(metric, n_r=256, n_theta=256):
    key = (id(metric), n_r, n_theta)
    hit = _GRID_CACHE.get(key)
    if hit is None or hit[0] is not metric:
        _GRID_CACHE[key] = (metric, GeodesicGrid(metric, n_r, n_theta))
        hit = _GRID_CACHE[key]
    return hit[1]


def grid_distance(metric, p1, p2, n_r=256, n_theta=256, smooth=True):
    """Dijkstra distance between the nodes nearest to p1 and p2.

    Endpoints snap to the grid, so callers comparing against the analytic
    engine should use node-aligned coordinates (multiples of the grid steps)
    to avoid conflating snap error with engine disagreement.
    """
    return shared_grid(metric, n_r, n_theta).distance(p1, p2, smooth=smooth)


def diameter(metric, cross_check=False):
    """Intrinsic diameter. For sphere topology this is the meridian length:
    any pair is joined through the nearer pole by arcs of total length at
    most min(r1+r2, 2L-r1-r2) <= L, and the two poles realize exactly L.
    """
    if metric.topology != "sphere":
        raise ValueError("diameter is only defined here for closed sphere topology")
    L = metric.length
    if cross_check:
        pole_pair = geodesic_distance(metric, (metric.r_min, 0.0), (metric.r_max, 0.0))
        if abs(pole_pair - L) > 1e-6 * L:
            raise RuntimeError("pole-to-pole distance disagrees with meridian length")
    return L


@dataclass
class ScanResult:
    r_values: np.ndarray
    perimeters: np.ndarray
    areas_in: np.ndarray
    area_total: float
    ch_ub: float
    in_ub: float
    r_ch: float
    r_in: float


def isoperimetric_scan(metric, n=4096):
    """Upper bounds for Cheeger and isoperimetric constants from coordinate
    circles: each interior circle splits the surface into two regions, and
    the scan minimizes perimeter / min(area) and perimeter^2 / min(area).

    For half-open profiles only the disk around the pole is a valid region.
    """
    edges, centers, widths = mesh(metric, n)
    f_edges = metric.f(edges)
    # cumulative area, integrated piece by piece (edges hit breakpoints exactly)
    from .quadrature import cumulative_simpson_grid

    cum = np.zeros_like(edges)
    brk = set(np.round(metric.breakpoints, 12))
    cut_idx = [0]
    for i, e in enumerate(edges):
        if round(float(e), 12) in brk:
            cut_idx.append(i)
    cut_idx.append(len(edges) - 1)
    cut_idx = sorted(set(cut_idx))
    for a_i, b_i in zip(cut_idx[:-1], cut_idx[1:]):
        seg = slice(a_i, b_i + 1)
        cum[seg] = cum[a_i] + cumulative_simpson_grid(_TWO_PI * f_edges[seg], edges[seg])
    area_total = float(cum[-1])

    interior = slice(1, len(edges) - 1)
    r_vals = edges[interior]
    perims = _TWO_PI * f_edges[interior]
    a_in = cum[interior]
    if metric.topology == "half_open":
        small = a_in
    else:
        small = np.minimum(a_in, area_total - a_in)
    small = np.maximum(small, 1e-300)
    ch = perims / small
    iso = perims**2 / small
    k_ch = int(np.argmin(ch))
    k_in = int(np.argmin(iso))
    return ScanResult(
        r_values=r_vals,
        perimeters=perims,
        areas_in=a_in,
        area_total=area_total,
        ch_ub=float(ch[k_ch]),
        in_ub=float(iso[k_in]),
        r_ch=float(r_vals[k_ch]),
        r_in=float(r_vals[k_in]),
    )


def burago_zalgaller_audit(metric, n=4096):
    """Coordinate-circle scan bounds against the diameter comparison:
    Ch_ub >= 1/diam and IN_ub >= area/diam^2 on closed sphere topology.

    Margins are reported in rate form (difference of the two sides), which
    tends to 0+ for a long capped cylinder instead of saturating.
    """
    scan = isoperimetric_scan(metric, n=n)
    diam = diameter(metric)
    rec_ch = passed_record(
        audit="bz_cheeger_vs_diameter",
        statement="Ch_ub >= 1/diam",
        lhs=scan.ch_ub,
        rhs=1.0 / diam,
        margin=scan.ch_ub - 1.0 / diam,
        ok=scan.ch_ub >= 1.0 / diam - 1e-12 * scan.ch_ub,
        params={"diam": diam, "r_ch": scan.r_ch},
    )
    rec_in = passed_record(
        audit="bz_isoperimetric_vs_diameter",
        statement="IN_ub >= area/diam^2",
        lhs=scan.in_ub,
        rhs=scan.area_total / diam**2,
        margin=scan.in_ub - scan.area_total / diam**2,
        ok=scan.in_ub >= scan.area_total / diam**2 - 1e-12 * scan.in_ub,
        params={"diam": diam, "area": scan.area_total, "r_in": scan.r_in},
    )
    return rec_ch, rec_in


def random_pairs(metric, count, seed, margin_frac=0.02):
    """Seeded coordinate pairs, kept away from the ends by a margin."""
    rng = np.random.default_rng(seed)
    lo, hi = metric.r_min, metric.r_max
    pad = margin_frac * (hi - lo)
    r = rng.uniform(lo + pad, hi - pad, size=(count, 2))
    th = rng.uniform(0.0, _TWO_PI, size=(count, 2))
    return [(tuple(p), tuple(q)) for p, q in zip(np.stack([r[:, 0], th[:, 0]], 1), np.stack([r[:, 1], th[:, 1]], 1))]
