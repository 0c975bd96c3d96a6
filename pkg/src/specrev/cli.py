"""Config-driven audit runner: named scenarios in TOML, CSV/JSON reports.

Subcommands: run (scenario suites), sweep (truncation-radius scaling fits),
list-gallery. Exit codes: 0 all non-advisory audits pass, 1 audit failure or
scenario crash, 2 usage or config error.
"""

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from importlib import resources
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

import numpy as np

from .conformal import anti_harnack_audit, audit_tilde_diameter, eigenfunction_bundle
from .distances import burago_zalgaller_audit
from .fundamental import (
    CurveData,
    audit_bonnet_myers,
    audit_collar,
    audit_isoperimetric_1,
    audit_isoperimetric_2,
    audit_volume_comparison,
    evaluate_fundamental,
    sample_test_function,
)
from .gallery import GALLERY, list_gallery, scaling_sweep
from .mt_audit import mt_suite
from .mu_bubble import (
    bubble_diameter_certificate,
    certificate_weight,
    weighted_geodesic_audit,
)
from .records import (
    FAIL,
    AuditRecord,
    fmt,
    passed_record,
    skipped_record,
    summarize,
    write_csv,
    write_json_summary,
)
from .spectral import first_eigenvalue, supersolution_residual

CSV_VERSION = "specrev-audit-csv v1"
SWEEP_CSV_VERSION = "specrev-sweep-csv v1"


class ConfigError(Exception):
    """Anything wrong with the config or CLI usage; maps to exit code 2."""


class ScenarioContext:
    """Lazily built shared state for one scenario's audits."""

    def __init__(self, name, gallery_name, params, beta, lam, grid_n, seed):
        self.name = name
        self.gallery_name = gallery_name
        self.params = params
        self.beta = beta
        self._lam = lam
        self.grid_n = grid_n
        self.seed = seed
        self._built = None
        self._spectral = None

    def _build(self):
        if self._built is None:
            out = GALLERY[self.gallery_name].build(**self.params)
            self._built = out if isinstance(out, tuple) else (out, None)
        return self._built

    @property
    def metric(self):
        return self._build()[0]

    @property
    def gallery_phi(self):
        return self._build()[1]

    @property
    def spectral(self):
        if self._spectral is None:
            self._spectral = first_eigenvalue(self.metric, self.beta, n=self.grid_n)
        return self._spectral

    @property
    def lam1(self):
        return self.spectral.lam

    @property
    def lam(self):
        if self._lam is not None:
            return self._lam
        return self.lam1

    @property
    def phi(self):
        """Supersolution certificate: the gallery's when bundled, else the
        computed ground state."""
        if self.gallery_phi is not None:
            return self.gallery_phi
        return self.spectral.eigenfunction


def _audit_spectral_certificate(ctx, opts):
    lam1 = ctx.lam1
    lam = ctx.lam
    tol = float(opts.get("tol", 1e-9)) * max(1.0, abs(lam1))
    return [
        passed_record(
            audit="spectral_certificate",
            statement="first eigenvalue of the weighted operator reaches the certified level",
            lhs=lam1,
            rhs=lam,
            margin=lam1 - lam,
            ok=lam1 >= lam - tol,
            params={"beta": ctx.beta, "lam": lam, "n": ctx.grid_n},
        )
    ]


def _audit_supersolution(ctx, opts):
    tol = float(opts.get("tol", 1e-8))
    resid, r_at = supersolution_residual(ctx.metric, ctx.beta, ctx.lam, ctx.phi, n=ctx.grid_n)
    return [
        passed_record(
            audit="supersolution_residual",
            statement="max node residual of the spectral supersolution inequality",
            lhs=resid,
            rhs=tol,
            margin=tol - resid,
            ok=resid <= tol,
            params={"beta": ctx.beta, "lam": ctx.lam},
            notes="worst node at r=%.6g" % r_at,
        )
    ]


def _audit_fundamental_suite(ctx, opts):
    if ctx.metric.topology != "sphere":
        return [
            skipped_record(
                audit="fundamental_inequality",
                statement="tested energy <= topology + kink terms",
                reason="level-set bookkeeping needs a closed sphere-type profile",
                params={"beta": ctx.beta},
            )
        ]
    count = int(opts.get("count", 50))
    rng = np.random.default_rng(ctx.seed)
    metric = ctx.metric
    quantiles = opts.get("r0_quantiles", (0.2, 0.35, 0.5, 0.65, 0.8))
    out = []
    for k in range(count):
        q = float(quantiles[k % len(quantiles)])
        r0 = metric.r_min + q * (metric.r_max - metric.r_min)
        curve = CurveData.coordinate_circle(metric, r0)
        tf = sample_test_function(rng, curve.rho_minus, curve.rho_plus)
        out.append(evaluate_fundamental(metric, ctx.beta, ctx.lam, curve, tf))
    return out


def _audit_global_curvature_area(ctx, opts):
    return [audit_isoperimetric_1(ctx.metric, ctx.beta, n=ctx.grid_n)]


def _audit_collar_cheeger(ctx, opts):
    metric = ctx.metric
    r0 = float(opts.get("r0", 0.5 * (metric.r_min + metric.r_max)))
    rho = float(opts.get("rho", 0.25 * (metric.r_max - metric.r_min)))
    return [audit_collar(metric, ctx.beta, r0, rho, n=ctx.grid_n)]


def _audit_iso_ratio_2(ctx, opts):
    eps = float(opts.get("epsilon", 0.1))
    return [audit_isoperimetric_2(ctx.metric, ctx.beta, eps, n=ctx.grid_n)]


def _audit_volume_comparison(ctx, opts):
    return [audit_volume_comparison(ctx.metric, ctx.beta, n=ctx.grid_n)]


def _audit_bonnet_myers(ctx, opts):
    return [audit_bonnet_myers(ctx.metric, ctx.beta, n=ctx.grid_n)]


def _audit_burago_zalgaller(ctx, opts):
    return [burago_zalgaller_audit(ctx.metric, n=ctx.grid_n)]


def _audit_tilde_diameter(ctx, opts):
    bundle = eigenfunction_bundle(ctx.metric, ctx.beta, n=ctx.grid_n)
    return [audit_tilde_diameter(bundle)]


def _audit_anti_harnack(ctx, opts):
    return [anti_harnack_audit(ctx.metric, ctx.beta, ctx.phi, n=ctx.grid_n)]


def _audit_weighted_geodesic(ctx, opts):
    u = certificate_weight(ctx.phi, ctx.beta)
    resid_tol = float(opts.get("resid_tol", 1e-3))
    return [weighted_geodesic_audit(ctx.metric, ctx.beta, ctx.lam, u, resid_tol=resid_tol)]


def _audit_bubble_diameter(ctx, opts):
    eps = float(opts.get("eps", 0.01))
    return [bubble_diameter_certificate(ctx.metric, ctx.beta, ctx.lam, eps=eps)]


def _envelope_record(audit, metric, kind, boundary_r, n_fns, seed, n_panels):
    base = mt_suite(
        metric, kind, boundary_r=boundary_r, n_fns=n_fns, seed=seed, n_panels=n_panels
    )
    fine = mt_suite(
        metric, kind, boundary_r=boundary_r, n_fns=n_fns, seed=seed, n_panels=2 * n_panels
    )
    more = mt_suite(
        metric, kind, boundary_r=boundary_r, n_fns=2 * n_fns, seed=seed, n_panels=n_panels
    )
    drift = max(
        abs(fine.max_ratio - base.max_ratio) / base.max_ratio,
        abs(more.max_ratio - base.max_ratio) / base.max_ratio,
    )
    return passed_record(
        audit=audit,
        statement="exponential-ratio envelope stable under grid and sample doubling",
        lhs=drift,
        rhs=0.10,
        margin=0.10 - drift,
        ok=np.isfinite(base.max_ratio) and drift <= 0.10,
        params={
            "max_ratio": base.max_ratio,
            "xi": base.xi,
            "n_fns": n_fns,
            "seed": seed,
        },
    )


def _audit_mt_closed_envelope(ctx, opts):
    n_fns = int(opts.get("n_fns", 100))
    return [
        _envelope_record(
            "mt_closed_envelope", ctx.metric, "closed", None, n_fns, ctx.seed, 64
        )
    ]


def _audit_mt_dirichlet_envelope(ctx, opts):
    metric = ctx.metric
    boundary_r = float(
        opts.get("boundary_r", metric.r_min + 0.5 * (metric.r_max - metric.r_min))
    )
    n_fns = int(opts.get("n_fns", 100))
    return [
        _envelope_record(
            "mt_dirichlet_envelope", metric, "dirichlet", boundary_r, n_fns, ctx.seed, 64
        )
    ]


AUDITS = {
    "spectral_certificate": _audit_spectral_certificate,
    "supersolution_residual": _audit_supersolution,
    "fundamental_suite": _audit_fundamental_suite,
    "global_curvature_area": _audit_global_curvature_area,
    "collar_cheeger": _audit_collar_cheeger,
    "iso_ratio_2": _audit_iso_ratio_2,
    "volume_comparison": _audit_volume_comparison,
    "bonnet_myers": _audit_bonnet_myers,
    "burago_zalgaller": _audit_burago_zalgaller,
    "tilde_diameter": _audit_tilde_diameter,
    "anti_harnack": _audit_anti_harnack,
    "weighted_geodesic": _audit_weighted_geodesic,
    "bubble_diameter": _audit_bubble_diameter,
    "mt_closed_envelope": _audit_mt_closed_envelope,
    "mt_dirichlet_envelope": _audit_mt_dirichlet_envelope,
}


def _require(cond, msg):
    if not cond:
        raise ConfigError(msg)


def _as_number(value, where):
    _require(isinstance(value, (int, float)) and not isinstance(value, bool),
             "%s must be a number, got %r" % (where, value))
    return float(value)


def load_config(path):
    """Parse TOML; parse errors keep tomllib's line/column message."""
    p = Path(path)
    if not p.exists():
        bundled = resources.files("specrev").joinpath("configs", "%s.toml" % path)
        if "/" not in str(path) and bundled.is_file():
            return tomllib.loads(bundled.read_text()), "bundled:%s" % path
        raise ConfigError("config file not found: %s" % path)
    try:
        with open(p, "rb") as fh:
            return tomllib.load(fh), str(p)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("config parse error in %s: %s" % (p, exc))


def validate_scenarios(cfg, grid_n=None, seed=None):
    """Type-check every scenario before any computation; returns contexts."""
    scenarios = cfg.get("scenario", [])
    _require(isinstance(scenarios, list) and scenarios, "config has no [[scenario]] tables")
    default_grid = grid_n if grid_n is not None else cfg.get("grid_n", 2048)
    default_seed = seed if seed is not None else cfg.get("seed", 0)
    out = []
    seen = set()
    for i, sc in enumerate(scenarios):
        where = "scenario[%d]" % i
        _require(isinstance(sc, dict), "%s is not a table" % where)
        name = sc.get("name")
        _require(isinstance(name, str) and name, "%s needs a string name" % where)
        _require(name not in seen, "duplicate scenario name %r" % name)
        seen.add(name)
        gal = sc.get("gallery")
        _require(isinstance(gal, str) and gal in GALLERY,
                 "%s: unknown gallery entry %r (have: %s)"
                 % (name, gal, ", ".join(sorted(GALLERY))))
        params = sc.get("params", {})
        _require(isinstance(params, dict), "%s: params must be a table" % name)
        beta = _as_number(sc.get("beta", 1.0), "%s: beta" % name)
        lam = sc.get("lam")
        if lam is not None:
            lam = _as_number(lam, "%s: lam" % name)
        audits = sc.get("audits")
        _require(isinstance(audits, list) and audits,
                 "%s: audits must be a non-empty list" % name)
        for a in audits:
            _require(isinstance(a, str) and a in AUDITS,
                     "%s: unknown audit %r (have: %s)"
                     % (name, a, ", ".join(sorted(AUDITS))))
        audit_params = sc.get("audit_params", {})
        _require(isinstance(audit_params, dict), "%s: audit_params must be a table" % name)
        for key in audit_params:
            _require(key in AUDITS, "%s: audit_params for unknown audit %r" % (name, key))
        g = int(sc.get("grid_n", default_grid))
        s = int(sc.get("seed", default_seed))
        ctx = ScenarioContext(name, gal, params, beta, lam, g, s)
        out.append((ctx, list(audits), audit_params,
                    sc.get("out_csv", "%s.csv" % name),
                    sc.get("out_json", "%s.json" % name)))
    return out


def run_scenario(ctx, audits, audit_params, out_dir, out_csv, out_json):
    """Execute one validated scenario; audit exceptions become FAIL records
    so sibling audits still run."""
    records = []
    for a in audits:
        opts = audit_params.get(a, {})
        try:
            records.extend(AUDITS[a](ctx, opts))
        except Exception as exc:
            records.append(
                AuditRecord(
                    audit=a,
                    statement="audit raised instead of reporting",
                    lhs=float("nan"),
                    rhs=float("nan"),
                    margin=float("nan"),
                    status=FAIL,
                    params={"beta": ctx.beta},
                    notes="%s: %s" % (type(exc).__name__, exc),
                )
            )
    csv_path = Path(out_dir) / out_csv
    json_path = Path(out_dir) / out_json
    write_csv(records, csv_path, header_comment=CSV_VERSION)
    write_json_summary(
        records,
        json_path,
        extra={
            "scenario": ctx.name,
            "gallery": ctx.gallery_name,
            "beta": ctx.beta,
            "grid_n": ctx.grid_n,
            "seed": ctx.seed,
        },
    )
    return records


def cmd_run(args):
    cfg, _src = load_config(args.config)
    plans = validate_scenarios(cfg, grid_n=args.grid_n, seed=args.seed)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    failures = 0

    def job(plan):
        ctx, audits, audit_params, out_csv, out_json = plan
        try:
            return ctx.name, run_scenario(ctx, audits, audit_params, out_dir, out_csv, out_json), None
        except Exception as exc:
            return ctx.name, [], "%s: %s" % (type(exc).__name__, exc)

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(job, plans))
    else:
        results = [job(plan) for plan in plans]
    for name, records, error in results:
        if error is not None:
            failures += 1
            print("scenario %-28s ERROR %s" % (name, error))
            continue
        s = summarize(records)
        ok = s["all_passed"]
        failures += 0 if ok else 1
        print(
            "scenario %-28s %s  (%d records: %d pass, %d fail, %d skipped, %d advisory)"
            % (
                name,
                "ok" if ok else "FAIL",
                s["total"],
                s["counts"]["pass"],
                s["counts"]["fail"],
                s["counts"]["skipped"],
                s["counts"]["advisory"],
            )
        )
    return 0 if failures == 0 else 1


def cmd_sweep(args):
    cfg, _src = load_config(args.config)
    sweeps = cfg.get("sweep", [])
    _require(isinstance(sweeps, list) and sweeps, "config has no [[sweep]] tables")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    failures = 0
    for i, sw in enumerate(sweeps):
        name = sw.get("name")
        _require(isinstance(name, str) and name, "sweep[%d] needs a string name" % i)
        beta = _as_number(sw.get("beta", 0.4), "%s: beta" % name)
        r_values = sw.get("r_values")
        _require(isinstance(r_values, list) and len(r_values) >= 4,
                 "%s: r_values must list at least 4 radii" % name)
        r_values = [_as_number(v, "%s: r_values" % name) for v in r_values]
        n = int(sw.get("grid_n", args.grid_n if args.grid_n is not None else cfg.get("grid_n", 4096)))
        result = scaling_sweep(beta, r_values, n=n)
        csv_path = out_dir / sw.get("out_csv", "%s.csv" % name)
        _write_sweep_csv(result, csv_path)
        write_json_summary(
            result["records"],
            out_dir / sw.get("out_json", "%s.json" % name),
            extra={
                "sweep": name,
                "beta": beta,
                "slopes": result["slopes"],
                "p": result["p"],
                "limit_exponent": result["limit_exponent"],
            },
        )
        s = summarize(result["records"])
        ok = s["all_passed"]
        failures += 0 if ok else 1
        print(
            "sweep %-28s %s  slopes: ch*diam %.4g, quotient %.4g (target %g, %g)"
            % (
                name,
                "ok" if ok else "FAIL",
                result["slopes"]["ch_diam"],
                result["slopes"]["quotient"],
                1.0 - result["p"],
                result["p"],
            )
        )
    return 0 if failures == 0 else 1


def _write_sweep_csv(result, path):
    cols = [
        "row",
        "R",
        "area",
        "diam",
        "ch_ub",
        "in_ub",
        "ch_diam",
        "area_over_diam2",
        "slope_ch_diam",
        "slope_in_ub",
        "slope_area_ratio",
        "quotient",
    ]
    with open(path, "w", newline="") as fh:
        fh.write("# %s\n" % SWEEP_CSV_VERSION)
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for row in result["rows"]:
            w.writerow(
                [
                    "data",
                    fmt(row["R"]),
                    fmt(row["area"]),
                    fmt(row["diam"]),
                    fmt(row["ch_ub"]),
                    fmt(row["in_ub"]),
                    fmt(row["ch_diam"]),
                    fmt(row["ratio"]),
                    "",
                    "",
                    "",
                    "",
                ]
            )
        sl = result["slopes"]
        w.writerow(
            [
                "fit",
                "",
                "",
                "",
                "",
                "",
                "",
                "",
                fmt(sl["ch_diam"]),
                fmt(sl["in_ub"]),
                fmt(sl["ratio"]),
                fmt(sl["quotient"]),
            ]
        )


def cmd_list_gallery(args):
    rows = list_gallery()
    if args.topology:
        rows = [r for r in rows if r["topology"] == args.topology]
    if args.json:
        print(json.dumps(rows, indent=2, sort_keys=True))
        return 0
    widest = max((len(r["name"]) for r in rows), default=4)
    for r in rows:
        defaults = ", ".join("%s=%s" % (k, v) for k, v in r["defaults"].items())
        print("%-*s  %-9s  %-34s  %s" % (widest, r["name"], r["topology"], defaults, r["description"]))
    return 0


def build_parser():
    ap = argparse.ArgumentParser(
        prog="specrev",
        description="audit scenarios for surfaces of revolution under the spectral curvature condition",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run audit scenarios from a TOML config")
    run_p.add_argument("--config", required=True,
                       help="path to a TOML config, or the name of a bundled one (paper_suite)")
    run_p.add_argument("--out-dir", default=".", help="directory for CSV/JSON reports")
    run_p.add_argument("--grid-n", type=int, default=None, help="default grid size override")
    run_p.add_argument("--seed", type=int, default=None, help="default RNG seed override")
    run_p.add_argument("--jobs", type=int, default=1, help="scenarios to run concurrently")
    run_p.set_defaults(fn=cmd_run)

    sweep_p = sub.add_parser("sweep", help="truncation-radius scaling sweeps with slope fits")
    sweep_p.add_argument("--config", required=True)
    sweep_p.add_argument("--out-dir", default=".")
    sweep_p.add_argument("--grid-n", type=int, default=None)
    sweep_p.add_argument("--seed", type=int, default=None)
    sweep_p.add_argument("--jobs", type=int, default=1)
    sweep_p.set_defaults(fn=cmd_sweep)

    lg = sub.add_parser("list-gallery", help="list gallery entries and parameter defaults")
    lg.add_argument("--json", action="store_true", help="machine-readable output")
    lg.add_argument("--topology", default=None, help="filter by topology tag")
    lg.set_defaults(fn=cmd_list_gallery)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
