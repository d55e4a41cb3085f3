"""Command-line entry point.

Verbs::

    gammadev profile    [--config F] [--out D]         profile table, constants, figure
    gammadev solve      [--config F] [--out D] --eps E  one radial solve, per-node dump
    gammadev sweep      [--config F] [--out D] [--eps E ...] [--jobs J] [--format csv|plotdata] [--force]
    gammadev recover    [--config F] [--eps E ...]      recovery-side energies per eps
    gammadev rearrange  [--config F] [--out D] [--size N] [--fields K]
    gammadev check      [--config F]                   the acceptance suite

Exit status: 0 on success, 1 when a solve fails to converge or a check fails,
2 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings

import numpy as np

from . import acceptance
from . import radial_solver as rs
from . import rearrangement as ra
from . import recovery as rc
from .config import RunConfig, load_config
from .errors import ConfigurationError, ConstraintError, GammadevError, GeometryError, UsageError
from .plotting import plot_profile, plot_rearrangement, plot_solution, plot_sweep
from .potential import c_w, tau_w
from .profile import build_profile
from .report import FORMATS, emit, fmt_value, write_table
from .sweep import run_sweep


def _eps_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number list: {text!r}") from exc


def _config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    eps = [e for group in getattr(args, "eps", None) or [] for e in group]
    if eps:
        cfg = cfg.with_eps(eps)
    return cfg


def cmd_profile(args, out):
    cfg = _config(args)
    well = cfg.well()
    p = build_profile(well)
    d = cfg.output_dir(args.out)
    t, z, dz = p.table()
    write_table(
        os.path.join(d, "profile.dat"),
        (t, z, dz),
        ("t", "z", "dz"),
        header=[f"c_W = {fmt_value(c_w(well))}", f"tau_W = {fmt_value(tau_w(well))}"],
    )
    plot_profile(p, os.path.join(d, "profile.png"))
    print(f"c_W   = {c_w(well):.12g}", file=out)
    print(f"tau_W = {tau_w(well):.12g}", file=out)
    print(f"wrote {d}/profile.dat and profile.png", file=out)
    return 0


def cmd_solve(args, out):
    cfg = _config(args)
    if len(cfg.eps) != 1 or not args.eps:
        raise UsageError("solve needs exactly one --eps value")
    eps = cfg.eps[0]
    well, norm = cfg.well(), cfg.norm()
    p = build_profile(well)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", RuntimeWarning)
        problem = rs.make_problem(well, p, norm, cfg.R, eps, m=cfg.mass, grid=cfg.grid)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    res = rs.minimize(problem, cfg.tolerances)
    d = cfg.output_dir(args.out)
    summary = [
        ("eps", eps),
        ("converged", res.converged),
        ("lambda", res.lam),
        ("delta", res.delta),
        ("excess", rs.excess(res)),
        ("energy_H", res.energy_H),
        ("el_residual", res.el_residual),
        ("constraint_slack", res.constraint_slack),
        ("iterations", res.iterations),
    ]
    path = write_table(
        os.path.join(d, f"solve_eps{eps:g}.dat"),
        rs.solution_table(res),
        ("t", "rho", "w", "el_defect"),
        header=[f"{k} = {fmt_value(v)}" for k, v in summary],
    )
    plot_solution(res, os.path.join(d, f"solve_eps{eps:g}.png"))
    for k, v in summary:
        print(f"{k:17s} {fmt_value(v)}", file=out)
    print(f"wrote {path}", file=out)
    if not res.converged:
        print(f"not converged: {res.message}", file=sys.stderr)
        return 1
    return 0


def cmd_sweep(args, out):
    if args.format not in FORMATS:
        raise UsageError(f"unknown format {args.format!r}; choose from {', '.join(FORMATS)}")
    cfg = _config(args)
    report = run_sweep(cfg, jobs=args.jobs)
    d = cfg.output_dir(args.out)
    files = emit(report, d, args.format, force=args.force)
    files += plot_sweep(report, d)
    for row in report.rows:
        print(
            f"eps={fmt_value(row['eps']):>8s} converged={int(row['converged'])} "
            f"excess={row['excess']:+.4e} lambda={row['lambda']:.6f} delta={row['delta']:+.4e} "
            f"omega/eps^2={row['omega_over_eps2']:+.6f}",
            file=out,
        )
    for k, v in report.fits.items():
        print(f"fit {k:18s} {fmt_value(v)}", file=out)
    print(f"wrote {len(files)} files to {d}", file=out)
    return 0 if report.complete else 1


def cmd_recover(args, out):
    cfg = _config(args)
    well = cfg.well()
    rcfg = rc.RecoveryConfig(cfg.norm(), well, build_profile(well), cfg.R, cfg.radius, y0=cfg.y0, delta=cfg.delta)
    print(f"limit energy n kappa c_W r^(n-1) = {rcfg.perimeter_energy:.12g}", file=out)
    status = 0
    for eps in cfg.eps:
        try:
            res = rc.corrected_energy(rcfg, eps)
        except GeometryError as exc:
            print(f"eps={eps:g}: {exc}", file=out)
            status = 1
            continue
        print(
            f"eps={eps:g} omega={res.omega:+.6e} E_hat={res.energy_hat:.10f} "
            f"E_corr={res.energy_corr:.4e} majorant={res.majorant:.4e} quotient={res.limsup_quotient:.6f}",
            file=out,
        )
    return status


def cmd_rearrange(args, out):
    cfg = _config(args)
    norm, well = cfg.norm(), cfg.well()
    d = cfg.output_dir(args.out)
    worst = 0
    for k in range(args.fields):
        f = ra.random_smooth_field(np.random.default_rng(cfg.seed + k), norm, cfg.R, args.size)
        prof = ra.convex_rearrange(f, norm)
        ps = ra.check_polya_szego(f, well, norm)
        eq = ra.check_equimeasurable(f)
        write_table(os.path.join(d, f"rearranged_{k}.dat"), ra.profile_table(prof), ("rho", "vbar"))
        if k == 0:
            plot_rearrangement(f, prof, os.path.join(d, "rearranged_0.png"))
        ok = ps.holds() and eq.ok
        worst |= not ok
        print(
            f"field {k}: dirichlet {ps.energy_original:.6g} -> {ps.energy_rearranged:.6g} "
            f"(rel {ps.relative_excess:+.3e}), W gap {ps.w_gap:.2e}, equimeasurable {int(eq.ok)}",
            file=out,
        )
    return int(worst)


def cmd_check(args, out):
    cfg = _config(args)
    results = acceptance.run_all(cfg)
    for c in results:
        print(c.line(), file=out)
        for chk in c.checks:
            mark = "ok " if chk.ok else "BAD"
            print(f"    {mark} {chk.label}: {chk.value:.6g} ({chk.bound})", file=out)
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(
                [
                    {
                        "number": c.number,
                        "title": c.title,
                        "passed": c.passed,
                        "seconds": c.seconds,
                        "checks": [
                            {"label": k.label, "value": k.value if math.isfinite(k.value) else None, "bound": k.bound, "ok": k.ok}
                            for k in c.checks
                        ],
                    }
                    for c in results
                ],
                fh,
                indent=2,
            )
    return 0 if all(c.passed for c in results) else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gammadev", description="Second-order Gamma-expansion numerics for anisotropic phase fields.")
    sub = ap.add_subparsers(dest="verb", required=True)

    def common(p, eps=True):
        p.add_argument("--config", help="INI run configuration")
        p.add_argument("--out", help="output directory (default: config, $GAMMADEV_OUT, ./gammadev-out)")
        if eps:
            p.add_argument("--eps", type=_eps_list, nargs="+", action="extend", help="override the eps list (comma or space separated)")
        return p

    common(sub.add_parser("profile", help="optimal profile table and constants"), eps=False).set_defaults(func=cmd_profile)
    common(sub.add_parser("solve", help="one radial solve")).set_defaults(func=cmd_solve)
    sp = common(sub.add_parser("sweep", help="eps sweep with rate fits"))
    sp.add_argument("--jobs", type=int, default=1, help="worker processes")
    sp.add_argument("--format", default="csv", help="csv or plotdata")
    sp.add_argument("--force", action="store_true", help="write the report even if incomplete")
    sp.set_defaults(func=cmd_sweep)
    common(sub.add_parser("recover", help="recovery-side energies")).set_defaults(func=cmd_recover)
    rp = common(sub.add_parser("rearrange", help="convex rearrangement of random fields"), eps=False)
    rp.add_argument("--size", type=int, default=256)
    rp.add_argument("--fields", type=int, default=10)
    rp.set_defaults(func=cmd_rearrange)
    cp = common(sub.add_parser("check", help="run the acceptance suite"), eps=False)
    cp.add_argument("--json", help="also write results as JSON")
    cp.set_defaults(func=cmd_check)
    return ap


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (UsageError, ConfigurationError, ConstraintError) as exc:
        print(f"gammadev: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except GammadevError as exc:
        print(f"gammadev: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"gammadev: I/O error: {exc}", file=sys.stderr)
        return 2

if __name__ == "__main__":
    sys.exit(main())
