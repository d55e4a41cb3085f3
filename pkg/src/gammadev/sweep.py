"""The eps-sweep: one radial solve and one recovery evaluation per eps."""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import radial_solver as rs
from . import recovery as rc
from .anisotropy import kappa
from .config import RunConfig
from .errors import DomainError, GeometryError, InsufficientDataError
from .potential import c_w, tau_w
from .profile import build_profile

COLUMNS = (
    "eps",
    "converged",
    "excess",
    "lambda",
    "eps_lambda",
    "delta",
    "eps_delta",
    "min_w_plus_1",
    "barrier_plus_1",
    "el_residual",
    "constraint_slack",
    "complementarity",
    "energy_H",
    "energy_H_profile",
    "monotonicity_violation",
    "endpoint_lower_K2",
    "endpoint_upper_K2",
    "omega",
    "omega_over_eps2",
    "energy_hat",
    "energy_corr",
    "majorant",
    "support_ok",
    "limsup_quotient",
    "iterations",
)

FIT_COLUMNS = ("excess", "omega", "eps_lambda", "eps_delta", "endpoint_lower_K2", "endpoint_upper_K2", "energy_corr")


@dataclass
class SweepReport:
    header: dict
    rows: list = field(default_factory=list)
    fits: dict = field(default_factory=dict)

    @property
    def complete(self):
        return all(row["converged"] for row in self.rows)

    def column(self, name):
        return np.array([row[name] for row in self.rows], dtype=float)


def _context(config: RunConfig):
    norm = config.norm()
    well = config.well()
    profile = build_profile(well)
    return norm, well, profile


def header_for(config: RunConfig) -> dict:
    norm, well, profile = _context(config)
    n = config.n
    r = config.radius
    cw = c_w(well)
    head = dict(config.echo())
    head.update(
        {
            "c_W": cw,
            "tau_W": tau_w(well),
            "kappa": kappa(norm),
            "r": r,
            "m": config.mass,
            "lambda0": (n - 1) * cw,
            "lambda0_general": rs.lambda_limit(cw, n, r),
        }
    )
    return head


def solve_row(config: RunConfig, eps: float) -> dict:
    """All sweep quantities for one eps.  Pure function of its arguments."""
    norm, well, profile = _context(config)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        problem = rs.make_problem(well, profile, norm, config.R, eps, m=config.mass, grid=config.grid)
    res = rs.minimize(problem, config.tolerances)
    z = rs.profile_start(problem)
    row = {
        "eps": eps,
        "converged": bool(res.converged),
        "excess": rs.excess(res),
        "lambda": res.lam,
        "eps_lambda": eps * res.lam,
        "delta": res.delta,
        "eps_delta": eps * res.delta,
        "min_w_plus_1": float(res.w.min()) + 1.0,
        "barrier_plus_1": rs.lower_barrier(res) + 1.0,
        "el_residual": res.el_residual,
        "constraint_slack": res.constraint_slack,
        "complementarity": res.complementarity,
        "energy_H": res.energy_H,
        "energy_H_profile": rs.energy_H(problem, z),
        "monotonicity_violation": res.monotonicity_violation,
        "iterations": res.iterations,
    }
    if math.isfinite(res.delta):
        layers = rs.diagnostics_endpoint_layers(res, K=(2,))
        row["endpoint_lower_K2"] = layers.lower[0]
        row["endpoint_upper_K2"] = layers.upper[0]
    else:
        row["endpoint_lower_K2"] = row["endpoint_upper_K2"] = float("nan")

    cfg = rc.RecoveryConfig(norm, well, profile, config.R, problem.r, y0=config.y0, delta=config.delta)
    nan = float("nan")
    try:
        omega = rc.mass_error(cfg, eps)
        e_hat = rc.recovery_energy(cfg, eps)
    except GeometryError:
        omega = e_hat = nan
    row["omega"] = omega
    row["omega_over_eps2"] = omega / eps**2
    row["energy_hat"] = e_hat
    row["support_ok"] = False
    row["energy_corr"] = row["majorant"] = row["limsup_quotient"] = nan
    if math.isfinite(omega):
        row["energy_corr"] = rc.correction_energy(cfg, eps, omega)
        try:
            row["majorant"] = rc.correction_majorant(cfg, eps, omega)
        except DomainError:
            row["majorant"] = nan
        try:
            out = rc.corrected_energy(cfg, eps)
            row["support_ok"] = True
            row["limsup_quotient"] = out.limsup_quotient
        except GeometryError:
            pass
    return row


def run_sweep(config: RunConfig, jobs: int = 1) -> SweepReport:
    """Solve every eps of the config; rows come back in config order."""
    header = header_for(config)
    report = SweepReport(header=header)
    if not config.eps:
        return report
    if jobs > 1 and len(config.eps) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(solve_row, [config] * len(config.eps), config.eps))
    else:
        rows = [solve_row(config, e) for e in config.eps]
    report.rows = rows
    done = [r for r in rows if r["converged"]]
    if len(done) >= 3:
        report.fits = fit_rates(report)
    return report


def fit_exponent(eps, values) -> float:
    """Least-squares slope of log|values| against log eps."""
    eps = np.asarray(eps, dtype=float)
    v = np.abs(np.asarray(values, dtype=float))
    ok = np.isfinite(v) & (v > 0)
    if ok.sum() < 3:
        return float("nan")
    if np.allclose(v[ok], v[ok][0], rtol=1e-13, atol=0):
        return 0.0
    return float(np.polyfit(np.log(eps[ok]), np.log(v[ok]), 1)[0])


def fit_rates(report: SweepReport, columns=FIT_COLUMNS) -> dict:
    """Exponents p with ``|column| ~ eps^p`` over the converged rows."""
    rows = [r for r in report.rows if r["converged"]]
    if len(rows) < 3:
        raise InsufficientDataError(f"need at least 3 completed rows, have {len(rows)}")
    eps = [r["eps"] for r in rows]
    return {c: fit_exponent(eps, [r[c] for r in rows]) for c in columns}
