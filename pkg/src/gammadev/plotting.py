"""Figures for sweep reports and single solves (Agg backend, files only)."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _save(fig, path):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def _loglog(ax, eps, vals, label, marker="o"):
    v = np.abs(np.asarray(vals, dtype=float))
    ok = np.isfinite(v) & (v > 0)
    if ok.any():
        ax.loglog(np.asarray(eps)[ok], v[ok], marker=marker, label=label)


def plot_sweep(report, out_dir):
    """Rate plots for the liminf and limsup sides; returns the files written."""
    if not report.rows:
        return []
    eps = report.column("eps")
    files = []

    fig, ax = plt.subplots(figsize=(5.5, 4))
    _loglog(ax, eps, report.column("excess"), "|liminf excess|")
    _loglog(ax, eps, report.column("limsup_quotient"), "limsup quotient", marker="s")
    _loglog(ax, eps, report.column("omega"), r"$|\omega_\varepsilon|$", marker="^")
    ax.loglog(eps, eps / eps[0] * 0.3, "k--", lw=0.8, label=r"$\propto\varepsilon$")
    ax.set_xlabel(r"$\varepsilon$")
    ax.legend(fontsize=8)
    ax.set_title("second-order terms")
    files.append(_save(fig, os.path.join(out_dir, "rates.png")))

    fig, axes = plt.subplots(1, 2, figsize=(9, 3.6))
    lam0 = float(report.header.get("lambda0", np.nan))
    axes[0].semilogx(eps, report.column("lambda"), "o-", label=r"$\lambda_\varepsilon$")
    axes[0].axhline(lam0, color="k", ls="--", lw=0.8, label=r"$\lambda_0$")
    axes[0].set_xlabel(r"$\varepsilon$")
    axes[0].legend(fontsize=8)
    axes[1].semilogx(eps, report.column("delta"), "o-", label=r"$\delta_\varepsilon$")
    axes[1].semilogx(eps, report.column("eps_delta"), "s-", label=r"$\varepsilon\delta_\varepsilon$")
    axes[1].axhline(0.0, color="k", lw=0.6)
    axes[1].set_xlabel(r"$\varepsilon$")
    axes[1].legend(fontsize=8)
    files.append(_save(fig, os.path.join(out_dir, "multiplier_shift.png")))
    return files


def plot_profile(profile, path):
    t = np.linspace(-1.2 * profile.tau, 1.2 * profile.tau, 801)
    fig, ax = plt.subplots(figsize=(5.5, 3.6))
    ax.plot(t, profile(t), label="z")
    ax.plot(t, profile.derivative(t), label="z'")
    for s in (-profile.tau, profile.tau):
        ax.axvline(s, color="k", ls=":", lw=0.8)
    ax.set_xlabel("t")
    ax.legend(fontsize=8)
    return _save(fig, path)


def plot_solution(result, path):
    p = result.problem
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.6))
    axes[0].plot(p.rho, result.w, lw=1)
    axes[0].axvline(p.r, color="k", ls=":", lw=0.8)
    axes[0].set_xlabel(r"$\rho$")
    axes[0].set_ylabel("w")
    t = p.t
    band = np.abs(t) <= 1.5 * p.profile.tau
    axes[1].plot(t[band], result.w[band], label="minimiser")
    axes[1].plot(t[band], p.profile(t[band]), "--", label="profile")
    axes[1].set_xlabel("t")
    axes[1].legend(fontsize=8)
    return _save(fig, path)


def plot_rearrangement(field_, profile, path):
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.8))
    ext = [-field_.L, field_.L, -field_.L, field_.L]
    axes[0].imshow(field_.values.T, origin="lower", extent=ext, cmap="viridis")
    axes[0].set_title("field")
    axes[1].plot(profile.centers, profile.means)
    axes[1].set_xlabel(r"$\rho$")
    axes[1].set_title("rearranged profile")
    return _save(fig, path)
