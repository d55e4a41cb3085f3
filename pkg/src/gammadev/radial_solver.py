"""Constrained minimisation of the weighted radial phase-field energy.

For a Wulff-ball container of radius R and an interface radius r the radial
energy is

    G(w) = int_0^R ((1/eps) W(w) + eps |w'|^2) rho^(n-1) drho,

minimised over w with w(R) = 1 and ``n kappa int w rho^(n-1) <= m``.  In the
stretched variable ``t = (rho - r)/eps`` the same number is

    H(w) = int (W(w) + |w_t|^2) (r + eps t)^(n-1) dt.

Discretisation is P1 on a graded grid: the gradient term uses exact element
weights ``int rho^(n-1)`` and the potential uses the row-summed (lumped)
weighted mass, which also integrates ``int w rho^(n-1)`` exactly.  The grid
starts at rho_0 > 0 and w is extended by the constant w_0 to [0, rho_0].

The inequality is handled by an augmented Lagrangian with the multiplier
clamped at zero; each subproblem is solved by a projected Newton method with
the upper bound ``w <= 1`` (truncation never raises the energy).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, sparse
from scipy.sparse.linalg import splu

from .anisotropy import AnisotropicNorm, kappa, radius_from_mass
from .errors import ConstraintError, DegenerateStateError, DomainError
from .potential import DoubleWell, eval_w, eval_w_prime, eval_w_second
from .profile import OptimalProfile

_GX, _GW = np.polynomial.legendre.leggauss(4)


@dataclass(frozen=True)
class SolverTolerances:
    grad_tol: float = 1e-8
    el_tol: float = 1e-6
    kkt_tol: float = 1e-8
    mass_tol: float = 1e-8
    trunc_tol: float = 1e-12
    tol_delta: float = 1.0 / 16

    def __post_init__(self):
        for name in ("grad_tol", "el_tol", "kkt_tol", "mass_tol", "trunc_tol", "tol_delta"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")


@dataclass(frozen=True)
class GridSpec:
    """Grading of the radial grid, in units of eps.

    ``fine`` cells per unit t on ``|t| <= core * tau``; ``layer`` cells per
    unit t on ``|t| <= 8 tau``; geometric growth beyond, capped at ``h_max``.
    """

    fine: int = 64
    layer: int = 16
    core: float = 1.5
    growth: float = 0.1
    h_max: float = 0.02

    def __post_init__(self):
        if self.layer < 16:
            raise DomainError("layer resolution must be at least 16 cells per unit t")
        if self.fine < self.layer:
            raise DomainError("fine resolution must not be coarser than the layer resolution")
        if not (self.growth > 0 and self.h_max > 0 and self.core > 0):
            raise DomainError("grid growth, h_max and core must be positive")


@dataclass(frozen=True, eq=False)
class RadialProblem:
    well: DoubleWell
    profile: OptimalProfile
    n: int
    R: float
    r: float
    m: float
    eps: float
    kappa: float
    rho: np.ndarray
    elem_weight: np.ndarray = field(repr=False)
    node_mass: np.ndarray = field(repr=False)

    @property
    def t(self):
        return (self.rho - self.r) / self.eps

    @property
    def mass_target(self):
        """Right-hand side of ``sum m_i w_i <= m / (n kappa)``."""
        return self.m / (self.n * self.kappa)

    @property
    def size(self):
        return self.rho.size


@dataclass(frozen=True, eq=False)
class RadialSolveResult:
    problem: RadialProblem
    w: np.ndarray
    lam: float
    delta: float
    energy_G: float
    energy_H: float
    el_residual: float
    constraint_slack: float
    iterations: int
    outer_iterations: int
    converged: bool
    message: str
    monotonicity_violation: float
    multiple_crossings: bool

    @property
    def eps(self):
        return self.problem.eps

    @property
    def t(self):
        return self.problem.t

    @property
    def complementarity(self):
        return abs(self.lam * self.constraint_slack)


def build_grid(R, r, eps, tau, spec: GridSpec = GridSpec()):
    """Graded nodes on (0, R] clustered at rho = r."""
    if not 0 < r < R:
        raise DomainError("need 0 < r < R")
    h_fine = eps / spec.fine
    h_layer = eps / spec.layer
    core = spec.core * tau * eps
    band = 8.0 * tau * eps

    def spacing(d):
        if d < core:
            return h_fine
        if d < band:
            return h_layer
        return min(h_layer * (1 + spec.growth) ** ((d - band) / h_layer), max(spec.h_max, h_layer))

    def march(limit):
        pts = [0.0]
        while True:
            d = pts[-1]
            h = spacing(d)
            if d + 1.5 * h >= limit:
                break
            pts.append(d + h)
        return np.array(pts[1:])

    right = r + march(R - r)
    left = r - march(r)
    rho = np.concatenate([left[::-1], [r], right, [R]])
    if rho[0] <= 0:
        rho = rho[1:]
    return rho


def _elem_weights(rho, n):
    a, b = rho[:-1], rho[1:]
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    x = mid[:, None] + half[:, None] * _GX
    f = x ** (n - 1)
    whole = np.sum(half[:, None] * _GW * f, axis=1)
    left = np.sum(half[:, None] * _GW * f * (b[:, None] - x), axis=1) / (b - a)
    mass = np.zeros(rho.size)
    mass[:-1] += left
    mass[1:] += whole - left
    mass[0] += rho[0] ** n / n
    return whole, mass


def make_problem(
    well: DoubleWell,
    profile: OptimalProfile,
    norm: AnisotropicNorm,
    R: float,
    eps: float,
    *,
    r: float | None = None,
    m: float | None = None,
    grid: GridSpec = GridSpec(),
) -> RadialProblem:
    """Set up the radial problem on the Wulff ball of radius R.

    Exactly one of ``r`` (interface radius) and ``m`` (mass bound) is given;
    the other follows from ``m = kappa (R^n - 2 r^n)``.
    """
    n = norm.n
    if not eps > 0:
        raise DomainError("eps must be positive")
    if R <= 0:
        raise DomainError("R must be positive")
    k = kappa(norm)
    volume = k * R**n
    if (r is None) == (m is None):
        raise ConstraintError("give exactly one of r and m")
    if m is None:
        if not 0 < r < R:
            raise ConstraintError("interface radius must lie in (0, R)")
        m = k * (R**n - 2 * r**n)
    r = radius_from_mass(norm, volume, m)
    tau = profile.tau
    if 8 * eps * tau >= min(r, R - r):
        warnings.warn(
            f"eps = {eps} is large: the layer band 8 eps tau_W = {8 * eps * tau:.3g} exceeds min(r, R - r)",
            RuntimeWarning,
            stacklevel=2,
        )
    rho = build_grid(R, r, eps, tau, grid)
    elem, mass = _elem_weights(rho, n)
    return RadialProblem(well, profile, n, R, r, m, eps, k, rho, elem, mass)


def _check(problem, w):
    w = np.asarray(w, dtype=float)
    if w.shape != problem.rho.shape:
        raise DomainError(f"expected {problem.rho.size} nodal values, got shape {w.shape}")
    return w


def energy_G(problem: RadialProblem, w) -> float:
    """G_eps(w) in the physical variable rho."""
    w = _check(problem, w)
    eps = problem.eps
    slope = np.diff(w) / np.diff(problem.rho)
    grad = eps * np.sum(problem.elem_weight * slope**2)
    pot = np.sum(problem.node_mass * eval_w(problem.well, w)) / eps
    return float(grad + pot)


def energy_H(problem: RadialProblem, w) -> float:
    """H_eps(w) for nodal values w on the stretched grid ``t = (rho - r)/eps``."""
    w = _check(problem, w)
    t = problem.t
    eps, r, n = problem.eps, problem.r, problem.n
    # weights (r + eps t)^(n-1) integrated exactly per element in t
    a, b = t[:-1], t[1:]
    half = 0.5 * (b - a)
    x = 0.5 * (a + b)[:, None] + half[:, None] * _GX
    f = (r + eps * x) ** (n - 1)
    whole = np.sum(half[:, None] * _GW * f, axis=1)
    left = np.sum(half[:, None] * _GW * f * (b[:, None] - x), axis=1) / (b - a)
    lump = np.zeros(t.size)
    lump[:-1] += left
    lump[1:] += whole - left
    lump[0] += (r + eps * t[0]) ** n / (n * eps)
    slope = np.diff(w) / np.diff(t)
    return float(np.sum(whole * slope**2) + np.sum(lump * eval_w(problem.well, w)))


def mass_integral(problem: RadialProblem, w) -> float:
    """``n kappa int_0^R w rho^(n-1) drho``."""
    w = _check(problem, w)
    return float(problem.n * problem.kappa * np.dot(problem.node_mass, w))


def profile_start(problem: RadialProblem, shift: float = 0.0):
    """Nodal values of the shifted profile ``z((rho - r)/eps - shift)``."""
    w = problem.profile(problem.t - shift)
    w[-1] = 1.0
    return np.minimum(w, 1.0)


def profile_h_energy(profile: OptimalProfile, n: int, r: float, eps: float) -> float:
    """``int (W(z) + z'^2)(r + eps t)^(n-1) dt`` by adaptive quadrature."""

    def f(t):
        return 2.0 * eval_w(profile.well, profile(t)) * (r + eps * t) ** (n - 1)

    pts = [-profile.t_seam, 0.0, profile.t_seam]
    val, _ = integrate.quad(f, -profile.tau, profile.tau, points=pts, epsabs=1e-13, epsrel=1e-13, limit=400)
    return val


def _grad_parts(problem, w):
    eps = problem.eps
    h = np.diff(problem.rho)
    k = eps * problem.elem_weight / h**2
    dw = np.diff(w)
    energy = np.sum(k * dw**2) + np.sum(problem.node_mass * eval_w(problem.well, w)) / eps
    g = problem.node_mass * eval_w_prime(problem.well, w) / eps
    g[:-1] -= 2 * k * dw
    g[1:] += 2 * k * dw
    return float(energy), g, k


def _hessian(problem, w, k, convexify=False):
    curv = eval_w_second(problem.well, w)
    if convexify:
        curv = np.abs(curv)
    diag = problem.node_mass * curv / problem.eps
    diag[:-1] += 2 * k
    diag[1:] += 2 * k
    off = -2 * k
    return sparse.diags([off, diag, off], [-1, 0, 1], format="csc")


def el_defect(problem: RadialProblem, w, lam: float):
    """Nodal Euler-Lagrange defect ``(dG/dw_i)/m_i + lam``; zero at the end nodes."""
    w = _check(problem, w)
    _, g, _ = _grad_parts(problem, w)
    d = g / problem.node_mass + lam
    d[0] = 0.0
    d[-1] = 0.0
    return d


def _solve_direction(H, g, mass, free, nu_active, mu):
    lu = splu(H[free][:, free].tocsc())
    x = lu.solve(g[free])
    if not nu_active:
        return -x
    # Sherman-Morrison for H + mu m m^T
    mf = mass[free]
    y = lu.solve(mf)
    return -x + y * (mu * np.dot(mf, x) / (1.0 + mu * np.dot(mf, y)))


def minimize(
    problem: RadialProblem,
    tol: SolverTolerances = SolverTolerances(),
    *,
    w0=None,
    lam0: float | None = None,
    max_outer: int = 60,
    max_inner: int = 200,
) -> RadialSolveResult:
    """Constrained minimiser of G_eps started from the shifted profile."""
    eps = problem.eps
    mass = problem.node_mass
    target = problem.mass_target
    w = profile_start(problem) if w0 is None else np.minimum(_check(problem, w0).copy(), 1.0)
    w[-1] = 1.0
    lam = (problem.n - 1) * problem.profile.c_w_value / (2 * problem.r) if lam0 is None else float(lam0)
    lam = max(lam, 0.0)
    mu = 1e4 / (eps * mass.sum())
    stat_tol = min(tol.el_tol, tol.grad_tol * 1e2) / eps * 0.1

    def lagrangian(v, lam_):
        e = _grad_parts(problem, v)[0]
        c = np.dot(mass, v) - target
        return e + (max(0.0, lam_ + mu * c) ** 2 - lam_**2) / (2 * mu)

    total_inner = 0
    converged = False
    message = "outer iteration cap reached"
    nu = lam
    outer = 0
    for outer in range(1, max_outer + 1):
        for _ in range(max_inner):
            total_inner += 1
            e, gE, k = _grad_parts(problem, w)
            c = np.dot(mass, w) - target
            nu = max(0.0, lam + mu * c)
            g = gE + nu * mass
            active = (w >= 1.0 - tol.trunc_tol) & (g < 0)
            active[-1] = True
            free = ~active
            stat = np.max(np.abs(g[free] / mass[free]))
            if stat <= stat_tol:
                break
            H = _hessian(problem, w, k)
            d_free = _solve_direction(H, g, mass, free, nu > 0, mu)
            slope = float(np.dot(g[free], d_free))
            if not np.all(np.isfinite(d_free)) or slope >= 0:
                H = _hessian(problem, w, k, convexify=True)
                d_free = _solve_direction(H, g, mass, free, nu > 0, mu)
                slope = float(np.dot(g[free], d_free))
            if slope >= 0:
                d_free = -g[free] / mass[free]
                slope = float(np.dot(g[free], d_free))
            d = np.zeros_like(w)
            d[free] = d_free
            big = np.max(np.abs(d))
            if big > 0.5:
                d *= 0.5 / big
                slope *= 0.5 / big
            L0 = lagrangian(w, lam)
            alpha = 1.0
            while True:
                trial = np.minimum(w + alpha * d, 1.0)
                L1 = lagrangian(trial, lam)
                if L1 <= L0 + 1e-4 * alpha * slope + 1e-15 * abs(L0):
                    break
                alpha *= 0.5
                if alpha < 1e-12:
                    break
            if alpha < 1e-12:
                # no decrease representable in floating point; stop this subproblem
                break
            w = trial
        c = np.dot(mass, w) - target
        lam = max(0.0, lam + mu * c)
        el = np.max(np.abs(el_defect(problem, w, lam)[1:-1][w[1:-1] < 1.0 - tol.trunc_tol]))
        slack = -c * problem.n * problem.kappa
        if (
            el <= tol.el_tol / eps
            and max(0.0, -slack) <= tol.mass_tol
            and abs(lam * slack) <= tol.kkt_tol
        ):
            converged = True
            message = "converged"
            break

    w = np.minimum(w, 1.0)
    slack = problem.m - mass_integral(problem, w)
    el_mask = w[1:-1] < 1.0 - tol.trunc_tol
    el = float(np.max(np.abs(el_defect(problem, w, lam)[1:-1][el_mask]))) if el_mask.any() else 0.0
    try:
        delta, crossings = crossing_in(problem.t, w)
    except DegenerateStateError:
        delta, crossings = float("nan"), 0
        converged = False
        message = "no sign change in the computed state"
    return RadialSolveResult(
        problem=problem,
        w=w,
        lam=float(lam),
        delta=delta,
        energy_G=energy_G(problem, w),
        energy_H=energy_H(problem, w),
        el_residual=el,
        constraint_slack=float(slack),
        iterations=total_inner,
        outer_iterations=outer,
        converged=converged,
        message=message,
        monotonicity_violation=float(np.sum(np.maximum(-np.diff(w), 0.0))),
        multiple_crossings=crossings > 1,
    )


def crossing_in(t, w):
    """Zero of the piecewise-linear (t, w) nearest t = 0, and the number of sign changes."""
    t = np.asarray(t, dtype=float)
    w = np.asarray(w, dtype=float)
    s = np.sign(w)
    exact = np.flatnonzero(w == 0.0)
    change = np.flatnonzero(s[:-1] * s[1:] < 0)
    roots = t[change] - w[change] * (t[change + 1] - t[change]) / (w[change + 1] - w[change])
    roots = np.concatenate([roots, t[exact]])
    if roots.size == 0:
        raise DegenerateStateError("w does not change sign")
    return float(roots[np.argmin(np.abs(roots))]), int(roots.size)


def zero_crossing(result: RadialSolveResult):
    """(delta, eps * delta) for a solve result."""
    delta, _ = crossing_in(result.t, result.w)
    return delta, result.eps * delta


def excess(result: RadialSolveResult) -> float:
    """``(H_eps(w) - c_W r^(n-1)) / eps``."""
    p = result.problem
    return (result.energy_H - p.profile.c_w_value * p.r ** (p.n - 1)) / p.eps


def lambda_limit(c_w_value: float, n: int, r: float) -> float:
    """Limit of the multiplier for interface radius r."""
    return (n - 1) * c_w_value / (2 * r)


def lower_barrier(result: RadialSolveResult) -> float:
    """``-1 - (eps lam / beta)^(1/(beta-1))``."""
    beta = result.problem.well.beta
    return -1.0 - (result.eps * result.lam / beta) ** (1.0 / (beta - 1.0))


@dataclass(frozen=True)
class EndpointLayers:
    K: tuple
    lower: tuple
    upper: tuple


def diagnostics_endpoint_layers(result: RadialSolveResult, K=(1, 2, 4)) -> EndpointLayers:
    """Deviation of the recentred solution from the wells just outside the layer.

    ``lower[k] = w(delta - tau - K eps) + 1`` and ``upper[k] = 1 - w(delta + tau + K eps)``.
    """
    delta, _ = crossing_in(result.t, result.w)
    tau = result.problem.profile.tau
    eps = result.eps
    lo, up = [], []
    for kk in K:
        s = tau + kk * eps
        lo.append(float(np.interp(delta - s, result.t, result.w)) + 1.0)
        up.append(1.0 - float(np.interp(delta + s, result.t, result.w)))
    return EndpointLayers(tuple(K), tuple(lo), tuple(up))


def solution_table(result: RadialSolveResult):
    """Columns (t, rho, w, el_defect) for a per-solve dump."""
    p = result.problem
    return p.t, p.rho, result.w, el_defect(p, result.w, result.lam)


def truncation_gain(problem: RadialProblem, w) -> float:
    """``G(w) - G(min(w, 1))``; never negative."""
    w = _check(problem, w)
    return energy_G(problem, w) - energy_G(problem, np.minimum(w, 1.0))


__all__ = [
    "GridSpec",
    "RadialProblem",
    "RadialSolveResult",
    "SolverTolerances",
    "build_grid",
    "crossing_in",
    "diagnostics_endpoint_layers",
    "el_defect",
    "energy_G",
    "energy_H",
    "excess",
    "lambda_limit",
    "lower_barrier",
    "make_problem",
    "mass_integral",
    "minimize",
    "profile_h_energy",
    "profile_start",
    "solution_table",
    "truncation_gain",
    "zero_crossing",
]
