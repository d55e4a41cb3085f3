"""The optimal heteroclinic profile ``z' = sqrt(W(z))``, ``z(0) = 0``.

z is obtained by inverting ``t(z) = int_0^z ds / sqrt(W(s))``.  On the
exact-power window ``z >= 1 - a`` that integral is closed form in
``u = (1 - z)**((2 - beta)/2)``, so z saturates at ``tau_W`` in finite time
and both directions of the map are explicit there.  Only the bridge needs a
table, which is built by Gauss-Legendre quadrature per interval and inverted
by a shape-preserving cubic followed by Newton polishing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, NumericalError
from .potential import DoubleWell, c_w, eval_w, eval_w_prime, tau_w

TABLE_SIZE = 2**12 + 1
_GL_X, _GL_W = np.polynomial.legendre.leggauss(10)


@dataclass(frozen=True, eq=False)
class OptimalProfile:
    """Tabulated optimal profile; call it to evaluate z(t).

    The stored table covers ``z in [-1, 1]`` with at most ``TABLE_SIZE`` nodes,
    uniform in z on the bridge and uniform in u on the two power windows.
    """

    well: DoubleWell
    tau: float
    c_w_value: float
    z_table: np.ndarray
    t_table: np.ndarray
    t_seam: float
    _guess: PchipInterpolator

    def __call__(self, t):
        return forward(self, t)

    def inverse(self, z):
        return inverse(self, z)

    def derivative(self, t):
        """z'(t) = sqrt(W(z(t)))."""
        return np.sqrt(eval_w(self.well, forward(self, t)))

    def table(self):
        """(t, z, z') columns of the inverse table."""
        return self.t_table, self.z_table, np.sqrt(eval_w(self.well, self.z_table))


def _k(beta):
    return 2.0 / (2.0 - beta)


def _bridge_t(well, z_lo, z_hi):
    """int_{z_lo}^{z_hi} ds / sqrt(W) for bridge subintervals, vectorised."""
    z_lo = np.asarray(z_lo, dtype=float)
    z_hi = np.asarray(z_hi, dtype=float)
    mid = 0.5 * (z_lo + z_hi)
    half = 0.5 * (z_hi - z_lo)
    nodes = mid[..., None] + half[..., None] * _GL_X
    return np.sum(half[..., None] * _GL_W / np.sqrt(eval_w(well, nodes)), axis=-1)


def build_profile(well: DoubleWell, size: int = TABLE_SIZE) -> OptimalProfile:
    """Tabulate t(z) and set up the forward map."""
    if well.beta >= 2:
        raise DomainError("profile does not saturate for beta >= 2")
    if size < 17 or (size - 1) % 4:
        raise DomainError("table size must be 4m + 1 with m >= 4")
    half = (size - 1) // 2
    n_bridge = half // 2
    n_window = half - n_bridge
    s0 = well.seam
    k = _k(well.beta)
    u0 = well.a ** (1.0 / k)

    zb = np.linspace(0.0, s0, n_bridge + 1)
    tb = np.concatenate([[0.0], np.cumsum(_bridge_t(well, zb[:-1], zb[1:]))])
    t_seam = float(tb[-1])

    u = np.linspace(u0, 0.0, n_window + 1)[1:]
    zw = 1.0 - u**k
    zw[-1] = 1.0
    tw = t_seam + k * (u0 - u)
    # for beta near 2, 1 - u^k stalls in rounding near the well; keep the last node of each run
    keep = np.append(np.diff(zw) > 0, True)
    zw, tw = zw[keep], tw[keep]

    z_pos = np.concatenate([zb, zw])
    t_pos = np.concatenate([tb, tw])
    z_table = np.concatenate([-z_pos[:0:-1], z_pos])
    t_table = np.concatenate([-t_pos[:0:-1], t_pos])
    if np.any(np.diff(t_table) <= 0) or np.any(np.diff(z_table) <= 0):
        raise NumericalError("inverse table is not strictly monotone")

    tau = float(t_pos[-1])
    reference = tau_w(well)
    if abs(tau - reference) > 1e-9:
        raise NumericalError(f"table saturation time {tau!r} disagrees with tau_W {reference!r}", estimate=tau)

    guess = PchipInterpolator(tb, zb, extrapolate=False)
    return OptimalProfile(
        well=well,
        tau=tau,
        c_w_value=c_w(well),
        z_table=z_table,
        t_table=t_table,
        t_seam=t_seam,
        _guess=guess,
    )


def _t_of_z_bridge(p, z):
    # z in [0, seam]; integrate from the nearest table node below
    zb = p.z_table[p.z_table.size // 2 :]
    tb = p.t_table[p.t_table.size // 2 :]
    nb = int(np.searchsorted(zb, p.well.seam)) + 1
    zb, tb = zb[:nb], tb[:nb]
    idx = np.clip(np.searchsorted(zb, z, side="right") - 1, 0, nb - 2)
    return tb[idx] + _bridge_t(p.well, zb[idx], z)


def inverse(p: OptimalProfile, z):
    """t(z) for z in [-1, 1]; odd."""
    z = np.asarray(z, dtype=float)
    if np.any(np.abs(z) > 1) or not np.all(np.isfinite(z)):
        raise DomainError("inverse profile is defined on [-1, 1]")
    sign = np.sign(z)
    a = np.abs(z)
    out = np.empty_like(a)
    window = a >= p.well.seam
    k = _k(p.well.beta)
    u0 = p.well.a ** (1.0 / k)
    out[window] = p.t_seam + k * (u0 - (1.0 - a[window]) ** (1.0 / k))
    out[~window] = _t_of_z_bridge(p, a[~window])
    out = sign * out
    return float(out) if out.ndim == 0 else out


def forward(p: OptimalProfile, t, newton_steps: int = 6):
    """z(t); odd, saturated at +-1 beyond +-tau."""
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise DomainError("profile argument must be finite")
    sign = np.sign(t)
    a = np.abs(t)
    out = np.ones_like(a)
    k = _k(p.well.beta)
    u0 = p.well.a ** (1.0 / k)

    window = (a >= p.t_seam) & (a < p.tau)
    u = np.maximum(u0 - (a[window] - p.t_seam) / k, 0.0)
    out[window] = 1.0 - u**k

    bridge = a < p.t_seam
    if np.any(bridge):
        tb = a[bridge]
        z = np.clip(p._guess(tb), 0.0, p.well.seam)
        for _ in range(newton_steps):
            resid = _t_of_z_bridge(p, z) - tb
            z = np.clip(z - resid * np.sqrt(eval_w(p.well, z)), 0.0, p.well.seam)
        out[bridge] = z
    out = sign * out
    return float(out) if out.ndim == 0 else out


def profile_energy(p: OptimalProfile, b: float) -> float:
    """``int_{-b}^{b} (W(z) + z'^2) dt`` evaluated as ``int 2 W(z)``."""
    potential, kinetic = energy_split(p, b)
    return potential + kinetic


def energy_split(p: OptimalProfile, b: float):
    """Potential and kinetic parts ``(int W(z), int z'^2)`` over ``[-b, b]``."""
    if b < p.tau:
        raise DomainError(f"window half-width {b} is shorter than tau_W = {p.tau}")
    pts = [p.t_seam]
    opts = dict(points=pts, epsabs=1e-13, epsrel=1e-13, limit=400)
    pot, _ = integrate.quad(lambda t: eval_w(p.well, forward(p, t)), 0.0, p.tau, **opts)
    kin, _ = integrate.quad(lambda t: p.derivative(t) ** 2, 0.0, p.tau, **opts)
    # the integrands vanish identically on [tau, b]
    return 2.0 * pot, 2.0 * kin


@dataclass(frozen=True)
class MinimalityReport:
    discrete_min: float
    sup_distance: float
    grid_size: int
    h: float
    iterations: int
    nodes: np.ndarray
    values: np.ndarray


def verify_profile_minimality(p: OptimalProfile, b: float, grid_size: int = 1024, potential=None) -> MinimalityReport:
    """Minimise the 1-D transition energy over P1 functions with w(0) = 0.

    The mesh on ``[-b, b]`` is uniform with ``grid_size`` cells (rounded up
    to even so t = 0 is a node).  The potential term uses the lumped
    (trapezoidal) mass.  ``potential`` optionally replaces W by a pair
    ``(W, W')`` of vectorised callables.
    """
    if grid_size < 64:
        raise DomainError("grid_size must be at least 64")
    if b < p.tau:
        raise DomainError(f"window half-width {b} is shorter than tau_W = {p.tau}")
    if potential is None:
        wf = lambda s: eval_w(p.well, s)
        dwf = lambda s: eval_w_prime(p.well, s)
    else:
        wf, dwf = potential
    cells = grid_size + (grid_size % 2)
    t = np.linspace(-b, b, cells + 1)
    h = t[1] - t[0]
    mass = np.full(t.size, h)
    mass[[0, -1]] = h / 2
    mid = cells // 2
    free = np.ones(t.size, dtype=bool)
    free[mid] = False

    def expand(x):
        w = np.zeros(t.size)
        w[free] = x
        return w

    def energy(x):
        w = expand(x)
        dw = np.diff(w)
        e = np.sum(dw**2) / h + np.sum(mass * wf(w))
        g = mass * dwf(w)
        g[:-1] -= 2 * dw / h
        g[1:] += 2 * dw / h
        return e, g[free]

    # independent start: a linear ramp clipped to the wells
    x0 = np.clip(t / b, -1.0, 1.0)[free]
    res = optimize.minimize(
        energy,
        x0,
        jac=True,
        method="L-BFGS-B",
        bounds=[(-1.5, 1.5)] * int(free.sum()),
        options=dict(maxiter=20000, maxfun=40000, ftol=1e-15, gtol=1e-10, maxcor=30),
    )
    w = expand(res.x)
    gnorm = float(np.max(np.abs(energy(res.x)[1]) / mass[free]))
    if not res.success and gnorm > 1e-5:
        raise NumericalError(f"minimality solve did not converge: {res.message}", estimate=float(res.fun))
    if potential is None:
        dist = float(np.max(np.abs(w - forward(p, t))))
    else:
        dist = float("nan")
    return MinimalityReport(
        discrete_min=float(res.fun),
        sup_distance=dist,
        grid_size=cells,
        h=float(h),
        iterations=int(res.nit),
        nodes=t,
        values=w,
    )
