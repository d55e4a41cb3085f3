"""Even double-well potentials with an exact power law at the wells.

``W(s) = ||s| - 1|**beta`` whenever ``|s| >= 1 - a``; on the bridge
``|s| < 1 - a`` an even polynomial takes over.  The default bridge is the
cubic in ``x = s**2`` with zero linear term that matches value, slope and
curvature of the power law at ``|s| = 1 - a``, so W is C^2 across the seams.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import ConfigurationError, DomainError, NumericalError

QUAD_TOL = 1e-10
CURVATURE_FLOOR = 1e-12


@dataclass(frozen=True)
class DoubleWell:
    beta: float = 1.5
    a: float = 0.5
    bridge: str = "even-poly"
    mu_const: float | None = None
    coeffs: tuple = field(init=False, default=())
    mu: float = field(init=False, default=0.0)

    def __post_init__(self):
        if not 1 < self.beta < 2:
            raise ConfigurationError("beta must lie in (1, 2)")
        if not 0 < self.a < 1:
            raise ConfigurationError("a must lie in (0, 1)")
        if self.bridge == "even-poly":
            coeffs = _bridge_coefficients(self.beta, self.a)
            s = np.linspace(0, 1 - self.a, 4001)
            vals = _poly(coeffs, s**2)
            mu = float(vals.min())
            if mu <= 0:
                raise ConfigurationError("bridge polynomial is not positive; choose another (beta, a)")
        elif self.bridge == "constant":
            # degenerate test well; not C^1 unless mu_const == a**beta
            if self.mu_const is None or self.mu_const <= 0:
                raise ConfigurationError("constant bridge needs a positive mu_const")
            coeffs = (float(self.mu_const), 0.0, 0.0)
            mu = float(self.mu_const)
        else:
            raise ConfigurationError(f"unknown bridge {self.bridge!r}")
        object.__setattr__(self, "coeffs", tuple(float(c) for c in coeffs))
        object.__setattr__(self, "mu", mu)

    @property
    def seam(self):
        return 1.0 - self.a

    def describe(self):
        out = {"beta": self.beta, "a": self.a, "bridge": self.bridge}
        if self.bridge == "constant":
            out["mu"] = self.mu_const
        return out


def _poly(c, x):
    # b(x) = c0 + c1 x^2 + c2 x^3 with x = s^2
    return c[0] + c[1] * x**2 + c[2] * x**3


def _poly_dx(c, x):
    return 2 * c[1] * x + 3 * c[2] * x**2


def _poly_dxx(c, x):
    return 2 * c[1] + 6 * c[2] * x


def _bridge_coefficients(beta, a):
    s0 = 1 - a
    x0 = s0**2
    # value, d/ds and d2/ds2 of b(s^2) at s0
    A = np.array(
        [
            [1.0, x0**2, x0**3],
            [0.0, 4 * s0 * x0, 6 * s0 * x0**2],
            [0.0, 12 * x0, 30 * x0**2],
        ]
    )
    rhs = np.array([a**beta, -beta * a ** (beta - 1), beta * (beta - 1) * a ** (beta - 2)])
    return np.linalg.solve(A, rhs)


def eval_w(well, s):
    """W(s); total, even, vectorised."""
    s = np.asarray(s, dtype=float)
    t = np.abs(s)
    power = np.abs(t - 1) ** well.beta
    out = np.where(t >= well.seam, power, _poly(well.coeffs, t**2))
    return float(out) if out.ndim == 0 else out


def eval_w_prime(well, s):
    """W'(s); odd."""
    s = np.asarray(s, dtype=float)
    t = np.abs(s)
    d = t - 1
    power = well.beta * np.sign(d) * np.abs(d) ** (well.beta - 1)
    bridge = 2 * t * _poly_dx(well.coeffs, t**2)
    out = np.sign(s) * np.where(t >= well.seam, power, bridge)
    return float(out) if out.ndim == 0 else out


def eval_w_second(well, s, floor=CURVATURE_FLOOR):
    """W''(s) with the well singularity ``|s| -> 1`` cut off at distance ``floor``."""
    s = np.asarray(s, dtype=float)
    t = np.abs(s)
    d = np.maximum(np.abs(t - 1), floor)
    power = well.beta * (well.beta - 1) * d ** (well.beta - 2)
    x = t**2
    bridge = 2 * _poly_dx(well.coeffs, x) + 4 * x * _poly_dxx(well.coeffs, x)
    out = np.where(t >= well.seam, power, bridge)
    return float(out) if out.ndim == 0 else out


def _quad(f, lo, hi, tol):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(f, lo, hi, epsabs=tol * 1e-3, epsrel=1e-13, limit=200)
        except integrate.IntegrationWarning as exc:
            raise NumericalError(f"quadrature on [{lo}, {hi}] failed: {exc}") from exc
    if err > tol:
        raise NumericalError(f"quadrature error {err:.3e} exceeds {tol:.1e}", estimate=val)
    return val


def c_w(well, tol=QUAD_TOL):
    """Transition cost ``2 * int_{-1}^{1} sqrt(W)``.

    The bridge is integrated adaptively; the power window is exact.
    """
    bridge = _quad(lambda s: np.sqrt(eval_w(well, s)), 0.0, well.seam, tol / 8)
    return 4.0 * (bridge + window_sqrt_integral(well.beta, well.a))


def tau_w(well, tol=QUAD_TOL):
    """Saturation time ``int_0^1 ds / sqrt(W)``.

    With ``u = (1 - s)**((2 - beta)/2)`` the integrand on the power window is
    the constant ``2/(2 - beta)``, so only the bridge needs quadrature.
    """
    if well.beta >= 2:
        raise DomainError("tau_W is infinite for beta >= 2")
    bridge = _quad(lambda s: 1 / np.sqrt(eval_w(well, s)), 0.0, well.seam, tol / 4)
    return bridge + window_inverse_sqrt_integral(well.beta, well.a)


def window_sqrt_integral(beta, zeta):
    """``int_{1-zeta}^{1} (1-s)^{beta/2} ds``."""
    return 2 / (2 + beta) * zeta ** ((2 + beta) / 2)


def window_inverse_sqrt_integral(beta, zeta):
    """``int_{1-zeta}^{1} (1-s)^{-beta/2} ds``."""
    return zeta ** (1 - beta / 2) / (1 - beta / 2)
