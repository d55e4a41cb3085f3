"""Grid-based Wulff-radial decreasing rearrangement in the plane.

A nonnegative field sampled at the cell centres of a uniform grid is
replaced by the nonincreasing function of ``Phi°(x)`` with the same
distribution function.  Sorting the nodal values and giving the k-th
largest the radius with ``kappa rho_k^2 = k h^2`` does this exactly for the
cell-counting measure; a ring-averaged version of that staircase is used
wherever a derivative is needed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .anisotropy import AnisotropicNorm, eval_norm, eval_polar, kappa
from .errors import DomainError
from .potential import DoubleWell, eval_w


@dataclass(frozen=True, eq=False)
class GridField:
    """Nodal values at cell centres of ``[-L, L]^2`` with spacing h."""

    values: np.ndarray
    h: float
    L: float
    norm: AnisotropicNorm
    R: float

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise DomainError("grid field must be a square 2-D array")
        if self.norm.n != 2:
            raise DomainError("grid rearrangement is two-dimensional")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise DomainError("field values must be finite and nonnegative")
        if np.any(v[~self.inside()] != 0):
            raise DomainError("field must vanish outside Omega")
        object.__setattr__(self, "values", v)

    @property
    def size(self):
        return self.values.shape[0]

    def axis(self):
        return -self.L + (np.arange(self.size) + 0.5) * self.h

    def points(self):
        x = self.axis()
        X, Y = np.meshgrid(x, x, indexing="ij")
        return np.stack([X, Y], axis=-1)

    def inside(self):
        pts = self.points().reshape(-1, 2)
        return (eval_polar(self.norm, pts) <= self.R).reshape(self.size, self.size)


def box_half_width(norm: AnisotropicNorm, R: float) -> float:
    # Phi°(x) >= c_phi |x| would give |x| <= R / c_phi; use the sup of |x| on the unit Wulff ball
    from .anisotropy import direction_mesh

    u = direction_mesh(2, 4096)
    reach = float(np.max(1.0 / eval_polar(norm, u)))
    return 1.02 * R * reach


def sample_field(func, norm: AnisotropicNorm, R: float, size: int) -> GridField:
    """Evaluate ``func(points)`` on the cell centres and zero it outside Omega."""
    L = box_half_width(norm, R)
    h = 2 * L / size
    x = -L + (np.arange(size) + 0.5) * h
    X, Y = np.meshgrid(x, x, indexing="ij")
    pts = np.stack([X, Y], axis=-1)
    v = np.asarray(func(pts), dtype=float)
    inside = (eval_polar(norm, pts.reshape(-1, 2)) <= R).reshape(size, size)
    v = np.where(inside, np.maximum(v, 0.0), 0.0)
    return GridField(v, h, L, norm, R)


def bump_field(center, radius, amplitude=1.0, power=4):
    """Euclidean bump ``A (1 - |x - c|^2/s^2)_+^p`` as a callable on point arrays."""
    c = np.asarray(center, dtype=float)

    def f(pts):
        q = np.sum((pts - c) ** 2, axis=-1) / radius**2
        return amplitude * np.clip(1.0 - q, 0.0, None) ** power

    return f


def random_smooth_field(rng: np.random.Generator, norm: AnisotropicNorm, R: float, size: int, bumps=(1, 4)):
    """Sum of a random number of smooth bumps supported inside Omega."""
    k = int(rng.integers(bumps[0], bumps[1] + 1))
    parts = []
    for _ in range(k):
        radius = rng.uniform(0.2, 0.45) * R
        # keep the support inside the Euclidean ball of radius c_phi R, which lies in Omega
        reach = norm.c_phi * R - radius
        ang = rng.uniform(0, 2 * np.pi)
        dist = rng.uniform(0, max(reach, 0.0) * 0.95)
        c = dist * np.array([np.cos(ang), np.sin(ang)])
        parts.append(bump_field(c, radius, rng.uniform(0.3, 1.0)))
    return sample_field(lambda p: sum(f(p) for f in parts), norm, R, size)


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Rearranged profile as a function of ``rho = Phi°(x)``.

    ``radii``/``values`` hold the exact staircase (right-continuous);
    ``centers``/``means`` the ring averages over bins of width ``bin_width``.
    """

    radii: np.ndarray
    values: np.ndarray
    kappa: float
    bin_width: float
    centers: np.ndarray = field(repr=False)
    means: np.ndarray = field(repr=False)

    def __call__(self, rho):
        """Staircase value: the k-th sorted value on ``[rho_{k-1}, rho_k)``."""
        rho = np.asarray(rho, dtype=float)
        idx = np.searchsorted(self.radii, rho, side="right")
        vals = np.concatenate([self.values, [0.0]])
        return vals[np.minimum(idx, self.values.size)]

    def smooth(self, rho):
        """Piecewise-linear interpolation of the ring averages; constant near 0."""
        return np.interp(rho, self.centers, self.means, left=self.means[0], right=0.0)

    def support_radius(self):
        pos = np.flatnonzero(self.values > 0)
        return float(self.radii[pos[-1]]) if pos.size else 0.0


def distribution(field_: GridField, levels) -> np.ndarray:
    """``|{v > t}|`` by cell counting for each level t."""
    levels = np.atleast_1d(np.asarray(levels, dtype=float))
    flat = np.sort(field_.values.ravel())
    counts = flat.size - np.searchsorted(flat, levels, side="right")
    return counts * field_.h**2


def convex_rearrange(field_: GridField, norm: AnisotropicNorm | None = None, bin_width: float | None = None):
    """Decreasing Wulff-radial rearrangement of a grid field."""
    norm = field_.norm if norm is None else norm
    k = kappa(norm)
    vals = np.sort(field_.values.ravel())[::-1]
    ranks = np.arange(1, vals.size + 1)
    radii = np.sqrt(ranks * field_.h**2 / k)
    dr = field_.h if bin_width is None else float(bin_width)
    # ring averages, weighted by the equal cell areas
    edges = np.arange(0.0, radii[-1] + dr, dr)
    inner = np.concatenate([[0.0], radii[:-1]])
    centroid = np.sqrt(0.5 * (inner**2 + radii**2))
    which = np.minimum(np.searchsorted(edges, centroid, side="right") - 1, edges.size - 2)
    count = np.bincount(which, minlength=edges.size - 1)
    keep = count > 0
    rsum = np.bincount(which, weights=centroid, minlength=edges.size - 1)
    vsum = np.bincount(which, weights=vals, minlength=edges.size - 1)
    centers = rsum[keep] / count[keep]
    means = vsum[keep] / count[keep]
    return RadialProfile(radii, vals, k, dr, centers, means)


def gradient_energy(field_: GridField, norm: AnisotropicNorm | None = None, method: str = "spectral") -> float:
    """``int Phi^2(grad v)`` on the grid.

    ``spectral`` differentiates with the FFT, which is exact up to aliasing
    for fields that vanish near the box edge; ``central`` uses second-order
    differences, whose O(h^2) undershoot is kept for comparison.
    """
    norm = field_.norm if norm is None else norm
    v, h = field_.values, field_.h
    if method == "spectral":
        k = 2 * np.pi * np.fft.fftfreq(field_.size, d=h)
        V = np.fft.fft2(v)
        gx = np.real(np.fft.ifft2(1j * k[:, None] * V))
        gy = np.real(np.fft.ifft2(1j * k[None, :] * V))
    elif method == "central":
        gx, gy = np.gradient(v, h, h)
    else:
        raise DomainError(f"unknown differentiation method {method!r}")
    g = np.stack([gx, gy], axis=-1).reshape(-1, 2)
    return float(np.sum(eval_norm(norm, g) ** 2) * h**2)


def radial_gradient_energy(profile: RadialProfile, n: int = 2) -> float:
    """``n kappa int |vbar'|^2 rho^(n-1) drho`` from the ring averages."""
    c = np.concatenate([[0.0], profile.centers])
    v = np.concatenate([[profile.means[0]], profile.means])
    # profile vanishes after the last ring; close it at one bin further out
    c = np.concatenate([c, [c[-1] + profile.bin_width]])
    v = np.concatenate([v, [0.0]]) if v[-1] > 0 else np.concatenate([v, [v[-1]]])
    slope = np.diff(v) / np.diff(c)
    # exact integral of rho^(n-1) over each segment
    weight = (c[1:] ** n - c[:-1] ** n) / n
    return float(n * profile.kappa * np.sum(slope**2 * weight))


def _radial_integral(profile: RadialProfile, func, n=2, samples=20001):
    top = profile.centers[-1] + profile.bin_width
    rho = np.linspace(0.0, top, samples)
    return float(n * profile.kappa * np.trapezoid(func(profile.smooth(rho)) * rho ** (n - 1), rho))


@dataclass(frozen=True)
class PolyaSzegoReport:
    energy_original: float
    energy_rearranged: float
    relative_excess: float
    w_original: float
    w_rearranged: float
    w_gap: float

    def holds(self, slack=1e-3):
        return self.relative_excess <= slack


def check_polya_szego(field_: GridField, well: DoubleWell | None = None, norm: AnisotropicNorm | None = None):
    """Compare the anisotropic Dirichlet energy and the W-integral before and after rearranging."""
    norm = field_.norm if norm is None else norm
    well = DoubleWell() if well is None else well
    prof = convex_rearrange(field_, norm)
    e0 = gradient_energy(field_, norm)
    # ring averaging smooths the profile by O(bin^2); Richardson over bins h and 2h removes it
    coarse = convex_rearrange(field_, norm, bin_width=2 * field_.h)
    e1 = (4 * radial_gradient_energy(prof) - radial_gradient_energy(coarse)) / 3
    w0 = float(np.sum(eval_w(well, 1.0 - field_.values)) * field_.h**2)
    w1 = _radial_integral(prof, lambda v: eval_w(well, 1.0 - v))
    return PolyaSzegoReport(
        energy_original=e0,
        energy_rearranged=e1,
        relative_excess=(e1 - e0) / e0 if e0 > 0 else 0.0,
        w_original=w0,
        w_rearranged=w1,
        w_gap=abs(w1 - w0) / w0 if w0 > 0 else 0.0,
    )


def level_perimeter(field_: GridField, level: float) -> float:
    """Length of grid edges cut by the level set (an upper estimate of its perimeter)."""
    above = field_.values > level
    cuts = np.count_nonzero(above[1:, :] != above[:-1, :]) + np.count_nonzero(above[:, 1:] != above[:, :-1])
    return cuts * field_.h


@dataclass(frozen=True)
class EquimeasurabilityReport:
    levels: np.ndarray
    area_in: np.ndarray
    area_out: np.ndarray
    tolerance: np.ndarray

    @property
    def ok(self):
        return bool(np.all(np.abs(self.area_in - self.area_out) <= self.tolerance))

    @property
    def worst_ratio(self):
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.abs(self.area_in - self.area_out) / self.tolerance
        return float(np.nanmax(r)) if r.size else 0.0


def check_equimeasurable(field_: GridField, count: int = 50) -> EquimeasurabilityReport:
    """Superlevel areas of the field against those of the ring-averaged profile."""
    prof = convex_rearrange(field_)
    top = float(field_.values.max())
    levels = np.linspace(0.0, top, count + 2)[1:-1]
    area_in = distribution(field_, levels)
    # the ring averages are nonincreasing; invert them level by level
    c = np.concatenate([[0.0], prof.centers, [prof.centers[-1] + prof.bin_width]])
    v = np.concatenate([[prof.means[0]], prof.means, [0.0]])
    rho = np.array([_crossing(c, v, t) for t in levels])
    area_out = prof.kappa * rho**2
    tol = np.array([2 * field_.h * level_perimeter(field_, t) for t in levels])
    return EquimeasurabilityReport(levels, area_in, area_out, tol)


def _crossing(c, v, t):
    # last rho with v(rho) > t on the piecewise-linear nonincreasing curve
    idx = np.flatnonzero(v > t)
    if idx.size == 0:
        return 0.0
    i = idx[-1]
    if i + 1 >= v.size:
        return float(c[-1])
    return float(c[i] + (v[i] - t) * (c[i + 1] - c[i]) / (v[i] - v[i + 1]))


def profile_table(profile: RadialProfile):
    """(rho, vbar) columns of the ring-averaged profile."""
    return profile.centers, profile.means
