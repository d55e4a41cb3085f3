"""Anisotropic gauges, their polars, and Wulff-ball geometry.

An :class:`AnisotropicNorm` is an even, convex, positively 1-homogeneous
function on R^n.  Its polar ``Phi°(eta) = sup eta.xi / Phi(xi)`` defines the
Wulff balls ``{x : Phi°(x - x0) < rho}``, whose volume is ``kappa * rho**n``
and whose Phi-perimeter is ``n * kappa * rho**(n-1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, ConstraintError, DomainError, NumericalError

KINDS = ("euclidean", "scaled-euclidean", "weighted-p-norm", "ellipse", "sampled")

MESH_2D = 2**12
MESH_3D = 2**14


def unit_ball_volume(n):
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def direction_mesh(n, size=None):
    """Unit vectors covering S^{n-1}: uniform angles for n=2, Fibonacci sphere for n=3."""
    if n == 2:
        size = size or MESH_2D
        theta = 2 * np.pi * np.arange(size) / size
        return np.column_stack([np.cos(theta), np.sin(theta)])
    if n == 3:
        size = size or MESH_3D
        k = np.arange(size) + 0.5
        zc = 1 - 2 * k / size
        phi = np.pi * (1 + 5**0.5) * k
        s = np.sqrt(1 - zc**2)
        return np.column_stack([s * np.cos(phi), s * np.sin(phi), zc])
    raise ConfigurationError(f"direction meshes are only provided for n in (2, 3), got n={n}")


def _as_points(x, n):
    arr = np.asarray(x, dtype=float)
    if arr.shape[-1] != n:
        raise DomainError(f"expected vectors of dimension {n}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("non-finite vector passed to a norm evaluator")
    return arr


@dataclass(frozen=True, eq=False)
class AnisotropicNorm:
    """Gauge Phi with closed-form or sampled polar.

    Use the constructors :func:`euclidean`, :func:`scaled_euclidean`,
    :func:`weighted_p_norm`, :func:`ellipse` and :func:`sampled` rather than
    instantiating directly.  Construction estimates the growth constants
    ``c_phi <= Phi(u) <= C_phi`` over a direction mesh and rejects gauges that
    fail a sampled midpoint-convexity test.
    """

    kind: str
    n: int
    params: dict = field(default_factory=dict)
    c_phi: float = field(init=False, default=0.0)
    C_phi: float = field(init=False, default=0.0)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown norm kind {self.kind!r}")
        if self.n < 2:
            raise ConfigurationError("dimension must be at least 2")
        mesh = direction_mesh(self.n) if self.n in (2, 3) else None
        if mesh is None:
            if self.kind not in ("euclidean", "scaled-euclidean"):
                raise ConfigurationError(f"kind {self.kind!r} needs n in (2, 3)")
            c = self.params.get("c", 1.0)
            object.__setattr__(self, "c_phi", c)
            object.__setattr__(self, "C_phi", c)
            return
        vals = self._value(mesh)
        object.__setattr__(self, "c_phi", float(vals.min()))
        object.__setattr__(self, "C_phi", float(vals.max()))
        if self.c_phi <= 0:
            raise ConfigurationError("norm vanishes on a nonzero direction")
        self._check_convexity()

    # evaluation -------------------------------------------------------

    def _value(self, xi):
        p = self.params
        if self.kind == "euclidean":
            return np.linalg.norm(xi, axis=-1)
        if self.kind == "scaled-euclidean":
            return p["c"] * np.linalg.norm(xi, axis=-1)
        if self.kind == "weighted-p-norm":
            return _pnorm(np.abs(xi) * p["weights"], p["p"])
        if self.kind == "ellipse":
            return np.sqrt(np.einsum("...i,ij,...j->...", xi, p["Q"], xi))
        return _polygon_gauge(xi, p["vertices"], p["vertex_angles"])

    def _polar(self, eta):
        p = self.params
        if self.kind == "euclidean":
            return np.linalg.norm(eta, axis=-1)
        if self.kind == "scaled-euclidean":
            return np.linalg.norm(eta, axis=-1) / p["c"]
        if self.kind == "weighted-p-norm":
            return _pnorm(np.abs(eta) / p["weights"], _conjugate(p["p"]))
        if self.kind == "ellipse":
            return np.sqrt(np.einsum("...i,ij,...j->...", eta, p["Qinv"], eta))
        return numeric_polar(self, eta, p["polar_mesh"])

    def __call__(self, xi):
        return eval_norm(self, xi)

    def polar(self, eta):
        return eval_polar(self, eta)

    @property
    def has_closed_polar(self):
        return self.kind != "sampled"

    def _check_convexity(self, pairs=2000, seed=0):
        rng = np.random.default_rng(seed)
        a = rng.normal(size=(pairs, self.n))
        b = rng.normal(size=(pairs, self.n))
        lhs = self._value(0.5 * (a + b))
        rhs = 0.5 * (self._value(a) + self._value(b))
        if np.any(lhs > rhs + 1e-10 * (1 + rhs)):
            raise ConfigurationError(f"{self.kind} gauge failed the midpoint convexity test")

    def describe(self):
        out = {"kind": self.kind, "n": self.n}
        for key in ("c", "p"):
            if key in self.params:
                out[key] = self.params[key]
        if "weights" in self.params:
            out["weights"] = list(map(float, self.params["weights"]))
        if "Q" in self.params:
            out["Q"] = np.asarray(self.params["Q"]).ravel().tolist()
        return out


def _conjugate(p):
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1)


def _pnorm(x, p):
    if math.isinf(p):
        return np.max(x, axis=-1)
    if p == 1:
        return np.sum(x, axis=-1)
    scale = np.max(x, axis=-1)
    safe = np.where(scale > 0, scale, 1.0)
    return scale * np.sum((x / safe[..., None]) ** p, axis=-1) ** (1 / p)


def _cross(u, v):
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def _polygon_gauge(xi, vertices, angles):
    """Gauge of the convex polygon with the given vertices (sorted by angle)."""
    ang = np.mod(np.arctan2(xi[..., 1], xi[..., 0]), 2 * np.pi)
    k = np.searchsorted(angles, ang, side="right") - 1
    k = np.mod(k, len(angles))
    p0 = vertices[k]
    p1 = vertices[(k + 1) % len(angles)]
    det = _cross(p0, p1)
    return (_cross(xi, p1) + _cross(p0, xi)) / det


# constructors ---------------------------------------------------------

def euclidean(n=2):
    return AnisotropicNorm("euclidean", n)


def scaled_euclidean(c, n=2):
    if not c > 0:
        raise ConfigurationError("scale c must be positive")
    return AnisotropicNorm("scaled-euclidean", n, {"c": float(c)})


def weighted_p_norm(p, weights):
    w = np.asarray(weights, dtype=float)
    if p < 1:
        raise ConfigurationError("p-norms need p >= 1")
    if np.any(w <= 0):
        raise ConfigurationError("weights must be positive")
    return AnisotropicNorm("weighted-p-norm", len(w), {"p": float(p), "weights": w})


def ellipse(Q):
    Q = np.asarray(Q, dtype=float)
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1] or not np.allclose(Q, Q.T):
        raise ConfigurationError("ellipse matrix must be square and symmetric")
    if np.linalg.eigvalsh(Q).min() <= 0:
        raise ConfigurationError("ellipse matrix must be positive definite")
    return AnisotropicNorm("ellipse", Q.shape[0], {"Q": Q, "Qinv": np.linalg.inv(Q)})


def sampled(directions, values, mesh_size=MESH_2D):
    """Gauge interpolated from values on a table of planar directions.

    The unit Phi-ball is taken to be the polygon through ``u_k / values_k``,
    so Phi is piecewise linear in the direction and exactly 1-homogeneous.
    A symmetric table is completed automatically (Phi is even).
    """
    d = np.asarray(directions, dtype=float)
    v = np.asarray(values, dtype=float)
    if d.ndim != 2 or d.shape[1] != 2:
        raise ConfigurationError("sampled gauges are supported in n=2 only")
    if len(d) == 0 or len(d) != len(v):
        raise ConfigurationError("sampled gauge needs a non-empty direction table")
    if np.any(v <= 0):
        raise ConfigurationError("sampled values must be positive")
    d = d / np.linalg.norm(d, axis=1)[:, None]
    pts = np.vstack([d / v[:, None], -d / v[:, None]])
    ang = np.mod(np.arctan2(pts[:, 1], pts[:, 0]), 2 * np.pi)
    order = np.argsort(ang)
    ang, pts = ang[order], pts[order]
    keep = np.concatenate([[True], np.diff(ang) > 1e-14])
    ang, pts = ang[keep], pts[keep]
    if len(ang) < 3:
        raise ConfigurationError("sampled gauge needs at least two independent directions")
    if mesh_size < 1:
        raise ConfigurationError("empty direction mesh for the sampled polar")
    vert_dirs = pts / np.linalg.norm(pts, axis=1)[:, None]
    polar_mesh = np.vstack([direction_mesh(2, mesh_size), vert_dirs])
    return AnisotropicNorm(
        "sampled",
        2,
        {"vertices": pts, "vertex_angles": ang, "polar_mesh": polar_mesh},
    )


def from_spec(spec):
    """Build a norm from a mapping ``{kind, n, ...parameters}``."""
    kind = spec.get("kind", "euclidean")
    n = int(spec.get("n", 2))
    if kind == "euclidean":
        return euclidean(n)
    if kind == "scaled-euclidean":
        return scaled_euclidean(float(spec["c"]), n)
    if kind == "weighted-p-norm":
        weights = spec.get("weights", [1.0] * n)
        return weighted_p_norm(float(spec["p"]), weights)
    if kind == "ellipse":
        q = np.asarray(spec["Q"], dtype=float)
        return ellipse(q.reshape(n, n))
    if kind == "sampled":
        return sampled(spec["directions"], spec["values"])
    raise ConfigurationError(f"unknown norm kind {kind!r}")


# operations -----------------------------------------------------------

def numeric_polar(norm, eta, mesh):
    """``max_k eta.xi_k / Phi(xi_k)`` over a direction mesh."""
    mesh = np.asarray(mesh, dtype=float)
    if mesh.size == 0:
        raise ConfigurationError("empty direction mesh")
    eta = np.asarray(eta, dtype=float)
    scaled = mesh / norm._value(mesh)[:, None]
    flat = eta.reshape(-1, norm.n)
    out = np.empty(len(flat))
    for start in range(0, len(flat), 512):
        out[start:start + 512] = (flat[start:start + 512] @ scaled.T).max(axis=1)
    out = np.maximum(out, 0.0)
    return out.reshape(eta.shape[:-1]) if eta.ndim > 1 else float(out[0])


def eval_norm(norm, xi):
    """Phi(xi); vectorised over leading axes."""
    xi = _as_points(xi, norm.n)
    val = norm._value(xi)
    return float(val) if np.ndim(val) == 0 else val


def eval_polar(norm, eta):
    """Phi°(eta), closed form where available, mesh supremum otherwise."""
    eta = _as_points(eta, norm.n)
    val = norm._polar(eta)
    return float(val) if np.ndim(val) == 0 else val


def polar_gradient(norm, eta, h=1e-6):
    """Gradient of Phi° by central differences (Phi° is 1-homogeneous)."""
    eta = np.asarray(eta, dtype=float)
    grads = []
    for i in range(norm.n):
        e = np.zeros(norm.n)
        e[i] = h
        grads.append((norm._polar(eta + e) - norm._polar(eta - e)) / (2 * h))
    return np.stack(grads, axis=-1)


def _breakpoints_2d(norm):
    pts = list(np.pi / 4 * np.arange(9))
    if norm.kind == "sampled":
        # Phi kinks at vertex directions, Phi° at edge normals
        v = norm.params["vertices"]
        edge = np.roll(v, -1, axis=0) - v
        normal_ang = np.mod(np.arctan2(-edge[:, 0], edge[:, 1]), 2 * np.pi)
        pts.extend(norm.params["vertex_angles"])
        pts.extend(normal_ang)
    return np.unique(np.clip(pts, 0, 2 * np.pi))


def sphere_integral(norm, func, rtol=1e-11, max_level=10):
    """Integrate ``func(theta)`` over S^{n-1} for n in (2, 3).

    Composite Gauss-Legendre on panels whose edges include the likely kink
    directions of the gauge; the panel count doubles until two successive
    estimates agree to ``rtol``.
    """
    n = norm.n
    x, w = np.polynomial.legendre.leggauss(12)
    prev = None
    for level in range(max_level):
        panels = 2**level
        if n == 2:
            bp = _breakpoints_2d(norm)
            edges = np.concatenate(
                [np.linspace(a, b, panels + 1)[:-1] for a, b in zip(bp[:-1], bp[1:]) if b > a]
                + [[2 * np.pi]]
            )
            lo, hi = edges[:-1], edges[1:]
            th = (0.5 * (hi - lo)[:, None] * x[None, :] + 0.5 * (hi + lo)[:, None]).ravel()
            wt = (0.5 * (hi - lo)[:, None] * w[None, :]).ravel()
            pts = np.column_stack([np.cos(th), np.sin(th)])
        elif n == 3:
            ze = np.linspace(-1, 1, 4 * panels + 1)
            pe = np.linspace(0, 2 * np.pi, 8 * panels + 1)
            zc = (0.5 * np.diff(ze)[:, None] * x + 0.5 * (ze[1:] + ze[:-1])[:, None]).ravel()
            zw = (0.5 * np.diff(ze)[:, None] * w).ravel()
            pc = (0.5 * np.diff(pe)[:, None] * x + 0.5 * (pe[1:] + pe[:-1])[:, None]).ravel()
            pw = (0.5 * np.diff(pe)[:, None] * w).ravel()
            Z, P = np.meshgrid(zc, pc, indexing="ij")
            S = np.sqrt(1 - Z**2)
            pts = np.stack([S * np.cos(P), S * np.sin(P), Z], axis=-1).reshape(-1, 3)
            wt = np.outer(zw, pw).ravel()
        else:
            raise ConfigurationError("sphere quadrature is only provided for n in (2, 3)")
        est = float(np.dot(wt, func(pts)))
        if prev is not None and abs(est - prev) <= rtol * abs(est):
            return est
        prev = est
    raise NumericalError(f"sphere quadrature did not reach rtol={rtol}", estimate=prev)


def kappa(norm):
    """Volume of the unit polar ball ``{Phi° < 1}``."""
    cached = norm.__dict__.get("_kappa")
    if cached is not None:
        return cached
    n = norm.n
    if norm.kind == "euclidean":
        val = unit_ball_volume(n)
    elif norm.kind == "scaled-euclidean":
        val = unit_ball_volume(n) * norm.params["c"] ** n
    else:
        val = sphere_integral(norm, lambda th: norm._polar(th) ** (-n)) / n
    norm.__dict__["_kappa"] = val
    return val


def gradient_moment(norm):
    """``int_{S^{n-1}} |grad Phi°|^2 Phi°^{-n}``.

    Multiplying by ``int f'(rho)^2 rho^{n-1} d rho`` gives the Euclidean
    Dirichlet integral of ``f(Phi°(x))``.
    """
    n = norm.n
    if norm.kind == "euclidean":
        return n * unit_ball_volume(n)
    if norm.kind == "scaled-euclidean":
        c = norm.params["c"]
        return n * unit_ball_volume(n) * c ** (n - 2)

    def integrand(th):
        g = polar_gradient(norm, th)
        return np.sum(g**2, axis=-1) * norm._polar(th) ** (-n)

    return sphere_integral(norm, integrand, rtol=1e-9)


def wulff_perimeter(norm, r):
    """Phi-perimeter of a Wulff ball of radius r."""
    if not r > 0:
        raise DomainError("Wulff radius must be positive")
    return norm.n * kappa(norm) * r ** (norm.n - 1)


def wulff_volume(norm, r):
    if r < 0:
        raise DomainError("Wulff radius must be nonnegative")
    return kappa(norm) * r**norm.n


def radius_from_mass(norm, volume_omega, m):
    """Radius r with ``2 kappa r^n = |Omega| - m``."""
    if not -volume_omega < m < volume_omega:
        raise ConstraintError(f"mass m={m} must lie strictly inside (-|Omega|, |Omega|)")
    return ((volume_omega - m) / (2 * kappa(norm))) ** (1 / norm.n)


def mass_from_radius(norm, volume_omega, r):
    """Inverse of :func:`radius_from_mass`."""
    return volume_omega - 2 * kappa(norm) * r**norm.n


def wulff_boundary(norm, r, center=None, size=None):
    """Points on the boundary of ``B^{Phi°}_r(center)`` along a direction mesh."""
    u = direction_mesh(norm.n, size)
    pts = r * u / norm._polar(u)[:, None]
    if center is not None:
        pts = pts + np.asarray(center, dtype=float)
    return pts


def bipolar(norm, xi, mesh=None):
    """``(Phi°)°(xi) = max_k xi.eta_k / Phi°(eta_k)`` over a direction mesh."""
    mesh = direction_mesh(norm.n) if mesh is None else np.asarray(mesh, dtype=float)
    if mesh.size == 0:
        raise ConfigurationError("empty direction mesh")
    scaled = mesh / norm._polar(mesh)[:, None]
    flat = _as_points(xi, norm.n).reshape(-1, norm.n)
    out = np.maximum((flat @ scaled.T).max(axis=1), 0.0)
    return out.reshape(np.shape(xi)[:-1]) if np.ndim(xi) > 1 else float(out[0])


def boundary_perimeter(norm, r, size=2**14):
    """``int_{boundary} Phi(nu) dH^1`` of ``B^{Phi°}_r`` via its inscribed polygon (n = 2)."""
    if norm.n != 2:
        raise DomainError("boundary integral is implemented for n = 2")
    if r <= 0:
        raise DomainError("radius must be positive")
    pts = wulff_boundary(norm, r, size=size)
    edges = np.roll(pts, -1, axis=0) - pts
    # outward normal times length is the edge rotated clockwise
    normals = np.column_stack([edges[:, 1], -edges[:, 0]])
    return float(np.sum(norm._value(normals)))


def grid_volume(norm, r=1.0, size=2000):
    """Cell-count volume of ``B^{Phi°}_r`` on a uniform grid (n = 2)."""
    if norm.n != 2:
        raise DomainError("grid volume is implemented for n = 2")
    reach = float(np.max(1.0 / norm._polar(direction_mesh(2, 4096)))) * r * 1.01
    h = 2 * reach / size
    x = -reach + (np.arange(size) + 0.5) * h
    X, Y = np.meshgrid(x, x, indexing="ij")
    inside = norm._polar(np.stack([X.ravel(), Y.ravel()], axis=-1)) <= r
    return float(np.count_nonzero(inside) * h * h)
