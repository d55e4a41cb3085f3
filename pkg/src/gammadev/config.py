"""Run configuration read from an INI file.

Sections and keys (all optional; defaults give the reference run)::

    [norm]        kind, n, and kind-specific keys: c | p, weights | Q | directions, values
    [well]        beta, a, bridge, mu
    [geometry]    R, and one of r or m
    [sweep]       eps  (comma list, strictly decreasing)
    [grid]        fine, layer, core, growth, h_max
    [tolerances]  grad_tol, el_tol, kkt_tol, mass_tol, trunc_tol, tol_delta
    [recovery]    y0 (comma list), delta
    [output]      dir, seed

Lists are comma separated; ``Q`` is row-major and ``directions`` is a flat
list of (x, y) pairs.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field, replace

from .anisotropy import AnisotropicNorm, from_spec, kappa
from .errors import ConfigurationError, ConstraintError
from .potential import DoubleWell
from .radial_solver import GridSpec, SolverTolerances

DEFAULT_EPS = (0.1, 0.05, 0.025, 0.0125)
OUT_ENV = "GAMMADEV_OUT"


def _floats(text):
    text = text.strip()
    if not text:
        return []
    try:
        return [float(x) for x in text.replace(";", ",").split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigurationError(f"cannot parse number list {text!r}") from exc


@dataclass(frozen=True)
class RunConfig:
    norm_spec: dict = field(default_factory=lambda: {"kind": "euclidean", "n": 2})
    beta: float = 1.5
    a: float = 0.5
    bridge: str = "even-poly"
    mu: float | None = None
    R: float = 1.0
    r: float | None = 0.5
    m: float | None = None
    eps: tuple = DEFAULT_EPS
    grid: GridSpec = GridSpec()
    tolerances: SolverTolerances = SolverTolerances()
    y0: tuple | None = None
    delta: float | None = None
    out_dir: str | None = None
    seed: int = 0

    def __post_init__(self):
        eps = tuple(float(e) for e in self.eps)
        if any(e <= 0 for e in eps):
            raise ConfigurationError("eps values must be positive")
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise ConfigurationError("eps list must be strictly decreasing")
        object.__setattr__(self, "eps", eps)
        if (self.r is None) == (self.m is None):
            raise ConfigurationError("geometry needs exactly one of r and m")
        if self.R <= 0:
            raise ConfigurationError("R must be positive")
        volume = self.volume
        if not -volume < self.mass < volume:
            raise ConstraintError(f"mass m = {self.mass} must lie strictly inside (-|Omega|, |Omega|) = (-{volume}, {volume})")

    def norm(self) -> AnisotropicNorm:
        return from_spec(self.norm_spec)

    def well(self) -> DoubleWell:
        return DoubleWell(beta=self.beta, a=self.a, bridge=self.bridge, mu_const=self.mu)

    @property
    def n(self):
        return int(self.norm_spec.get("n", 2))

    @property
    def volume(self):
        return kappa(self.norm()) * self.R**self.n

    @property
    def mass(self):
        if self.m is not None:
            return float(self.m)
        return self.volume - 2 * kappa(self.norm()) * self.r**self.n

    @property
    def radius(self):
        if self.r is not None:
            return float(self.r)
        return ((self.volume - self.m) / (2 * kappa(self.norm()))) ** (1 / self.n)

    def output_dir(self, override=None):
        return override or self.out_dir or os.environ.get(OUT_ENV) or "gammadev-out"

    def with_eps(self, eps):
        return replace(self, eps=tuple(eps))

    def echo(self):
        """Ordered key/value pairs sufficient to rebuild the run."""
        items = [("norm." + k, _fmt(v)) for k, v in sorted(self.norm_spec.items())]
        items += [
            ("well.beta", _fmt(self.beta)),
            ("well.a", _fmt(self.a)),
            ("well.bridge", self.bridge),
        ]
        if self.mu is not None:
            items.append(("well.mu", _fmt(self.mu)))
        items.append(("geometry.R", _fmt(self.R)))
        items.append(("geometry.r", _fmt(self.r)) if self.r is not None else ("geometry.m", _fmt(self.m)))
        items.append(("sweep.eps", _fmt(list(self.eps))))
        for k in ("fine", "layer", "core", "growth", "h_max"):
            items.append((f"grid.{k}", _fmt(getattr(self.grid, k))))
        for k in ("grad_tol", "el_tol", "kkt_tol", "mass_tol", "trunc_tol", "tol_delta"):
            items.append((f"tolerances.{k}", _fmt(getattr(self.tolerances, k))))
        if self.y0 is not None:
            items.append(("recovery.y0", _fmt(list(self.y0))))
        if self.delta is not None:
            items.append(("recovery.delta", _fmt(self.delta)))
        items.append(("output.seed", str(self.seed)))
        return items


def _fmt(v):
    if isinstance(v, (list, tuple)):
        return ",".join(_fmt(x) for x in v)
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


_NORM_LISTS = {"weights", "Q", "directions", "values"}


def load_config(path) -> RunConfig:
    parser = configparser.ConfigParser()
    parser.optionxform = str
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigurationError(f"malformed config {path}: {exc}") from exc
    return config_from_parser(parser)


def config_from_parser(parser: configparser.ConfigParser) -> RunConfig:
    kw = {}
    known = {"norm", "well", "geometry", "sweep", "grid", "tolerances", "recovery", "output"}
    unknown = set(parser.sections()) - known
    if unknown:
        raise ConfigurationError(f"unknown config sections: {sorted(unknown)}")
    try:
        if parser.has_section("norm"):
            spec = {}
            for key, val in parser.items("norm"):
                if key == "kind":
                    spec[key] = val.strip()
                elif key == "n":
                    spec[key] = int(val)
                elif key in _NORM_LISTS:
                    vals = _floats(val)
                    spec[key] = [vals[i : i + 2] for i in range(0, len(vals), 2)] if key == "directions" else vals
                else:
                    spec[key] = float(val)
            spec.setdefault("kind", "euclidean")
            spec.setdefault("n", 2)
            kw["norm_spec"] = spec
        if parser.has_section("well"):
            s = parser["well"]
            kw["beta"] = s.getfloat("beta", 1.5)
            kw["a"] = s.getfloat("a", 0.5)
            kw["bridge"] = s.get("bridge", "even-poly").strip()
            if "mu" in s:
                kw["mu"] = s.getfloat("mu")
        if parser.has_section("geometry"):
            s = parser["geometry"]
            kw["R"] = s.getfloat("R", 1.0)
            if "m" in s and "r" in s:
                raise ConfigurationError("geometry needs exactly one of r and m")
            if "m" in s:
                kw["m"] = s.getfloat("m")
                kw["r"] = None
            else:
                kw["r"] = s.getfloat("r", 0.5)
        if parser.has_section("sweep"):
            kw["eps"] = tuple(_floats(parser["sweep"].get("eps", "")))
        if parser.has_section("grid"):
            s = parser["grid"]
            g = GridSpec()
            kw["grid"] = GridSpec(
                fine=s.getint("fine", g.fine),
                layer=s.getint("layer", g.layer),
                core=s.getfloat("core", g.core),
                growth=s.getfloat("growth", g.growth),
                h_max=s.getfloat("h_max", g.h_max),
            )
        if parser.has_section("tolerances"):
            s = parser["tolerances"]
            t = SolverTolerances()
            kw["tolerances"] = SolverTolerances(
                **{k: s.getfloat(k, getattr(t, k)) for k in ("grad_tol", "el_tol", "kkt_tol", "mass_tol", "trunc_tol", "tol_delta")}
            )
        if parser.has_section("recovery"):
            s = parser["recovery"]
            if "y0" in s:
                kw["y0"] = tuple(_floats(s["y0"]))
            if "delta" in s:
                kw["delta"] = s.getfloat("delta")
        if parser.has_section("output"):
            s = parser["output"]
            if "dir" in s:
                kw["out_dir"] = s["dir"].strip()
            kw["seed"] = s.getint("seed", 0)
    except ValueError as exc:
        if isinstance(exc, (ConfigurationError, ConstraintError)):
            raise
        raise ConfigurationError(str(exc)) from exc
    return RunConfig(**kw)
