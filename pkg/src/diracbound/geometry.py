"""Catalog of model geometries with closed-form metric invariants.

Every geometry except the flat torus is a warped product over an interval,
``dx^2 + s(x)^2 g_fiber``; :meth:`GeometrySpec.profile` exposes that
reduction, which the radial operators and scalar solvers work on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import CapabilityError, DimensionError, ParameterError

KINDS = ("torus", "sphere", "disk", "annulus", "cylinder", "ball")


@dataclass(frozen=True)
class BoundaryComponent:
    """One boundary circle (or sphere) at an end of the reduced interval."""

    end: str            # "left" or "right"
    area: float
    mean_curvature: float
    fiber_scale: float  # s(x) at this end


def _as_array(x):
    # complex arguments are allowed so that Taylor data can be sampled off the axis
    x = np.asarray(x)
    return x if np.iscomplexobj(x) else x.astype(float)


@dataclass(frozen=True)
class Profile:
    """Warped-product data ``dx^2 + s(x)^2 g_fiber`` on ``[a, b]``."""

    a: float
    b: float
    dim: int
    fiber_volume: float
    kind: str
    rho: float = 1.0
    singular: tuple = (False, False)

    def s(self, x):
        x = _as_array(x)
        if self.kind == "sin":
            return self.rho * np.sin(x / self.rho)
        if self.kind == "linear":
            return x
        return np.ones_like(x)

    def ds(self, x):
        x = _as_array(x)
        if self.kind == "sin":
            return np.cos(x / self.rho)
        if self.kind == "linear":
            return np.ones_like(x)
        return np.zeros_like(x)

    def weight(self, x):
        """Volume density ``s^(n-1)`` (fiber volume factored out)."""
        return self.s(x) ** (self.dim - 1)

    def log_weight_derivative(self, x):
        return (self.dim - 1) * self.ds(x) / self.s(x)


@dataclass(frozen=True)
class GeometrySpec:
    kind: str
    params: dict = field(default_factory=dict)
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown geometry kind {self.kind!r}")
        _validate(self.kind, self.params)

    def __hash__(self):
        return hash((self.kind, tuple(sorted(_freeze(self.params).items())), self.scale))

    # -- basic data --------------------------------------------------------
    @property
    def dim(self) -> int:
        if self.kind in ("sphere", "ball"):
            return int(self.params.get("n", 2 if self.kind == "sphere" else 3))
        return 2

    def length(self, name: str) -> float:
        return float(self.params[name]) * self.scale

    @property
    def spin(self):
        if self.kind == "torus":
            return tuple(self.params.get("spin", (0, 0)))
        return int(self.params.get("spin", 0))

    @property
    def has_boundary(self) -> bool:
        return self.kind in ("disk", "annulus", "cylinder", "ball")

    @property
    def scalar_curvature(self) -> float:
        if self.kind == "sphere":
            n = self.dim
            return n * (n - 1) / self.length("radius") ** 2
        return 0.0

    @property
    def volume(self) -> float:
        k = self.kind
        if k == "torus":
            return self.length("L1") * self.length("L2")
        if k == "disk":
            return math.pi * self.length("radius") ** 2
        if k == "annulus":
            return math.pi * (self.length("r_out") ** 2 - self.length("r_in") ** 2)
        if k == "cylinder":
            return self.length("length") * self.length("circumference")
        if k == "ball":
            return 4.0 / 3.0 * math.pi * self.length("radius") ** 3
        rho = self.length("radius")
        return 4 * math.pi * rho**2 if self.dim == 2 else 2 * math.pi**2 * rho**3

    def boundary(self) -> list[BoundaryComponent]:
        k = self.kind
        if k == "disk":
            r = self.length("radius")
            return [BoundaryComponent("right", 2 * math.pi * r, 1.0 / r, r)]
        if k == "annulus":
            ri, ro = self.length("r_in"), self.length("r_out")
            return [BoundaryComponent("left", 2 * math.pi * ri, -1.0 / ri, ri),
                    BoundaryComponent("right", 2 * math.pi * ro, 1.0 / ro, ro)]
        if k == "cylinder":
            c = self.length("circumference")
            return [BoundaryComponent("left", c, 0.0, 1.0),
                    BoundaryComponent("right", c, 0.0, 1.0)]
        if k == "ball":
            r = self.length("radius")
            return [BoundaryComponent("right", 4 * math.pi * r * r, 1.0 / r, r)]
        return []

    @property
    def boundary_area(self) -> float:
        return sum(c.area for c in self.boundary())

    @property
    def total_mean_curvature(self) -> float:
        """Integral of H over the boundary."""
        return sum(c.area * c.mean_curvature for c in self.boundary())

    def invariants(self) -> "GeometricInvariants":
        return GeometricInvariants(
            volume=self.volume,
            boundaryArea=self.boundary_area,
            scalarCurvature=self.scalar_curvature,
            meanCurvature=tuple(c.mean_curvature for c in self.boundary()),
            hasBoundary=self.has_boundary,
        )

    def profile(self) -> Profile:
        k = self.kind
        if k == "torus":
            raise CapabilityError("the flat torus has no warped-product reduction")
        if k == "disk":
            return Profile(0.0, self.length("radius"), 2, 2 * math.pi, "linear",
                           singular=(True, False))
        if k == "annulus":
            return Profile(self.length("r_in"), self.length("r_out"), 2, 2 * math.pi, "linear")
        if k == "cylinder":
            return Profile(0.0, self.length("length"), 2, self.length("circumference"), "flat")
        if k == "ball":
            return Profile(0.0, self.length("radius"), 3, 4 * math.pi, "linear",
                           singular=(True, False))
        rho = self.length("radius")
        fiber = 2 * math.pi if self.dim == 2 else 4 * math.pi
        return Profile(0.0, math.pi * rho, self.dim, fiber, "sin", rho=rho,
                       singular=(True, True))

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        k = self.kind
        if k == "disk":
            return bool(np.hypot(*x[:2]) <= self.length("radius") * (1 + 1e-12))
        if k == "annulus":
            r = np.hypot(*x[:2])
            return bool(self.length("r_in") * (1 - 1e-12) <= r <= self.length("r_out") * (1 + 1e-12))
        if k == "cylinder":
            return bool(0 <= x[0] <= self.length("length"))
        if k == "ball":
            return bool(np.linalg.norm(x) <= self.length("radius") * (1 + 1e-12))
        return True


@dataclass(frozen=True)
class GeometricInvariants:
    volume: float
    boundaryArea: float
    scalarCurvature: float
    meanCurvature: tuple
    hasBoundary: bool


def _freeze(params):
    return {k: tuple(v) if isinstance(v, (list, tuple)) else v for k, v in params.items()}


_REQUIRED = {
    "torus": ("L1", "L2"),
    "sphere": ("radius",),
    "disk": ("radius",),
    "annulus": ("r_in", "r_out"),
    "cylinder": ("length", "circumference"),
    "ball": ("radius",),
}
_OPTIONAL = {"torus": ("spin",), "sphere": ("n",), "cylinder": ("spin",), "ball": ("n",)}


def _validate(kind, params):
    allowed = set(_REQUIRED[kind]) | set(_OPTIONAL.get(kind, ()))
    unknown = set(params) - allowed
    if unknown:
        raise ParameterError(f"unknown parameters for {kind}: {sorted(unknown)}")
    for name in _REQUIRED[kind]:
        if name not in params:
            raise ParameterError(f"{kind} needs parameter {name!r}")
        v = float(params[name])
        if not (v > 0 and math.isfinite(v)):
            raise ParameterError(f"{kind}.{name} must be positive, got {v}")
    if kind == "annulus" and not params["r_in"] < params["r_out"]:
        raise ParameterError("annulus needs r_in < r_out")
    if kind == "torus" and "spin" in params:
        spin = tuple(params["spin"])
        if len(spin) != 2 or any(d not in (0, 1) for d in spin):
            raise ParameterError(f"torus spin structure must be in {{0,1}}^2, got {spin}")
    if kind == "cylinder" and params.get("spin", 0) not in (0, 1):
        raise ParameterError("cylinder spin structure must be 0 or 1")
    if kind == "sphere" and int(params.get("n", 2)) not in (2, 3):
        raise DimensionError("sphere dimension must be 2 or 3")
    if kind == "ball" and int(params.get("n", 3)) != 3:
        raise DimensionError("ball is only provided in dimension 3")


def make_geometry(kind: str, **params) -> GeometrySpec:
    if kind == "torus":
        params.setdefault("spin", (0, 0))
        params["spin"] = tuple(int(d) for d in params["spin"])
    return GeometrySpec(kind, params)


def rescale(spec: GeometrySpec, sigma: float) -> GeometrySpec:
    """Homothety ``g -> sigma^2 g``."""
    if not (sigma > 0 and math.isfinite(sigma)):
        raise ParameterError(f"sigma must be positive, got {sigma}")
    return replace(spec, scale=spec.scale * sigma)


@dataclass(frozen=True)
class DiracBundleSpec:
    """A catalog geometry with its spinor bundle, optionally twisted by a line bundle.

    ``twist`` is the constant curvature B of the line bundle
    (``R^twist_12 = i B``). Only the torus supports it; the flux
    ``B * area / 2 pi`` must be an integer.
    """

    geometry: GeometrySpec
    twist: float = 0.0

    def __post_init__(self):
        if self.twist:
            if self.geometry.kind != "torus":
                raise CapabilityError("line-bundle twists are only supported on the torus")
            flux = self.twist * self.geometry.volume / (2 * math.pi)
            if abs(flux - round(flux)) > 1e-9:
                raise ParameterError(f"twist flux {flux} is not an integer")

    @property
    def dim(self) -> int:
        return self.geometry.dim

    @property
    def flux(self) -> int:
        return int(round(self.twist * self.geometry.volume / (2 * math.pi)))

    @property
    def kappa(self) -> float:
        """Smallest eigenvalue of the curvature endomorphism (constant on the catalog)."""
        return self.geometry.scalar_curvature / 4.0 - abs(self.twist)

    def rescaled(self, sigma: float) -> "DiracBundleSpec":
        return DiracBundleSpec(rescale(self.geometry, sigma), self.twist / sigma**2)


def bundle(kind: str, twist: float = 0.0, **params) -> DiracBundleSpec:
    return DiracBundleSpec(make_geometry(kind, **params), twist)
