"""Boundary circles and the induced Dirac operator on them.

Every boundary in the two-dimensional catalog is a circle. A section on it is
sampled at ``K`` equispaced points and stored component-major as
``[t_1(theta_0..K-1), t_2(theta_0..K-1)]``. The induced operator is diagonal
in Fourier space:

* round circle of radius ``rho`` (disk, annulus), Cartesian frame: component 1
  in mode ``k`` has eigenvalue ``eps (k + 1/2) / rho`` and component 2 has
  ``eps (1/2 - k) / rho``;
* flat circle (cylinder end), frame along the axis: momentum
  ``p_k = 2 pi (k + delta/2) / C`` gives ``eps p_k`` and ``-eps p_k``.

``eps`` is ``+1`` when the outward normal points along the radial coordinate
and ``-1`` otherwise. The APS projector is applied exactly in this basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..errors import CapabilityError, NoBoundaryError, ResolutionError
from .types import HERMITIAN, OperatorMatrix


@dataclass(frozen=True)
class BoundaryCircle:
    kind: str          # "round" or "flat"
    eps: int
    scale: float       # radius for round circles, circumference for flat ones
    points: int
    spin: int = 0

    @property
    def length(self) -> float:
        return 2 * math.pi * self.scale if self.kind == "round" else self.scale

    @property
    def fiber_scale(self) -> float:
        """Value of the warping function ``s`` at this end."""
        return self.scale if self.kind == "round" else 1.0

    @cached_property
    def theta(self) -> np.ndarray:
        return 2 * math.pi * np.arange(self.points) / self.points

    @property
    def arclength(self) -> np.ndarray:
        return self.theta * self.length / (2 * math.pi)

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.points, self.length / self.points)

    @cached_property
    def k(self) -> np.ndarray:
        return np.fft.fftfreq(self.points, 1.0 / self.points).round().astype(int)

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        """Shape ``(2, K)``: eigenvalue of each component in each FFT slot."""
        if self.kind == "round":
            e1 = self.eps * (self.k + 0.5) / self.scale
            e2 = self.eps * (0.5 - self.k) / self.scale
        else:
            p = 2 * math.pi * (self.k + self.spin / 2) / self.scale
            e1, e2 = self.eps * p, -self.eps * p
        return np.stack([e1, e2])

    def radial_eigenvalue(self, mu: float) -> float:
        """Eigenvalue on the ``F`` component of a radial mode with fiber value ``mu``."""
        return self.eps * mu / self.fiber_scale

    # -- spectral calculus -------------------------------------------------
    def _phase(self):
        if self.kind == "flat" and self.spin:
            return np.exp(1j * math.pi * self.spin * self.theta / (2 * math.pi))
        return np.ones(self.points)

    def to_modes(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=complex).reshape(2, self.points)
        return np.fft.fft(t / self._phase(), axis=1) / self.points

    def from_modes(self, c) -> np.ndarray:
        return np.fft.ifft(c * self.points, axis=1) * self._phase()

    def apply(self, t) -> np.ndarray:
        c = self.to_modes(t)
        return self.from_modes(self.eigenvalues * c).ravel()

    def project(self, t, b: float) -> np.ndarray:
        """Orthogonal projection onto eigenvalues ``<= b``."""
        c = self.to_modes(t)
        return self.from_modes(np.where(self.eigenvalues <= b, c, 0)).ravel()

    def tangential_derivative(self, t) -> np.ndarray:
        """Derivative in the unit tangent direction (counterclockwise for round)."""
        c = self.to_modes(t)
        if self.kind == "round":
            ik = 1j * (self.k + 0.0) / self.scale
        else:
            ik = 1j * 2 * math.pi * (self.k + self.spin / 2) / self.scale
        return self.from_modes(ik * c).ravel()

    def nu(self) -> np.ndarray:
        """Clifford multiplication by the outward normal, shape ``(K, 2, 2)``."""
        K = self.points
        M = np.zeros((K, 2, 2), dtype=complex)
        if self.kind == "round":
            M[:, 0, 1] = 1j * np.exp(-1j * self.theta)
            M[:, 1, 0] = 1j * np.exp(1j * self.theta)
        else:
            M[:, 0, 1] = 1j
            M[:, 1, 0] = 1j
        return self.eps * M

    def tangent(self) -> np.ndarray:
        """Clifford multiplication by the unit tangent, shape ``(K, 2, 2)``."""
        K = self.points
        M = np.zeros((K, 2, 2), dtype=complex)
        if self.kind == "round":
            # T = (-sin, cos): i(-sin sigma_1 + cos sigma_2)
            M[:, 0, 1] = 1j * (-np.sin(self.theta) - 1j * np.cos(self.theta))
            M[:, 1, 0] = 1j * (-np.sin(self.theta) + 1j * np.cos(self.theta))
        else:
            M[:, 0, 1] = 1j * -1j
            M[:, 1, 0] = 1j * 1j
        return M

    def clifford(self, M, t) -> np.ndarray:
        t = np.asarray(t, dtype=complex).reshape(2, self.points)
        return np.einsum("kij,jk->ik", M, t).ravel()

    def inner(self, t1, t2) -> complex:
        t1 = np.asarray(t1).reshape(2, self.points)
        t2 = np.asarray(t2).reshape(2, self.points)
        return complex(np.sum(self.weights * np.sum(t1 * np.conj(t2), axis=0)))

    def matrix(self) -> np.ndarray:
        n = 2 * self.points
        return np.stack([self.apply(e) for e in np.eye(n)], axis=1)


def boundary_circles(geometry, points: int) -> list[BoundaryCircle]:
    if not geometry.has_boundary:
        raise NoBoundaryError(f"{geometry.kind} has no boundary")
    if points < 8:
        raise ResolutionError(f"resolution must be at least 8, got {points}")
    kind = geometry.kind
    if kind == "disk":
        return [BoundaryCircle("round", 1, geometry.length("radius"), points)]
    if kind == "annulus":
        return [BoundaryCircle("round", -1, geometry.length("r_in"), points),
                BoundaryCircle("round", 1, geometry.length("r_out"), points)]
    if kind == "cylinder":
        C = geometry.length("circumference")
        return [BoundaryCircle("flat", -1, C, points, geometry.spin),
                BoundaryCircle("flat", 1, C, points, geometry.spin)]
    raise CapabilityError(f"the induced boundary operator is not provided for {kind}")


def boundary_dirac(bundle, resolution: int) -> OperatorMatrix:
    """Matrix of the induced boundary Dirac operator, block-diagonal over circles."""
    geometry = getattr(bundle, "geometry", bundle)
    circles = boundary_circles(geometry, resolution)
    blocks = [c.matrix() for c in circles]
    n = sum(b.shape[0] for b in blocks)
    A = np.zeros((n, n), dtype=complex)
    weights = []
    nodes = []
    off = 0
    for c, b in zip(circles, blocks):
        m = b.shape[0]
        A[off:off + m, off:off + m] = b
        weights.append(np.tile(c.weights, 2))
        nodes.append(np.tile(c.theta, 2))
        off += m
    return OperatorMatrix(A, HERMITIAN, weights=np.concatenate(weights),
                          nodes=np.concatenate(nodes),
                          meta={"family": "boundary", "circles": circles})
