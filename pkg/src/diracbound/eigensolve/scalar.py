"""Scalar variational problems behind the eigenvalue bounds.

Both problems are quadratic forms in a real function ``u``. On the warped
geometries their coefficients depend on the radial coordinate only, so the
extremal function is radial and the forms reduce to P1 finite elements on
``[a, b]`` with the volume density ``fiber_volume * s^(n-1)``. On the torus
``u`` is discretized on a periodic grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from ..errors import DimensionError, ParameterError, ResolutionError
from .hermitian import lanczos

_GX, _GW = np.polynomial.legendre.leggauss(8)


def _field(value, x, shape=None):
    """Evaluate a constant or a callable coefficient at the points ``x``."""
    shape = np.shape(x) if shape is None else shape
    if callable(value):
        return np.broadcast_to(np.asarray(value(x), dtype=float), shape)
    return np.full(shape, float(value))


def _boundary_value(coeff, component):
    if callable(coeff):
        return float(coeff(component))
    if isinstance(coeff, dict):
        return float(coeff[component.end])
    return float(coeff)


@dataclass
class RadialForms:
    """Assembled P1 matrices on a uniform radial mesh.

    ``stiffness`` and ``mass`` include the fiber volume; ``boundary`` is the
    diagonal of boundary areas at the mesh nodes (zero at singular ends).
    """

    nodes: np.ndarray
    stiffness: np.ndarray
    mass: np.ndarray
    boundary: np.ndarray
    potential: Callable

    @property
    def size(self) -> int:
        return self.nodes.size


def radial_forms(geometry, resolution: int) -> RadialForms:
    if resolution < 4:
        raise ResolutionError(f"resolution must be at least 4, got {resolution}")
    prof = geometry.profile()
    x = np.linspace(prof.a, prof.b, resolution + 1)
    h = np.diff(x)
    # quadrature points on every cell, P1 shape values and derivatives there
    xq = 0.5 * (x[:-1] + x[1:])[:, None] + 0.5 * h[:, None] * _GX[None, :]
    wq = 0.5 * h[:, None] * _GW[None, :] * prof.fiber_volume * prof.weight(xq)
    phi = np.stack([(x[1:, None] - xq) / h[:, None], (xq - x[:-1, None]) / h[:, None]])
    dphi = np.stack([-1.0 / h, 1.0 / h])

    n = x.size

    def assemble(local):
        A = np.zeros((n, n))
        for i in range(2):
            for j in range(2):
                idx = np.arange(resolution)
                A[idx + i, idx + j] += local[i, j]
        return A

    K = assemble(np.array([[np.sum(wq, axis=1) * dphi[i] * dphi[j] for j in range(2)]
                           for i in range(2)]))
    M = assemble(np.array([[np.sum(wq * phi[i] * phi[j], axis=1) for j in range(2)]
                           for i in range(2)]))

    def potential(V):
        v = _field(V, xq)
        return assemble(np.array([[np.sum(wq * v * phi[i] * phi[j], axis=1) for j in range(2)]
                                  for i in range(2)]))

    bnd = np.zeros(n)
    for comp in geometry.boundary():
        bnd[0 if comp.end == "left" else -1] += comp.area
    return RadialForms(x, K, M, bnd, potential)


@dataclass
class RobinResult:
    """Minimum of the Robin functional and its discrete minimizer."""

    value: float
    nodes: np.ndarray
    u: np.ndarray
    lhs: np.ndarray
    mass: np.ndarray

    def rayleigh(self, v) -> float:
        """Discrete Rayleigh quotient of the functional at ``v``."""
        v = np.asarray(v, dtype=float)
        return float(v @ self.lhs @ v / (v @ self.mass @ v))


def _torus_grid(geometry, resolution):
    L1, L2 = geometry.length("L1"), geometry.length("L2")
    n1 = resolution
    n2 = max(4, int(round(resolution * L2 / L1)))
    h1, h2 = L1 / n1, L2 / n2

    def lap1(m, h):
        return sp.diags([np.full(m, 2.0), np.full(m - 1, -1.0), np.full(m - 1, -1.0),
                         [-1.0], [-1.0]], [0, 1, -1, m - 1, -(m - 1)]) / h**2

    K = sp.kron(lap1(n1, h1), sp.eye(n2)) + sp.kron(sp.eye(n1), lap1(n2, h2))
    xs = (np.arange(n1) + 0.5) * h1
    ys = (np.arange(n2) + 0.5) * h2
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    return K.tocsr() * (h1 * h2), np.stack([X.ravel(), Y.ravel()]), h1 * h2


def _polish(A, M, value, u, steps=2):
    """Inverse iteration at the computed eigenvalue, then the Rayleigh quotient.

    The mass matrix is nearly singular at the poles of a sphere, which costs
    the Cholesky-based pencil solver a few digits; the Rayleigh quotient of
    the polished vector recovers them.
    """
    lu = sla.lu_factor(A - value * M, check_finite=False)
    for _ in range(steps):
        w = sla.lu_solve(lu, M @ u, check_finite=False)
        if not np.all(np.isfinite(w)):
            break
        u = w / np.linalg.norm(w)
    return float(u @ A @ u / (u @ M @ u)), u


def robin_min(geometry, gradCoeff: float, zeroOrder=0.0, boundaryCoeff=0.0,
              resolution: int = 256, return_vector: bool = False):
    """Minimum of ``int(g |du|^2 + V u^2) + int_bd beta u^2`` over ``int u^2 = 1``.

    Parameters
    ----------
    geometry : GeometrySpec
    gradCoeff : float
        Positive constant ``g``.
    zeroOrder : float or callable
        ``V`` as a constant or a function of the radial coordinate (of the
        point array ``(2, m)`` on the torus).
    boundaryCoeff : float, dict or callable
        ``beta`` as a constant, a mapping ``{"left": .., "right": ..}`` or a
        function of a ``BoundaryComponent``.
    resolution : int
        Radial cells (grid points per side on the torus).
    return_vector : bool
        Return a ``RobinResult`` holding the minimizer instead of the value.
    """
    if not gradCoeff > 0:
        raise ParameterError(f"gradCoeff must be positive, got {gradCoeff}")
    if geometry.kind == "torus":
        if resolution < 4:
            raise ResolutionError(f"resolution must be at least 4, got {resolution}")
        K, pts, cell = _torus_grid(geometry, resolution)
        n = K.shape[0]
        A = gradCoeff * K + sp.diags(_field(zeroOrder, pts, pts.shape[1:]) * cell)
        # the mass matrix is cell * I, so the pencil is a plain symmetric problem
        if n <= 4096:
            lam, U = sla.eigh(A.toarray() / cell, subset_by_index=[0, 0])
        else:
            lam, U = lanczos(lambda v: (A @ v) / cell, n, 1, "SA", tol=1e-11)
            lam, U = lam.real, U.real
        value, u = float(lam[0]), np.real(U[:, 0])
        lhs, M = A, sp.identity(n, format="csr") * cell
        nodes = pts
    else:
        forms = radial_forms(geometry, resolution)
        bnd = np.zeros(forms.size)
        for comp in geometry.boundary():
            i = 0 if comp.end == "left" else -1
            bnd[i] += comp.area * _boundary_value(boundaryCoeff, comp)
        lhs = gradCoeff * forms.stiffness + forms.potential(zeroOrder) + np.diag(bnd)
        M = forms.mass
        lam, U = sla.eigh(lhs, M, subset_by_index=[0, 0])
        value, u = _polish(lhs, M, float(lam[0]), U[:, 0])
        nodes = forms.nodes
    if not return_vector:
        return value
    u = u / math.copysign(np.sqrt(u @ (M @ u)), u.sum())
    return RobinResult(value, nodes, u, lhs, M)


def gamma_estimate(geometry, resolution: int = 256) -> float:
    """Discrete ``sup (Vol^(-2/n) int u^2 - S_n int |du|^2)`` over ``int u^2 + int_bd u^2 = 1``.

    The value is the top eigenvalue of the symmetric pencil on P1 elements.
    Meshes obtained by repeated doubling are nested, so the estimates of
    ``gamma_refinement`` never decrease.
    """
    from ..bounds import sobolev_constant

    n = geometry.dim
    if n < 3:
        raise DimensionError(f"the Sobolev quotient needs n >= 3, got n = {n}")
    forms = radial_forms(geometry, resolution)
    S = sobolev_constant(n)
    A = geometry.volume ** (-2.0 / n) * forms.mass - S * forms.stiffness
    B = forms.mass + np.diag(forms.boundary)
    m = forms.size
    lam = sla.eigh(A, B, eigvals_only=True, subset_by_index=[m - 1, m - 1])
    return float(lam[0])


def gamma_refinement(geometry, resolution: int = 32, levels: int = 4) -> list[float]:
    """``gamma_estimate`` on meshes with ``resolution * 2^k`` cells."""
    return [gamma_estimate(geometry, resolution * 2**k) for k in range(levels)]
