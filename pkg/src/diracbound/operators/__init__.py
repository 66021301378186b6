"""Discrete Dirac operators, connection Laplacians and boundary operators."""

from __future__ import annotations

import numpy as np

from ..errors import CapabilityError, ShapeError
from . import torus
from .boundary import BoundaryCircle, boundary_circles, boundary_dirac
from .conditions import apply_bc, trace_constraints
from .radial import Closure, RadialMode, mode_multiplicity, mode_mu, mode_range
from .types import (GENERAL, HERMITIAN, SKEW_HERMITIAN, BoundaryCondition, OperatorMatrix,
                    SpinorField, aps, export_triplets, local, maps, mit, read_triplets)


def _split(bundle):
    geometry = getattr(bundle, "geometry", bundle)
    twist = getattr(bundle, "twist", 0.0)
    return geometry, twist


def assemble_dirac(bundle, resolution: int, mode: int | None = None) -> OperatorMatrix:
    """Discrete Dirac operator.

    On the torus this is the full Fourier (or Landau-level) operator and
    ``mode`` is ignored. Elsewhere it is the radial operator of fiber mode
    ``mode`` (default 0) on ``resolution`` cells, without boundary condition.
    """
    geometry, twist = _split(bundle)
    if geometry.kind == "torus":
        if twist:
            return torus.landau_dirac(bundle, resolution)
        return torus.fourier_dirac(geometry, resolution)
    if twist:
        raise CapabilityError("twisted bundles are only provided on the torus")
    return RadialMode(geometry, 0 if mode is None else mode, resolution).dirac()


def assemble_connection_laplacian(bundle, resolution: int, mode: int | None = None) -> OperatorMatrix:
    geometry, twist = _split(bundle)
    if geometry.kind == "torus":
        if twist:
            return torus.landau_connection_laplacian(bundle, resolution)
        return torus.fourier_connection_laplacian(geometry, resolution)
    return RadialMode(geometry, 0 if mode is None else mode, resolution).connection_laplacian()


def assemble_curvature(bundle, resolution: int, mode: int | None = None) -> OperatorMatrix:
    """The curvature term as a matrix on the same unknowns."""
    geometry, twist = _split(bundle)
    if geometry.kind == "torus":
        if twist:
            return torus.landau_curvature(bundle, resolution)
        return torus.fourier_curvature(geometry, resolution)
    op = RadialMode(geometry, 0 if mode is None else mode, resolution).connection_laplacian()
    n = op.size
    return OperatorMatrix(geometry.scalar_curvature / 4 * np.eye(n, dtype=complex), HERMITIAN,
                          modeIndex=op.modeIndex, weights=op.weights, nodes=op.nodes)


def _boundary_traces(op: OperatorMatrix, v: np.ndarray):
    """Yield ``(eps, W_end * fiber, F_trace, G_trace)`` for each boundary end."""
    radial = op.meta["radial"]
    keep = op.meta["keep"]
    nF = op.meta["nF"]
    F = np.zeros(radial.cells + 1, dtype=complex)
    F[keep] = v[:nF]
    G = v[nF:]
    N = radial.cells
    prof = radial.profile
    for idx, (eps, cl) in enumerate(zip((-1, 1), op.meta["closures"])):
        if prof.singular[idx]:
            continue
        xe = prof.a if eps < 0 else prof.b
        f = F[0] if eps < 0 else F[N]
        if cl.kind == "robin":
            g = cl.alpha * f
        else:
            g = 1.5 * G[0] - 0.5 * G[1] if eps < 0 else 1.5 * G[N - 1] - 0.5 * G[N - 2]
        yield eps, float(prof.weight(xe)) * prof.fiber_volume, f, g


def ibp_residual(op: OperatorMatrix, s1: SpinorField, s2: SpinorField) -> float:
    """``|<D s1, s2> - <s1, D s2> - int_boundary <nu s1, s2>|`` in discrete quadrature."""
    for s in (s1, s2):
        if s.values.shape != (op.size,):
            raise ShapeError(f"field has {s.values.shape} values, operator needs {op.size}")
    w = op.weights if op.weights is not None else np.ones(op.size)
    v1, v2 = s1.values, s2.values
    Dv1, Dv2 = op.matvec(v1), op.matvec(v2)
    lhs = np.sum(w * Dv1 * np.conj(v2)) - np.sum(w * v1 * np.conj(Dv2))
    bdry = 0.0
    if op.meta.get("family") == "radial":
        t1 = list(_boundary_traces(op, v1))
        t2 = list(_boundary_traces(op, v2))
        for (eps, wt, f1, g1), (_, _, f2, g2) in zip(t1, t2):
            # nu = i eps sigma_1 on (F, G)
            bdry += wt * 1j * eps * (g1 * np.conj(f2) + f1 * np.conj(g2))
    return float(abs(lhs - bdry))


__all__ = [
    "GENERAL", "HERMITIAN", "SKEW_HERMITIAN", "BoundaryCircle", "BoundaryCondition",
    "Closure", "OperatorMatrix", "RadialMode", "SpinorField", "apply_bc", "aps",
    "assemble_connection_laplacian", "assemble_curvature", "assemble_dirac",
    "boundary_circles", "boundary_dirac", "export_triplets", "ibp_residual", "local",
    "maps", "mit", "mode_multiplicity", "mode_mu", "mode_range", "read_triplets",
    "torus", "trace_constraints",
]
