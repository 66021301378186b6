"""Exact discretizations on the flat torus.

Untwisted bundles are diagonalized by plane waves: the Dirac operator on
the mode with momentum ``p = 2 pi (k + delta/2) / L`` is the 2x2 block
``-(sigma_1 p_1 + sigma_2 p_2)``. Unknowns are ordered mode-major, spinor
component minor; the quadrature weight of each coefficient is the area.

A constant twist ``B`` with integer flux ``N`` is handled in the Landau-level
basis, where ``D = -sqrt(2|B|) [[0, a], [a^+, 0]]`` with ladder operators
truncated to ``levels`` rungs. Each level carries the same ``N``-fold
degeneracy, which is recorded as a multiplicity instead of being stored.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.sparse as sp

from ..clifford import SIGMA
from ..errors import ResolutionError
from .types import HERMITIAN, OperatorMatrix


def torus_modes(L1: float, L2: float, spin, resolution: int):
    """Integer modes and momenta for ``k in [-res/2, res/2 - 1]^2``."""
    half = resolution // 2
    ks = np.arange(-half, resolution - half)
    k1, k2 = np.meshgrid(ks, ks, indexing="ij")
    k1, k2 = k1.ravel(), k2.ravel()
    p1 = 2 * math.pi * (k1 + spin[0] / 2) / L1
    p2 = 2 * math.pi * (k2 + spin[1] / 2) / L2
    return np.stack([k1, k2], axis=1), np.stack([p1, p2], axis=1)


def _check_resolution(resolution):
    if resolution < 8:
        raise ResolutionError(f"resolution must be at least 8, got {resolution}")


def fourier_dirac(geometry, resolution: int) -> OperatorMatrix:
    _check_resolution(resolution)
    L1, L2 = geometry.length("L1"), geometry.length("L2")
    modes, p = torus_modes(L1, L2, geometry.spin, resolution)
    blocks = -(p[:, 0, None, None] * SIGMA[0] + p[:, 1, None, None] * SIGMA[1])
    A = sp.block_diag(list(blocks), format="csr")
    area = L1 * L2
    return OperatorMatrix(
        A, HERMITIAN, weights=np.full(A.shape[0], area),
        nodes=np.repeat(p, 2, axis=0),
        meta={"family": "torus", "blocks": blocks, "modes": modes, "momenta": p,
              "resolution": resolution, "geometry": geometry})


def fourier_connection_laplacian(geometry, resolution: int) -> OperatorMatrix:
    _check_resolution(resolution)
    L1, L2 = geometry.length("L1"), geometry.length("L2")
    modes, p = torus_modes(L1, L2, geometry.spin, resolution)
    p2 = np.sum(p * p, axis=1)
    blocks = p2[:, None, None] * np.eye(2)[None]
    A = sp.diags(np.repeat(p2, 2)).astype(complex).tocsr()
    return OperatorMatrix(
        A, HERMITIAN, weights=np.full(A.shape[0], L1 * L2),
        nodes=np.repeat(p, 2, axis=0),
        meta={"family": "torus", "blocks": blocks, "modes": modes, "momenta": p,
              "resolution": resolution, "geometry": geometry})


def fourier_curvature(geometry, resolution: int) -> OperatorMatrix:
    n = 2 * resolution * resolution
    return OperatorMatrix(sp.csr_matrix((n, n), dtype=complex), HERMITIAN,
                          weights=np.full(n, geometry.volume),
                          meta={"family": "torus"})


def exact_torus_spectrum(L1, L2, spin, cutoff: float) -> np.ndarray:
    """All Dirac eigenvalues with ``|lambda| <= cutoff`` by lattice enumeration."""
    kmax = int(math.ceil(cutoff * max(L1, L2) / (2 * math.pi))) + 2
    ks = np.arange(-kmax, kmax + 1)
    k1, k2 = np.meshgrid(ks, ks, indexing="ij")
    mag = 2 * math.pi * np.hypot((k1 + spin[0] / 2) / L1, (k2 + spin[1] / 2) / L2).ravel()
    mag = mag[mag <= cutoff]
    return np.sort(np.concatenate([-mag, mag]))


# -- constant twist: Landau levels -------------------------------------------

def _ladder(levels: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, levels, dtype=float)), k=1)


def _landau_pieces(B: float, levels: int):
    a = _ladder(levels)
    ad = a.T
    if B < 0:
        # the roles of a and a^+ swap when the field reverses
        a, ad = ad, a
    return a, ad


def landau_dirac(bundle, levels: int) -> OperatorMatrix:
    _check_resolution(levels)
    B = bundle.twist
    a, ad = _landau_pieces(B, levels)
    c = -math.sqrt(2 * abs(B))
    Z = np.zeros((levels, levels))
    A = c * np.block([[Z, a], [ad, Z]]).astype(complex)
    return _landau_op(bundle, A, levels)


def landau_connection_laplacian(bundle, levels: int) -> OperatorMatrix:
    """``Pi_1^2 + Pi_2^2`` with ``Pi = -i nabla`` written in ladder form."""
    _check_resolution(levels)
    B = abs(bundle.twist)
    n = np.diag(np.arange(levels, dtype=float))
    L = B * (2 * n + np.eye(levels))
    A = np.kron(np.eye(2), L).astype(complex)
    return _landau_op(bundle, A, levels)


def landau_curvature(bundle, levels: int) -> OperatorMatrix:
    B = bundle.twist
    A = np.kron(np.diag([B, -B]), np.eye(levels)).astype(complex)
    return _landau_op(bundle, A, levels)


def _landau_op(bundle, A, levels):
    level = np.tile(np.arange(levels), 2)
    return OperatorMatrix(
        A, HERMITIAN, weights=np.full(2 * levels, bundle.geometry.volume),
        nodes=level.astype(float),
        meta={"family": "landau", "levels": levels, "multiplicity": abs(bundle.flux),
              "trusted": level <= levels - 3, "twist": bundle.twist})


def exact_landau_spectrum(B: float, count: int) -> np.ndarray:
    """Distinct Dirac eigenvalues ``0, +-sqrt(2|B| k)`` up to level ``count``."""
    k = np.arange(1, count + 1)
    vals = np.sqrt(2 * abs(B) * k)
    return np.sort(np.concatenate([[0.0], vals, -vals]))
