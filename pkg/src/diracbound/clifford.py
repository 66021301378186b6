"""Gamma matrices, Clifford multiplication and the curvature endomorphism.

Convention: ``e_i e_j + e_j e_i = -2 delta_ij``, realized by
``gamma_k = i sigma_k`` on C^2 for n = 2, 3.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, ParameterError, ShapeError

SIGMA = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


@dataclass(frozen=True)
class CliffordRep:
    dim: int
    rank: int
    gammas: tuple = field(repr=False)

    def chirality(self) -> np.ndarray:
        """Hermitian involution anticommuting with every gamma (n = 2 only)."""
        if self.dim != 2:
            raise DimensionError("chirality operator needs an even dimension")
        return 1j * self.gammas[0] @ self.gammas[1]

    def vector(self, X) -> np.ndarray:
        """Matrix of Clifford multiplication by the vector ``X``."""
        X = np.asarray(X, dtype=float)
        if X.shape[-1] != self.dim:
            raise ShapeError(f"expected a {self.dim}-vector, got shape {X.shape}")
        return np.tensordot(X, np.stack(self.gammas), axes=([-1], [0]))


def build_clifford(n: int) -> CliffordRep:
    if n not in (2, 3):
        raise DimensionError(f"unsupported dimension n={n}; only 2 and 3")
    return CliffordRep(dim=n, rank=2, gammas=tuple(1j * SIGMA[k] for k in range(n)))


def clifford_mult(rep: CliffordRep, X, s) -> np.ndarray:
    """Return ``X . s``; broadcasts over leading axes of ``X`` and ``s``."""
    s = np.asarray(s, dtype=complex)
    if s.shape[-1] != rep.rank:
        raise ShapeError(f"spinor must have {rep.rank} components, got {s.shape}")
    M = rep.vector(X)
    return np.einsum("...ij,...j->...i", M, s)


@dataclass(frozen=True)
class CurvatureEndo:
    value: np.ndarray
    kappa: float


def curvature_endomorphism(bundle, x=None) -> CurvatureEndo:
    """Pointwise curvature term of the Bochner formula for a catalog bundle.

    The spin part contributes ``R/4`` times the identity. A twist with
    ``R^twist_12 = i B`` adds ``B gamma_1 gamma_2 i``, whose eigenvalues are
    ``+-B``.
    """
    geom = bundle.geometry
    if x is not None and not geom.contains(x):
        raise ParameterError(f"point {x!r} is outside the {geom.kind} domain")
    rep = build_clifford(geom.dim)
    value = geom.scalar_curvature / 4.0 * np.eye(rep.rank, dtype=complex)
    B = bundle.twist
    if B:
        g1, g2 = rep.gammas[0], rep.gammas[1]
        # 1/2 sum_ij e_i e_j R_ij with R_12 = -R_21 = iB
        value = value + g1 @ g2 * (1j * B)
    value = 0.5 * (value + value.conj().T)
    kappa = float(np.linalg.eigvalsh(value)[0])
    return CurvatureEndo(value=value, kappa=kappa)


@dataclass(frozen=True)
class TwistorParams:
    eta1: float
    eta2: float
    n: int
    normSq: float
    xi: float


def twistor_params(eta1: float, eta2: float, n: int) -> TwistorParams:
    if eta1 == 0 and eta2 == 0:
        raise ParameterError("eta must be nonzero")
    if n < 2:
        raise DimensionError("n must be at least 2")
    norm_sq = eta1 * eta1 - 2 * eta1 * eta2 + n * eta2 * eta2
    xi = (n * eta2 * eta2 - 2 * eta1 * eta2) / norm_sq
    return TwistorParams(float(eta1), float(eta2), int(n), float(norm_sq), float(xi))


def eta2_for_xi(xi: float, n: int) -> float:
    """Solve ``xi(1, eta2) = xi`` on the branch with ``eta2 -> 0`` as ``xi -> 0``."""
    if not (-1.0 / (n - 1) < xi < 1.0):
        raise ParameterError(f"xi={xi} outside (-1/(n-1), 1)")
    a = 1.0 - xi
    return (a - np.sqrt(a * (1.0 + (n - 1) * xi))) / (n * a)
