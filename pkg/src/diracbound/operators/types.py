"""Value types shared by the operator assemblers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np
import scipy.sparse as sp

from ..errors import ParameterError, ShapeError

HERMITIAN = "Hermitian"
SKEW_HERMITIAN = "skewHermitian"
GENERAL = "general"


@dataclass(frozen=True)
class BoundaryCondition:
    """One of the four elliptic boundary conditions.

    ``kind`` is ``"mit"``, ``"local"``, ``"aps"`` or ``"maps"``; ``sign``
    selects the branch for MIT, local and modified APS; ``b`` is the
    spectral cut for the APS variants.
    """

    kind: str
    sign: int = 1
    b: float = 0.0

    def __post_init__(self):
        if self.kind not in ("mit", "local", "aps", "maps"):
            raise ParameterError(f"unknown boundary condition {self.kind!r}")
        if self.sign not in (1, -1):
            raise ParameterError(f"sign must be +1 or -1, got {self.sign}")
        if not np.isfinite(self.b):
            raise ParameterError("b must be finite")

    @property
    def needs_boundary_dirac(self) -> bool:
        return self.kind in ("aps", "maps")

    def label(self) -> str:
        if self.kind == "aps":
            return f"aps(b={self.b:g})"
        if self.kind == "maps":
            return f"maps(b={self.b:g},{'+' if self.sign > 0 else '-'})"
        return f"{self.kind}({'+' if self.sign > 0 else '-'})"


def mit(sign: int = 1) -> BoundaryCondition:
    return BoundaryCondition("mit", sign)


def local(sign: int = 1) -> BoundaryCondition:
    return BoundaryCondition("local", sign)


def aps(b: float = 0.0) -> BoundaryCondition:
    return BoundaryCondition("aps", 1, float(b))


def maps(b: float = 0.0, sign: int = 1) -> BoundaryCondition:
    return BoundaryCondition("maps", sign, float(b))


@dataclass
class SpinorField:
    """Discrete section: one value per unknown of an operator, plus quadrature weights.

    ``nodes`` holds a coordinate per unknown (radial position, wave vector or
    boundary angle depending on the operator). ``values`` is the flat vector
    in the operator's unknown ordering.
    """

    nodes: np.ndarray
    weights: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.values.shape != self.weights.shape:
            raise ShapeError("values and weights must have the same shape")

    def inner(self, other: "SpinorField") -> complex:
        return complex(np.sum(self.weights * self.values * np.conj(other.values)))

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.weights * np.abs(self.values) ** 2)))


@dataclass
class OperatorMatrix:
    """Assembled discrete operator with its symmetry flag and provenance.

    ``weights`` is the diagonal of the quadrature inner product in which the
    operator is (anti)self-adjoint; ``symmetric()`` returns the unitarily
    equivalent matrix in the Euclidean inner product.
    """

    entries: Any
    symmetryFlag: str = GENERAL
    bc: Optional[BoundaryCondition] = None
    modeIndex: Optional[int] = None
    weights: Optional[np.ndarray] = None
    nodes: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    @property
    def shape(self):
        return self.entries.shape

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def dense(self) -> np.ndarray:
        if sp.issparse(self.entries):
            return self.entries.toarray()
        return np.asarray(self.entries)

    def symmetric(self) -> np.ndarray:
        """``W^(1/2) A W^(-1/2)`` as a dense array."""
        A = self.dense()
        if self.weights is None:
            return A
        r = np.sqrt(self.weights)
        return (r[:, None] * A) / r[None, :]

    def matvec(self, v):
        return self.entries @ v

    def field(self, values) -> SpinorField:
        if self.weights is None:
            w = np.ones(self.size)
        else:
            w = self.weights
        nodes = self.nodes if self.nodes is not None else np.arange(self.size)
        values = np.asarray(values, dtype=complex)
        if values.shape != (self.size,):
            raise ShapeError(f"expected {self.size} values, got shape {values.shape}")
        return SpinorField(nodes, w, values)


def export_triplets(op: OperatorMatrix, path) -> int:
    """Write nonzero entries as ``row col re im`` lines; returns the count."""
    coo = sp.coo_matrix(op.entries)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# {op.shape[0]} {op.shape[1]} {op.symmetryFlag}\n")
        for i, j, v in zip(coo.row, coo.col, coo.data):
            if v != 0:
                fh.write(f"{i} {j} {float(v.real)!r} {float(v.imag)!r}\n")
    return int(np.count_nonzero(coo.data))


def read_triplets(path) -> OperatorMatrix:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().lstrip("#").split()
        n, m, flag = int(header[0]), int(header[1]), header[2]
        data = np.loadtxt(fh, ndmin=2)
    if data.size == 0:
        A = sp.csr_matrix((n, m), dtype=complex)
    else:
        A = sp.csr_matrix((data[:, 2] + 1j * data[:, 3],
                           (data[:, 0].astype(int), data[:, 1].astype(int))), shape=(n, m))
    return OperatorMatrix(A, flag)
