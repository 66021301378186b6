"""Staggered first-order scheme for one fiber mode of a warped product.

Separating the fiber variables of ``dx^2 + s(x)^2 g_fiber`` leaves, for a
fiber-Dirac eigenvalue ``mu``, the radial system

    lambda F = i ((W G)'/W + q G),    lambda G = i (F' - q F),

with ``W = s^(n-1)`` and ``q = mu/s - (n-1) s'/(2 s)``. ``F`` lives on the
nodes ``x_j`` and ``G`` on the half nodes; the ``F`` rows are control-volume
balances and the ``G`` rows are built as their weighted negative transpose,
so the discrete operator is self-adjoint in the quadrature inner product up
to the boundary rows. Modes with ``mu < 0`` are handled by exchanging the
roles of ``F`` and ``G`` (which maps ``mu`` to ``-mu``).

A boundary condition reaches an end as a list of linear constraints
``p F + q G = 0`` on the trace there. One constraint with ``q != 0`` becomes a
Robin-type diagonal entry, ``q = 0`` removes the end node, two constraints
kill the mode, and none leaves the mode non-elliptic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ..errors import CapabilityError, ParameterError, ResolutionError
from .types import GENERAL, HERMITIAN, OperatorMatrix

_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)


def mode_mu(geometry, mode: int) -> float:
    """Fiber-Dirac eigenvalue carried by the integer mode label."""
    kind = geometry.kind
    if kind in ("disk", "annulus") or (kind == "sphere" and geometry.dim == 2):
        return mode + 0.5
    if kind == "cylinder":
        return 2 * math.pi * (mode + geometry.spin / 2) / geometry.length("circumference")
    if kind in ("sphere", "ball"):
        # the +-mu fiber eigenspaces give the same radial problem; keep mu > 0
        if mode < 0:
            raise ParameterError("three-dimensional fiber modes are labelled by m >= 0")
        return float(mode + 1)
    raise CapabilityError(f"{kind} has no fiber-mode reduction")


def mode_multiplicity(geometry, mode: int) -> int:
    if geometry.dim == 3:
        return int(2 * abs(mode_mu(geometry, mode)))
    return 1


def mode_range(geometry, mmax: int) -> list[int]:
    """Mode labels whose fiber eigenvalue satisfies ``|mu| <= mmax + 1``, roughly."""
    if geometry.dim == 3:
        return list(range(0, mmax + 1))
    return list(range(-mmax - 1, mmax + 1))


def _integrate(f, lo, hi):
    """Gauss-Legendre on each of the intervals ``[lo_k, hi_k]``."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    mid, half = (hi + lo) / 2, (hi - lo) / 2
    x = mid[:, None] + half[:, None] * _GL_X[None, :]
    return half * np.sum(_GL_W[None, :] * f(x), axis=1)


@dataclass
class Closure:
    """What a boundary condition does at one end of the interval."""

    kind: str                 # "free", "robin", "dirichlet", "dead", "singular"
    alpha: complex = 0.0      # G = alpha F at the end for "robin"


@dataclass
class RadialMode:
    """Grid data for one fiber mode; :meth:`dirac` assembles the matrix."""

    geometry: object
    mode: int
    cells: int
    profile: object = field(init=False)
    mu: float = field(init=False)

    def __post_init__(self):
        if self.cells < 8:
            raise ResolutionError(f"resolution must be at least 8, got {self.cells}")
        self.profile = self.geometry.profile()
        self.mu = mode_mu(self.geometry, self.mode)

    # -- grid ------------------------------------------------------------
    @property
    def swapped(self) -> bool:
        return self.mu < 0

    @property
    def mu_c(self) -> float:
        return abs(self.mu)

    @property
    def h(self) -> float:
        return (self.profile.b - self.profile.a) / self.cells

    @cached_property
    def x(self) -> np.ndarray:
        return self.profile.a + self.h * np.arange(self.cells + 1)

    @cached_property
    def y(self) -> np.ndarray:
        return self.profile.a + self.h * (np.arange(self.cells) + 0.5)

    @property
    def alpha_left(self) -> float:
        """Leading exponent of the regular solution at a singular left end."""
        return self.mu_c - (self.profile.dim - 1) / 2

    def q(self, x):
        p = self.profile
        return self.mu_c / p.s(x) - 0.5 * (p.dim - 1) * p.ds(x) / p.s(x)

    def qW(self, x):
        p = self.profile
        s = p.s(x)
        return (self.mu_c - 0.5 * (p.dim - 1) * p.ds(x)) * s ** (p.dim - 2)

    @cached_property
    def _halfcells(self):
        x, h = self.x, self.h
        W = self.profile.weight
        left_lo, left_hi = x[1:] - h / 2, x[1:]
        right_lo, right_hi = x[:-1], x[:-1] + h / 2
        WL = np.zeros(self.cells + 1)
        WR = np.zeros(self.cells + 1)
        QL = np.zeros(self.cells + 1)
        QR = np.zeros(self.cells + 1)
        WL[1:] = _integrate(W, left_lo, left_hi)
        WR[:-1] = _integrate(W, right_lo, right_hi)
        QL[1:] = _integrate(self.qW, left_lo, left_hi)
        QR[:-1] = _integrate(self.qW, right_lo, right_hi)
        return WL, WR, QL, QR

    @property
    def WF(self) -> np.ndarray:
        WL, WR, _, _ = self._halfcells
        return WL + WR

    @property
    def WG(self) -> np.ndarray:
        WL, WR, _, _ = self._halfcells
        return WR[:-1] + WL[1:]

    @cached_property
    def Bw(self) -> np.ndarray:
        """Weighted interior balance: row j is ``int_cell((W G)' + q W G)``."""
        N = self.cells
        _, _, QL, QR = self._halfcells
        Wy = self.profile.weight(self.y)
        Bw = np.zeros((N + 1, N))
        j = np.arange(N)
        Bw[j, j] += Wy + QR[:-1]
        Bw[j + 1, j] += -Wy + QL[1:]
        return Bw

    # -- assembly --------------------------------------------------------
    def default_closures(self):
        sl, sr = self.profile.singular
        left = Closure("singular") if sl else Closure("free")
        right = Closure("singular") if sr else Closure("free")
        return left, right

    def kept_nodes(self, left: Closure, right: Closure) -> np.ndarray:
        keep = np.ones(self.cells + 1, dtype=bool)
        if left.kind == "dirichlet":
            keep[0] = False
        if right.kind in ("singular", "dirichlet"):
            keep[-1] = False
        return keep

    def dirac(self, left: Closure | None = None, right: Closure | None = None,
              bc=None) -> OperatorMatrix:
        dl, dr = self.default_closures()
        left = left or dl
        right = right or dr
        N = self.cells
        WF, WG = self.WF, self.WG
        W = self.profile.weight
        Bw = self.Bw.astype(complex)
        C = -(Bw.T / WG[:, None])
        Bfull = Bw.copy()
        A_FF = np.zeros(N + 1, dtype=complex)
        hermitian = True
        for end, cl in (("left", left), ("right", right)):
            row = 0 if end == "left" else N
            sgn = -1.0 if end == "left" else 1.0
            xe = self.profile.a if end == "left" else self.profile.b
            if cl.kind == "free":
                # trace of G by linear extrapolation from the two nearest half nodes
                g0, g1 = (0, 1) if end == "left" else (N - 1, N - 2)
                Bfull[row, g0] += sgn * W(xe) * 1.5
                Bfull[row, g1] += sgn * W(xe) * -0.5
                hermitian = False
            elif cl.kind == "robin":
                A_FF[row] += sgn * W(xe) * cl.alpha
                if abs((1j * cl.alpha).imag) > 1e-14:
                    hermitian = False
        keep = self.kept_nodes(left, right)
        B = Bfull / WF[:, None]
        A = 1j * A_FF / WF
        Dm = np.block([[np.diag(A), 1j * B], [1j * C, np.zeros((N, N))]])
        idx = np.concatenate([np.flatnonzero(keep), N + 1 + np.arange(N)])
        Dm = Dm[np.ix_(idx, idx)]
        weights = self.profile.fiber_volume * np.concatenate([WF[keep], WG])
        nodes = np.concatenate([self.x[keep], self.y])
        dead = left.kind == "dead" or right.kind == "dead"
        return OperatorMatrix(
            Dm, HERMITIAN if hermitian else GENERAL, bc=bc, modeIndex=self.mode,
            weights=weights, nodes=nodes,
            meta={"family": "radial", "radial": self, "keep": keep, "nF": int(keep.sum()),
                  "closures": (left, right), "dead": dead, "nonelliptic": False,
                  "swapped": self.swapped, "mu": self.mu})

    def connection_laplacian(self) -> OperatorMatrix:
        """Per-mode ``nabla^* nabla + R`` for surfaces, on the same staggered grid.

        Boundary rows use zero flux; the matrix is only meant to be compared
        with the squared Dirac operator on sections supported in the interior.
        """
        p = self.profile
        if p.dim != 2:
            raise CapabilityError("per-mode connection Laplacian is provided for surfaces")
        N, h = self.cells, self.h
        WF, WG = self.WF, self.WG
        Wy = p.weight(self.y)
        LF = np.zeros((N + 1, N + 1))
        j = np.arange(N)
        flux = Wy / h
        LF[j, j] += flux
        LF[j + 1, j + 1] += flux
        LF[j, j + 1] -= flux
        LF[j + 1, j] -= flux
        LF /= WF[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            a1 = np.nan_to_num(self.q(self.x), posinf=0.0, neginf=0.0)
        LF += np.diag(a1**2)
        Wx = p.weight(self.x[1:-1])
        LG = np.zeros((N, N))
        j = np.arange(N - 1)
        flux = Wx / h
        LG[j, j] += flux
        LG[j + 1, j + 1] += flux
        LG[j, j + 1] -= flux
        LG[j + 1, j] -= flux
        LG /= WG[:, None]
        a2 = self.mu_c / p.s(self.y) + 0.5 * p.ds(self.y) / p.s(self.y)
        LG += np.diag(a2**2)
        R4 = self.geometry.scalar_curvature / 4
        L = np.block([[LF, np.zeros((N + 1, N))], [np.zeros((N, N + 1)), LG]])
        L = L + R4 * np.eye(2 * N + 1)
        weights = p.fiber_volume * np.concatenate([WF, WG])
        return OperatorMatrix(L.astype(complex), HERMITIAN, modeIndex=self.mode,
                              weights=weights,
                              nodes=np.concatenate([self.x, self.y]),
                              meta={"family": "radial", "radial": self})
