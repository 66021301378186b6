"""Lower bounds for Dirac eigenvalues and the diagnostics of their equality cases.

Every bound is a number computed from the geometry alone: closed forms for
surfaces, the minimum of a Robin functional in higher dimension, or a
volume-type constant built from the boundary Sobolev constant. A
``BoundReport`` sets it against the smallest computed eigenvalue.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.sparse.linalg as spla

from .errors import ArgumentError, CapabilityError, ConvergenceError, DimensionError
from .eigensolve.scalar import radial_forms, robin_min
from .geometry import DiracBundleSpec

THEOREMS = ("T1", "Thm2", "ThmAPS", "ThmModAPS", "VolAPS", "VolModAPS")


def _bundle(b) -> DiracBundleSpec:
    return b if isinstance(b, DiracBundleSpec) else DiracBundleSpec(b)


def _need_dim(n, ok, what):
    if not ok:
        raise DimensionError(f"{what} is not defined in dimension {n}")


def sobolev_constant(n: int) -> float:
    """Sharp constant of the boundary Sobolev inequality in dimension ``n >= 3``."""
    _need_dim(n, n >= 3, "the boundary Sobolev constant")
    return (2 * math.gamma(n) / math.gamma(n / 2)) ** (2 / n) / (math.pi * n * (n - 2))


def bound_t1(bundle) -> float:
    """Surface bound ``(2 int kappa + int_bd H) / Vol``; kappa and H are constant on the catalog."""
    bundle = _bundle(bundle)
    g = bundle.geometry
    _need_dim(g.dim, g.dim == 2, "the surface bound")
    return (2 * bundle.kappa * g.volume + g.total_mean_curvature) / g.volume


def _mean_curvature(scale):
    """Boundary coefficient ``scale * H`` as a per-component callable."""
    return lambda comp: scale * comp.mean_curvature


def bound_thm2(bundle, resolution: int = 512) -> float:
    bundle = _bundle(bundle)
    g = bundle.geometry
    n = g.dim
    _need_dim(n, n >= 3, "the Robin-functional bound")
    return robin_min(g, n / (n - 2), n / (n - 1) * bundle.kappa, _mean_curvature(n / 2),
                     resolution)


def _spectral_bound(bundle, b, boundary_shift, resolution):
    g = bundle.geometry
    n = g.dim
    _need_dim(n, n >= 2, "the spectral boundary bound")

    def beta(comp):
        return (n - 1) * comp.mean_curvature / 2 - boundary_shift

    if b <= 0:
        return n / (n - 1) * robin_min(g, n / (n - 1), bundle.kappa, beta, resolution)
    return robin_min(g, 1.0, bundle.kappa, lambda comp: (n - 1) * comp.mean_curvature / 2 - b,
                     resolution)


def bound_aps(bundle, b: float, resolution: int = 512) -> float:
    """Bound under the spectral condition with threshold ``b``."""
    return _spectral_bound(_bundle(bundle), b, b, resolution)


def bound_maps(bundle, b: float, resolution: int = 512) -> float:
    """Bound under the modified spectral condition; no ``b`` term when ``b <= 0``."""
    return _spectral_bound(_bundle(bundle), b, 0.0, resolution)


# -- reports -----------------------------------------------------------------

@dataclass
class EqualityDiagnostics:
    killingResidual: float
    curvatureResidual: float
    meanCurvatureMax: float
    kappaRelation: float

    def all_below(self, tol: float) -> bool:
        return max(self.killingResidual, self.curvatureResidual, self.meanCurvatureMax) <= tol


@dataclass
class BoundReport:
    theorem: str
    lhs: float
    rhs: float
    gap: float
    hypothesesOk: bool
    equalityDiag: EqualityDiagnostics | None = None
    tol: float = 0.0
    info: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["equalityDiag"] = asdict(self.equalityDiag) if self.equalityDiag else None
        return d


def bound_volume(bundle, b: float, gamma: float, lhs: float = float("nan"),
                 modified: bool = False) -> BoundReport:
    """Volume-type bound and the check of its curvature hypotheses.

    ``gamma`` is the user-supplied constant (or an estimate from
    ``gamma_estimate``). Unsatisfied hypotheses are reported, not raised.
    """
    bundle = _bundle(bundle)
    g = bundle.geometry
    n = g.dim
    S = sobolev_constant(n)
    kappa = bundle.kappa
    H = [c.mean_curvature for c in g.boundary()]
    if b <= 0:
        ok = kappa >= n * gamma / ((n - 1) * S)
        ok = ok and all(h >= 2 * n * n * gamma / ((n - 1) ** 3 * S) for h in H)
        rhs = n * n / ((n - 1) ** 2 * S * g.volume ** (2 / n))
    else:
        ok = kappa >= gamma / S and all(h > 2 * gamma / ((n - 1) * S) for h in H)
        rhs = 1 / (S * g.volume ** (2 / n))
    return BoundReport("VolModAPS" if modified else "VolAPS", lhs, rhs, lhs - rhs, bool(ok),
                       info={"gamma": gamma, "sobolev": S})


# -- Neumann weight ------------------------------------------------------------

@dataclass
class ScalarField:
    """Values of a scalar function at radial nodes (or torus grid points)."""

    nodes: np.ndarray
    values: np.ndarray
    constant: float = 0.0
    residual: float = 0.0


def solve_neumann_weight(bundle, resolution: int = 256, tol: float = 1e-12) -> ScalarField:
    """Solve ``Lap(phi)/2 + kappa = c`` with ``d phi/d nu = H`` and zero mean.

    ``c`` is fixed by the discrete integrals of ``kappa`` and ``H`` so that
    the discrete system is exactly compatible; the singular stiffness system
    is solved by conjugate gradients on the mean-zero subspace.
    """
    bundle = _bundle(bundle)
    g = bundle.geometry
    _need_dim(g.dim, g.dim == 2, "the Neumann weight problem")
    if g.kind == "torus":
        # kappa is constant and there is no boundary, so the right side vanishes
        n = resolution * resolution
        return ScalarField(np.arange(n), np.zeros(n), bundle.kappa, 0.0)
    forms = radial_forms(g, resolution)
    K, M = forms.stiffness, forms.mass
    one = np.ones(forms.size)
    bH = np.zeros(forms.size)
    for comp in g.boundary():
        bH[0 if comp.end == "left" else -1] += comp.area * comp.mean_curvature
    kappa = bundle.kappa * one
    vol = one @ M @ one
    c = (one @ M @ kappa + 0.5 * bH.sum()) / vol
    rhs = bH - 2 * M @ (c * one - kappa)
    rhs -= one * (rhs.sum() / one.size)   # remove rounding from the compatible part
    mean = M @ one / vol

    def project(v):
        return v - one * (mean @ v)

    # K is symmetric semidefinite with kernel {constants} and rhs lies in its range
    phi, info = spla.cg(K, rhs, rtol=tol, atol=0.0, maxiter=20 * forms.size)
    if info != 0:
        raise ConvergenceError("conjugate gradients did not converge",
                               float(np.linalg.norm(K @ phi - rhs)))
    phi = project(phi)
    res = float(np.linalg.norm(K @ phi - rhs) / max(np.linalg.norm(rhs), 1e-300))
    return ScalarField(forms.nodes, phi, c, res)


# -- equality diagnostics ------------------------------------------------------

def _radial_killing(op, vec, lam):
    """L2 norm of ``nabla_X s + (lam/2) X.s`` over both frame directions, per unit norm."""
    radial = op.meta["radial"]
    prof = radial.profile
    keep = op.meta["keep"]
    N, h = radial.cells, radial.h
    F = np.zeros(N + 1, dtype=complex)
    F[keep] = vec[: op.meta["nF"]]
    G = vec[op.meta["nF"]:]
    mu = radial.mu_c
    x, y = radial.x, radial.y
    # components living on half nodes
    Fy = 0.5 * (F[1:] + F[:-1])
    dF = np.diff(F) / h
    sy, dsy = prof.s(y), prof.ds(y)
    up1 = dF + 0.5j * lam * G
    up2 = 1j * (mu - 0.5 * dsy) * Fy / sy + 0.5 * lam * G
    # components living on interior nodes
    xi = x[1:-1]
    Gx = 0.5 * (G[1:] + G[:-1])
    dG = np.diff(G) / h
    sx, dsx = prof.s(xi), prof.ds(xi)
    lo1 = dG + 0.5j * lam * F[1:-1]
    lo2 = 1j * (mu + 0.5 * dsx) * Gx / sx - 0.5 * lam * F[1:-1]
    Wy, Wx = prof.weight(y), prof.weight(xi)
    num = h * np.sum(Wy * (abs(up1) ** 2 + abs(up2) ** 2)) + h * np.sum(Wx * (abs(lo1) ** 2 + abs(lo2) ** 2))
    WF, WG = radial.WF, radial.WG
    den = np.sum(WF * abs(F) ** 2) + np.sum(WG * abs(G) ** 2)
    return float(np.sqrt(num / den))


def _torus_killing(op, vec, lam):
    if op.meta["family"] == "torus":
        p = op.meta["momenta"]                  # (modes, 2)
        s = vec.reshape(-1, 2)
        total = 0.0
        sig = [np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]])]
        for j in range(2):
            Pj = 1j * p[:, j, None] * s + 0.5 * lam * 1j * (s @ sig[j].T)
            total += np.sum(abs(Pj) ** 2)
        return float(np.sqrt(total / np.sum(abs(s) ** 2)))
    # Landau levels: nabla_j = i Pi_j in ladder form
    B = op.meta["twist"]
    L = op.meta["levels"]
    a = np.diag(np.sqrt(np.arange(1, L, dtype=float)), k=1)
    ad = a.T
    if B < 0:
        a, ad = ad, a
    c = math.sqrt(abs(B) / 2)
    Pi = [c * (a + ad), 1j * c * (a - ad)]
    s = vec.reshape(2, L)
    sig = [np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]])]
    total = 0.0
    for j in range(2):
        Pj = 1j * (s @ Pi[j].T) + 0.5j * lam * (sig[j] @ s)
        total += np.sum(abs(Pj) ** 2)
    return float(np.sqrt(total / np.sum(abs(s) ** 2)))


def equality_diagnostics(bundle, eigResult, index: int = 0) -> EqualityDiagnostics:
    """Residuals of the equality conditions for eigenpair ``index`` of ``eigResult``."""
    bundle = _bundle(bundle)
    g = bundle.geometry
    n = g.dim
    if not eigResult.vectors or eigResult.vectors[index] is None:
        raise ArgumentError("equality diagnostics need an eigenvector")
    lam = eigResult.eigenvalues[index]
    vec = eigResult.vectors[index].values
    kappa = bundle.kappa
    Hmax = max((abs(c.mean_curvature) for c in g.boundary()), default=0.0)
    relation = float(abs(kappa - (n - 1) * abs(lam) ** 2 / n))
    if g.kind == "torus":
        from .operators import assemble_curvature, assemble_dirac

        size = len(vec)
        res = eigResult.info.get("resolution")
        op = assemble_dirac(bundle, res) if res else None
        if op is None or op.size != size:
            raise ArgumentError("the eigen result does not record its torus resolution")
        killing = _torus_killing(op, vec, lam.real)
        Rm = assemble_curvature(bundle, res).dense()
        w = op.weights
        r = Rm @ vec - kappa * vec
        curv = float(np.sqrt(np.sum(w * abs(r) ** 2) / np.sum(w * abs(vec) ** 2)))
        return EqualityDiagnostics(killing, curv, Hmax, relation)
    label = eigResult.info["labels"][index]
    op = eigResult.info["modes"][label]["operator"]
    if n == 2:
        killing = _radial_killing(op, vec, lam.real)
    elif not g.has_boundary:
        # closed manifold: int |P s|^2 = ((n-1)/n lam^2 - R/4) int |s|^2 for Ds = lam s
        killing = math.sqrt(max((n - 1) / n * abs(lam) ** 2 - g.scalar_curvature / 4, 0.0))
    else:
        raise CapabilityError("the Killing residual is provided for surfaces and closed manifolds")
    # the curvature term is (R/4) Id on untwisted warped products
    curv = abs(g.scalar_curvature / 4 - kappa)
    return EqualityDiagnostics(killing, curv, Hmax, relation)

