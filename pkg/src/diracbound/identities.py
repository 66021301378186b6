"""Numerical certificates for the integral and pointwise identities.

The weighted identities are checked on the flat torus, where band-limited
sections are differentiated exactly by the FFT and integrals of smooth
periodic functions are computed to rounding by the trapezoid rule. Each
identity is evaluated twice: the Dirac side goes through the assembled
Fourier operator, the other side term by term on the physical grid.

Boundary identities are checked on the boundary circles of the surfaces
with boundary. Sections there are random band-limited data pushed into the
admissible subspace of the boundary condition by an exact projection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .clifford import SIGMA, TwistorParams, eta2_for_xi, twistor_params
from .errors import (ArgumentError, CapabilityError, NoBoundaryError, ParameterError,
                     ResolutionError)
from .operators import (SpinorField, assemble_connection_laplacian, assemble_curvature,
                        assemble_dirac, boundary_circles)
from .operators.radial import RadialMode

# Clifford multiplication by the coordinate vectors of the flat torus
E = (1j * SIGMA[0], 1j * SIGMA[1])


def fitted_order(series) -> float:
    """Least-squares slope of ``log residual`` against ``log h``."""
    h = np.array([p[0] for p in series], dtype=float)
    r = np.array([p[1] for p in series], dtype=float)
    ok = r > 0
    if ok.sum() < 2:
        return math.nan
    return float(np.polyfit(np.log(h[ok]), np.log(r[ok]), 1)[0])


@dataclass
class IdentityReport:
    """Both sides of one identity and their discrepancy.

    ``pointwise`` holds the largest pointwise discrepancy for identities that
    hold pointwise. ``resolutionSeries`` holds ``(h, residual)`` pairs when
    the check was repeated under refinement.
    """

    identity: str
    lhs: float
    rhs: float
    residual: float
    scale: float
    resolutionSeries: Optional[list] = None
    pointwise: Optional[float] = None
    info: dict = field(default_factory=dict)

    @property
    def order(self) -> float:
        if not self.resolutionSeries:
            return math.nan
        return fitted_order(self.resolutionSeries)

    @property
    def relative(self) -> float:
        return self.residual / self.scale

    def passed(self, tol: float) -> bool:
        return bool(self.residual <= tol * self.scale)

    def to_dict(self) -> dict:
        out = {"identity": self.identity, "lhs": self.lhs, "rhs": self.rhs,
               "residual": self.residual, "scale": self.scale}
        if self.pointwise is not None:
            out["pointwise"] = self.pointwise
        if self.resolutionSeries:
            out["resolutionSeries"] = [list(map(float, p)) for p in self.resolutionSeries]
            out["order"] = self.order
        out.update({k: v for k, v in self.info.items() if isinstance(v, (int, float, str))})
        return out


def _report(tag, lhs, rhs, **kw) -> IdentityReport:
    lhs, rhs = float(lhs), float(rhs)
    return IdentityReport(tag, lhs, rhs, abs(lhs - rhs), max(abs(lhs), abs(rhs), 1.0), **kw)


# -- spectral calculus on the torus ----------------------------------------

@dataclass(frozen=True)
class TorusGrid:
    """Equispaced ``points x points`` grid on the flat torus ``[0,L1) x [0,L2)``.

    A section is stored through its periodic factor ``u``; the section itself
    is ``exp(i pi (d1 x / L1 + d2 y / L2)) u`` for the spin structure
    ``(d1, d2)``, which only enters through the shifted wave numbers.
    """

    L1: float
    L2: float
    points: int
    spin: tuple = (0, 0)

    def __post_init__(self):
        if self.points < 8 or self.points % 2:
            raise ResolutionError(f"grid size must be even and at least 8, got {self.points}")

    @classmethod
    def for_bundle(cls, bundle, points: int) -> "TorusGrid":
        g = bundle.geometry
        if g.kind != "torus":
            raise CapabilityError("the spectral grid exists on the flat torus only")
        if getattr(bundle, "twist", 0.0):
            raise CapabilityError("the spectral grid needs an untwisted torus")
        return cls(g.length("L1"), g.length("L2"), points, tuple(g.spin))

    @property
    def cell(self) -> float:
        return self.L1 * self.L2 / self.points**2

    @property
    def lengths(self):
        return (self.L1, self.L2)

    def coords(self):
        N = self.points
        x = self.L1 * np.arange(N) / N
        y = self.L2 * np.arange(N) / N
        return np.meshgrid(x, y, indexing="ij")

    def wavenumbers(self, j: int, shift: float = 0.0) -> np.ndarray:
        k = np.fft.fftfreq(self.points, 1.0 / self.points)
        p = 2 * math.pi * (k + shift) / self.lengths[j]
        if shift == 0.0:
            p[self.points // 2] = 0.0      # keeps derivatives of real data real
        return p

    def _diff(self, u, j, shift):
        p = self.wavenumbers(j, shift)
        shape = [1] * u.ndim
        shape[u.ndim - 2 + j] = -1
        return np.fft.ifft(1j * p.reshape(shape) * np.fft.fft(u, axis=u.ndim - 2 + j),
                           axis=u.ndim - 2 + j)

    def grad_section(self, s):
        """``(nabla_1 s, nabla_2 s)`` for a section of shape ``(2, N, N)``."""
        return [self._diff(s, j, self.spin[j] / 2) for j in range(2)]

    def grad(self, f):
        return [np.real(self._diff(f, j, 0.0)) for j in range(2)]

    def laplacian(self, f):
        out = 0.0
        for j in range(2):
            p = self.wavenumbers(j)
            axis = j
            shape = [1, 1]
            shape[axis] = -1
            out = out - np.real(np.fft.ifft(p.reshape(shape) ** 2 * np.fft.fft(f, axis=axis),
                                            axis=axis))
        return out

    def divergence(self, X):
        return sum(np.real(self._diff(X[j], j, 0.0)) for j in range(2))

    def integrate(self, f) -> float:
        return float(np.real(np.sum(f)) * self.cell)

    # -- random data ------------------------------------------------------
    def _band_mask(self, band):
        k = np.abs(np.fft.fftfreq(self.points, 1.0 / self.points))
        return (k[:, None] <= band) & (k[None, :] <= band)

    def random_section(self, rng, band: int | None = None) -> np.ndarray:
        """Complex band-limited section with unit ``L2`` norm, shape ``(2, N, N)``."""
        band = self.points // 4 if band is None else band
        if band > self.points // 4:
            raise ParameterError(f"band {band} exceeds a quarter of the grid size")
        mask = self._band_mask(band)
        c = (rng.standard_normal((2, self.points, self.points))
             + 1j * rng.standard_normal((2, self.points, self.points))) * mask
        s = np.fft.ifft2(c, axes=(1, 2))
        return s / math.sqrt(self.integrate(np.sum(abs(s) ** 2, axis=0)))

    def random_scalar(self, rng, band: int = 2, amplitude: float = 0.5) -> np.ndarray:
        """Real band-limited function with sup norm ``amplitude``."""
        mask = self._band_mask(band)
        c = (rng.standard_normal((self.points, self.points))
             + 1j * rng.standard_normal((self.points, self.points))) * mask
        f = np.real(np.fft.ifft2(c))
        return amplitude * f / np.max(abs(f))

    def field(self, s) -> SpinorField:
        s = np.asarray(s, dtype=complex)
        X, Y = self.coords()
        nodes = np.tile(np.stack([X.ravel(), Y.ravel()], axis=1), (2, 1))
        return SpinorField(nodes, np.full(s.size, self.cell), s.ravel())

    def unpack(self, s) -> np.ndarray:
        values = s.values if isinstance(s, SpinorField) else np.asarray(s)
        return np.asarray(values, dtype=complex).reshape(2, self.points, self.points)


@dataclass
class WeightParams:
    """Weight function ``phi`` on a torus grid with the exponents ``tau``, ``delta``, ``r``."""

    phi: np.ndarray
    tau: float = 0.0
    delta: float = 0.0
    r: float = 0.0
    grid: Optional[TorusGrid] = None

    def __post_init__(self):
        self.phi = np.asarray(self.phi, dtype=float)
        if not np.all(np.isfinite(self.phi)):
            raise ParameterError("phi must be finite on the grid")

    def gradient(self):
        return self.grid.grad(self.phi)

    def laplacian(self):
        return self.grid.laplacian(self.phi)


def _cliff(X, s):
    """Clifford product of the vector field ``X = (X1, X2)`` with ``s``."""
    return sum(X[j] * np.einsum("ab,bxy->axy", E[j], s) for j in range(2))


def _e(j, s):
    return np.einsum("ab,bxy->axy", E[j], s)


def _sq(s):
    return np.sum(abs(s) ** 2, axis=0)


def _re_inner(a, b):
    return np.real(np.sum(a * np.conj(b), axis=0))


def _dirac_via_operator(grid: TorusGrid, s) -> np.ndarray:
    """``D s`` through the assembled Fourier matrix acting on the FFT coefficients."""
    from .geometry import make_geometry
    from .operators.torus import fourier_dirac

    N = grid.points
    geo = make_geometry("torus", L1=grid.L1, L2=grid.L2, spin=grid.spin)
    op = fourier_dirac(geo, N)
    c = np.fft.fft2(s, axes=(1, 2)) / N**2
    half = N // 2
    ks = np.arange(-half, N - half)
    idx = np.mod(ks, N)
    coeff = c[:, idx[:, None], idx[None, :]]               # (2, k1, k2) in operator order
    vec = np.transpose(coeff, (1, 2, 0)).ravel()
    out = (op.entries @ vec).reshape(N, N, 2).transpose(2, 0, 1)
    back = np.zeros_like(c)
    back[:, idx[:, None], idx[None, :]] = out
    return np.fft.ifft2(back * N**2, axes=(1, 2))


def _twistor(grid, s, grads, Ds, tp: TwistorParams, dpsi=None):
    """The two components ``P_{eta,psi}(e_j, s)``."""
    out = []
    for j in range(2):
        P = tp.eta1 * grads[j] + tp.eta2 * _e(j, Ds)
        if dpsi is not None:
            P = P - tp.eta1 * dpsi[j] * s - tp.eta2 * _e(j, _cliff(dpsi, s))
        out.append(P)
    return out


def _curv_term(bundle, s):
    """Pointwise ``<s, R s>``; the curvature term of an untwisted flat torus is zero."""
    R = bundle.geometry.scalar_curvature / 4 if bundle is not None else 0.0
    return R * _sq(s)


WEIGHTED_VARIANTS = ("unw", "PP2", "est1", "est11", "est2")


def _as_params(tp, n):
    if isinstance(tp, TwistorParams):
        return tp
    eta1, eta2 = tp
    return twistor_params(eta1, eta2, n)


def weighted_sides(grid: TorusGrid, s, w: WeightParams, tp: TwistorParams, variant: str,
                   bundle=None):
    """Left and right sides of a weighted identity on the torus grid."""
    n = 2
    s = grid.unpack(s) if not isinstance(s, np.ndarray) or s.ndim == 1 else s
    if tp.eta1 == 0 and tp.eta2 == 0:
        raise ParameterError("eta must be nonzero")
    grads = grid.grad_section(s)
    Ds_term = sum(_e(j, grads[j]) for j in range(2))          # term by term
    Ds_op = _dirac_via_operator(grid, s)                      # assembled operator
    Rs = _curv_term(bundle, s)
    tau, delta = w.tau, w.delta
    I = grid.integrate
    if variant == "unw":
        lhs = tp.normSq * I(_sq(Ds_op))
        P = _twistor(grid, s, grads, Ds_term, tp)
        rhs = I(sum(_sq(p) for p in P)) + tp.eta1**2 * I(Rs)
        return lhs, rhs
    dphi = w.gradient()
    lap = w.laplacian()
    g2 = dphi[0] ** 2 + dphi[1] ** 2
    if variant == "PP2":
        # the divergence is expanded by the product rule so the identity holds pointwise
        d_s2 = [2 * _re_inner(grads[j], s) for j in range(2)]
        div = sum(d_s2[j] * dphi[j] for j in range(2)) + _sq(s) * lap
        P = _twistor(grid, s, grads, Ds_op, tp)
        left = sum(_sq(p) for p in P) + 2 * (tp.eta1**2 - tp.normSq) * _re_inner(_cliff(dphi, s), Ds_op)
        Pphi = _twistor(grid, s, grads, Ds_term, tp, dphi)
        right = (sum(_sq(p) for p in Pphi) + tp.eta1**2 * div
                 - (tp.eta1**2 * lap + tp.normSq * g2) * _sq(s))
        return I(left), I(right), float(np.max(abs(left - right)))
    Dstar = Ds_op - tau * _cliff(dphi, s)
    if variant in ("est1", "est11"):
        if variant == "est11":
            if not math.isclose(tp.eta1, n * tp.eta2, rel_tol=1e-12):
                raise ParameterError("est11 needs eta1 = n eta2")
            xi = -1.0 / (n - 1)
        else:
            xi = tp.xi
        if xi == 0:
            raise ParameterError("est1 needs xi != 0")
        if tp.eta1 == 0:
            raise ParameterError("est1 needs eta1 != 0")
        weight = np.exp(2 * (delta - tau) * w.phi)
        lhs = I(_sq(Dstar) * weight)
        if variant == "est11":
            c1 = n * delta
            c2 = (2 - n) * delta
            shift = tau - n * delta
            cP = n / (n - 1)
            tp_unit = twistor_params(1.0, 1.0 / n, n)
            Pw = _twistor(grid, s, grads, Ds_term, tp_unit, [shift * d for d in dphi])
            bulk = cP * I((sum(_sq(p) for p in Pw) + Rs) * weight)
        else:
            c1 = (xi - 1) * delta / xi
            c2 = (xi + 1) * delta / xi
            shift = tau + (1 / xi - 1) * delta
            Pw = _twistor(grid, s, grads, Ds_term, tp, [shift * d for d in dphi])
            bulk = (1 - xi) * I((sum(_sq(p) for p in Pw) / tp.eta1**2 + Rs) * weight)
        rhs = c1 * I((lap + c2 * g2) * _sq(s) * weight) + bulk
        return lhs, rhs
    if variant == "est2":
        r = w.r
        if r == 0:
            raise ParameterError("est2 needs r != 0")
        weight = np.exp(-2 * tau * w.phi)
        lhs = I(_sq(Dstar) * weight)
        shifted = [grads[j] - (tau + r) * dphi[j] * s for j in range(2)]
        rhs = (-r * I((lap + r * g2) * _sq(s) * weight)
               + I((sum(_sq(p) for p in shifted) + Rs) * weight))
        return lhs, rhs
    raise ParameterError(f"unknown identity variant {variant!r}")


def check_weighted_identity(bundle, bc, s, w: WeightParams, tp, variant: str,
                            points: int | None = None) -> IdentityReport:
    """Evaluate both sides of a weighted identity and their residual.

    Parameters
    ----------
    bundle : DiracBundleSpec
        An untwisted flat torus.
    bc : None
        The torus has no boundary, so no condition may be given.
    s : SpinorField or ndarray
        Section on the grid of ``w``, in the layout of ``TorusGrid.field``.
    w : WeightParams
        Weight and exponents; ``w.grid`` fixes the grid.
    tp : TwistorParams or (eta1, eta2)
    variant : {"unw", "PP2", "est1", "est11", "est2"}
    """
    if variant not in WEIGHTED_VARIANTS:
        raise ParameterError(f"unknown identity variant {variant!r}")
    if bc is not None:
        raise NoBoundaryError("the weighted identities are evaluated on the closed torus")
    grid = w.grid or TorusGrid.for_bundle(bundle, points or 32)
    if bundle is not None:
        TorusGrid.for_bundle(bundle, grid.points)      # validates the bundle
    tp = _as_params(tp, 2)
    sides = weighted_sides(grid, grid.unpack(s), w, tp, variant, bundle)
    pointwise = sides[2] if len(sides) == 3 else None
    return _report(variant, sides[0], sides[1], pointwise=pointwise,
                   info={"xi": tp.xi, "tau": w.tau, "delta": w.delta, "r": w.r})


def random_instance(grid: TorusGrid, rng, variant: str):
    """A random ``(s, WeightParams, TwistorParams)`` admissible for ``variant``."""
    s = grid.random_section(rng)
    phi = grid.random_scalar(rng, band=2, amplitude=rng.uniform(0.1, 0.5))
    tau, delta = rng.uniform(-1, 1, size=2)
    r = float(rng.choice([-2, -1, -0.5, 0.5, 1, 2]))
    if variant == "unw":
        phi = np.zeros_like(phi)
    n = 2
    if variant == "est11":
        eta2 = rng.uniform(0.3, 1.5) * rng.choice([-1, 1])
        tp = twistor_params(n * eta2, eta2, n)
    else:
        while True:
            eta1 = rng.uniform(0.3, 2.0) * rng.choice([-1, 1])
            eta2 = rng.uniform(-2.0, 2.0)
            tp = twistor_params(eta1, eta2, n)
            if abs(tp.xi) > 0.05:
                break
    return s, WeightParams(phi, float(tau), float(delta), r, grid), tp


def est2_limit(grid: TorusGrid, s, w: WeightParams, deltas=(1e-1, 1e-2, 1e-3, 1e-4),
               bundle=None) -> IdentityReport:
    """Distance between the est1 value at ``delta = d, xi = d / r`` and the est2 value.

    The est1 side (with ``eta = (1, eta2(xi))``) tends to the est2 side as
    ``d -> 0``; the report's series holds ``(d, |difference|)`` and its order
    is the fitted rate, which should be 1.
    """
    r = w.r
    if r == 0:
        raise ParameterError("est2 needs r != 0")
    target = weighted_sides(grid, s, w, twistor_params(1.0, 0.0, 2), "est2", bundle)[1]
    series = []
    for d in deltas:
        xi = d / r
        tp = twistor_params(1.0, eta2_for_xi(xi, 2), 2)
        wd = WeightParams(w.phi, w.tau, d, r, grid)
        series.append((d, abs(weighted_sides(grid, s, wd, tp, "est1", bundle)[1] - target)))
    last = weighted_sides(grid, s, WeightParams(w.phi, w.tau, deltas[-1], r, grid),
                          twistor_params(1.0, eta2_for_xi(deltas[-1] / r, 2), 2), "est1", bundle)[1]
    return _report("est2-limit", last, target, resolutionSeries=series)


# -- Bochner formula ---------------------------------------------------------

def _bump(x, lo, hi):
    """Smooth bump supported on ``(lo, hi)``."""
    t = (np.asarray(x) - lo) / (hi - lo)
    out = np.zeros_like(t, dtype=float)
    inside = (t > 0) & (t < 1)
    ti = t[inside]
    out[inside] = np.exp(-1.0 / (ti * (1 - ti))) * math.exp(4.0)
    return out


def _radial_bochner(bundle, cells, mode):
    radial = RadialMode(bundle.geometry, mode, cells)
    op = radial.dirac()
    D = op.dense()
    L = radial.connection_laplacian().dense()
    a, b = radial.profile.a, radial.profile.b
    lo, hi = a + 0.2 * (b - a), b - 0.2 * (b - a)
    v = np.concatenate([_bump(radial.x, lo, hi), 0.5 * _bump(radial.y, lo, hi)]).astype(complex)
    # the Dirac matrix drops the F node at a singular end; the section vanishes there
    kept = np.concatenate([np.flatnonzero(op.meta["keep"]), radial.cells + 1 + np.arange(radial.cells)])
    left, right = D @ (D @ v[kept]), (L @ v)[kept]
    return np.max(abs(left)), np.max(abs(right)), float(np.max(abs(left - right)))


def _torus_bochner(bundle, resolution):
    if bundle.twist:
        # square the operator on one extra level, then compress: the product of
        # two truncated ladders differs from the truncated square on the top level
        big = assemble_dirac(bundle, resolution + 1).dense()
        keep = np.r_[0:resolution, resolution + 1:2 * resolution + 1]
        D2 = (big @ big)[np.ix_(keep, keep)]
    else:
        D = assemble_dirac(bundle, resolution).entries
        D2 = (D @ D).toarray()
    L = (assemble_connection_laplacian(bundle, resolution).dense()
         + assemble_curvature(bundle, resolution).dense())
    return np.max(abs(D2)), np.max(abs(L)), float(np.max(abs(D2 - L)))


def check_bochner(bundle, resolution: int = 32, mode: int = 0, levels: int = 1) -> IdentityReport:
    """Compare the squared Dirac operator with the connection Laplacian plus curvature.

    On the torus both matrices are compared entrywise. On a surface of
    revolution they are applied to a smooth section supported away from the
    ends of the fiber mode ``mode``; with ``levels > 1`` the check is repeated
    on doubled meshes and the report carries the refinement series.
    """
    g = bundle.geometry
    if g.kind == "torus":
        lhs, rhs, res = _torus_bochner(bundle, resolution)
        return IdentityReport("bochner", float(lhs), float(rhs), res, max(lhs, rhs, 1.0))
    if g.dim != 2:
        raise CapabilityError("the per-mode Bochner check is provided for surfaces")
    series = []
    for k in range(levels):
        cells = resolution * 2**k
        lhs, rhs, res = _radial_bochner(bundle, cells, mode)
        prof = g.profile()
        series.append(((prof.b - prof.a) / cells, res))
    return IdentityReport("bochner", float(lhs), float(rhs), res, max(lhs, rhs, 1.0),
                          resolutionSeries=series if levels > 1 else None)


# -- boundary identities -----------------------------------------------------

BOUNDARY_VARIANTS = ("b1", "b2", "DD", "D", "maps")


def _mean_curvature(circle) -> float:
    return circle.eps / circle.scale if circle.kind == "round" else 0.0


def _band_coefficients(rng, band, count=2):
    k = np.arange(-band, band + 1)
    c = rng.standard_normal((count, k.size)) + 1j * rng.standard_normal((count, k.size))
    return k, c / (1.0 + np.abs(k))


def _synth(circle, k, c):
    """Samples of ``sum_k c_k exp(i k theta)`` (times the spin phase) on ``circle``."""
    th = circle.theta
    vals = c @ np.exp(1j * np.outer(k, th))
    return vals * circle._phase()


def _admissible(circle, bc, t):
    """Push ``t`` into the subspace cut out by ``bc`` with an exact projection."""
    t = np.asarray(t, dtype=complex).ravel()
    nu = circle.nu()
    half = lambda M, v: circle.clifford(M, v)
    c = bc.sign
    if bc.kind == "mit":
        # nu s = i c s on the range of (1 - i c nu) / 2
        return 0.5 * (t - 1j * c * half(nu, t))
    if bc.kind == "local":
        # the boundary chirality is sigma_3; s is a c-eigensection of nu sigma_3
        s3 = np.broadcast_to(SIGMA[2], (circle.points, 2, 2))
        return 0.5 * (t + c * half(nu, half(s3, t)))
    if bc.kind == "aps":
        return circle.project(t, bc.b)
    # modified APS: (1 + c nu) s must lie in the APS range, and (1 + c nu)^-1 = (1 - c nu) / 2
    u = circle.project(t, bc.b)
    return 0.5 * (u - c * half(nu, u))


def bc_violation(circle, bc, s) -> float:
    """Relative violation of ``bc`` by the boundary section ``s``."""
    s = np.asarray(s, dtype=complex).ravel()
    nu = lambda v: circle.clifford(circle.nu(), v)
    c = bc.sign
    if bc.kind == "mit":
        r = nu(s) - 1j * c * s
    elif bc.kind == "local":
        s3 = np.broadcast_to(SIGMA[2], (circle.points, 2, 2))
        r = nu(circle.clifford(s3, s)) - c * s
    else:
        u = s if bc.kind == "aps" else s + c * nu(s)
        r = u - circle.project(u, bc.b)
    return float(np.linalg.norm(r) / max(np.linalg.norm(s), 1e-300))


def boundary_sections(bundle, bc, points: int, seed: int = 0, band: int = 4) -> list:
    """Random admissible sections, one per boundary circle.

    The Fourier coefficients depend on ``seed`` and ``band`` only, so the same
    smooth section is sampled at every ``points``.
    """
    rng = np.random.default_rng(seed)
    out = []
    for circle in boundary_circles(bundle.geometry, points):
        k, c = _band_coefficients(rng, band)
        out.append(_admissible(circle, bc, _synth(circle, k, c).ravel()))
    return out


def boundary_weight(bundle, points: int, seed: int = 0, band: int = 3) -> list:
    """Boundary data of a smooth weight: ``(phi|_bd, d phi / d s, nu(phi))`` per circle."""
    rng = np.random.default_rng(seed + 7919)
    out = []
    for circle in boundary_circles(bundle.geometry, points):
        k = np.arange(-band, band + 1)
        a = rng.standard_normal((2, k.size)) / (1.0 + np.abs(k))
        th = circle.theta
        f = a[0] @ np.cos(np.outer(k, th))
        df = -(a[0] * k) @ np.sin(np.outer(k, th)) * (2 * math.pi / circle.length)
        g = a[1] @ np.cos(np.outer(k, th) + 0.3)
        out.append((f, df, g))
    return out


def _tangential(circle, t, derivative):
    if derivative == "spectral":
        return circle.tangential_derivative(t)
    if derivative != "difference":
        raise ParameterError(f"unknown derivative {derivative!r}")
    phase = circle._phase()
    u = np.asarray(t, dtype=complex).reshape(2, circle.points) / phase
    h = circle.length / circle.points
    du = (np.roll(u, -1, axis=1) - np.roll(u, 1, axis=1)) / (2 * h)
    shift = math.pi * circle.spin / circle.length if circle.kind == "flat" else 0.0
    return ((du + 1j * shift * u) * phase).ravel()


def _re_pair(circle, a, b):
    """Pointwise ``Re <a, b>`` on the circle."""
    a = np.asarray(a).reshape(2, circle.points)
    b = np.asarray(b).reshape(2, circle.points)
    return np.real(np.sum(a * np.conj(b), axis=0))


def _boundary_densities(circle, s, variant, weight, tau_minus_delta, derivative):
    nu, T = circle.nu(), circle.tangent()
    cl = circle.clifford
    H = _mean_curvature(circle)
    s2 = _re_pair(circle, s, s)
    if variant in ("b1", "DD", "D"):
        nTds = cl(nu, cl(T, _tangential(circle, s, derivative)))
    if variant == "b1":
        return _re_pair(circle, nTds, s), -0.5 * H * s2, None
    if variant == "DD":
        right = circle.apply(s) - 0.5 * H * s
        vec = np.max(abs(nTds - right))
        return _re_pair(circle, nTds, s), _re_pair(circle, right, s), vec
    f, df, g = weight
    # Clifford multiplication by the ambient gradient g nu + f' T
    grad_s = (cl(nu, s).reshape(2, -1) * g + cl(T, s).reshape(2, -1) * df).ravel()
    if variant == "b2":
        return _re_pair(circle, cl(nu, grad_s), s), -g * s2, None
    psi = tau_minus_delta
    left = _re_pair(circle, nTds, s) - psi * _re_pair(circle, cl(nu, grad_s), s)
    # boundary Clifford multiplication is nu X, so grad-bar(psi phi) acts as psi f' nu T
    dstar = -psi * cl(nu, cl(T, s)) * np.tile(df, 2) + circle.apply(s)
    right = _re_pair(circle, dstar, s) + (psi * g - 0.5 * H) * s2
    return left, right, None


def _boundary_once(bundle, bc, sections, variant, points, seed, w, derivative):
    circles = boundary_circles(bundle.geometry, points)
    if sections is None:
        sections = boundary_sections(bundle, bc, points, seed)
    weights = boundary_weight(bundle, points, seed) if variant in ("b2", "D") else [None] * len(circles)
    psi = (w.tau - w.delta) if w is not None else 0.7
    lhs = rhs = 0.0
    point = 0.0
    for circle, s, wt in zip(circles, sections, weights):
        if bc is not None and bc_violation(circle, bc, s) > 1e-10:
            raise ArgumentError(f"the section does not satisfy {bc.label()}")
        L, R, vec = _boundary_densities(circle, np.asarray(s, dtype=complex).ravel(), variant,
                                        wt, psi, derivative)
        lhs += float(np.sum(L * circle.weights))
        rhs += float(np.sum(R * circle.weights))
        point = max(point, float(np.max(abs(L - R))) if vec is None else vec)
    return lhs, rhs, point


def _check_maps(bundle, bc, sections, points, seed):
    if bc is None or bc.kind != "maps":
        raise ParameterError("the maps identity needs a modified APS condition")
    circles = boundary_circles(bundle.geometry, points)
    if sections is None:
        sections = boundary_sections(bundle, bc, points, seed)
    pairing = norm2 = 0.0
    for circle, t in zip(circles, sections):
        if bc_violation(circle, bc, t) > 1e-10:
            raise ArgumentError(f"the section does not satisfy {bc.label()}")
        pairing += circle.inner(circle.apply(t), t).real
        norm2 += circle.inner(t, t).real
    b = bc.b
    bound = 0.0 if b <= 0 else b * norm2
    # an equality for b <= 0 and an upper bound for b > 0
    residual = abs(pairing) if b <= 0 else max(pairing - bound, 0.0)
    return IdentityReport("maps", pairing, bound, residual, max(norm2, 1e-300),
                          info={"b": b, "normSq": norm2})


def check_boundary_identity(bundle, bc, s=None, variant: str = "b1", points: int = 64,
                            levels: int = 1, seed: int = 0, w: WeightParams | None = None,
                            derivative: str = "difference") -> IdentityReport:
    """Check a pointwise boundary identity on every boundary circle.

    Parameters
    ----------
    bundle : DiracBundleSpec
        A surface with boundary.
    bc : BoundaryCondition or None
        Condition the section must satisfy; ``b1`` needs MIT or local, ``maps``
        a modified APS condition.
    s : list of ndarray, optional
        One sampled section per circle. By default a seeded random section is
        projected onto the admissible subspace.
    variant : {"b1", "b2", "DD", "D", "maps"}
    points : int
        Samples per circle; with ``levels > 1`` the check is repeated on
        ``points * 2^k`` samples and the report carries the series of
        pointwise residuals against the spacing.
    w : WeightParams, optional
        Supplies ``tau - delta`` for the ``D`` identity.
    derivative : {"difference", "spectral"}
        Tangential derivative: second-order differences, or exact Fourier
        differentiation of the band-limited data.
    """
    g = bundle.geometry
    if not g.has_boundary:
        raise NoBoundaryError(f"{g.kind} has no boundary")
    if variant not in BOUNDARY_VARIANTS:
        raise ParameterError(f"unknown boundary identity {variant!r}")
    if variant == "b1" and (bc is None or bc.kind not in ("mit", "local")):
        raise ParameterError("the b1 identity needs an MIT or local condition")
    if variant == "maps":
        return _check_maps(bundle, bc, s, points, seed)
    if s is not None and levels > 1:
        raise ArgumentError("a given section fixes the resolution; use levels = 1")
    series = []
    for k in range(levels):
        p = points * 2**k
        lhs, rhs, point = _boundary_once(bundle, bc, s, variant, p, seed, w, derivative)
        series.append((2 * math.pi / p, point))
    rep = _report(variant, lhs, rhs, pointwise=point,
                  resolutionSeries=series if levels > 1 else None)
    return rep


# -- curvature identity and rescaling ---------------------------------------

def _best_lambda(killing, op, vec):
    """Minimize the affine-in-lambda Killing residual; its square is a quadratic."""
    k0, kp, km = (killing(op, vec, l) ** 2 for l in (0.0, 1.0, -1.0))
    curv = 0.5 * (kp + km) - k0
    return -0.25 * (kp - km) / curv if curv > 0 else math.nan


def check_ri(bundle, eigResult, a: float | None = None, index: int = 0) -> IdentityReport:
    """Residual of ``R s = (n-1) n a^2 s`` for an eigenvector ``s``.

    The relation holds for sections with ``nabla_X s = a X.s``, so the report
    also records the Killing residual of the eigenpair and the value of ``a``
    fitted to the discrete derivative (surfaces and the torus). ``a`` defaults
    to ``-lambda / n``.
    """
    from .bounds import _radial_killing, _torus_killing, equality_diagnostics

    if not eigResult.vectors or eigResult.vectors[index] is None:
        raise ArgumentError("the identity needs an eigenvector")
    g = bundle.geometry
    n = g.dim
    lam = complex(eigResult.eigenvalues[index])
    if a is None:
        a = -lam.real / n
    vec = eigResult.vectors[index].values
    diag = equality_diagnostics(bundle, eigResult, index)
    if g.kind == "torus":
        res = eigResult.info["resolution"]
        Rs = assemble_curvature(bundle, res).dense() @ vec
        op, killing = assemble_dirac(bundle, res), _torus_killing
    else:
        Rs = g.scalar_curvature / 4 * vec
        label = eigResult.info["labels"][index]
        op, killing = eigResult.info["modes"][label]["operator"], _radial_killing
    target = (n - 1) * n * a * a
    norm = np.max(abs(vec))
    pointwise = float(np.max(abs(Rs - target * vec)) / norm)
    i = int(np.argmax(abs(vec)))
    lhs = float((Rs[i] / vec[i]).real)
    fitted = math.nan
    if n == 2:
        fitted = -_best_lambda(killing, op, vec) / n
    return _report("ri", lhs, target, pointwise=pointwise,
                   info={"killingResidual": diag.killingResidual, "a": a, "aFitted": fitted})


def _match(a, b) -> float:
    """Largest distance from a point of either set to the nearest point of the other."""
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    d = abs(a[:, None] - b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def check_scaling(bundle, sigma: float, k: int = 4, bc=None, resolution: int = 128) -> IdentityReport:
    """Compare ``sigma * lambda(D_sigma)`` with ``lambda(D)`` for the ``k`` smallest eigenvalues.

    The curvature and mean-curvature laws are checked alongside and stored in
    ``info``; the report's residual is the eigenvalue mismatch.
    """
    from .eigensolve.spectrum import dirac_spectrum

    if not sigma > 0:
        raise ParameterError(f"sigma must be positive, got {sigma}")
    scaled = bundle.rescaled(sigma)
    base = dirac_spectrum(bundle, bc, resolution, k).eigenvalues
    other = dirac_spectrum(scaled, bc, resolution, k).eigenvalues
    g, gs = bundle.geometry, scaled.geometry
    curv = abs(gs.scalar_curvature - g.scalar_curvature / sigma**2)
    H = [c.mean_curvature for c in g.boundary()]
    Hs = [c.mean_curvature for c in gs.boundary()]
    mean = max((abs(x - y / sigma) for x, y in zip(Hs, H)), default=0.0)
    lhs = float(np.max(abs(sigma * other)))
    rhs = float(np.max(abs(base)))
    rep = IdentityReport("scaling", lhs, rhs, _match(sigma * other, base), max(rhs, 1.0),
                         info={"sigma": sigma, "curvatureResidual": curv,
                               "meanCurvatureResidual": mean})
    rep.info["values"] = base
    rep.info["scaledValues"] = other
    return rep
