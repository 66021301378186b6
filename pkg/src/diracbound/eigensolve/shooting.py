"""Shooting oracle for one fiber mode and argument-principle root finding.

The radial system ``F' = q F - i lam G``, ``G' = -(w + q) G - i lam F`` is
integrated with RK4 (compiled kernel when available). At a singular end the
integration starts from the regular Frobenius solution ``F = x^a P``,
``G = x^(a+1) Q`` normalized so that ``P(0) = 1``; at a regular end it starts
from the null vector of the boundary constraint. The boundary determinant is
holomorphic in ``lam`` and its zeros are the eigenvalues of the mode.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .. import kernels
from ..errors import ConvergenceError, IncompleteSearchError, ParameterError
from ..operators.conditions import trace_constraints
from ..operators.radial import mode_mu
from .hermitian import spectral_order


@dataclass
class RadialODE:
    """Canonical (``mu >= 0``) radial system of one fiber mode."""

    profile: object
    mu: float                       # signed fiber eigenvalue
    series_terms: int = 90

    @property
    def mu_c(self) -> float:
        return abs(self.mu)

    @property
    def swapped(self) -> bool:
        return self.mu < 0

    @property
    def n(self) -> int:
        return self.profile.dim

    @property
    def alpha(self) -> float:
        return self.mu_c - (self.n - 1) / 2

    def q(self, x):
        p = self.profile
        return self.mu_c / p.s(x) - 0.5 * (self.n - 1) * p.ds(x) / p.s(x)

    def w(self, x):
        p = self.profile
        return (self.n - 1) * p.ds(x) / p.s(x)

    @property
    def length_scale(self) -> float:
        p = self.profile
        return p.rho if p.kind == "sin" else p.b - p.a

    # -- Frobenius start -------------------------------------------------
    def _taylor(self, fun, K):
        rc = self.length_scale
        M = 4 * K
        z = rc * np.exp(2j * math.pi * np.arange(M) / M)
        c = np.fft.fft(fun(z)) / M
        return c[:K] / rc ** np.arange(K)

    @functools.cached_property
    def _series(self):
        K = self.series_terms
        a, mu, n = self.alpha, self.mu_c, self.n
        p = self.profile
        qt = self._taylor(lambda z: self.q(z) - a / z, K)
        rt = self._taylor(lambda z: mu / p.s(z) + 0.5 * (n - 1) * p.ds(z) / p.s(z)
                          - (a + n - 1) / z, K)
        return qt, rt

    def regular_start(self, lam, x0: float):
        """``(F, G)`` of the regular solution at ``x0`` divided by ``x0^alpha``."""
        lam = np.atleast_1d(np.asarray(lam, dtype=complex))
        K = self.series_terms
        qt, rt = self._series
        a, n = self.alpha, self.n
        # P and Q hold the series terms of F / x0^a and G / x0^a evaluated at x0
        qt = qt * x0 ** np.arange(1, K + 1)
        rt = rt * x0 ** np.arange(1, K + 1)
        P = np.zeros((K, lam.size), dtype=complex)
        Q = np.zeros((K, lam.size), dtype=complex)
        lx = -1j * lam * x0
        P[0] = 1.0
        Q[0] = lx / (2 * a + n)
        F, G = P[0].copy(), Q[0].copy()
        for k in range(1, K):
            P[k] = qt[k - 1::-1] @ P[:k]
            if k > 1:
                P[k] += lx * Q[k - 2]
            P[k] /= k
            Q[k] = (lx * P[k] - rt[k - 1::-1] @ Q[:k]) / (k + 2 * a + n)
            F += P[k]
            G += Q[k]
            if k > 4 and np.all(np.abs(P[k - 2:k + 1]) + np.abs(Q[k - 2:k + 1])
                                <= 1e-17 * (np.abs(F) + np.abs(G))):
                break
        return F, G

    # -- integration -----------------------------------------------------
    def integrate(self, lam, x0, x1, f0, g0, steps):
        h = (x1 - x0) / steps
        xs = x0 + 0.5 * h * np.arange(2 * steps + 1)
        return kernels.rk4_shoot(self.q(xs), self.w(xs), h, lam, f0, g0)


@dataclass
class ShootingProblem:
    """Boundary determinant of one mode together with a search rectangle.

    ``searchRegion`` is ``(re_min, re_max, im_min, im_max)``.
    """

    odeSystem: RadialODE
    bcDeterminant: Callable
    searchRegion: tuple
    info: dict = field(default_factory=dict)

    def __call__(self, lam):
        return self.bcDeterminant(lam)


def _steps_for(length, lam_max, lam_h, floor):
    """RK4 steps so that ``lam_max * h <= lam_h`` (global error ~ lam L (lam h)^4)."""
    h = min(lam_h / max(lam_max, 1.0), length / floor)
    return int(math.ceil(length / h))


def shooting_problem(geometry, mode: int, bc=None, region=None, steps: int | None = None) -> ShootingProblem:
    """Build the determinant for ``mode`` under ``bc`` (``None`` on closed geometries)."""
    profile = geometry.profile()
    mu = mode_mu(geometry, mode)
    ode = RadialODE(profile, mu)
    a, b = profile.a, profile.b
    L = b - a
    if region is None:
        lam_max = 10.0 / ode.length_scale
        region = (-lam_max, lam_max, -lam_max, lam_max)
    re0, re1, im0, im1 = region
    lam_max = max(abs(re0), abs(re1)) + max(abs(im0), abs(im1))
    steps = steps or _steps_for(L, lam_max, 0.003, 400)
    coarse = _steps_for(L, lam_max, 0.05, 64)
    sl, sr = profile.singular

    def rows(end):
        eps = -1 if end == "left" else 1
        xe = a if end == "left" else b
        d = eps * mu / float(profile.s(xe))
        r = trace_constraints(bc, eps, d)
        if ode.swapped:
            r = [(q, p) for p, q in r]
        return r

    info = {"mode": mode, "mu": mu, "steps": steps, "coarse_steps": coarse}
    if sl and sr:
        # closed: match the north and south regular solutions at the equator
        mid = 0.5 * (a + b)
        x0 = 0.25 * ode.length_scale

        def make_det(n):
            def det(lam):
                lam = np.atleast_1d(np.asarray(lam, dtype=complex))
                fn, gn = ode.regular_start(lam, x0)
                north = ode.integrate(lam, x0, mid, fn, gn, max(n // 2, 8))
                fs, gs = ode.regular_start(-lam, x0)
                south = ode.integrate(-lam, x0, mid, fs, gs, max(n // 2, 8))
                # south pole frame: (F, G)(x) = (G~, F~)(L - x)
                return north[0] * south[0] - north[1] * south[1]
            return det
    else:
        if bc is None:
            raise ParameterError("a boundary condition is needed on a geometry with boundary")
        right = rows("right")
        if len(right) != 1:
            info["constraints"] = len(right)
        if sl:
            x0 = 0.25 * ode.length_scale

            def start(lam):
                return ode.regular_start(lam, x0)
        else:
            left = rows("left")
            if len(left) != 1:
                info["constraints"] = len(left)
            x0 = a
            p_l, q_l = left[0] if left else (1.0, 0.0)

            def start(lam):
                one = np.ones_like(lam)
                return q_l * one, -p_l * one

        p_r, q_r = right[0] if right else (1.0, 0.0)

        def make_det(n):
            def det(lam):
                lam = np.atleast_1d(np.asarray(lam, dtype=complex))
                f0, g0 = start(lam)
                F, G = ode.integrate(lam, x0, b, f0, g0, n)
                return p_r * F + q_r * G
            return det

    info["coarse"] = make_det(coarse)
    return ShootingProblem(ode, make_det(steps), tuple(region), info)


# -- argument principle ------------------------------------------------------

def _derivative(f, z, h):
    return (f(z + h) - f(z - h)) / (2 * h)


def _edge_points(z0, z1, n):
    t = np.linspace(0.0, 1.0, n + 1)
    return z0 + (z1 - z0) * t


def contour_count(f, rect, tol=1e-3, max_points=20000, min_points=32):
    """Zero count of ``f`` inside a rectangle and the sum of those zeros.

    The integrals of ``f'/f`` and ``z f'/f`` along the boundary use the
    trapezoid rule with central-difference derivatives. Segments are bisected
    until the phase of ``f`` turns by less than 0.3 rad across each of them and
    the segment's trapezoid value agrees with the exact log increment; the
    count is accepted only if it lies within ``tol`` of an integer.

    Returns
    -------
    count : int
    moment : complex
    """
    re0, re1, im0, im1 = rect
    corners = [complex(re0, im0), complex(re1, im0), complex(re1, im1), complex(re0, im1)]
    scale = max(re1 - re0, im1 - im0)
    h = 1e-6 * max(scale, 1.0)

    def sample(z):
        vals = f(np.concatenate([z, z + h, z - h]))
        m = z.size
        fz = vals[:m]
        return fz, (vals[m:2 * m] - vals[2 * m:]) / (2 * h)

    t = np.linspace(0.0, 4.0, 4 * min_points + 1)

    def z_of(t):
        e = np.minimum(np.floor(t).astype(int), 3)
        u = t - e
        c0 = np.array(corners)[e]
        c1 = np.array(corners)[(e + 1) % 4]
        return c0 + (c1 - c0) * u

    z = z_of(t)
    fz, dfz = sample(z)
    while True:
        if np.any(fz == 0) or not np.all(np.isfinite(fz)) or not np.all(np.isfinite(dfz)):
            raise ConvergenceError("determinant vanishes or overflows on the contour", 0.0)
        dz = np.diff(z)
        g = dfz / fz
        seg = 0.5 * (g[1:] + g[:-1]) * dz
        dlog = np.log(fz[1:] / fz[:-1])
        bad = (np.abs(dlog.imag) > 0.3) | (np.abs(seg - dlog) > tol / max(len(seg), 1))
        if not np.any(bad):
            break
        if t.size > max_points:
            raise ConvergenceError("contour sampling budget exhausted",
                                   float(np.abs(seg - dlog).max()))
        tm = 0.5 * (t[:-1][bad] + t[1:][bad])
        zm = z_of(tm)
        fm, dfm = sample(zm)
        t = np.concatenate([t, tm])
        order = np.argsort(t, kind="stable")
        t = t[order]
        z = np.concatenate([z, zm])[order]
        fz = np.concatenate([fz, fm])[order]
        dfz = np.concatenate([dfz, dfm])[order]
    N = np.sum(seg) / (2j * math.pi)
    winding = np.sum(dlog.imag) / (2 * math.pi)
    if abs(N - round(N.real)) >= tol or abs(winding - round(N.real)) >= tol:
        raise ConvergenceError("winding number is not integral", float(abs(N - round(N.real))))
    gz = z * g
    mom = np.sum(0.5 * (gz[1:] + gz[:-1]) * dz) / (2j * math.pi)
    return int(round(N.real)), mom


def _newton(f, z, h, tol=1e-10, maxit=50):
    z = complex(z)
    fz = f(np.array([z]))[0]
    for _ in range(maxit):
        if abs(fz) <= tol * 1e-3:
            break
        dz = fz / _derivative(f, np.array([z]), h)[0]
        z -= dz
        fz = f(np.array([z]))[0]
        if abs(dz) < 1e-15 * max(1.0, abs(z)):
            break
    return z, abs(fz)


def _nudge(rect, k):
    """Shift a rectangle slightly so that no edge passes through a zero."""
    re0, re1, im0, im1 = rect
    s = max(re1 - re0, im1 - im0)
    e = s * 1e-3 * (math.sqrt(2) - 1) * (k + 1)
    return (re0 - e, re1 + 0.7 * e, im0 - 0.9 * e, im1 + 1.1 * e)


_SPLITS = (0.4917, 0.4561, 0.5373, 0.4129)


def _split(f, r, N):
    """Quarter ``r`` at an off-centre point so that symmetric zeros avoid the cuts."""
    re0, re1, im0, im1 = r
    for t in _SPLITS:
        rm = re0 + t * (re1 - re0)
        im = im0 + (1 - t) * (im1 - im0)
        kids = [(re0, rm, im0, im), (rm, re1, im0, im), (re0, rm, im, im1), (rm, re1, im, im1)]
        try:
            counts = [contour_count(f, k) for k in kids]
        except ConvergenceError:
            continue
        if sum(c for c, _ in counts) == N:
            return [(k, c, m) for k, (c, m) in zip(kids, counts)]
    raise IncompleteSearchError("could not split the search rectangle cleanly", float("nan"))


def holomorphy_defect(problem: ShootingProblem, samples: int = 8, seed: int = 0) -> float:
    """Largest relative Cauchy-Riemann violation at random points of the region."""
    rng = np.random.default_rng(seed)
    re0, re1, im0, im1 = problem.searchRegion
    z = rng.uniform(re0, re1, samples) + 1j * rng.uniform(im0, im1, samples)
    h = 1e-5 * max(re1 - re0, 1.0)
    f = problem.bcDeterminant
    dx = (f(z + h) - f(z - h)) / (2 * h)
    dy = (f(z + 1j * h) - f(z - 1j * h)) / (2j * h)
    return float(np.max(np.abs(dx - dy) / np.maximum(np.abs(dx), 1e-300)))


def nonnormal_mode_roots(problem: ShootingProblem, count: int | None = None,
                         det_tol: float = 1e-10) -> np.ndarray:
    """Zeros of the boundary determinant inside the search rectangle.

    The rectangle is split until each piece holds at most one zero; that zero
    is located by the first contour moment and polished by Newton's method.
    Returns the zeros ordered by ``(|lam|, Re, Im)``, truncated to ``count``.
    """
    if problem.info.get("constraints", 1) != 1:
        return np.zeros(0, dtype=complex)
    f = problem.info.get("coarse", problem.bcDeterminant)
    fine = problem.bcDeterminant
    rect = problem.searchRegion
    if not all(np.isfinite(rect)) or rect[1] <= rect[0] or rect[3] <= rect[2]:
        raise ParameterError("search region must be a bounded nonempty rectangle")
    scale = max(rect[1] - rect[0], rect[3] - rect[2])
    h = 1e-7 * max(scale, 1.0)

    def counted(r):
        for k in range(4):
            try:
                return contour_count(f, r), r
            except ConvergenceError:
                r = _nudge(r, k)
        raise ConvergenceError("could not find a clean contour", float("nan"))

    (total, mom), rect = counted(rect)
    roots = []
    stack = [(rect, total, mom)]
    while stack:
        r, N, mom = stack.pop()
        if N == 0:
            continue
        size = max(r[1] - r[0], r[3] - r[2])
        if N == 1 or size < 1e-6 * max(scale, 1.0):
            z, res = _newton(fine, mom / N, h)
            if res > det_tol:
                raise ConvergenceError("Newton polish did not reach the determinant tolerance", res)
            roots.extend([z] * N)
            continue
        stack.extend(_split(f, r, N))
    roots = np.array(roots, dtype=complex)
    if len(roots) != total:
        raise IncompleteSearchError(f"found {len(roots)} zeros, contour count is {total}", 0.0)
    roots = roots[spectral_order(roots)]
    if count is not None:
        roots = roots[:count]
    return roots
