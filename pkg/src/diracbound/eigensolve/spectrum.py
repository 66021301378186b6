"""Smallest Dirac eigenvalues of a catalog bundle under a boundary condition.

Per-mode problems are solved independently and merged. Self-adjoint modes go
through ``hermitian_eigs`` on the staggered operator; MIT modes, whose
spectrum is complex, go through the shooting determinant. Fiber levels are
added in order of increasing ``|mu|`` until a whole level lies above the
current ``k``-th eigenvalue, which is safe because the smallest eigenvalue of
a mode grows with ``|mu|``.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.linalg as sla

from ..errors import ConvergenceError, NoBoundaryError, ParameterError
from ..operators import (GENERAL, RadialMode, apply_bc, assemble_dirac, boundary_dirac,
                         mode_multiplicity, mode_mu)
from .hermitian import EigenResult, hermitian_eigs, spectral_order
from .shooting import nonnormal_mode_roots, shooting_problem


def _torus_spectrum(bundle, resolution, k, tol):
    op = assemble_dirac(bundle, resolution)
    if op.meta["family"] == "torus":
        res = hermitian_eigs(op, min(k, op.size), tol=tol)
        res.info.update(family="torus", resolution=resolution)
        return res
    # Landau levels: drop pairs living on the truncated top levels, then repeat
    # each surviving value by the flux (degeneracy of every level)
    S = op.symmetric()
    lam, U = sla.eigh(S)
    trusted = op.meta["trusted"]
    leak = np.sum(np.abs(U[~trusted]) ** 2, axis=0)
    good = leak <= 1e-10
    lam, U = lam[good], U[:, good]
    order = spectral_order(lam)
    mult = op.meta["multiplicity"] or 1
    take = order[: max(1, math.ceil(k / mult))]
    r = np.sqrt(op.weights)
    vecs = [U[:, i] / r for i in take]
    vals, vv = [], []
    for i, v in zip(take, vecs):
        vals += [lam[i]] * mult
        vv += [op.field(v)] * mult
    resid = [float(np.linalg.norm(op.matvec(v.values) - l * v.values) / np.linalg.norm(v.values))
             for l, v in zip(vals, vv)]
    return EigenResult(np.asarray(vals[:k], dtype=complex), vv[:k], np.asarray(resid[:k]),
                       "dense", {"family": "landau", "filtered": int((~good).sum()),
                                 "resolution": resolution})


def _region_for(geometry, mu, k):
    prof = geometry.profile()
    R = (abs(mu) + 3 + k / 2) * math.pi / (2 * (prof.b - prof.a))
    return (-R, R, -R / 2, R / 2)


def mode_spectrum(bundle, mode: int, bc=None, resolution: int = 256, k: int = 6,
                  tol: float = 1e-10, region=None, boundaryDirac=None) -> dict:
    """Eigenvalues of one fiber mode.

    Returns a dict with ``values``, ``residuals``, ``vectors`` (``None`` for
    shooting), ``method`` and the flags ``dead`` (no admissible section) and
    ``nonelliptic`` (unconstrained end, the spectrum is all of C).
    """
    geometry = bundle.geometry
    base = RadialMode(geometry, mode, resolution).dirac()
    if geometry.has_boundary:
        if bc is None:
            raise ParameterError("a boundary condition is needed on a geometry with boundary")
        if bc.needs_boundary_dirac and boundaryDirac is None:
            boundaryDirac = boundary_dirac(bundle, 16)
        op = apply_bc(base, bc, boundaryDirac)
    else:
        op = base
    out = {"mode": mode, "mu": mode_mu(geometry, mode),
           "multiplicity": mode_multiplicity(geometry, mode),
           "dead": op.meta.get("dead", False), "nonelliptic": op.meta.get("nonelliptic", False)}
    if out["dead"]:
        return {**out, "values": np.zeros(0, complex), "residuals": np.zeros(0),
                "vectors": [], "method": "none"}
    if out["nonelliptic"]:
        return {**out, "values": np.zeros(1, complex), "residuals": np.zeros(1),
                "vectors": [None], "method": "nonelliptic"}
    if op.symmetryFlag == GENERAL:
        region = region or _region_for(geometry, out["mu"], k)
        prob = shooting_problem(geometry, mode, bc, region=region)
        roots = nonnormal_mode_roots(prob)[:k]
        res = np.abs(prob.bcDeterminant(roots)) if len(roots) else np.zeros(0)
        return {**out, "values": roots, "residuals": res, "vectors": [None] * len(roots),
                "method": "shooting", "region": region}
    res = hermitian_eigs(op, min(k, op.size), tol=tol)
    return {**out, "values": res.eigenvalues, "residuals": res.residuals,
            "vectors": res.vectors, "method": res.method,
            "operator": op}


def _levels(geometry):
    """Mode labels grouped by ``|mu|``, in increasing order."""
    level = 0
    while True:
        if geometry.dim == 3:
            yield [level]
        elif geometry.kind == "cylinder":
            # mu = 2 pi (m + delta/2) / C; pair the labels of equal |mu|
            d = geometry.spin
            yield sorted({level, -level - d})
        else:
            yield [level, -level - 1]
        level += 1


def dirac_spectrum(bundle, bc=None, resolution: int = 256, k: int = 6, tol: float = 1e-10,
                   max_level: int | None = None) -> EigenResult:
    """The ``k`` smallest-modulus Dirac eigenvalues (with multiplicity).

    ``resolution`` is the number of radial cells per mode, the Fourier cutoff
    on the flat torus and the number of Landau levels on a twisted torus.
    """
    geometry = bundle.geometry
    if geometry.kind == "torus":
        if bc is not None:
            raise NoBoundaryError("the torus has no boundary")
        return _torus_spectrum(bundle, resolution, k, tol)
    if not geometry.has_boundary and bc is not None:
        raise NoBoundaryError(f"{geometry.kind} has no boundary")
    bd = None
    if bc is not None and bc.needs_boundary_dirac:
        bd = boundary_dirac(bundle, 16)
    entries, modes = [], {}
    cap = max_level if max_level is not None else 64
    for n_level, labels in enumerate(_levels(geometry)):
        level_min = math.inf
        for m in labels:
            data = mode_spectrum(bundle, m, bc, resolution, k, tol, boundaryDirac=bd)
            modes[m] = data
            for i, (v, r, vec) in enumerate(zip(data["values"], data["residuals"], data["vectors"])):
                level_min = min(level_min, abs(v))
                entries += [(complex(v), float(r), vec, m)] * data["multiplicity"]
        if len(entries) >= k:
            current = sorted(abs(e[0]) for e in entries)[k - 1]
            if n_level >= 1 and math.isfinite(level_min) and level_min > current:
                break
        if n_level >= cap:
            if len(entries) < k:
                raise ConvergenceError(f"only {len(entries)} eigenvalues below level {cap}")
            break
    vals = np.array([e[0] for e in entries], dtype=complex)
    order = spectral_order(vals)[:k]
    chosen = [entries[i] for i in order]
    methods = sorted({modes[e[3]]["method"] for e in chosen})
    info = {"family": "radial", "labels": [e[3] for e in chosen], "modes": modes,
            "nonelliptic": sorted(m for m, d in modes.items() if d["nonelliptic"])}
    return EigenResult(vals[order], [e[2] for e in chosen], np.array([e[1] for e in chosen]),
                       "+".join(methods), info)
