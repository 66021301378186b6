"""Translate boundary conditions into per-mode trace constraints.

At an end whose outward normal acts as ``nu = i eps sigma_1`` on ``(F, G)``:

* MIT with sign ``c``: ``nu s = i c s``, i.e. ``G = eps c F``;
* local with sign ``c``: ``s`` lies in the ``c`` eigenspace of the boundary
  chirality ``nu omega = eps sigma_2``, i.e. ``G = i eps c F``;
* APS(b): the trace components on which the induced operator exceeds ``b``
  vanish;
* modified APS(b, c): the same applied to ``(1 + c nu) s``.
"""

from __future__ import annotations

from ..errors import ArgumentError, CapabilityError, NoBoundaryError
from .radial import Closure
from .types import BoundaryCondition, OperatorMatrix

_TOL = 1e-12


def trace_constraints(bc: BoundaryCondition, eps: int, d: float) -> list[tuple]:
    """Rows ``(p, q)`` with ``p F + q G = 0``; ``d`` is the induced eigenvalue on ``F``."""
    c = bc.sign
    if bc.kind == "mit":
        return [(-eps * c, 1)]
    if bc.kind == "local":
        return [(-1j * eps * c, 1)]
    thresh = bc.b + _TOL * max(1.0, abs(bc.b))
    rows = []
    if d > thresh:
        rows.append((1, 0) if bc.kind == "aps" else (1, 1j * c * eps))
    if -d > thresh:
        rows.append((0, 1) if bc.kind == "aps" else (1j * c * eps, 1))
    return rows


def closure_from_rows(rows) -> Closure:
    if not rows:
        return Closure("free")
    if len(rows) >= 2:
        return Closure("dead")
    p, q = rows[0]
    if q == 0:
        return Closure("dirichlet")
    return Closure("robin", complex(-p / q))


def apply_bc(op: OperatorMatrix, bc: BoundaryCondition,
             boundaryDirac: OperatorMatrix | None = None) -> OperatorMatrix:
    """Impose ``bc`` on a per-mode operator produced by ``assemble_dirac``."""
    if op.meta.get("family") != "radial":
        raise NoBoundaryError("boundary conditions apply to per-mode operators on bounded geometries")
    radial = op.meta["radial"]
    geometry = radial.geometry
    if not geometry.has_boundary:
        raise NoBoundaryError(f"{geometry.kind} has no boundary")
    if bc.needs_boundary_dirac:
        if boundaryDirac is None:
            raise ArgumentError(f"{bc.kind} needs the boundary Dirac operator")
        circles = boundaryDirac.meta["circles"]
    else:
        circles = None
    if geometry.dim != 2 and bc.needs_boundary_dirac:
        raise CapabilityError("spectral boundary conditions are provided for surfaces")

    ends = []
    sing = radial.profile.singular
    for idx, (end, eps) in enumerate((("left", -1), ("right", 1))):
        if sing[idx]:
            ends.append(None)
            continue
        if circles is not None:
            circle = circles[0] if eps == -1 or len(circles) == 1 else circles[1]
            d = circle.radial_eigenvalue(radial.mu)
        else:
            xe = radial.profile.a if eps == -1 else radial.profile.b
            d = eps * radial.mu / float(radial.profile.s(xe))
        rows = trace_constraints(bc, eps, d)
        if radial.swapped:
            rows = [(q, p) for p, q in rows]
        ends.append(closure_from_rows(rows))
    left, right = ends
    out = radial.dirac(left, right, bc=bc)
    closures = [c for c in ends if c is not None]
    out.meta["nonelliptic"] = any(c.kind == "free" for c in closures)
    out.meta["dead"] = any(c.kind == "dead" for c in closures)
    return out


def constraint_residual(bc: BoundaryCondition, eps: int, d: float, F: complex, G: complex) -> float:
    """Largest violation of the trace constraints by ``(F, G)``."""
    rows = trace_constraints(bc, eps, d)
    if not rows:
        return 0.0
    return max(abs(p * F + q * G) for p, q in rows) / max(abs(F) + abs(G), 1e-300)

