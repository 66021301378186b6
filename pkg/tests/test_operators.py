import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diracbound import bundle
from diracbound.errors import (ArgumentError, CapabilityError, NoBoundaryError, ParameterError,
                               ResolutionError, ShapeError)
from diracbound.operators import (HERMITIAN, BoundaryCondition, RadialMode, apply_bc, aps,
                                  assemble_dirac, boundary_circles, boundary_dirac,
                                  export_triplets, ibp_residual, local, maps, mit,
                                  read_triplets, trace_constraints)
from diracbound.operators.torus import exact_landau_spectrum, exact_torus_spectrum


def _hermitian_in_weights(op):
    S = op.symmetric()
    return np.max(abs(S - S.conj().T))


@pytest.mark.parametrize("spin", [(0, 0), (1, 0), (1, 1)])
def test_fourier_operator_matches_lattice_spectrum(spin):
    g = bundle("torus", L1=1.0, L2=1.5, spin=spin)
    op = assemble_dirac(g, 8)
    assert op.symmetryFlag == HERMITIAN
    vals = np.sort(np.linalg.eigvalsh(op.dense()))
    cutoff = 2 * math.pi * 3 / 1.5
    exact = exact_torus_spectrum(1.0, 1.5, spin, cutoff)
    inside = vals[abs(vals) <= cutoff * 0.999]
    assert np.allclose(np.sort(inside), exact[abs(exact) <= cutoff * 0.999], atol=1e-12)


def test_landau_operator_levels():
    b = bundle("torus", L1=1.0, L2=1.0, twist=2 * math.pi)
    op = assemble_dirac(b, 12)
    vals = np.sort(abs(np.linalg.eigvalsh(op.dense())))
    exact = np.unique(abs(exact_landau_spectrum(2 * math.pi, 5)))
    distinct = np.unique(np.round(vals, 9))[:6]
    assert np.allclose(distinct, exact, atol=1e-9)


@pytest.mark.parametrize("kind,params", [("disk", {"radius": 1.0}), ("sphere", {"radius": 1.0}),
                                         ("annulus", {"r_in": 0.5, "r_out": 1.0}),
                                         ("sphere", {"radius": 1.0, "n": 3})])
@pytest.mark.parametrize("mode", [0, 1, 2])
def test_radial_operator_symmetry_with_self_adjoint_closure(kind, params, mode):
    g = bundle(kind, **params)
    op = RadialMode(g.geometry, mode, 32).dirac()
    if g.geometry.has_boundary:
        op = apply_bc(op, local(1))
    assert _hermitian_in_weights(op) < 1e-12


def test_mit_closure_is_not_self_adjoint(unit_disk):
    op = apply_bc(assemble_dirac(unit_disk, 32), mit(1))
    assert op.symmetryFlag == "general"


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_green_formula_holds_without_boundary_condition(seed):
    rng = np.random.default_rng(seed)
    op = assemble_dirac(bundle("annulus", r_in=0.5, r_out=1.0), 24, mode=1)
    v1 = rng.standard_normal(op.size) + 1j * rng.standard_normal(op.size)
    v2 = rng.standard_normal(op.size) + 1j * rng.standard_normal(op.size)
    scale = np.linalg.norm(v1) * np.linalg.norm(v2) * 24
    assert ibp_residual(op, op.field(v1), op.field(v2)) <= 1e-10 * scale


def test_ibp_shape_check(unit_disk):
    op = assemble_dirac(unit_disk, 16)
    bad = op.field(np.zeros(op.size))
    bad.values = np.zeros(3)
    with pytest.raises(ShapeError):
        ibp_residual(op, bad, bad)


def test_trace_rows():
    assert trace_constraints(mit(1), 1, 0.5) == [(-1, 1)]
    assert trace_constraints(local(-1), -1, 0.5) == [(-1j, 1)]
    assert trace_constraints(aps(0.0), 1, 0.5) == [(1, 0)]
    assert trace_constraints(aps(0.6), 1, 0.5) == []
    assert trace_constraints(aps(0.0), 1, -0.5) == [(0, 1)]


def test_boundary_condition_validation():
    with pytest.raises(ParameterError):
        BoundaryCondition("robin")
    with pytest.raises(ParameterError):
        mit(2)
    with pytest.raises(ParameterError):
        aps(float("nan"))


def test_boundary_condition_errors(unit_sphere, unit_disk):
    with pytest.raises(NoBoundaryError):
        apply_bc(assemble_dirac(unit_sphere, 16), mit(1))
    with pytest.raises(ArgumentError):
        apply_bc(assemble_dirac(unit_disk, 16), aps(0.0))
    with pytest.raises(NoBoundaryError):
        boundary_dirac(unit_sphere, 16)
    with pytest.raises(ResolutionError):
        boundary_circles(unit_disk.geometry, 4)
    with pytest.raises(CapabilityError):
        boundary_circles(bundle("ball", radius=1.0).geometry, 16)


def test_boundary_operator_spectrum_of_round_circle(unit_disk):
    op = boundary_dirac(unit_disk, 16)
    vals = np.sort(np.linalg.eigvalsh(op.symmetric()))
    # eigenvalues +-(k + 1/2) on the unit circle, each twice
    half = vals[vals > 0][:4]
    assert np.allclose(half, [0.5, 0.5, 1.5, 1.5])


@pytest.mark.parametrize("kind,params", [("disk", {"radius": 2.0}),
                                         ("cylinder", {"length": 1.0, "circumference": 2.0, "spin": 1})])
def test_normal_anticommutes_with_boundary_operator(kind, params):
    rng = np.random.default_rng(0)
    circle = boundary_circles(bundle(kind, **params).geometry, 64)[0]
    # band-limited data so that multiplication by the normal stays resolved
    c = np.zeros((2, 64), dtype=complex)
    c[:, :6] = rng.standard_normal((2, 6))
    t = circle.from_modes(c).ravel()
    nu = circle.nu()
    lhs = circle.apply(circle.clifford(nu, t)) + circle.clifford(nu, circle.apply(t))
    assert np.max(abs(lhs)) < 1e-12


def test_spectral_projection_is_idempotent(unit_disk):
    circle = boundary_circles(unit_disk.geometry, 32)[0]
    t = np.random.default_rng(1).standard_normal(64).astype(complex)
    p = circle.project(t, 0.0)
    assert np.allclose(circle.project(p, 0.0), p)
    assert circle.inner(circle.apply(p), p).real <= 1e-12


def test_triplet_roundtrip(tmp_path, unit_disk):
    op = apply_bc(assemble_dirac(unit_disk, 16, mode=1), mit(1))
    path = tmp_path / "d.txt"
    nnz = export_triplets(op, path)
    back = read_triplets(path)
    assert nnz == np.count_nonzero(op.dense())
    assert back.symmetryFlag == op.symmetryFlag
    assert np.array_equal(back.dense(), op.dense())


def test_modified_aps_dead_and_free_ends():
    b = bundle("disk", radius=1.0)
    bd = boundary_dirac(b, 16)
    free = apply_bc(assemble_dirac(b, 16, mode=0), aps(0.5), bd)
    assert free.meta["nonelliptic"]
    op = apply_bc(assemble_dirac(b, 16, mode=0), maps(-1.0), bd)
    assert op.meta["dead"]
