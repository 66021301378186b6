import math

import numpy as np
import pytest

from diracbound import bundle
from diracbound.eigensolve import dirac_spectrum
from diracbound.errors import (ArgumentError, CapabilityError, NoBoundaryError,
                               ParameterError, ResolutionError)
from diracbound.identities import (BOUNDARY_VARIANTS, WEIGHTED_VARIANTS, TorusGrid,
                                   WeightParams, bc_violation, boundary_sections,
                                   check_bochner, check_boundary_identity, check_ri,
                                   check_scaling, check_weighted_identity, est2_limit,
                                   fitted_order, random_instance)
from diracbound.operators import aps, boundary_circles, local, maps, mit


@pytest.fixture(scope="module")
def flat():
    return bundle("torus", L1=1.0, L2=1.3)


@pytest.fixture(scope="module")
def grid(flat):
    return TorusGrid.for_bundle(flat, 64)


def test_fitted_order_of_exact_power_law():
    series = [(h, 3 * h**2) for h in (0.1, 0.05, 0.025)]
    assert fitted_order(series) == pytest.approx(2.0)


def test_grid_validation(flat):
    with pytest.raises(ResolutionError):
        TorusGrid(1.0, 1.0, 7)
    with pytest.raises(CapabilityError):
        TorusGrid.for_bundle(bundle("torus", L1=1.0, L2=1.0, twist=2 * math.pi), 32)


def test_random_section_has_unit_norm(grid):
    s = grid.random_section(np.random.default_rng(0))
    assert grid.integrate(np.sum(abs(s) ** 2, axis=0)) == pytest.approx(1.0)


@pytest.mark.parametrize("variant", WEIGHTED_VARIANTS)
def test_weighted_identities_hold(flat, grid, variant):
    rng = np.random.default_rng(hash(variant) % 2**32)
    for _ in range(10):
        s, w, tp = random_instance(grid, rng, variant)
        rep = check_weighted_identity(flat, None, grid.field(s), w, tp, variant)
        assert rep.residual <= 1e-10 * rep.scale, rep.to_dict()


def test_identity_with_tuple_parameters(flat, grid):
    rng = np.random.default_rng(5)
    s, w, _ = random_instance(grid, rng, "est1")
    rep = check_weighted_identity(flat, None, s, w, (1.5, 0.2), "est1")
    assert rep.passed(1e-10)


def test_identity_rejects_bad_arguments(flat, grid):
    s, w, tp = random_instance(grid, np.random.default_rng(1), "est1")
    with pytest.raises(NoBoundaryError):
        check_weighted_identity(flat, mit(1), s, w, tp, "est1")
    with pytest.raises(ParameterError):
        check_weighted_identity(flat, None, s, w, tp, "est7")
    with pytest.raises(ParameterError):
        check_weighted_identity(flat, None, s, w, (1.0, 0.3), "est11")
    with pytest.raises(ParameterError):
        check_weighted_identity(flat, None, s, w, (0.0, 0.0), "PP2")
    with pytest.raises(ParameterError):
        check_weighted_identity(flat, None, s, WeightParams(w.phi, w.tau, w.delta, 0.0, grid),
                                tp, "est2")


def test_est11_is_est1_at_tied_parameters(flat, grid):
    s, w, tp = random_instance(grid, np.random.default_rng(2), "est11")
    a = check_weighted_identity(flat, None, s, w, tp, "est11")
    b = check_weighted_identity(flat, None, s, w, tp, "est1")
    assert a.rhs == pytest.approx(b.rhs, rel=1e-12)


def test_est2_is_first_order_limit(flat, grid):
    s, w, _ = random_instance(grid, np.random.default_rng(3), "est2")
    rep = est2_limit(grid, s, w, bundle=flat)
    assert abs(rep.order - 1.0) <= 0.1


@pytest.mark.parametrize("twist", [0.0, 2 * math.pi, 4 * math.pi])
def test_bochner_on_torus(twist):
    rep = check_bochner(bundle("torus", L1=1.0, L2=1.0, twist=twist), resolution=16)
    assert rep.residual <= 1e-12


@pytest.mark.parametrize("kind", ["disk", "sphere"])
def test_bochner_per_mode_is_second_order(kind):
    rep = check_bochner(bundle(kind, radius=1.0), resolution=32, mode=1, levels=3)
    assert rep.order >= 1.9


def test_bochner_refuses_three_dimensional_modes():
    with pytest.raises(CapabilityError):
        check_bochner(bundle("ball", radius=1.0), resolution=16)


@pytest.mark.parametrize("bc", [mit(1), mit(-1), local(1), local(-1)])
def test_sections_satisfy_their_condition(unit_disk, bc):
    circle = boundary_circles(unit_disk.geometry, 64)[0]
    s = boundary_sections(unit_disk, bc, 64)[0]
    assert bc_violation(circle, bc, s) < 1e-12


@pytest.mark.parametrize("variant", ["b1", "DD", "D"])
@pytest.mark.parametrize("bc", [mit(1), local(-1)])
def test_boundary_identities_converge(unit_disk, variant, bc):
    rep = check_boundary_identity(unit_disk, bc, variant=variant, points=64, levels=4)
    assert rep.order >= 1.0 or rep.pointwise <= 1e-12
    exact = check_boundary_identity(unit_disk, bc, variant=variant, derivative="spectral")
    assert exact.pointwise <= 1e-10


def test_boundary_b2_on_annulus():
    ann = bundle("annulus", r_in=0.5, r_out=1.0)
    assert check_boundary_identity(ann, local(1), variant="b2").pointwise <= 1e-10


@pytest.mark.parametrize("b", [-1.0, 0.0, 0.5])
def test_modified_aps_pairing(unit_disk, b):
    for seed in range(5):
        rep = check_boundary_identity(unit_disk, maps(b), variant="maps", seed=seed)
        assert rep.residual <= 1e-10 * rep.scale


def test_boundary_identity_errors(unit_disk, unit_sphere):
    with pytest.raises(NoBoundaryError):
        check_boundary_identity(unit_sphere, None)
    with pytest.raises(ParameterError):
        check_boundary_identity(unit_disk, aps(0.0), variant="b1")
    with pytest.raises(ParameterError):
        check_boundary_identity(unit_disk, mit(1), variant="b9")
    s = boundary_sections(unit_disk, mit(1), 64)
    with pytest.raises(ArgumentError):
        check_boundary_identity(unit_disk, mit(1), s=s, levels=2)
    assert set(BOUNDARY_VARIANTS) >= {"b1", "maps"}


def test_curvature_relation_on_sphere(unit_sphere):
    res = dirac_spectrum(unit_sphere, resolution=256, k=1)
    rep = check_ri(unit_sphere, res)
    assert rep.residual < 1e-4
    assert rep.info["aFitted"] == pytest.approx(rep.info["a"], abs=1e-4)


@pytest.mark.parametrize("sigma", [0.5, 2.0, 5.0])
def test_scaling_of_torus_spectrum(sigma):
    rep = check_scaling(bundle("torus", L1=1.0, L2=1.5, spin=(1, 0)), sigma, resolution=8)
    assert rep.relative <= 1e-8


def test_scaling_rejects_nonpositive_factor(unit_torus):
    with pytest.raises(ParameterError):
        check_scaling(unit_torus, 0.0)
