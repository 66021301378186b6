import math

import numpy as np
import pytest

from diracbound import bundle
from diracbound.bounds import (bound_aps, bound_maps, bound_t1, bound_thm2, bound_volume,
                               equality_diagnostics, solve_neumann_weight, sobolev_constant)
from diracbound.eigensolve import dirac_spectrum, gamma_estimate
from diracbound.errors import ArgumentError, DimensionError


def test_sobolev_constant_closed_form():
    expected = (4 / math.gamma(1.5)) ** (2 / 3) / (3 * math.pi)
    assert sobolev_constant(3) == pytest.approx(expected, rel=1e-15)
    with pytest.raises(DimensionError):
        sobolev_constant(2)


@pytest.mark.parametrize("kind,params,expected", [
    ("sphere", {"radius": 1.0}, 1.0),
    ("sphere", {"radius": 2.0}, 0.25),
    ("disk", {"radius": 1.0}, 2.0),
    ("disk", {"radius": 0.5}, 8.0),
    ("torus", {"L1": 1.0, "L2": 2.0}, 0.0),
    ("cylinder", {"length": 1.0, "circumference": 2.0}, 0.0),
])
def test_surface_bound_values(kind, params, expected):
    assert bound_t1(bundle(kind, **params)) == pytest.approx(expected, abs=1e-14)


def test_surface_bound_needs_dimension_two():
    with pytest.raises(DimensionError):
        bound_t1(bundle("sphere", radius=1.0, n=3))
    with pytest.raises(DimensionError):
        bound_thm2(bundle("disk", radius=1.0))


def test_robin_bound_on_round_three_sphere():
    assert bound_thm2(bundle("sphere", radius=1.0, n=3), resolution=128) == pytest.approx(
        2.25, abs=1e-10)


def test_spectral_bounds_on_disk(unit_disk):
    assert bound_aps(unit_disk, 0.5, resolution=128) == pytest.approx(0.0, abs=1e-10)
    # a larger b weakens the bound
    assert bound_aps(unit_disk, 0.8, resolution=128) < bound_aps(unit_disk, 0.6, resolution=128)
    # for b <= 0 the modified bound does not depend on b
    assert bound_maps(unit_disk, -1.0, 128) == pytest.approx(bound_maps(unit_disk, -3.0, 128))


def test_spectral_bound_below_computed_eigenvalue(unit_disk):
    from diracbound.operators import maps
    lam = dirac_spectrum(unit_disk, maps(-1.0), resolution=256, k=1).eigenvalues[0]
    assert abs(lam) ** 2 >= bound_maps(unit_disk, -1.0, 256)


def test_volume_bound_closed_form_and_hypotheses():
    ball = bundle("ball", radius=1.0)
    S = sobolev_constant(3)
    rep = bound_volume(ball, 0.0, gamma=0.1)
    assert rep.rhs == pytest.approx(9 / (4 * S * (4 * math.pi / 3) ** (2 / 3)), rel=1e-14)
    # flat interior: kappa = 0 cannot dominate a positive gamma
    assert not rep.hypothesesOk
    rep = bound_volume(ball, 1.0, gamma=-1.0)
    assert rep.hypothesesOk
    assert rep.rhs == pytest.approx(1 / (S * (4 * math.pi / 3) ** (2 / 3)), rel=1e-14)


def test_gamma_estimate_is_finite_on_ball():
    g = gamma_estimate(bundle("ball", radius=1.0).geometry, 64)
    assert math.isfinite(g)


def test_neumann_weight_on_disk(unit_disk):
    w = solve_neumann_weight(unit_disk, resolution=256)
    assert w.constant == pytest.approx(1.0, abs=1e-12)
    assert w.residual < 1e-10
    # Lap(phi)/2 = 1 with d(phi)/dr = 1 at r = 1 gives phi = r^2/2 + const
    shape = w.values - w.values[0]
    assert np.max(abs(shape - w.nodes**2 / 2)) < 1e-3


def test_neumann_weight_dimension_check():
    with pytest.raises(DimensionError):
        solve_neumann_weight(bundle("ball", radius=1.0))


def test_equality_diagnostics_on_round_sphere(unit_sphere):
    res = dirac_spectrum(unit_sphere, resolution=256, k=1)
    diag = equality_diagnostics(unit_sphere, res)
    assert diag.killingResidual < 1e-4
    assert diag.curvatureResidual == pytest.approx(0.0, abs=1e-14)
    assert diag.kappaRelation < 1e-4


def test_equality_diagnostics_on_disk_detect_strictness(unit_disk):
    from diracbound.operators import local
    res = dirac_spectrum(unit_disk, local(1), resolution=256, k=1)
    diag = equality_diagnostics(unit_disk, res)
    assert diag.meanCurvatureMax == pytest.approx(1.0)
    assert not diag.all_below(1e-3)


def test_equality_diagnostics_need_vector(unit_disk):
    from diracbound.operators import mit
    res = dirac_spectrum(unit_disk, mit(1), resolution=64, k=1)
    with pytest.raises(ArgumentError):
        equality_diagnostics(unit_disk, res)
