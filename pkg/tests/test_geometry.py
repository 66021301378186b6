import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from diracbound import bundle, make_geometry, rescale
from diracbound.errors import CapabilityError, DimensionError, ParameterError

CASES = [
    # kind, params, volume, scalar curvature, total mean curvature
    ("disk", {"radius": 2.0}, 4 * math.pi, 0.0, 2 * math.pi),
    ("annulus", {"r_in": 0.5, "r_out": 1.0}, 0.75 * math.pi, 0.0, 0.0),
    ("cylinder", {"length": 1.0, "circumference": 2.0}, 2.0, 0.0, 0.0),
    ("sphere", {"radius": 1.0}, 4 * math.pi, 2.0, 0.0),
    ("sphere", {"radius": 1.0, "n": 3}, 2 * math.pi**2, 6.0, 0.0),
    ("ball", {"radius": 1.0}, 4 * math.pi / 3, 0.0, 4 * math.pi),
    ("torus", {"L1": 1.0, "L2": 2.0}, 2.0, 0.0, 0.0),
]


@pytest.mark.parametrize("kind,params,vol,R,totalH", CASES)
def test_closed_form_invariants(kind, params, vol, R, totalH):
    g = make_geometry(kind, **params)
    assert g.volume == pytest.approx(vol, rel=1e-13)
    assert g.scalar_curvature == pytest.approx(R, abs=1e-13)
    assert g.total_mean_curvature == pytest.approx(totalH, abs=1e-12)


def test_boundary_components_use_outward_normal():
    inner, outer = make_geometry("annulus", r_in=0.5, r_out=1.0).boundary()
    assert inner.mean_curvature == pytest.approx(-2.0)
    assert outer.mean_curvature == pytest.approx(1.0)
    assert inner.area == pytest.approx(math.pi)
    assert make_geometry("sphere", radius=1.0).boundary() == []


@given(st.floats(0.1, 10.0), st.sampled_from(CASES))
def test_rescaling_laws(sigma, case):
    kind, params, *_ = case
    g = make_geometry(kind, **params)
    h = rescale(g, sigma)
    n = g.dim
    assert h.volume == pytest.approx(sigma**n * g.volume, rel=1e-12)
    assert h.scalar_curvature == pytest.approx(g.scalar_curvature / sigma**2, rel=1e-12, abs=1e-14)
    for a, b in zip(h.boundary(), g.boundary()):
        assert a.mean_curvature == pytest.approx(b.mean_curvature / sigma, rel=1e-12, abs=1e-14)


@pytest.mark.parametrize("kind,params,err", [
    ("disk", {}, ParameterError),
    ("disk", {"radius": -1.0}, ParameterError),
    ("disk", {"radius": 1.0, "L1": 2.0}, ParameterError),
    ("annulus", {"r_in": 1.0, "r_out": 0.5}, ParameterError),
    ("torus", {"L1": 1.0, "L2": 1.0, "spin": (2, 0)}, ParameterError),
    ("sphere", {"radius": 1.0, "n": 4}, DimensionError),
    ("ball", {"radius": 1.0, "n": 2}, DimensionError),
])
def test_invalid_parameters(kind, params, err):
    with pytest.raises(err):
        make_geometry(kind, **params)


def test_twist_flux_must_be_integral():
    b = bundle("torus", L1=1.0, L2=1.0, twist=4 * math.pi)
    assert b.flux == 2
    assert b.kappa == pytest.approx(-4 * math.pi)
    with pytest.raises(ParameterError):
        bundle("torus", L1=1.0, L2=1.0, twist=1.0)
    with pytest.raises(CapabilityError):
        bundle("disk", radius=1.0, twist=2 * math.pi)


def test_rescaled_bundle_keeps_flux():
    b = bundle("torus", L1=1.0, L2=1.0, twist=2 * math.pi)
    assert b.rescaled(3.0).flux == b.flux
    assert b.rescaled(3.0).twist == pytest.approx(2 * math.pi / 9)


def test_contains():
    g = make_geometry("annulus", r_in=0.5, r_out=1.0)
    assert g.contains((0.7, 0.0))
    assert not g.contains((0.1, 0.0))
