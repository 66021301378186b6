import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diracbound import (build_clifford, bundle, clifford_mult, curvature_endomorphism,
                        eta2_for_xi, twistor_params)
from diracbound.errors import DimensionError, ParameterError, ShapeError

finite = st.floats(-10, 10, allow_nan=False)


@pytest.mark.parametrize("n", [2, 3])
def test_gammas_satisfy_clifford_relations(n):
    rep = build_clifford(n)
    eye = np.eye(rep.rank)
    for i, a in enumerate(rep.gammas):
        for j, b in enumerate(rep.gammas):
            assert np.allclose(a @ b + b @ a, -2 * (i == j) * eye)
        assert np.allclose(a.conj().T, -a)


@given(st.lists(finite, min_size=3, max_size=3), st.lists(finite, min_size=4, max_size=4))
def test_vector_squares_to_minus_norm(x, s):
    rep = build_clifford(3)
    spinor = np.array([s[0] + 1j * s[1], s[2] + 1j * s[3]])
    twice = clifford_mult(rep, x, clifford_mult(rep, x, spinor))
    assert np.allclose(twice, -np.dot(x, x) * spinor, atol=1e-9 * (1 + np.dot(x, x)))


def test_chirality_anticommutes_in_two_dimensions():
    rep = build_clifford(2)
    w = rep.chirality()
    assert np.allclose(w @ w, np.eye(2))
    for g in rep.gammas:
        assert np.allclose(w @ g + g @ w, 0)
    with pytest.raises(DimensionError):
        build_clifford(3).chirality()


def test_shape_and_dimension_errors():
    with pytest.raises(DimensionError):
        build_clifford(4)
    with pytest.raises(ShapeError):
        clifford_mult(build_clifford(2), [1.0, 0.0, 0.0], [1, 0])


@given(st.floats(-5, 5), st.floats(-5, 5), st.sampled_from([2, 3]))
def test_twistor_norm_matches_pointwise_identity(eta1, eta2, n):
    if abs(eta1) + abs(eta2) < 1e-3:
        return
    tp = twistor_params(eta1, eta2, n)
    # |P s|^2 = eta1^2 |grad s|^2 + eta2 (n eta2 - 2 eta1) |D s|^2; the defining combination
    assert math.isclose(tp.normSq, eta1**2 + eta2 * (n * eta2 - 2 * eta1), rel_tol=1e-12, abs_tol=1e-12)
    assert tp.normSq > 0
    assert -1 / (n - 1) - 1e-12 <= tp.xi <= 1 + 1e-12


def test_zero_eta_rejected():
    with pytest.raises(ParameterError):
        twistor_params(0.0, 0.0, 2)


@settings(max_examples=50)
@given(st.floats(-0.99, 0.99), st.sampled_from([2, 3]))
def test_eta2_for_xi_inverts_xi(xi, n):
    if xi <= -1 / (n - 1):
        return
    eta2 = eta2_for_xi(xi, n)
    assert math.isclose(twistor_params(1.0, eta2, n).xi, xi, abs_tol=1e-10)


def test_eta2_for_xi_branch_vanishes_at_zero():
    assert eta2_for_xi(0.0, 3) == 0.0
    with pytest.raises(ParameterError):
        eta2_for_xi(1.0, 2)


def test_standard_twistor_operator_is_the_degenerate_direction():
    assert math.isclose(twistor_params(2.0, 1.0, 2).xi, -1.0)
    assert math.isclose(twistor_params(3.0, 1.0, 3).xi, -0.5)


def test_curvature_endomorphism_constants():
    assert curvature_endomorphism(bundle("sphere", radius=1.0)).kappa == pytest.approx(0.5)
    assert curvature_endomorphism(bundle("sphere", radius=2.0, n=3)).kappa == pytest.approx(6 / 4 / 4)
    twisted = bundle("torus", L1=1.0, L2=1.0, twist=2 * math.pi)
    endo = curvature_endomorphism(twisted)
    assert endo.kappa == pytest.approx(-2 * math.pi)
    assert np.allclose(np.linalg.eigvalsh(endo.value), [-2 * math.pi, 2 * math.pi])
    with pytest.raises(ParameterError):
        curvature_endomorphism(bundle("disk", radius=1.0), x=(2.0, 0.0))
