import math

import numpy as np
import pytest
import scipy.sparse as sp
from scipy.optimize import brentq
from scipy.special import jv

from diracbound import bundle, kernels
from diracbound.eigensolve import (contour_count, dirac_spectrum, gamma_refinement,
                                   hermitian_eigs, holomorphy_defect, lanczos,
                                   lanczos_smallest_modulus, mode_spectrum,
                                   nonnormal_mode_roots, robin_min, shooting_problem,
                                   spectral_order)
from diracbound.errors import ParameterError, SymmetryError
from diracbound.operators import OperatorMatrix, assemble_dirac, mit


def _random_hermitian(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (A + A.conj().T)


def test_lanczos_matches_dense_extremes():
    A = _random_hermitian(200, 3)
    exact = np.linalg.eigvalsh(A)
    lo, _ = lanczos(lambda v: A @ v, 200, 5, "SA", tol=1e-11)
    hi, _ = lanczos(lambda v: A @ v, 200, 5, "LA", tol=1e-11)
    assert np.allclose(lo, exact[:5], atol=1e-9)
    assert np.allclose(hi, exact[::-1][:5], atol=1e-9)


def test_smallest_modulus_pairs_of_symmetric_spectrum():
    # diagonal operator with spectrum symmetric about zero and exact pairs
    d = np.concatenate([np.arange(1, 301), -np.arange(1, 301)]).astype(float) * 0.1
    A = sp.diags(d)
    lam, X = lanczos_smallest_modulus(lambda v: A @ v, d.size, 4, tol=1e-10)
    assert np.allclose(np.sort(abs(lam)), [0.1, 0.1, 0.2, 0.2])
    assert np.linalg.norm(A @ X - X * lam) < 1e-8


def test_hermitian_eigs_dense_and_lanczos_agree():
    op = assemble_dirac(bundle("sphere", radius=1.0), 200, mode=0)
    dense = hermitian_eigs(op, 4, method="dense")
    krylov = hermitian_eigs(op, 4, method="lanczos")
    assert np.allclose(np.sort(dense.eigenvalues.real), np.sort(krylov.eigenvalues.real),
                       atol=1e-9)
    assert max(dense.residuals) < 1e-10


def test_hermitian_eigs_rejects_general_operator(unit_disk):
    with pytest.raises(SymmetryError):
        hermitian_eigs(OperatorMatrix(np.array([[0, 1], [0, 0]], dtype=complex), "general"), 1)
    with pytest.raises(ParameterError):
        hermitian_eigs(assemble_dirac(bundle("sphere", radius=1.0), 16, mode=0), 0)


def test_spectral_order_breaks_ties_by_real_part():
    vals = np.array([1.0, -1.0, 0.5j, -0.5])
    assert list(spectral_order(vals)) == [3, 2, 1, 0]


def test_contour_count_of_polynomial():
    roots = np.array([0.3 + 0.2j, -0.5 - 0.1j, 2.0 + 2.0j])
    f = lambda z: np.prod([z - r for r in roots], axis=0)
    count, moment = contour_count(f, (-1.0, 1.0, -1.0, 1.0))
    assert count == 2
    # the moment only seeds Newton, so a few digits suffice
    assert abs(moment - roots[:2].sum()) < 1e-4


def _mit_root(m):
    # the MIT(+) determinant of mode m on the unit disk is J_m + i J_{m+1}
    from scipy.optimize import newton
    return newton(lambda z: jv(m, z) + 1j * jv(m + 1, z), 3.0 + 1.0j, tol=1e-14)


def test_shooting_finds_mit_bessel_root(unit_disk):
    prob = shooting_problem(unit_disk.geometry, 0, mit(1), region=(-4, 4, -2, 2))
    assert holomorphy_defect(prob) < 1e-6
    roots = nonnormal_mode_roots(prob)
    oracle = _mit_root(0)
    near = roots[np.argmin(abs(roots - oracle))]
    assert abs(near - oracle) < 1e-9
    # the determinant is real-symmetric up to the chirality: roots come in +-Re pairs
    assert np.any(abs(roots - (-oracle.real + 1j * oracle.imag)) < 1e-9)


def test_mode_spectrum_reports_shooting_for_mit(unit_disk):
    data = mode_spectrum(unit_disk, 0, mit(1), resolution=64, k=2)
    assert data["method"] == "shooting"
    assert abs(abs(data["values"][0]) - abs(_mit_root(0))) < 1e-9


@pytest.mark.parametrize("n,expected", [(2, 1.0), (3, 1.5)])
def test_round_sphere_lowest_eigenvalue(n, expected):
    res = dirac_spectrum(bundle("sphere", radius=1.0, n=n), resolution=256, k=4)
    assert np.allclose(abs(res.eigenvalues), expected, atol=5e-5)


def test_disk_local_lowest_eigenvalue(unit_disk):
    from diracbound.operators import local
    oracle = brentq(lambda z: jv(0, z) - jv(1, z), 1.0, 2.0)
    res = dirac_spectrum(unit_disk, local(1), resolution=512, k=2)
    assert abs(abs(res.eigenvalues[0]) - oracle) < 1e-4


def test_landau_spectrum_degeneracy():
    b = bundle("torus", L1=1.0, L2=1.0, twist=4 * math.pi)
    res = dirac_spectrum(b, resolution=16, k=6)
    vals = np.sort(abs(res.eigenvalues))
    assert np.allclose(vals[:2], 0.0, atol=1e-10)
    assert np.allclose(vals[2:6], math.sqrt(2 * 4 * math.pi), atol=1e-9)


def test_robin_minimum_on_disk(unit_disk):
    beta = 1.0
    k = brentq(lambda z: -z * jv(1, z) + beta * jv(0, z), 0.1, 2.4)
    value = robin_min(unit_disk.geometry, 1.0, 0.0, beta, resolution=512)
    assert abs(value - k * k) < 1e-4


def test_robin_minimizer_rayleigh(unit_disk):
    res = robin_min(unit_disk.geometry, 2.0, 0.5, 1.0, resolution=64, return_vector=True)
    assert abs(res.rayleigh(res.u) - res.value) < 1e-10


def test_robin_rejects_nonpositive_gradient(unit_disk):
    with pytest.raises(ParameterError):
        robin_min(unit_disk.geometry, 0.0)


def test_gamma_refinement_never_decreases():
    seq = gamma_refinement(bundle("ball", radius=1.0).geometry, 16, 4)
    assert all(b >= a - 1e-12 for a, b in zip(seq, seq[1:]))


@pytest.mark.skipif(kernels.BACKEND != "cython", reason="compiled kernels not built")
def test_compiled_and_python_kernels_agree():
    rng = np.random.default_rng(0)
    q, w = rng.standard_normal(201), rng.standard_normal(201)
    lam = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    a = kernels.rk4_shoot(q, w, 0.01, lam, 1.0, 0.0, backend="python")
    b = kernels.rk4_shoot(q, w, 0.01, lam, 1.0, 0.0, backend="cython")
    assert np.allclose(a, b, rtol=1e-13, atol=0)
