"""End-to-end acceptance checks.

Every test records one ``criterion N: PASS|FAIL ...`` line, printed in the
terminal summary in numerical order.
"""

import math
import time

import numpy as np
import pytest
from scipy.optimize import brentq
from scipy.special import jv

from diracbound import bundle
from diracbound.bounds import (bound_aps, bound_maps, bound_t1, bound_thm2, bound_volume,
                               equality_diagnostics)
from diracbound.eigensolve import dirac_spectrum, mode_spectrum
from diracbound.identities import (WEIGHTED_VARIANTS, TorusGrid, check_bochner,
                                   check_boundary_identity, check_scaling,
                                   check_weighted_identity, fitted_order, random_instance)
from diracbound.operators import (aps, assemble_dirac, boundary_circles, local, maps, mit)

from conftest import ACCEPTANCE_LINES, session_elapsed


def record(number, ok, detail):
    ACCEPTANCE_LINES.append(f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, detail


def test_identity_suite():
    torus = bundle("torus", L1=1.0, L2=1.3)
    grid = TorusGrid.for_bundle(torus, 64)
    rng = np.random.default_rng(20261018)
    start = time.perf_counter()
    worst = 0.0
    for variant in WEIGHTED_VARIANTS:
        for _ in range(100):
            s, w, tp = random_instance(grid, rng, variant)
            rep = check_weighted_identity(torus, None, s, w, tp, variant)
            worst = max(worst, rep.residual / rep.scale)
    elapsed = time.perf_counter() - start
    record(1, worst <= 1e-10 and elapsed <= 60,
           f"worst residual/scale {worst:.2e} over 500 instances in {elapsed:.1f} s")


def test_bochner_exactness():
    worst = max(check_bochner(bundle("torus", L1=1.0, L2=1.0, twist=B), resolution=32).residual
                for B in (0.0, 2 * math.pi, 4 * math.pi))
    record(2, worst <= 1e-12, f"max entry of D^2 - (connection Laplacian + curvature) {worst:.2e}")


def test_round_sphere_equality():
    S2 = bundle("sphere", radius=1.0)
    res = dirac_spectrum(S2, resolution=512, k=1)
    lam2 = abs(res.eigenvalues[0]) ** 2
    rhs = bound_t1(S2)
    diag = equality_diagnostics(S2, res)
    ok = abs(lam2 - 1) <= 1e-3 and rhs == 1.0 and diag.killingResidual <= 1e-4
    record(3, ok, f"lambda^2 {lam2:.8f}, rhs {rhs!r}, Killing residual {diag.killingResidual:.2e}")


def test_disk_local_strict():
    disk = bundle("disk", radius=1.0)
    lam = dirac_spectrum(disk, local(1), resolution=512, k=1).eigenvalues[0]
    oracle = brentq(lambda z: jv(0, z) - jv(1, z), 1.0, 2.0)
    lhs, rhs = abs(lam) ** 2, bound_t1(disk)
    ok = rhs == pytest.approx(2.0, abs=1e-14) and lhs - rhs > 0.02
    record(4, ok, f"lhs {lhs:.6f} (Bessel root squared {oracle**2:.6f}), rhs {rhs:.6f}")


def test_mit_spectrum_is_complex():
    disk = bundle("disk", radius=1.0)
    mit_vals = dirac_spectrum(disk, mit(1), resolution=128, k=10).eigenvalues
    min_im = float(np.min(abs(mit_vals.imag)))
    real_ratio = 0.0
    for bc in (local(1), local(-1), aps(0.0), maps(-1.0), maps(0.5)):
        vals = dirac_spectrum(disk, bc, resolution=128, k=10).eigenvalues
        real_ratio = max(real_ratio, float(np.max(abs(vals.imag)) / np.max(abs(vals))))
    ok = len(mit_vals) == 10 and min_im > 1e-6 and real_ratio <= 1e-8
    record(5, ok, f"min |Im| over 10 MIT roots {min_im:.4f}; "
                  f"other conditions max |Im|/|lambda| {real_ratio:.1e}")


def test_aps_half_equality():
    disk = bundle("disk", radius=1.0)
    rhs = bound_aps(disk, 0.5)
    lam = dirac_spectrum(disk, aps(0.5), resolution=256, k=1).eigenvalues[0]
    # the parallel section: constant profile in the lowest mode
    op = assemble_dirac(disk, 256, mode=0)
    v = np.r_[np.ones(op.meta["nF"]), np.zeros(op.size - op.meta["nF"])].astype(complex)
    parallel = float(np.max(abs(op.matvec(v))))
    circle = boundary_circles(disk.geometry, 64)[0]
    t = np.r_[np.ones(64), np.zeros(64)].astype(complex)
    eig = float(np.max(abs(circle.apply(t) - 0.5 * t)))
    admissible = float(np.max(abs(circle.project(t, 0.5) - t)))
    ok = abs(rhs) <= 1e-8 and abs(lam) <= 1e-8 and parallel <= 1e-8 and eig <= 1e-6 \
        and admissible <= 1e-12
    record(6, ok, f"rhs {rhs:.1e}, lambda_min {abs(lam):.1e}, |D s| {parallel:.1e}, "
                  f"boundary eigen-residual {eig:.1e}")


def test_modified_aps_dichotomy():
    worst = 0.0
    for geometry in (bundle("disk", radius=1.0), bundle("annulus", r_in=0.5, r_out=1.0)):
        for b in (-1.0, 0.0, 0.5):
            for seed in range(50):
                rep = check_boundary_identity(geometry, maps(b), variant="maps", seed=seed)
                worst = max(worst, rep.residual / rep.scale)
    record(7, worst <= 1e-10, f"worst normalized pairing excess {worst:.1e} over 300 sections")


def _rhs_values(scale):
    disk = bundle("disk", radius=1.0).rescaled(scale)
    return [bound_t1(bundle("sphere", radius=1.0).rescaled(scale)), bound_t1(disk),
            bound_thm2(bundle("sphere", radius=1.0, n=3).rescaled(scale), 128),
            bound_aps(disk, 0.0, 128), bound_maps(disk, -1.0, 128),
            bound_volume(bundle("ball", radius=1.0).rescaled(scale), 0.0, 0.1).rhs]


def test_scaling_covariance():
    worst_eig = 0.0
    worst_rhs = 0.0
    base = _rhs_values(1.0)
    for sigma in (0.5, 2.0, 5.0):
        worst_eig = max(worst_eig, check_scaling(bundle("torus", L1=1.0, L2=1.5, spin=(1, 0)),
                                                 sigma, resolution=8).relative)
        worst_eig = max(worst_eig, check_scaling(bundle("disk", radius=1.0), sigma,
                                                 bc=mit(1), resolution=64).relative)
        for a, b in zip(base, _rhs_values(sigma)):
            if a != 0:
                worst_rhs = max(worst_rhs, abs(b * sigma**2 - a) / abs(a))
    ok = worst_eig <= 1e-8 and worst_rhs <= 1e-8
    record(8, ok, f"eigenvalue mismatch {worst_eig:.1e}, rhs mismatch {worst_rhs:.1e}")


def test_three_sphere_robin_value():
    S3 = bundle("sphere", radius=1.0, n=3)
    rhs = bound_thm2(S3)
    lam2 = abs(dirac_spectrum(S3, resolution=512, k=1).eigenvalues[0]) ** 2
    ok = abs(rhs - 2.25) <= 1e-10 and abs(lam2 - 2.25) <= 1e-4
    record(9, ok, f"rhs {rhs:.12f}, computed lambda^2 {lam2:.8f}")


def test_convergence_orders():
    levels = (64, 128, 256, 512)
    disk = bundle("disk", radius=1.0)
    sphere = bundle("sphere", radius=1.0)
    disk_root = brentq(lambda z: jv(0, z) - jv(1, z), 1.0, 2.0)
    orders = {}
    for name, b, bc, exact in (("disk", disk, local(1), disk_root), ("sphere", sphere, None, 1.0)):
        series = [(1.0 / N, abs(abs(mode_spectrum(b, 0, bc, N, k=1)["values"][0]) - exact))
                  for N in levels]
        orders[name] = fitted_order(series)
    for variant, bc in (("b1", mit(1)), ("DD", local(1)), ("D", local(-1))):
        rep = check_boundary_identity(disk, bc, variant=variant, points=levels[0],
                                      levels=len(levels))
        orders[variant] = rep.order
    ok = min(orders["disk"], orders["sphere"]) >= 1.9 and \
        min(orders[v] for v in ("b1", "DD", "D")) >= 1.0
    record(10, ok, ", ".join(f"{k} {v:.2f}" for k, v in orders.items()))


def test_suite_wall_clock():
    elapsed = session_elapsed()
    record(11, elapsed <= 300, f"session wall clock {elapsed:.1f} s")
