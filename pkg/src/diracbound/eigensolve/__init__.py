"""Eigenvalue solvers: Hermitian matrices, shooting roots, scalar pencils."""

from .hermitian import (DENSE_LIMIT, EigenResult, cluster_counts, hermitian_eigs, lanczos,
                        lanczos_smallest_modulus, spectral_order)
from .scalar import RobinResult, gamma_estimate, gamma_refinement, radial_forms, robin_min
from .shooting import (RadialODE, ShootingProblem, contour_count, holomorphy_defect,
                       nonnormal_mode_roots, shooting_problem)
from .spectrum import dirac_spectrum, mode_spectrum

__all__ = [
    "DENSE_LIMIT", "EigenResult", "RadialODE", "RobinResult", "ShootingProblem",
    "cluster_counts", "contour_count", "dirac_spectrum", "gamma_estimate", "gamma_refinement",
    "hermitian_eigs", "holomorphy_defect", "lanczos", "lanczos_smallest_modulus",
    "mode_spectrum", "nonnormal_mode_roots", "radial_forms", "robin_min", "shooting_problem",
    "spectral_order",
]
