"""Dirac-operator spectra on model geometries and weighted L2 eigenvalue bounds."""

__version__ = "0.1.0"

from .bounds import (BoundReport, EqualityDiagnostics, bound_aps, bound_maps, bound_t1,
                     bound_thm2, bound_volume, equality_diagnostics, solve_neumann_weight,
                     sobolev_constant)
from .clifford import (build_clifford, clifford_mult, curvature_endomorphism, eta2_for_xi,
                       twistor_params)
from .eigensolve import dirac_spectrum, gamma_estimate, hermitian_eigs, robin_min
from .geometry import DiracBundleSpec, GeometrySpec, bundle, make_geometry, rescale
from .identities import (IdentityReport, TorusGrid, WeightParams, check_bochner,
                         check_boundary_identity, check_ri, check_scaling,
                         check_weighted_identity)
from .operators import (BoundaryCondition, SpinorField, aps, assemble_dirac, boundary_dirac,
                        local, maps, mit)

__all__ = [
    "BoundReport", "BoundaryCondition", "DiracBundleSpec", "EqualityDiagnostics",
    "GeometrySpec", "IdentityReport", "SpinorField", "TorusGrid", "WeightParams", "aps",
    "assemble_dirac", "bound_aps", "bound_maps", "bound_t1", "bound_thm2", "bound_volume",
    "boundary_dirac", "build_clifford", "bundle", "check_bochner", "check_boundary_identity",
    "check_ri", "check_scaling", "check_weighted_identity", "clifford_mult",
    "curvature_endomorphism", "dirac_spectrum", "equality_diagnostics", "eta2_for_xi",
    "gamma_estimate", "hermitian_eigs", "local", "maps", "make_geometry", "mit", "rescale",
    "robin_min", "solve_neumann_weight", "sobolev_constant", "twistor_params",
]
