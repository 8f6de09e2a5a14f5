"""Spectra of 1D Laplacians under arbitrary self-adjoint boundary conditions.

The boundary condition phi - i phid = U (phi + i phid) of a unitary
U in U(2n) selects a self-adjoint extension of the Laplacian on a disjoint
union of n intervals; this package discretizes the associated quadratic form
with piecewise-linear bulk elements plus delocalised boundary elements and
solves the resulting Hermitian pencil for its lowest eigenpairs.
"""

from ._kernels import BACKEND
from .assembly import (
    BoundaryFunctionSet,
    BoundaryLinearSystem,
    BulkBasis,
    SpectralPencil,
    assemble_pencil,
    basis_node_values,
    boundary_positions,
    boundary_system,
    bulk_basis,
    dump_csv,
    hermitian_relation_gap,
    kappa_spectral,
    perturbation_bounds,
    solve_boundary_values,
    trace_of,
)
from .boundary import (
    BoundaryUnitary,
    SymmetryRep,
    boundary_condition_residual,
    commutant_check,
    max_commutator,
    partial_cayley,
    preset,
    split_boundary_residuals,
    validate_unitary,
)
from .eigensolve import SpectralResult, h1_error, reconstruct, solve_pencil
from .errors import *  # noqa: F401,F403
from .manifold import IntervalManifold, Mesh, build_manifold, subdivide
from .oracles import (
    OracleSpectrum,
    classical_spectrum,
    quasi_periodic_spectrum,
    robin_interval_spectrum,
    robin_negative_root,
    robin_parameter_from_angle,
    robin_residual,
)

__version__ = "0.1.0"
