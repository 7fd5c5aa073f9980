"""Single-excitation spectrum of a chain of two-level atoms with nearest-
and next-nearest-neighbour exchange."""

from .chebyshev import aux_quantities, chebyshev_u, closed_form_tn, fn_theta_phi, tn_a_zero_limit
from .determinant import (
    MinorSequence,
    direct_determinant,
    dn_sequence,
    general_solution_coeffs,
    general_solution_tn,
    minor_sequence,
)
from .dipole import DipoleConfig, chain_couplings, critical_separations, omega_ij
from .eigvec import (
    AnsatzFit,
    EigenPair,
    ansatz_fit,
    boundary_rank_check,
    eigenpairs,
    eigenvector_inverse_iteration,
)
from .model import ChainParams, SymmetricBandMatrix, build_hamiltonian, trace_moments
from .roots import (
    RootCurve,
    SeriesExpansion,
    degeneracy_crossings,
    lambda_from_alpha,
    series_x,
    sweep_curves,
    tangent_residual,
    x_y_from_alpha,
    y_of_x,
)
from .spectrum import (
    Spectrum,
    count_below,
    eigenvalues_bisection,
    eigenvalues_dense_oracle,
    spectrum_a_zero,
    spectrum_b_zero,
)

__version__ = "0.1.0"
