"""Boundary reachability for the heat equation on a half-line.

The package evaluates controlled end states in closed form, expands targets
in a Hermite basis, solves truncated power-moment problems for bang-bang
controls, and synthesizes piecewise-constant controls that approach a target
with explicit error bounds.
"""

from .controls import StepControl, superpose
from .errors import (
    DegreeTooLarge,
    HeatReachError,
    InfeasibleOrdering,
    InvalidControl,
    NoConvergence,
    NonConvergent,
    QuadratureFailure,
    SupportExceedsHorizon,
)
from .heat_solver import (
    ControlledState,
    ExpansionState,
    GridState,
    OddState,
    PolynomialControlState,
    SpectralProfile,
    ZeroState,
    control_term_sigma,
    control_term_x,
    end_state_sigma,
    end_state_x,
    error_norm,
    example1,
    example2,
    example3,
    heat_evolve_x,
    linfty_envelope,
)
from .hermite_basis import (
    HermiteExpansion,
    basis_gram,
    expand_target,
    gram_diagonal,
    hermite_poly,
    psi,
    psi_hat_T,
    psi_T,
    tail_energy,
)
from .moment_problem import (
    BangBangSolution,
    MomentVector,
    NecessaryCondition,
    moments_of_control,
    moments_of_target,
    mu_closed_form,
    mu_quadrature,
    necessary_bound,
    necessary_condition,
    solve_bang_bang,
)
from .numerics import Grid, QuadratureSpec, default_spec, erf, erf_diff, erfc, integrate, l2_norm_halfline
from .reach_synth import (
    SynthesisPlan,
    epsilon_bounds,
    h_coeff,
    phi,
    phi_l,
    step_control,
    synthesize,
    verify_identity_phi,
)

__all__ = [
    "BangBangSolution",
    "basis_gram",
    "control_term_sigma",
    "control_term_x",
    "ControlledState",
    "default_spec",
    "DegreeTooLarge",
    "end_state_sigma",
    "end_state_x",
    "epsilon_bounds",
    "erf",
    "erf_diff",
    "erfc",
    "error_norm",
    "example1",
    "example2",
    "example3",
    "expand_target",
    "ExpansionState",
    "gram_diagonal",
    "Grid",
    "GridState",
    "h_coeff",
    "heat_evolve_x",
    "HeatReachError",
    "hermite_poly",
    "HermiteExpansion",
    "InfeasibleOrdering",
    "integrate",
    "InvalidControl",
    "l2_norm_halfline",
    "linfty_envelope",
    "moments_of_control",
    "moments_of_target",
    "MomentVector",
    "mu_closed_form",
    "mu_quadrature",
    "necessary_bound",
    "necessary_condition",
    "NecessaryCondition",
    "NoConvergence",
    "NonConvergent",
    "OddState",
    "phi",
    "phi_l",
    "PolynomialControlState",
    "psi",
    "psi_hat_T",
    "psi_T",
    "QuadratureFailure",
    "QuadratureSpec",
    "solve_bang_bang",
    "SpectralProfile",
    "step_control",
    "StepControl",
    "superpose",
    "SupportExceedsHorizon",
    "SynthesisPlan",
    "synthesize",
    "tail_energy",
    "verify_identity_phi",
    "ZeroState",
]

__version__ = "0.1.0"
