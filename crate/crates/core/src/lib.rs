//! Numerical laboratory for domain walls of a two-component condensate near
//! the weak-segregation threshold.
//!
//! The crate computes heteroclinic wall profiles connecting the two
//! single-component rest states, together with the singular-limit objects
//! that organize them when the segregation parameter approaches its
//! threshold: the critical manifold of the slow-fast formulation, the
//! reduced angular flow on it, and the composite profiles both induce.
//! A finite-difference Newton solver with parameter continuation produces
//! the walls; a validation layer measures conserved-quantity defects,
//! qualitative shape properties, distance to the critical manifold, and the
//! surface-tension (energy) asymptotics.

pub mod error;
pub mod mesh;
pub mod model;
pub mod profile;
pub mod singular;
pub mod solver;
pub mod validate;

pub use error::Error;
pub use mesh::Mesh;
pub use model::{
    analytic_spectrum, hamiltonian_residual, linearize_slowfast, rhs_cartesian, slowfast_rhs,
    CartesianState, EquilibriumSide, EquilibriumSpec, Frame, ModelParams, SlowFastState,
};
pub use profile::{cartesian_to_slowfast, BoundaryConditions, CartesianProfile, SlowFastProfile};
pub use singular::{
    composite_guess, critical_manifold_point, default_reduced_mesh, reduced_energy_integral,
    reduced_energy_quadrature, reduced_rhs, sigma_ratio_limit, singular_lift, solve_reduced,
    ReducedSolution,
};
pub use solver::{
    newton_solve, recenter, solve_heteroclinic, ContinuationTrace, NewtonTrace, SolverConfig,
};
pub use validate::{
    energy_of_profile, rate_study, validate_profile, weighted_deviation, RateStudy,
    ValidationReport, WeightedDeviations,
};
