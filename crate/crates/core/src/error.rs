//! Error type shared by the model, singular-limit, solver and validation layers.

use crate::profile::CartesianProfile;
use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The polar radius collapsed, so the slow-fast variables are undefined.
    #[error("degenerate radius at node {node}: u^2 + v^2 = {radius_sq:e}")]
    DegenerateRadius { node: usize, radius_sq: f64 },

    /// An extracted angle left the closed first quadrant by more than roundoff.
    #[error("angle {angle} at node {node} lies outside [0, pi/2]")]
    AngleOutOfRange { node: usize, angle: f64 },

    /// The slow-fast vector field divides by eps and is undefined at eps = 0.
    #[error("slow-fast vector field is undefined at eps = 0")]
    EpsilonZero,

    /// One-step integration of the reduced flow exceeded its local error budget.
    #[error("mesh too coarse for the reduced flow: step error {estimate:.3e} exceeds {limit:.3e}")]
    MeshTooCoarse { estimate: f64, limit: f64 },

    #[error("mesh is invalid: {0}")]
    InvalidMesh(String),

    #[error("profile arrays disagree with the mesh: {0}")]
    ShapeMismatch(String),

    /// Banded elimination hit a zero pivot; carries the iterate it died on.
    #[error("Jacobian numerically singular at column {column}")]
    SingularJacobian {
        column: usize,
        last: Box<CartesianProfile>,
    },

    /// Newton (or the continuation ladder) stalled; carries the last iterate.
    #[error("no convergence at eps = {eps}: residual {residual:.3e} after {iterations} iterations")]
    NoConvergence {
        eps: f64,
        residual: f64,
        iterations: usize,
        last: Box<CartesianProfile>,
    },

    /// Recentering needs exactly one sign change of u - v.
    #[error("u - v changes sign {count} times; recentering needs exactly one crossing")]
    MultipleCrossings { count: usize },
}
