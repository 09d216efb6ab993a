//! Material coefficients, the periodic cell problem and the homogenized matrix.

mod cell;
mod coefficient;
mod expr;
mod presets;

pub use cell::{homogenized_matrix, homogenized_matrix_of, solve_cell_problem, CellSolution};
pub use cell::{symmetric_eigenvalues, HomogenizedMatrix, HomogenizedSource};
pub use coefficient::{parse_coefficient, Coefficient, CoefficientKind};
pub use expr::{parse_expression, Expr};
pub use presets::Preset;

use crate::grid_fd::GridError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoefficientError {
    #[error("syntax error at position {position}: {message}")]
    SyntaxError { position: usize, message: String },
    #[error("unknown identifier `{name}` at position {position}")]
    UnknownIdentifier { name: String, position: usize },
    #[error("oscillation scale {0} must lie in (0, 1)")]
    InvalidEpsilon(f64),
    #[error("coefficient is not strictly positive: sampled minimum {min:e}")]
    NonPositive { min: f64 },
    #[error("dimension {0} not in 1..=3")]
    InvalidDimension(usize),
    #[error("cell resolution {0} below the minimum of 8")]
    ResolutionTooSmall(usize),
    #[error(
        "cell solver did not converge; last residuals {:?}",
        tail(residual_history)
    )]
    SolverDivergence { residual_history: Vec<f64> },
    #[error(transparent)]
    Grid(#[from] GridError),
}

fn tail(v: &[f64]) -> &[f64] {
    &v[v.len().saturating_sub(5)..]
}
