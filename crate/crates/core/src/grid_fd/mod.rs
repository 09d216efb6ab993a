//! Structured grids, lattice fields and finite-difference operators.

mod grid;
mod operators;
mod stencil;

pub use grid::{Boundary, Field, Grid, MagnetizationField, ScalarField, VectorField};
pub use operators::{
    central_difference, div_a_grad, div_a_grad_into, div_grad_ah, laplacian, FaceCoefficients,
    LatticeValue, Mat3,
};
pub use stencil::{central_weights, fornberg_weights, symbol_max};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("field has {found} values but grid has {expected} nodes")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("vector at node {node} has norm {norm:e}, cannot normalize")]
    ZeroNorm { node: usize, norm: f64 },
    #[error("axis {axis} out of range for a {dim}-dimensional grid")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("stencil of width {width} does not fit {nodes} nodes on axis {axis}")]
    StencilWiderThanGrid {
        axis: usize,
        width: usize,
        nodes: usize,
    },
    #[error("no central stencil for derivative {derivative} of order {order}")]
    UnsupportedStencil { derivative: usize, order: usize },
    #[error("coefficient value {value} at {position:?} is not strictly positive")]
    NonPositiveCoefficient { position: [f64; 3], value: f64 },
    #[error("matrix is not symmetric positive definite: {0}")]
    NonSPDMatrix(String),
    #[error("operation requires a periodic grid")]
    NotPeriodic,
}
