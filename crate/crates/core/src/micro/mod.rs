//! Micro problems: interpolated initial data, a Dirichlet-frozen solve of
//! the oscillatory equation on a small box and kernel upscaling.

mod diagnostics;
mod initial;
mod interp;
mod setup;
mod solve;

pub use diagnostics::{
    discretization_error, error_decomposition, homogenized_field, macro_stencil,
    ErrorDecomposition, Normalization,
};
pub use initial::{normalized_derivatives, Derivatives, InitialData};
pub use interp::{normalize_initial_data, StencilInterpolant};
pub use setup::{MicroDiscretization, MicroSetup, SetupPreset, MICRO_DT_SAFETY};
pub use solve::{
    micro_grid, micro_initial_data, solve_micro, solve_micro_multi, solve_micro_trajectory,
    solve_micro_with, upscale, MicroFrame, MicroResult, MultiResult,
};

use crate::coefficients::CoefficientError;
use crate::grid_fd::GridError;
use crate::kernels::KernelError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MicroError {
    #[error("interpolation at offset {offset} outside the stencil hull ±{hull}")]
    ExtrapolationRequested { offset: f64, hull: f64 },
    #[error("interpolated magnetization vanishes at micro node {node}")]
    VanishingInterpolant { node: usize },
    #[error("micro solve became unstable at step {step}")]
    InstabilityDetected { step: usize },
    #[error("invalid micro setup: {0}")]
    InvalidSetup(String),
    #[error("micro step factor {requested} exceeds the stable bound {limit}")]
    UnstableStep { requested: f64, limit: f64 },
    #[error("no homogenized reference available: {0}")]
    NoReferenceAvailable(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Coefficient(#[from] CoefficientError),
}
