//! Configuration-driven experiments that sweep parameters and emit CSV tables.

mod config;
mod cost;
mod hmm_convergence;
mod homogenize;
mod integrator_study;
mod micro_sweep;
mod showcase;
mod stability_study;
mod table;

pub use config::{parse_config, parse_config_as, ExperimentConfig, ExperimentKind, Params, Sweep};
pub use table::{Cell, Column, ExperimentResult, CSV_SCHEMA_VERSION};

use crate::coefficients::{homogenized_matrix, Coefficient, CoefficientError, Preset};
use crate::grid_fd::{GridError, Mat3};
use crate::integrators::IntegratorError;
use crate::macro_hmm::HmmError;
use crate::micro::{InitialData, MicroError};
use crate::reference_solvers::ReferenceError;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExperimentError {
    /// Bad or inconsistent configuration.
    #[error("config error: {0}")]
    Config(String),
    /// A solver failed on an accepted configuration.
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("io error: {0}")]
    Io(String),
}

impl ExperimentError {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) => 2,
            ExperimentError::Numerical(_) | ExperimentError::Io(_) => 3,
        }
    }
}

/// Whether a library error rejects its input rather than reporting a solver
/// failure on valid input.
trait Rejection: std::fmt::Display {
    fn is_rejection(&self) -> bool;
}

impl Rejection for GridError {
    fn is_rejection(&self) -> bool {
        matches!(
            self,
            GridError::InvalidGrid(_)
                | GridError::AxisOutOfRange { .. }
                | GridError::StencilWiderThanGrid { .. }
                | GridError::UnsupportedStencil { .. }
                | GridError::NotPeriodic
        )
    }
}

impl Rejection for CoefficientError {
    fn is_rejection(&self) -> bool {
        match self {
            CoefficientError::SolverDivergence { .. } => false,
            CoefficientError::Grid(e) => e.is_rejection(),
            _ => true,
        }
    }
}

impl Rejection for IntegratorError {
    fn is_rejection(&self) -> bool {
        match self {
            IntegratorError::InvalidStep(_) => true,
            IntegratorError::Grid(e) => e.is_rejection(),
            _ => false,
        }
    }
}

impl Rejection for MicroError {
    fn is_rejection(&self) -> bool {
        match self {
            MicroError::InvalidSetup(_)
            | MicroError::UnstableStep { .. }
            | MicroError::ExtrapolationRequested { .. }
            | MicroError::Kernel(_) => true,
            MicroError::Grid(e) => e.is_rejection(),
            MicroError::Coefficient(e) => e.is_rejection(),
            _ => false,
        }
    }
}

impl Rejection for HmmError {
    fn is_rejection(&self) -> bool {
        match self {
            HmmError::InvalidConfig(_) => true,
            HmmError::Micro(e) => e.is_rejection(),
            HmmError::Integrator(e) => e.is_rejection(),
        }
    }
}

impl Rejection for ReferenceError {
    fn is_rejection(&self) -> bool {
        match self {
            ReferenceError::UnderResolved { .. }
            | ReferenceError::IncommensurateGrids(_)
            | ReferenceError::InvalidInput(_) => true,
            ReferenceError::Io(_) => false,
            ReferenceError::Integrator(e) => e.is_rejection(),
            ReferenceError::Grid(e) => e.is_rejection(),
            ReferenceError::Coefficient(e) => e.is_rejection(),
        }
    }
}

macro_rules! classify_from {
    ($($t:ty),*) => {$(
        impl From<$t> for ExperimentError {
            fn from(e: $t) -> Self {
                if e.is_rejection() {
                    ExperimentError::Config(e.to_string())
                } else {
                    ExperimentError::Numerical(e.to_string())
                }
            }
        }
    )*};
}
classify_from!(
    GridError,
    IntegratorError,
    MicroError,
    HmmError,
    ReferenceError,
    CoefficientError
);

/// Runs the configured experiment on a pool of `config.workers` threads.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult, ExperimentError> {
    config.validate()?;
    if let Some(dir) = config.output.as_deref().and_then(|p| p.parent()) {
        if !dir.as_os_str().is_empty() && !dir.is_dir() {
            return Err(ExperimentError::Config(format!(
                "output directory {} does not exist",
                dir.display()
            )));
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.unwrap_or(1).max(1))
        .build()
        .map_err(|e| ExperimentError::Config(format!("worker pool: {e}")))?;
    let start = Instant::now();
    let mut result = pool.install(|| match config.experiment {
        ExperimentKind::Integrators => integrator_study::run(config),
        ExperimentKind::Stability => stability_study::run(config),
        ExperimentKind::MicroSweep => micro_sweep::run(config),
        ExperimentKind::HmmConvergence => hmm_convergence::run(config),
        ExperimentKind::Showcase => showcase::run(config),
        ExperimentKind::Cost => cost::run(config),
        ExperimentKind::Homogenize => homogenize::run(config),
    })?;
    result.wall_time = start.elapsed().as_secs_f64();
    result.check_finite()?;
    Ok(result)
}

pub(crate) fn preset(name: &str) -> Result<Preset, ExperimentError> {
    name.parse().map_err(ExperimentError::Config)
}

/// Smooth macro data of the preset's dimension.
pub(crate) fn initial_data(p: Preset) -> InitialData {
    match p.dim() {
        1 => InitialData::Ex1,
        _ => InitialData::Ex2,
    }
}

/// Homogenized matrix from the closed form when known, else from the cell
/// problem at `resolution`.
pub(crate) fn reference_matrix(
    p: Preset,
    resolution: Option<usize>,
) -> Result<Mat3, ExperimentError> {
    if !p.is_periodic() {
        return Err(ExperimentError::Config(format!(
            "preset {p} has no homogenized matrix"
        )));
    }
    match (resolution, p.closed_form_ah()) {
        (None, Some(ah)) => Ok(ah),
        (res, _) => {
            let coef = Coefficient::preset(p, 0.5)?;
            Ok(*homogenized_matrix(&coef, res.unwrap_or(128))?.matrix())
        }
    }
}

/// `n` if `1/dx` is within 1e-9 of the integer `n`.
pub(crate) fn nodes_for(dx: f64) -> Result<usize, ExperimentError> {
    let n = (1.0 / dx).round();
    if !(n >= 1.0) || ((1.0 / dx) - n).abs() > 1e-9 * n {
        return Err(ExperimentError::Config(format!(
            "spacing {dx} does not divide the unit interval"
        )));
    }
    Ok(n as usize)
}

/// A step below the linear stability estimate for an exchange operator with
/// coefficient bound `a_max` and a central stencil of `order`.
pub(crate) fn safe_dt(
    method: crate::integrators::Method,
    alpha: f64,
    a_max: f64,
    dim: usize,
    dx: f64,
    order: usize,
) -> Result<f64, ExperimentError> {
    let w = crate::integrators::linear_stability_radius(method, alpha);
    let symbol = crate::grid_fd::symbol_max(2, order)?;
    Ok(0.5 * w * dx * dx / (dim as f64 * a_max * symbol))
}

/// Gershgorin bound on the largest eigenvalue of the leading block.
pub(crate) fn matrix_bound(ah: &Mat3, dim: usize) -> f64 {
    (0..dim)
        .map(|r| (0..dim).map(|s| ah[r][s].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}
