//! Reference solutions: ε-resolving direct simulation, the homogenized
//! equation, an averaged-coefficient baseline, and grid-aware error norms.

mod baseline;
mod norms;

pub use baseline::{local_mean, run_averaged_baseline};
pub use norms::{l2_error, write_field_csv, ErrorReport};

use crate::coefficients::{Coefficient, CoefficientError};
use crate::grid_fd::{
    Boundary, FaceCoefficients, Field, Grid, GridError, MagnetizationField, Mat3,
};
use crate::integrators::{
    integrate, HomogenizedExchange, IntegratorError, Method, MicroExchange, Trajectory,
};
use crate::vec3::Vec3;
use thiserror::Error;

/// Coarsest DNS spacing accepted, in grid points per ε.
pub const MIN_POINTS_PER_EPS: f64 = 8.0;
/// Default DNS resolution.
pub const DEFAULT_POINTS_PER_EPS: usize = 15;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReferenceError {
    #[error("spacing {dx:e} does not resolve ε = {epsilon:e} (need at least 8 points per ε)")]
    UnderResolved { dx: f64, epsilon: f64 },
    #[error("grids are not commensurate: {0}")]
    IncommensurateGrids(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("cannot write dump: {0}")]
    Io(String),
    #[error(transparent)]
    Integrator(#[from] IntegratorError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Coefficient(#[from] CoefficientError),
}

/// Time-stepping parameters shared by the reference solvers.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeStepping {
    /// Upper bound for the step; the step actually used divides `final_time`.
    pub dt: f64,
    pub alpha: f64,
    pub final_time: f64,
    pub method: Method,
    /// Extra recording times; the final time is always recorded.
    pub outputs: Vec<f64>,
}

impl TimeStepping {
    /// MPEA with no extra outputs.
    pub fn new(dt: f64, alpha: f64, final_time: f64) -> Self {
        Self {
            dt,
            alpha,
            final_time,
            method: Method::Mpea,
            outputs: Vec::new(),
        }
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_outputs(mut self, outputs: Vec<f64>) -> Self {
        self.outputs = outputs;
        self
    }
}

/// Normalized samples of `f` on `grid`.
pub fn sample_initial(
    grid: &Grid,
    f: impl Fn(&[f64; 3]) -> Vec3,
) -> Result<MagnetizationField, ReferenceError> {
    let mut m = Field::from_fn(grid.clone(), |x| f(x));
    m.normalize()?;
    Ok(m)
}

/// Periodic unit-domain grid with `points_per_eps` nodes per ε, rounded so
/// that a whole number of nodes fits the domain.
pub fn dns_grid(coef: &Coefficient, points_per_eps: usize) -> Result<Grid, ReferenceError> {
    let n = (points_per_eps as f64 / coef.epsilon()).round() as usize;
    Ok(Grid::periodic_unit(coef.dim(), n)?)
}

/// Smallest DNS grid with at least `points_per_eps` nodes per ε whose node
/// count per axis is a multiple of both `1/ε` (rounded) and `macro_nodes`, so
/// that errors against a macro solution need no interpolation.
pub fn commensurate_dns_grid(
    coef: &Coefficient,
    points_per_eps: usize,
    macro_nodes: usize,
) -> Result<Grid, ReferenceError> {
    let cells = (1.0 / coef.epsilon()).round() as usize;
    if cells == 0 || macro_nodes == 0 {
        return Err(ReferenceError::InvalidInput("empty grid".into()));
    }
    let base = lcm(cells, macro_nodes);
    let want = points_per_eps * cells;
    let n = want.div_ceil(base) * base;
    Ok(Grid::periodic_unit(coef.dim(), n)?)
}

fn lcm(a: usize, b: usize) -> usize {
    let gcd = |mut a: usize, mut b: usize| {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    };
    a / gcd(a, b) * b
}

fn check_periodic(grid: &Grid) -> Result<(), ReferenceError> {
    if grid.boundary() != Boundary::Periodic {
        return Err(ReferenceError::InvalidInput(
            "reference solvers need a periodic grid".into(),
        ));
    }
    Ok(())
}

/// `∂_t m = -m × ∇·(a^ε∇m) - α m × (m × ∇·(a^ε∇m))` on the grid of `initial`.
pub fn run_dns(
    coef: &Coefficient,
    initial: &MagnetizationField,
    stepping: &TimeStepping,
) -> Result<Trajectory, ReferenceError> {
    let grid = initial.grid();
    check_periodic(grid)?;
    if grid.dim() != coef.dim() {
        return Err(ReferenceError::InvalidInput(format!(
            "{}D grid with a {}D coefficient",
            grid.dim(),
            coef.dim()
        )));
    }
    let eps = coef.epsilon();
    for a in 0..grid.dim() {
        let dx = grid.spacing(a);
        if dx > eps / MIN_POINTS_PER_EPS * (1.0 + 1e-12) {
            return Err(ReferenceError::UnderResolved { dx, epsilon: eps });
        }
    }
    let provider = MicroExchange::new(FaceCoefficients::new(grid, |x| coef.eval(x))?);
    run_with(&provider, initial, stepping)
}

/// `∂_t m = -m × ∇·(∇m A^H) - α m × (m × ∇·(∇m A^H))` with central stencils of `order`.
pub fn run_homogenized(
    ah: &Mat3,
    initial: &MagnetizationField,
    order: usize,
    stepping: &TimeStepping,
) -> Result<Trajectory, ReferenceError> {
    check_periodic(initial.grid())?;
    let provider = HomogenizedExchange::new(initial.grid().clone(), *ah, order)?;
    run_with(&provider, initial, stepping)
}

fn run_with<P: crate::integrators::FieldProvider>(
    provider: &P,
    initial: &MagnetizationField,
    s: &TimeStepping,
) -> Result<Trajectory, ReferenceError> {
    Ok(integrate(
        s.method,
        provider,
        initial.clone(),
        s.dt,
        s.alpha,
        s.final_time,
        &s.outputs,
    )?)
}
