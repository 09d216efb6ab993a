//! The HMM macro driver: the semi-discrete macro equation whose effective
//! field at each node comes from a freshly solved micro problem.

mod provider;

pub use provider::HmmProvider;

use crate::coefficients::Coefficient;
use crate::grid_fd::{Boundary, Grid, MagnetizationField};
use crate::integrators::{integrate, linear_stability_radius, IntegratorError, Method, Trajectory};
use crate::micro::{MicroError, MicroSetup};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HmmError {
    #[error("invalid HMM configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Micro(#[from] MicroError),
    #[error(transparent)]
    Integrator(#[from] IntegratorError),
}

#[derive(Clone, Debug)]
pub struct HmmConfig {
    /// Periodic macro grid.
    pub macro_grid: Grid,
    /// Physical damping.
    pub alpha: f64,
    pub final_time: f64,
    /// Upper bound for the macro step; the step actually used divides `final_time`.
    pub dt: f64,
    pub method: Method,
    pub micro: MicroSetup,
    pub coefficient: Coefficient,
    /// Worker threads for the micro batch; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl HmmConfig {
    /// MPEA with the given macro step and no worker override.
    pub fn new(
        macro_grid: Grid,
        coefficient: Coefficient,
        micro: MicroSetup,
        alpha: f64,
        final_time: f64,
        dt: f64,
    ) -> Self {
        Self {
            macro_grid,
            alpha,
            final_time,
            dt,
            method: Method::Mpea,
            micro,
            coefficient,
            workers: None,
        }
    }

    /// Largest macro step allowed by the linear stability estimate with the
    /// coefficient maximum as exchange bound.
    pub fn max_stable_dt(&self) -> f64 {
        let d = self.macro_grid.dim();
        let w = linear_stability_radius(self.method, self.alpha);
        let dx_min = (0..d)
            .map(|a| self.macro_grid.spacing(a))
            .fold(f64::INFINITY, f64::min);
        w / (4.0 * d as f64 * self.coefficient.a_max()) * dx_min * dx_min
    }

    pub fn validate(&self) -> Result<(), HmmError> {
        let bad = |m: String| Err(HmmError::InvalidConfig(m));
        let g = &self.macro_grid;
        if g.boundary() != Boundary::Periodic {
            return bad("macro grid must be periodic".into());
        }
        if g.dim() != self.coefficient.dim() {
            return bad(format!(
                "{}D macro grid with a {}D coefficient",
                g.dim(),
                self.coefficient.dim()
            ));
        }
        if self.method == Method::ImplicitMidpoint {
            return bad("implicit macro stepping is not supported with upscaled fields".into());
        }
        if !(self.alpha >= 0.0) || !(self.final_time >= 0.0) || !(self.dt > 0.0) {
            return bad(format!(
                "need alpha >= 0, T >= 0, dt > 0 (got {}, {}, {})",
                self.alpha, self.final_time, self.dt
            ));
        }
        if (1..g.dim()).any(|a| (g.spacing(a) - g.spacing(0)).abs() > 1e-12 * g.spacing(0)) {
            return bad("macro grid spacing must be the same on every axis".into());
        }
        let half = self.micro.stencil_half();
        for a in 0..g.dim() {
            if 2 * half + 1 > g.count(a) {
                return bad(format!(
                    "interpolation stencil of width {} exceeds {} macro nodes on axis {a}",
                    2 * half + 1,
                    g.count(a)
                ));
            }
        }
        let disc = self.micro.resolve(&self.coefficient)?;
        let reach = disc.half_nodes as f64 * disc.dx;
        let hull = (0..g.dim())
            .map(|a| half as f64 * g.spacing(a))
            .fold(f64::INFINITY, f64::min);
        if reach > hull * (1.0 + 1e-12) {
            return bad(format!(
                "micro box half-width {reach:.4e} exceeds the interpolation hull {hull:.4e}"
            ));
        }
        let limit = self.max_stable_dt();
        if self.dt > limit {
            return bad(format!(
                "macro step {:.4e} above the stability estimate {limit:.4e}",
                self.dt
            ));
        }
        Ok(())
    }
}

/// HMM trajectory plus micro-solve statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct HmmRun {
    pub trajectory: Trajectory,
    pub micro_solves: usize,
    /// Largest final norm drift over all micro problems.
    pub max_micro_drift: f64,
}

/// Integrates the HMM macro equation from `initial` to `config.final_time`,
/// recording frames at `outputs` and at the final time.
pub fn run_hmm(
    config: &HmmConfig,
    initial: &MagnetizationField,
    outputs: &[f64],
) -> Result<HmmRun, HmmError> {
    let provider = HmmProvider::new(config)?;
    if initial.grid() != &config.macro_grid {
        return Err(HmmError::InvalidConfig(
            "initial data is not on the macro grid".into(),
        ));
    }
    let trajectory = integrate(
        config.method,
        &provider,
        initial.clone(),
        config.dt,
        config.alpha,
        config.final_time,
        outputs,
    )?;
    Ok(HmmRun {
        trajectory,
        micro_solves: provider.micro_solves(),
        max_micro_drift: provider.max_micro_drift(),
    })
}
