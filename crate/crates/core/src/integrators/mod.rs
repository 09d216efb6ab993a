//! Time integrators for Landau–Lifshitz dynamics on lattices.

mod driver;
mod provider;
mod rhs;
mod stability;
mod steppers;

pub use driver::{integrate, uniform_steps, Trajectory};
pub use provider::{ConstantField, FieldProvider, HomogenizedExchange, MicroExchange, ProviderTag};
pub use rhs::{cayley_update, compose_h, compose_h_node, llg_rhs, llg_rhs_node, project_unit};
pub use stability::{
    estimate_stability_limit, is_stable, linear_stability_radius, StabilityProbe, StabilityRow,
    StabilityTable,
};
pub use steppers::{
    step_heun_p, step_implicit_midpoint, step_mpe, step_mpea, step_rk4_p, IntegratorState, Stepper,
    IMP_MAX_ITER, IMP_TOL,
};

use crate::grid_fd::GridError;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntegratorError {
    #[error("lattice has {found} nodes, expected {expected}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("node {node} has norm {norm}, expected a unit vector")]
    NotUnitNorm { node: usize, norm: f64 },
    #[error("node {node} has norm {norm:e} before projection")]
    ZeroNormBeforeProjection { node: usize, norm: f64 },
    #[error(
        "implicit midpoint iteration stalled after {iterations} iterations (residual {residual:e})"
    )]
    FixedPointDivergence { iterations: usize, residual: f64 },
    #[error("multistep method needs {needed} stored fields, found {available}")]
    MissingHistory { needed: usize, available: usize },
    #[error("no stable step found for Δx = {dx:e}")]
    NoStableStepFound { dx: f64 },
    #[error("instability detected at step {step}")]
    InstabilityDetected { step: usize },
    #[error("invalid time step {0}")]
    InvalidStep(f64),
    #[error("field evaluation failed{}: {message}", node.map(|n| format!(" at node {n}")).unwrap_or_default())]
    Provider {
        node: Option<usize>,
        message: String,
    },
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Available time integrators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    HeunP,
    Rk4P,
    ImplicitMidpoint,
    Mpe,
    Mpea,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::HeunP,
        Method::Rk4P,
        Method::ImplicitMidpoint,
        Method::Mpe,
        Method::Mpea,
    ];
    pub const EXPLICIT: [Method; 4] = [Method::HeunP, Method::Rk4P, Method::Mpe, Method::Mpea];

    pub fn name(self) -> &'static str {
        match self {
            Method::HeunP => "HeunP",
            Method::Rk4P => "RK4P",
            Method::ImplicitMidpoint => "IMP",
            Method::Mpe => "MPE",
            Method::Mpea => "MPEA",
        }
    }

    /// Field evaluations per step.
    pub fn stages(self) -> usize {
        match self {
            Method::HeunP => 2,
            Method::Rk4P => 4,
            Method::ImplicitMidpoint | Method::Mpe | Method::Mpea => 1,
        }
    }

    /// Number of earlier `h` lattices the method needs.
    pub fn history(self) -> usize {
        match self {
            Method::Mpe => 1,
            Method::Mpea => 2,
            _ => 0,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown integrator `{s}`"))
    }
}
