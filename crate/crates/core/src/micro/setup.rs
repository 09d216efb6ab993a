use super::MicroError;
use crate::coefficients::Coefficient;
use crate::integrators::{linear_stability_radius, Method};
use crate::kernels::{construct_kernel, Kernel};
use std::fmt;
use std::str::FromStr;

/// Fraction of the linear HeunP stability limit used for the default step.
pub const MICRO_DT_SAFETY: f64 = 0.9;

/// Parameters of a micro problem. Lengths are in units of `ε` and the
/// horizon `eta` in units of `ε²`.
#[derive(Clone, Debug, PartialEq)]
pub struct MicroSetup {
    /// Averaging half-width `μ/ε`.
    pub mu: f64,
    /// Computational half-width `μ′/ε`.
    pub mu_prime: f64,
    /// Averaging horizon `η/ε²`.
    pub eta: f64,
    /// Damping used inside the micro problem.
    pub alpha: f64,
    /// Grid points per `ε`.
    pub points_per_eps: usize,
    /// Interpolation order `2k` of the initial data.
    pub interp_order: usize,
    pub spatial: Kernel,
    pub temporal: Kernel,
    /// `c` in `δt = c δx²`; derived from the stability bound when unset.
    pub dt_factor: Option<f64>,
}

/// Named `(η, μ′)` combinations with `μ = 3.9ε`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetupPreset {
    S1,
    S2,
    S3,
    S4,
}

impl SetupPreset {
    pub const ALL: [SetupPreset; 4] = [
        SetupPreset::S1,
        SetupPreset::S2,
        SetupPreset::S3,
        SetupPreset::S4,
    ];

    /// `(η/ε², μ′/ε)`
    pub fn parameters(self) -> (f64, f64) {
        match self {
            SetupPreset::S1 => (0.15, 4.0),
            SetupPreset::S2 => (0.45, 5.5),
            SetupPreset::S3 => (0.7, 7.5),
            SetupPreset::S4 => (1.0, 10.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SetupPreset::S1 => "s1",
            SetupPreset::S2 => "s2",
            SetupPreset::S3 => "s3",
            SetupPreset::S4 => "s4",
        }
    }
}

impl fmt::Display for SetupPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SetupPreset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SetupPreset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown micro setup `{s}`"))
    }
}

/// A setup resolved against a coefficient: absolute lengths and steps.
#[derive(Clone, Debug, PartialEq)]
pub struct MicroDiscretization {
    pub dim: usize,
    pub epsilon: f64,
    pub dx: f64,
    pub dt: f64,
    pub steps: usize,
    /// Grid nodes from the centre to the frozen boundary ring.
    pub half_nodes: usize,
    pub mu: f64,
    pub mu_prime: f64,
    pub eta: f64,
    pub alpha: f64,
}

impl MicroSetup {
    /// Kernels (3,7) in space and time, `α = 1.2`, `K = 15`, fourth-order
    /// interpolation.
    pub fn new(mu: f64, mu_prime: f64, eta: f64) -> Result<Self, MicroError> {
        let s = Self {
            mu,
            mu_prime,
            eta,
            alpha: 1.2,
            points_per_eps: 15,
            interp_order: 4,
            spatial: construct_kernel(3, 7, false)?,
            temporal: construct_kernel(3, 7, true)?,
            dt_factor: None,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn preset(p: SetupPreset) -> Result<Self, MicroError> {
        let (eta, mu_prime) = p.parameters();
        Self::new(3.9, mu_prime, eta)
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self, MicroError> {
        self.alpha = alpha;
        self.validate()?;
        Ok(self)
    }

    pub fn with_points_per_eps(mut self, k: usize) -> Result<Self, MicroError> {
        self.points_per_eps = k;
        self.validate()?;
        Ok(self)
    }

    pub fn with_interp_order(mut self, order: usize) -> Result<Self, MicroError> {
        self.interp_order = order;
        self.validate()?;
        Ok(self)
    }

    pub fn with_dt_factor(mut self, c: f64) -> Result<Self, MicroError> {
        self.dt_factor = Some(c);
        self.validate()?;
        Ok(self)
    }

    pub fn with_kernels(mut self, spatial: Kernel, temporal: Kernel) -> Result<Self, MicroError> {
        self.spatial = spatial;
        self.temporal = temporal;
        self.validate()?;
        Ok(self)
    }

    /// Half-width `k` of the interpolation stencil.
    pub fn stencil_half(&self) -> usize {
        self.interp_order / 2
    }

    pub fn validate(&self) -> Result<(), MicroError> {
        let bad = |m: String| Err(MicroError::InvalidSetup(m));
        if !(self.mu > 0.0) || !(self.mu <= self.mu_prime) {
            return bad(format!(
                "need 0 < μ ≤ μ′, got μ={} μ′={}",
                self.mu, self.mu_prime
            ));
        }
        if !(self.eta > 0.0) {
            return bad(format!("η must be positive, got {}", self.eta));
        }
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return bad(format!("damping must be non-negative, got {}", self.alpha));
        }
        if !matches!(self.interp_order, 2 | 4) {
            return bad(format!(
                "interpolation order must be 2 or 4, got {}",
                self.interp_order
            ));
        }
        if self.points_per_eps < 8 {
            return bad(format!(
                "need at least 8 points per ε, got {}",
                self.points_per_eps
            ));
        }
        if self.spatial.one_sided() || !self.temporal.one_sided() {
            return bad("spatial kernel must be symmetric and temporal kernel one-sided".into());
        }
        if let Some(c) = self.dt_factor {
            if !(c > 0.0) {
                return bad(format!("step factor must be positive, got {c}"));
            }
        }
        Ok(())
    }

    /// Largest stable `c` in `δt = c δx²` for HeunP on `coef`, from the
    /// linear stability radius along the damped precession ray.
    pub fn stable_dt_factor(&self, coef: &Coefficient) -> f64 {
        let w = linear_stability_radius(Method::HeunP, self.alpha);
        w / (4.0 * coef.dim() as f64 * coef.a_max())
    }

    pub fn resolve(&self, coef: &Coefficient) -> Result<MicroDiscretization, MicroError> {
        self.validate()?;
        let limit = self.stable_dt_factor(coef);
        let c = match self.dt_factor {
            Some(c) if c > limit => {
                return Err(MicroError::UnstableStep {
                    requested: c,
                    limit,
                })
            }
            Some(c) => c,
            None => MICRO_DT_SAFETY * limit,
        };
        let eps = coef.epsilon();
        let dx = eps / self.points_per_eps as f64;
        let mu_prime = self.mu_prime * eps;
        let eta = self.eta * eps * eps;
        let steps = (eta / (c * dx * dx)).ceil().max(1.0) as usize;
        let half_nodes = (mu_prime / dx - 1e-9).ceil().max(1.0) as usize;
        Ok(MicroDiscretization {
            dim: coef.dim(),
            epsilon: eps,
            dx,
            dt: eta / steps as f64,
            steps,
            half_nodes,
            mu: self.mu * eps,
            mu_prime,
            eta,
            alpha: self.alpha,
        })
    }
}
