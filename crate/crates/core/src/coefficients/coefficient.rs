use super::expr::{parse_expression, Expr};
use super::presets::Preset;
use super::CoefficientError;

/// Number of sample points used to estimate `a_min` and `a_max`.
pub const BOUND_SAMPLES: usize = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub enum CoefficientKind {
    Preset(Preset),
    Expression { text: String, ast: Expr },
}

/// Scalar material coefficient `a^ε(x)` with oscillation scale `ε`.
#[derive(Clone, Debug, PartialEq)]
pub struct Coefficient {
    kind: CoefficientKind,
    epsilon: f64,
    dim: usize,
    bounds: (f64, f64),
}

/// Parses a preset name (`EX1`, ..., `LOC2D`) or an expression. The
/// dimension of an expression is its highest referenced coordinate (at least 1).
pub fn parse_coefficient(text: &str, epsilon: f64) -> Result<Coefficient, CoefficientError> {
    match text.parse::<Preset>() {
        Ok(p) => Coefficient::preset(p, epsilon),
        Err(_) => Coefficient::expression(text, epsilon),
    }
}

impl Coefficient {
    pub fn preset(preset: Preset, epsilon: f64) -> Result<Self, CoefficientError> {
        Self::build(CoefficientKind::Preset(preset), epsilon, preset.dim())
    }

    pub fn expression(text: &str, epsilon: f64) -> Result<Self, CoefficientError> {
        let ast = parse_expression(text)?;
        let dim = ast.max_variable().max(1);
        Self::build(
            CoefficientKind::Expression {
                text: text.to_string(),
                ast,
            },
            epsilon,
            dim,
        )
    }

    /// Expression in an explicitly chosen dimension (at least the highest
    /// referenced coordinate).
    pub fn expression_with_dim(
        text: &str,
        epsilon: f64,
        dim: usize,
    ) -> Result<Self, CoefficientError> {
        let ast = parse_expression(text)?;
        if !(1..=3).contains(&dim) || ast.max_variable() > dim {
            return Err(CoefficientError::InvalidDimension(dim));
        }
        Self::build(
            CoefficientKind::Expression {
                text: text.to_string(),
                ast,
            },
            epsilon,
            dim,
        )
    }

    fn build(kind: CoefficientKind, epsilon: f64, dim: usize) -> Result<Self, CoefficientError> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(CoefficientError::InvalidEpsilon(epsilon));
        }
        let mut c = Self {
            kind,
            epsilon,
            dim,
            bounds: (0.0, 0.0),
        };
        c.bounds = c.sample_bounds();
        if !(c.bounds.0 > 0.0) || !c.bounds.1.is_finite() {
            return Err(CoefficientError::NonPositive { min: c.bounds.0 });
        }
        Ok(c)
    }

    /// Min and max over a Kronecker sequence in the unit cube. Irrational
    /// steps avoid aliasing with the `ε`-periodic structure.
    fn sample_bounds(&self) -> (f64, f64) {
        const STEPS: [f64; 3] = [
            0.618_033_988_749_894_9,
            0.414_213_562_373_095_1,
            0.732_050_807_568_877_2,
        ];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for k in 0..BOUND_SAMPLES {
            let mut x = [0.0; 3];
            for (a, xa) in x.iter_mut().enumerate().take(self.dim) {
                *xa = (0.5 + k as f64 * STEPS[a]).fract();
            }
            let v = self.eval(&x);
            if v.is_nan() {
                return (f64::NAN, f64::NAN);
            }
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }

    #[inline]
    pub fn eval(&self, x: &[f64; 3]) -> f64 {
        match &self.kind {
            CoefficientKind::Preset(p) => p.eval(x, self.epsilon),
            CoefficientKind::Expression { ast, .. } => ast.eval(x, self.epsilon),
        }
    }

    /// Cell function `y ↦ a^ε(εy)`.
    pub fn unit_cell(&self) -> impl Fn(&[f64; 3]) -> f64 + Sync + '_ {
        let eps = self.epsilon;
        move |y| self.eval(&[eps * y[0], eps * y[1], eps * y[2]])
    }

    pub fn kind(&self) -> &CoefficientKind {
        &self.kind
    }

    pub fn preset_kind(&self) -> Option<Preset> {
        match self.kind {
            CoefficientKind::Preset(p) => Some(p),
            _ => None,
        }
    }

    /// Preset name or the expression text.
    pub fn label(&self) -> &str {
        match &self.kind {
            CoefficientKind::Preset(p) => p.name(),
            CoefficientKind::Expression { text, .. } => text,
        }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn a_min(&self) -> f64 {
        self.bounds.0
    }

    pub fn a_max(&self) -> f64 {
        self.bounds.1
    }

    /// Same coefficient at another oscillation scale.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self, CoefficientError> {
        Self::build(self.kind.clone(), epsilon, self.dim)
    }
}
