use super::initial::{Derivatives, InitialData};
use super::interp::StencilInterpolant;
use super::setup::MicroSetup;
use super::solve::{micro_grid, micro_initial_data, solve_micro};
use super::MicroError;
use crate::coefficients::Coefficient;
use crate::grid_fd::Mat3;
use crate::vec3::{self, Vec3};

/// Which interpolant enters the discretization error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalization {
    /// The raw polynomial `P`.
    Polynomial,
    /// `Q = P/|P|`, the micro initial data.
    Normalized,
}

/// `∇·(∇m A^H)` from second derivatives.
pub fn homogenized_field(d: &Derivatives, ah: &Mat3, dim: usize) -> Vec3 {
    d.div_grad(ah, dim)
}

/// Split of the upscaling error at one macro point.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorDecomposition {
    pub h_avg: Vec3,
    /// `∇·(∇m_init(0) A^H)`
    pub initial_reference: Vec3,
    /// `∇·(∇M(x_k) A^H)`
    pub macro_reference: Vec3,
    pub e_avg: f64,
    pub e_disc: f64,
    pub e_approx: f64,
}

impl ErrorDecomposition {
    pub fn new(h_avg: Vec3, initial_reference: Vec3, macro_reference: Vec3) -> Self {
        let dist = |a: Vec3, b: Vec3| vec3::norm(vec3::sub(a, b));
        Self {
            h_avg,
            initial_reference,
            macro_reference,
            e_avg: dist(h_avg, initial_reference),
            e_disc: dist(initial_reference, macro_reference),
            e_approx: dist(h_avg, macro_reference),
        }
    }
}

/// Interpolant of the analytic macro field on the stencil around `center`.
pub fn macro_stencil(
    data: InitialData,
    center: &[f64; 3],
    macro_dx: f64,
    order: usize,
) -> Result<StencilInterpolant, MicroError> {
    StencilInterpolant::sample(data.dim(), order / 2, macro_dx, center, |x| data.value(x))
}

/// `|∇·(∇m_init(0) A^H) − ∇·(∇M(x_k) A^H)|` with `m_init` either `P` or `Q`.
pub fn discretization_error(
    data: InitialData,
    center: &[f64; 3],
    macro_dx: f64,
    order: usize,
    ah: &Mat3,
    normalization: Normalization,
) -> Result<f64, MicroError> {
    let s = macro_stencil(data, center, macro_dx, order)?;
    let dim = data.dim();
    let d = match normalization {
        Normalization::Polynomial => s.derivatives(&[0.0; 3])?,
        Normalization::Normalized => s.normalized_derivatives(&[0.0; 3])?,
    };
    let exact = homogenized_field(&data.derivatives(center), ah, dim);
    Ok(vec3::norm(vec3::sub(homogenized_field(&d, ah, dim), exact)))
}

/// Runs the micro problem at `center` for the analytic macro field `data`
/// sampled with spacing `macro_dx` and splits the error against `ah`.
pub fn error_decomposition(
    center: &[f64; 3],
    data: InitialData,
    macro_dx: f64,
    setup: &MicroSetup,
    coef: &Coefficient,
    ah: Option<&Mat3>,
) -> Result<ErrorDecomposition, MicroError> {
    let ah = ah.ok_or_else(|| {
        MicroError::NoReferenceAvailable(format!(
            "coefficient {} has no homogenized matrix",
            coef.label()
        ))
    })?;
    if data.dim() != coef.dim() {
        return Err(MicroError::InvalidSetup(format!(
            "{}D macro data with a {}D coefficient",
            data.dim(),
            coef.dim()
        )));
    }
    let dim = data.dim();
    let stencil = macro_stencil(data, center, macro_dx, setup.interp_order)?;
    let disc = setup.resolve(coef)?;
    let grid = micro_grid(&disc)?;
    let initial = micro_initial_data(&stencil, &grid)?;
    let result = solve_micro(&initial, coef, center, setup)?;
    let init_ref = homogenized_field(&stencil.normalized_derivatives(&[0.0; 3])?, ah, dim);
    let macro_ref = homogenized_field(&data.derivatives(center), ah, dim);
    Ok(ErrorDecomposition::new(result.h_avg, init_ref, macro_ref))
}
