use super::IntegratorError;
use crate::grid_fd::{Field, VectorField};
use crate::vec3::{self, Vec3};

/// `-m × H - α m × (m × H)`
#[inline]
pub fn llg_rhs_node(m: Vec3, h: Vec3, alpha: f64) -> Vec3 {
    let mxh = vec3::cross(m, h);
    let mxmxh = vec3::cross(m, mxh);
    [
        -mxh[0] - alpha * mxmxh[0],
        -mxh[1] - alpha * mxmxh[1],
        -mxh[2] - alpha * mxmxh[2],
    ]
}

/// `H + α m × H`
#[inline]
pub fn compose_h_node(m: Vec3, h: Vec3, alpha: f64) -> Vec3 {
    vec3::axpy(h, alpha, vec3::cross(m, h))
}

fn check(m: &VectorField, h: &VectorField) -> Result<(), IntegratorError> {
    if !m.same_shape(h) {
        return Err(IntegratorError::ShapeMismatch {
            expected: m.len(),
            found: h.len(),
        });
    }
    Ok(())
}

pub fn llg_rhs(
    m: &VectorField,
    h: &VectorField,
    alpha: f64,
) -> Result<VectorField, IntegratorError> {
    check(m, h)?;
    let v = m
        .values()
        .iter()
        .zip(h.values())
        .map(|(m, h)| llg_rhs_node(*m, *h, alpha))
        .collect();
    Ok(Field::from_values(m.grid().clone(), v)?)
}

pub fn compose_h(
    m: &VectorField,
    h: &VectorField,
    alpha: f64,
) -> Result<VectorField, IntegratorError> {
    check(m, h)?;
    let v = m
        .values()
        .iter()
        .zip(h.values())
        .map(|(m, h)| compose_h_node(*m, *h, alpha))
        .collect();
    Ok(Field::from_values(m.grid().clone(), v)?)
}

/// Solves `x - m = (dt/2) h × (m + x)` for `x` in closed form.
#[inline]
pub fn cayley_update(m: Vec3, h: Vec3, dt: f64) -> Vec3 {
    let s = 0.5 * dt;
    let b = vec3::axpy(m, s, vec3::cross(h, m));
    let hb = vec3::dot(h, b);
    let num = vec3::axpy(vec3::axpy(b, s, vec3::cross(h, b)), s * s * hb, h);
    vec3::scale(1.0 / (1.0 + s * s * vec3::dot(h, h)), num)
}

/// Normalizes every vector in place.
pub fn project_unit(values: &mut [Vec3]) -> Result<(), IntegratorError> {
    for (i, v) in values.iter_mut().enumerate() {
        let n = vec3::norm(*v);
        if !(n >= 1e-8) {
            return Err(IntegratorError::ZeroNormBeforeProjection { node: i, norm: n });
        }
        *v = vec3::scale(1.0 / n, *v);
    }
    Ok(())
}
