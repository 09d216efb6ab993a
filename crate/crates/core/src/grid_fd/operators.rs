use super::stencil::central_weights;
use super::{Boundary, Field, Grid, GridError, VectorField};
use crate::vec3::{self, Vec3};

/// Row-major 3×3 matrix; only the leading `d×d` block is read.
pub type Mat3 = [[f64; 3]; 3];

/// Node value types the difference operators can act on.
pub trait LatticeValue: Copy + Send + Sync {
    fn zero() -> Self;
    /// `self + s * other`
    fn add_scaled(self, s: f64, other: Self) -> Self;
}

impl LatticeValue for f64 {
    #[inline]
    fn zero() -> Self {
        0.0
    }
    #[inline]
    fn add_scaled(self, s: f64, other: Self) -> Self {
        self + s * other
    }
}

impl LatticeValue for Vec3 {
    #[inline]
    fn zero() -> Self {
        [0.0; 3]
    }
    #[inline]
    fn add_scaled(self, s: f64, other: Self) -> Self {
        vec3::axpy(self, s, other)
    }
}

/// Central difference of `field` along `axis`, divided by `spacing^derivative`.
///
/// On Dirichlet grids, nodes whose stencil would leave the box get zero.
pub fn central_difference<T: LatticeValue>(
    field: &Field<T>,
    axis: usize,
    derivative: usize,
    order: usize,
) -> Result<Field<T>, GridError> {
    let grid = field.grid();
    if axis >= grid.dim() {
        return Err(GridError::AxisOutOfRange {
            axis,
            dim: grid.dim(),
        });
    }
    let w = central_weights(derivative, order)?;
    let n = grid.count(axis);
    if order + 1 > n {
        return Err(GridError::StencilWiderThanGrid {
            axis,
            width: order + 1,
            nodes: n,
        });
    }
    let r = order / 2;
    let scale = grid.spacing(axis).powi(-(derivative as i32));
    let stride = grid.stride(axis);
    let periodic = grid.boundary() == Boundary::Periodic;
    let vals = field.values();
    let out = (0..grid.len())
        .map(|idx| {
            let j = (idx / stride) % n;
            if !periodic && (j < r || j + r >= n) {
                return T::zero();
            }
            let base = idx - j * stride;
            let mut acc = T::zero();
            for (k, wk) in w.iter().enumerate() {
                if *wk == 0.0 {
                    continue;
                }
                let jj = (j as isize + k as isize - r as isize).rem_euclid(n as isize) as usize;
                acc = acc.add_scaled(*wk, vals[base + jj * stride]);
            }
            T::zero().add_scaled(scale, acc)
        })
        .collect();
    Field::from_values(grid.clone(), out)
}

/// Per-axis coefficient values at the forward half-points `x_i + Δx/2 e_r`.
#[derive(Clone, Debug)]
pub struct FaceCoefficients {
    grid: Grid,
    faces: Vec<Vec<f64>>,
}

impl FaceCoefficients {
    /// Evaluates `a` at every forward half-point of `grid`.
    pub fn new(grid: &Grid, a: impl Fn(&[f64; 3]) -> f64) -> Result<Self, GridError> {
        let faces = (0..grid.dim())
            .map(|axis| {
                let h = grid.spacing(axis);
                (0..grid.len())
                    .map(|idx| {
                        let mut x = grid.coords(idx);
                        x[axis] += 0.5 * h;
                        let v = a(&x);
                        if v > 0.0 && v.is_finite() {
                            Ok(v)
                        } else {
                            Err(GridError::NonPositiveCoefficient {
                                position: x,
                                value: v,
                            })
                        }
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            grid: grid.clone(),
            faces,
        })
    }

    pub fn constant(grid: &Grid, value: f64) -> Result<Self, GridError> {
        Self::new(grid, |_| value)
    }

    /// Builds from explicit face values, one vector per axis.
    pub fn from_faces(grid: &Grid, faces: Vec<Vec<f64>>) -> Result<Self, GridError> {
        if faces.len() != grid.dim() {
            return Err(GridError::InvalidGrid(format!(
                "{} face arrays for a {}-dimensional grid",
                faces.len(),
                grid.dim()
            )));
        }
        for f in &faces {
            if f.len() != grid.len() {
                return Err(GridError::ShapeMismatch {
                    expected: grid.len(),
                    found: f.len(),
                });
            }
            if let Some((i, v)) = f.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
                return Err(GridError::NonPositiveCoefficient {
                    position: grid.coords(i),
                    value: *v,
                });
            }
        }
        Ok(Self {
            grid: grid.clone(),
            faces,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn face(&self, axis: usize) -> &[f64] {
        &self.faces[axis]
    }

    pub fn max(&self) -> f64 {
        self.faces
            .iter()
            .flat_map(|f| f.iter().copied())
            .fold(0.0, f64::max)
    }
}

/// Conservative second-order `∇·(a∇m)` written into `out`.
///
/// Dirichlet grids leave the outermost ring at zero.
pub fn div_a_grad_into(faces: &FaceCoefficients, m: &[Vec3], out: &mut [Vec3]) {
    let grid = &faces.grid;
    let d = grid.dim();
    let counts = grid.counts();
    let strides = [grid.stride(0), grid.stride(1), grid.stride(2)];
    let mut inv_h2 = [0.0; 3];
    for a in 0..d {
        inv_h2[a] = 1.0 / (grid.spacing(a) * grid.spacing(a));
    }
    let periodic = grid.boundary() == Boundary::Periodic;
    assert_eq!(m.len(), grid.len());
    assert_eq!(out.len(), grid.len());
    let [n0, n1, n2] = counts;
    for k2 in 0..n2 {
        for k1 in 0..n1 {
            for k0 in 0..n0 {
                let idx = k0 + n0 * (k1 + n1 * k2);
                let mi = [k0, k1, k2];
                if !periodic && (0..d).any(|a| mi[a] == 0 || mi[a] + 1 == counts[a]) {
                    out[idx] = [0.0; 3];
                    continue;
                }
                let c = m[idx];
                let mut acc = [0.0; 3];
                for a in 0..d {
                    let n = counts[a];
                    let s = strides[a];
                    let j = mi[a];
                    let ip = if j + 1 == n { idx + s - n * s } else { idx + s };
                    let im = if j == 0 { idx + (n - 1) * s } else { idx - s };
                    let af = faces.faces[a][idx];
                    let ab = faces.faces[a][im];
                    let (p, q) = (m[ip], m[im]);
                    for k in 0..3 {
                        acc[k] += inv_h2[a] * (af * (p[k] - c[k]) - ab * (c[k] - q[k]));
                    }
                }
                out[idx] = acc;
            }
        }
    }
}

/// Conservative second-order `∇·(a∇m)` with `a` taken at half-points.
pub fn div_a_grad(faces: &FaceCoefficients, m: &VectorField) -> Result<VectorField, GridError> {
    if m.grid().counts() != faces.grid.counts() || m.grid().dim() != faces.grid.dim() {
        return Err(GridError::ShapeMismatch {
            expected: faces.grid.len(),
            found: m.len(),
        });
    }
    let mut out = vec![[0.0; 3]; m.len()];
    div_a_grad_into(faces, m.values(), &mut out);
    Field::from_values(m.grid().clone(), out)
}

fn check_spd(ah: &Mat3, d: usize) -> Result<(), GridError> {
    let scale = (0..d).map(|r| ah[r][r].abs()).fold(0.0, f64::max).max(1.0);
    for r in 0..d {
        for s in 0..d {
            if !ah[r][s].is_finite() {
                return Err(GridError::NonSPDMatrix(format!(
                    "entry ({r},{s}) not finite"
                )));
            }
            if (ah[r][s] - ah[s][r]).abs() > 1e-12 * scale {
                return Err(GridError::NonSPDMatrix(format!(
                    "entries ({r},{s}) and ({s},{r}) differ"
                )));
            }
        }
    }
    // Cholesky on the leading block.
    let mut l = [[0.0f64; 3]; 3];
    for i in 0..d {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let v = ah[i][i] - s;
                if !(v > 0.0) {
                    return Err(GridError::NonSPDMatrix(format!("pivot {i} is {v:e}")));
                }
                l[i][i] = v.sqrt();
            } else {
                l[i][j] = (ah[i][j] - s) / l[j][j];
            }
        }
    }
    Ok(())
}

fn sum_second_derivatives(
    m: &VectorField,
    ah: &Mat3,
    order: usize,
) -> Result<VectorField, GridError> {
    let d = m.grid().dim();
    let mut out = vec![[0.0; 3]; m.len()];
    for r in 0..d {
        let dd = central_difference(m, r, 2, order)?;
        for (o, v) in out.iter_mut().zip(dd.values()) {
            *o = o.add_scaled(ah[r][r], *v);
        }
    }
    for r in 0..d {
        for s in (r + 1)..d {
            let c = ah[r][s] + ah[s][r];
            if c == 0.0 {
                continue;
            }
            let ds = central_difference(m, s, 1, order)?;
            let drs = central_difference(&ds, r, 1, order)?;
            for (o, v) in out.iter_mut().zip(drs.values()) {
                *o = o.add_scaled(c, *v);
            }
        }
    }
    Field::from_values(m.grid().clone(), out)
}

/// `Σ_rs AH_rs ∂_r∂_s m` on a periodic grid with central stencils of the
/// given order. Mixed terms compose first-derivative stencils.
pub fn div_grad_ah(m: &VectorField, ah: &Mat3, order: usize) -> Result<VectorField, GridError> {
    if m.grid().boundary() != Boundary::Periodic {
        return Err(GridError::NotPeriodic);
    }
    check_spd(ah, m.grid().dim())?;
    sum_second_derivatives(m, ah, order)
}

/// Sum of central second differences over all axes.
pub fn laplacian(m: &VectorField, order: usize) -> Result<VectorField, GridError> {
    let id = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    sum_second_derivatives(m, &id, order)
}
