use super::initial::{normalized_derivatives, Derivatives};
use super::MicroError;
use crate::grid_fd::{fornberg_weights, Grid};
use crate::vec3::{self, Vec3};

/// Tensor-product Lagrange interpolant through a `(2k+1)^d` stencil of
/// macro values centred at the origin of local coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct StencilInterpolant {
    dim: usize,
    half: usize,
    spacing: f64,
    values: Vec<Vec3>,
}

impl StencilInterpolant {
    /// `values` lists the stencil nodes `-k..=k` per axis, axis 0 fastest.
    pub fn new(
        dim: usize,
        half: usize,
        spacing: f64,
        values: Vec<Vec3>,
    ) -> Result<Self, MicroError> {
        let width = 2 * half + 1;
        if !(1..=3).contains(&dim) || half == 0 || !(spacing > 0.0) {
            return Err(MicroError::InvalidSetup(format!(
                "stencil dim={dim} half={half} spacing={spacing}"
            )));
        }
        if values.len() != width.pow(dim as u32) {
            return Err(MicroError::InvalidSetup(format!(
                "stencil needs {} values, got {}",
                width.pow(dim as u32),
                values.len()
            )));
        }
        Ok(Self {
            dim,
            half,
            spacing,
            values,
        })
    }

    /// Samples `f` at `center + j ΔX` for the stencil offsets `j`.
    pub fn sample(
        dim: usize,
        half: usize,
        spacing: f64,
        center: &[f64; 3],
        f: impl Fn(&[f64; 3]) -> Vec3,
    ) -> Result<Self, MicroError> {
        let width = 2 * half + 1;
        let n = width.pow(dim as u32);
        let values = (0..n)
            .map(|idx| {
                let mut x = *center;
                let mut rest = idx;
                for xr in x.iter_mut().take(dim) {
                    let j = (rest % width) as f64 - half as f64;
                    rest /= width;
                    *xr += j * spacing;
                }
                f(&x)
            })
            .collect();
        Self::new(dim, half, spacing, values)
    }

    /// Interpolation order `2k`.
    pub fn order(&self) -> usize {
        2 * self.half
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[Vec3] {
        &self.values
    }

    fn axis_weights(&self, x: f64) -> Result<[Vec<f64>; 3], MicroError> {
        let z = x / self.spacing;
        let k = self.half as f64;
        if z.abs() > k * (1.0 + 1e-12) {
            return Err(MicroError::ExtrapolationRequested {
                offset: x,
                hull: k * self.spacing,
            });
        }
        let nodes: Vec<f64> = (-(self.half as isize)..=self.half as isize)
            .map(|j| j as f64)
            .collect();
        let mut w = fornberg_weights(z, &nodes, 2);
        let (w2, w1, w0) = (w.pop().unwrap(), w.pop().unwrap(), w.pop().unwrap());
        let h = self.spacing;
        Ok([
            w0,
            w1.into_iter().map(|v| v / h).collect(),
            w2.into_iter().map(|v| v / (h * h)).collect(),
        ])
    }

    /// Value and derivatives of `P` at local offset `x`.
    pub fn derivatives(&self, x: &[f64; 3]) -> Result<Derivatives, MicroError> {
        let ws: Vec<[Vec<f64>; 3]> = (0..self.dim)
            .map(|r| self.axis_weights(x[r]))
            .collect::<Result<_, _>>()?;
        let width = 2 * self.half + 1;
        let mut d = Derivatives {
            value: [0.0; 3],
            grad: [[0.0; 3]; 3],
            hess: [[[0.0; 3]; 3]; 3],
        };
        // weight of node `idx` where axis r uses derivative order ord[r]
        let weight = |idx: usize, ord: [usize; 3]| -> f64 {
            let mut rest = idx;
            let mut w = 1.0;
            for (r, wr) in ws.iter().enumerate() {
                w *= wr[ord[r]][rest % width];
                rest /= width;
            }
            w
        };
        for (idx, v) in self.values.iter().enumerate() {
            d.value = vec3::axpy(d.value, weight(idx, [0; 3]), *v);
            for r in 0..self.dim {
                let mut o = [0; 3];
                o[r] = 1;
                d.grad[r] = vec3::axpy(d.grad[r], weight(idx, o), *v);
                for s in r..self.dim {
                    let mut o = [0; 3];
                    o[r] += 1;
                    o[s] += 1;
                    d.hess[r][s] = vec3::axpy(d.hess[r][s], weight(idx, o), *v);
                }
            }
        }
        for r in 0..self.dim {
            for s in 0..r {
                d.hess[r][s] = d.hess[s][r];
            }
        }
        Ok(d)
    }

    pub fn eval(&self, x: &[f64; 3]) -> Result<Vec3, MicroError> {
        Ok(self.derivatives(x)?.value)
    }

    /// Value and derivatives of `Q = P/|P|` at local offset `x`.
    pub fn normalized_derivatives(&self, x: &[f64; 3]) -> Result<Derivatives, MicroError> {
        let p = self.derivatives(x)?;
        if !(vec3::norm(p.value) >= 1e-8) {
            return Err(MicroError::VanishingInterpolant { node: 0 });
        }
        Ok(normalized_derivatives(&p, self.dim))
    }

    /// `P` at every node of `grid`, whose coordinates are local offsets.
    pub fn eval_on_grid(&self, grid: &Grid) -> Result<Vec<Vec3>, MicroError> {
        let width = 2 * self.half + 1;
        // per-axis value weights for every coordinate index
        let per_axis: Vec<Vec<Vec<f64>>> = (0..self.dim)
            .map(|r| {
                (0..grid.count(r))
                    .map(|i| {
                        let x = grid.origin(r) + i as f64 * grid.spacing(r);
                        self.axis_weights(x).map(|[w0, _, _]| w0)
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<_, _>>()?;
        Ok((0..grid.len())
            .map(|node| {
                let mi = grid.multi_index(node);
                let mut acc = [0.0; 3];
                for (idx, v) in self.values.iter().enumerate() {
                    let mut rest = idx;
                    let mut w = 1.0;
                    for (r, wr) in per_axis.iter().enumerate() {
                        w *= wr[mi[r]][rest % width];
                        rest /= width;
                    }
                    if w != 0.0 {
                        acc = vec3::axpy(acc, w, *v);
                    }
                }
                acc
            })
            .collect())
    }

    /// `Q = P/|P|` at every node of `grid`.
    pub fn normalized_on_grid(&self, grid: &Grid) -> Result<Vec<Vec3>, MicroError> {
        let mut p = self.eval_on_grid(grid)?;
        normalize_initial_data(&mut p)?;
        Ok(p)
    }
}

/// `Q = P/|P|` nodewise.
pub fn normalize_initial_data(values: &mut [Vec3]) -> Result<(), MicroError> {
    for (i, v) in values.iter_mut().enumerate() {
        let n = vec3::norm(*v);
        if !(n >= 1e-8) {
            return Err(MicroError::VanishingInterpolant { node: i });
        }
        *v = vec3::scale(1.0 / n, *v);
    }
    Ok(())
}
