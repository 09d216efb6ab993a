use super::coefficient::Coefficient;
use super::CoefficientError;
use crate::grid_fd::{FaceCoefficients, Field, Grid, Mat3, ScalarField};
use rayon::prelude::*;

/// Relative residual at which the cell solver stops.
pub const CELL_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HomogenizedSource {
    ClosedForm,
    CellProblem { resolution: usize },
}

/// Effective matrix of a periodic coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogenizedMatrix {
    matrix: Mat3,
    dim: usize,
    source: HomogenizedSource,
}

impl HomogenizedMatrix {
    pub fn new(matrix: Mat3, dim: usize, source: HomogenizedSource) -> Self {
        Self {
            matrix,
            dim,
            source,
        }
    }

    /// `value · I` in `dim` dimensions.
    pub fn scalar(value: f64, dim: usize, source: HomogenizedSource) -> Self {
        let mut m = [[0.0; 3]; 3];
        for (r, row) in m.iter_mut().enumerate().take(dim) {
            row[r] = value;
        }
        Self::new(m, dim, source)
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.matrix
    }

    pub fn entry(&self, r: usize, s: usize) -> f64 {
        self.matrix[r][s]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn source(&self) -> HomogenizedSource {
        self.source
    }

    /// Ascending eigenvalues of the leading `dim×dim` block.
    pub fn eigenvalues(&self) -> Vec<f64> {
        symmetric_eigenvalues(&self.matrix, self.dim)
    }
}

/// Ascending eigenvalues of the symmetric leading `d×d` block (cyclic Jacobi).
pub fn symmetric_eigenvalues(m: &Mat3, d: usize) -> Vec<f64> {
    let mut a = *m;
    for _sweep in 0..50 {
        let off: f64 = (0..d)
            .flat_map(|r| ((r + 1)..d).map(move |s| (r, s)))
            .map(|(r, s)| a[r][s] * a[r][s])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..d {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..d {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..d).map(|r| a[r][r]).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}

/// Discrete cell correctors `χ_r` on a periodic unit lattice.
#[derive(Clone, Debug)]
pub struct CellSolution {
    faces: FaceCoefficients,
    chi: Vec<ScalarField>,
    iterations: Vec<usize>,
}

impl CellSolution {
    pub fn grid(&self) -> &Grid {
        self.faces.grid()
    }

    /// Corrector for direction `r`, zero lattice mean.
    pub fn chi(&self, r: usize) -> &ScalarField {
        &self.chi[r]
    }

    /// CG iterations per direction.
    pub fn iterations(&self) -> &[usize] {
        &self.iterations
    }

    /// `A_rs = mean_i a_{r,i+1/2} (δ_rs + D_r^+ χ_s)`, symmetrized.
    pub fn effective_matrix(&self) -> HomogenizedMatrix {
        let grid = self.grid();
        let d = grid.dim();
        let n = grid.len() as f64;
        let mut m = [[0.0; 3]; 3];
        for r in 0..d {
            let face = self.faces.face(r);
            let h = grid.spacing(r);
            for s in 0..d {
                let chi = self.chi[s].values();
                let delta = if r == s { 1.0 } else { 0.0 };
                let sum: f64 = (0..grid.len())
                    .map(|i| {
                        let ip = grid.neighbor(i, r, 1).expect("periodic");
                        face[i] * (delta + (chi[ip] - chi[i]) / h)
                    })
                    .sum();
                m[r][s] = sum / n;
            }
        }
        for r in 0..d {
            for s in (r + 1)..d {
                let v = 0.5 * (m[r][s] + m[s][r]);
                m[r][s] = v;
                m[s][r] = v;
            }
        }
        HomogenizedMatrix::new(
            m,
            d,
            HomogenizedSource::CellProblem {
                resolution: grid.count(0),
            },
        )
    }
}

struct CellOperator<'a> {
    faces: &'a FaceCoefficients,
    inv_h2: [f64; 3],
    diag: Vec<f64>,
    plus: Vec<Vec<usize>>,
    minus: Vec<Vec<usize>>,
}

impl<'a> CellOperator<'a> {
    fn new(faces: &'a FaceCoefficients) -> Self {
        let g = faces.grid();
        let d = g.dim();
        let mut inv_h2 = [0.0; 3];
        for (a, v) in inv_h2.iter_mut().enumerate().take(d) {
            *v = 1.0 / (g.spacing(a) * g.spacing(a));
        }
        let plus: Vec<Vec<usize>> = (0..d)
            .map(|a| (0..g.len()).map(|i| g.neighbor(i, a, 1).unwrap()).collect())
            .collect();
        let minus: Vec<Vec<usize>> = (0..d)
            .map(|a| {
                (0..g.len())
                    .map(|i| g.neighbor(i, a, -1).unwrap())
                    .collect()
            })
            .collect();
        let diag = (0..g.len())
            .map(|i| {
                (0..d)
                    .map(|a| inv_h2[a] * (faces.face(a)[i] + faces.face(a)[minus[a][i]]))
                    .sum()
            })
            .collect();
        Self {
            faces,
            inv_h2,
            diag,
            plus,
            minus,
        }
    }

    /// `out = -∇·(a∇x)`
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let d = self.plus.len();
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for a in 0..d {
                let f = self.faces.face(a);
                let (ip, im) = (self.plus[a][i], self.minus[a][i]);
                acc += self.inv_h2[a] * (f[i] * (x[ip] - x[i]) - f[im] * (x[i] - x[im]));
            }
            *o = -acc;
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn remove_mean(v: &mut [f64]) {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= m);
}

fn pcg(op: &CellOperator, b: &[f64]) -> Result<(Vec<f64>, usize), CoefficientError> {
    let n = b.len();
    let bnorm = dot(b, b).sqrt();
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok((x, 0));
    }
    let mut r = b.to_vec();
    remove_mean(&mut r);
    let mut z: Vec<f64> = r.iter().zip(&op.diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let max_iter = 20 * n.max(1000);
    let mut history = Vec::new();
    for it in 1..=max_iter {
        op.apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            history.push(f64::NAN);
            return Err(CoefficientError::SolverDivergence {
                residual_history: history,
            });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rel = dot(&r, &r).sqrt() / bnorm;
        history.push(rel);
        if rel <= CELL_TOLERANCE {
            remove_mean(&mut x);
            return Ok((x, it));
        }
        if !rel.is_finite() {
            break;
        }
        for i in 0..n {
            z[i] = r[i] / op.diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(CoefficientError::SolverDivergence {
        residual_history: history,
    })
}

/// Solves `∇·(a∇χ_r) = -∂_r a` on the periodic unit cell with `resolution`
/// nodes per axis, using the conservative difference scheme with `a` at
/// half-points and Jacobi-preconditioned conjugate gradients.
pub fn solve_cell_problem(
    a: impl Fn(&[f64; 3]) -> f64,
    dim: usize,
    resolution: usize,
) -> Result<CellSolution, CoefficientError> {
    if !(1..=3).contains(&dim) {
        return Err(CoefficientError::InvalidDimension(dim));
    }
    if resolution < 8 {
        return Err(CoefficientError::ResolutionTooSmall(resolution));
    }
    let grid = Grid::periodic_unit(dim, resolution)?;
    let faces = FaceCoefficients::new(&grid, a)?;
    let op = CellOperator::new(&faces);
    let results: Vec<Result<(Vec<f64>, usize), CoefficientError>> = (0..dim)
        .into_par_iter()
        .map(|r| {
            let f = faces.face(r);
            let h = grid.spacing(r);
            let b: Vec<f64> = (0..grid.len())
                .map(|i| (f[i] - f[op.minus[r][i]]) / h)
                .collect();
            pcg(&op, &b)
        })
        .collect();
    let mut chi = Vec::with_capacity(dim);
    let mut iterations = Vec::with_capacity(dim);
    for res in results {
        let (x, it) = res?;
        chi.push(Field::from_values(grid.clone(), x)?);
        iterations.push(it);
    }
    Ok(CellSolution {
        faces,
        chi,
        iterations,
    })
}

/// Homogenized matrix of an arbitrary cell function on `[0,1]^dim`.
pub fn homogenized_matrix_of(
    a: impl Fn(&[f64; 3]) -> f64,
    dim: usize,
    resolution: usize,
) -> Result<HomogenizedMatrix, CoefficientError> {
    Ok(solve_cell_problem(a, dim, resolution)?.effective_matrix())
}

/// Homogenized matrix of `coefficient`'s unit-cell function.
pub fn homogenized_matrix(
    coefficient: &Coefficient,
    resolution: usize,
) -> Result<HomogenizedMatrix, CoefficientError> {
    homogenized_matrix_of(coefficient.unit_cell(), coefficient.dim(), resolution)
}
