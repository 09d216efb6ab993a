use super::interp::StencilInterpolant;
use super::setup::{MicroDiscretization, MicroSetup};
use super::MicroError;
use crate::coefficients::Coefficient;
use crate::grid_fd::{div_a_grad_into, FaceCoefficients, Field, Grid, MagnetizationField};
use crate::integrators::llg_rhs_node;
use crate::kernels::{space_time_average, spatial_weights, temporal_weights, SampledTrajectory};
use crate::vec3::{self, Vec3};

/// Pre-projection norm above which a micro step counts as unstable.
const BLOWUP_NORM: f64 = 1.5;

/// State handed to an observer after every micro step (and for the initial data).
pub struct MicroFrame<'a> {
    pub step: usize,
    pub time: f64,
    pub grid: &'a Grid,
    pub m: &'a [Vec3],
    /// `∇·(a∇m)` at `m`.
    pub field: &'a [Vec3],
}

#[derive(Clone, Debug, PartialEq)]
pub struct MicroResult {
    /// Upscaled effective field.
    pub h_avg: Vec3,
    /// Largest `||m| - 1|` at the final time.
    pub norm_drift: f64,
    pub steps: usize,
    pub dt: f64,
    pub dx: f64,
    pub nodes: usize,
}

/// Upscaled fields for several averaging widths from one solve.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiResult {
    /// `μ/ε` values in input order.
    pub mus: Vec<f64>,
    pub h_avg: Vec<Vec3>,
    pub base: MicroResult,
}

/// Dirichlet box `[-μ′, μ′]^d` of the micro problem.
pub fn micro_grid(disc: &MicroDiscretization) -> Result<Grid, MicroError> {
    Ok(Grid::centered_box(disc.dim, disc.half_nodes, disc.dx)?)
}

/// Normalized interpolant `Q` sampled on the micro grid.
pub fn micro_initial_data(
    interp: &StencilInterpolant,
    grid: &Grid,
) -> Result<MagnetizationField, MicroError> {
    let q = interp.normalized_on_grid(grid)?;
    Ok(Field::from_values(grid.clone(), q)?)
}

fn local_faces(
    coef: &Coefficient,
    center: &[f64; 3],
    grid: &Grid,
) -> Result<FaceCoefficients, MicroError> {
    Ok(FaceCoefficients::new(grid, |y| {
        coef.eval(&[center[0] + y[0], center[1] + y[1], center[2] + y[2]])
    })?)
}

fn sparse_weights(w: Vec<f64>) -> Vec<(usize, f64)> {
    w.into_iter()
        .enumerate()
        .filter(|(_, w)| *w != 0.0)
        .collect()
}

/// HeunP with the outer ring frozen; calls `observe` with `H(m^n)` for
/// `n = 0..=steps`.
fn integrate(
    initial: &MagnetizationField,
    faces: &FaceCoefficients,
    disc: &MicroDiscretization,
    mut observe: impl FnMut(&MicroFrame),
) -> Result<MicroResult, MicroError> {
    let grid = initial.grid();
    let n = grid.len();
    for (i, v) in initial.values().iter().enumerate() {
        if !((vec3::norm(*v) - 1.0).abs() <= 1e-10) {
            return Err(MicroError::InvalidSetup(format!(
                "initial data not unit length at node {i}"
            )));
        }
    }
    let interior: Vec<usize> = (0..n).filter(|&i| grid.is_interior(i, 1)).collect();
    let (dt, alpha) = (disc.dt, disc.alpha);
    let mut m = initial.values().to_vec();
    let mut h = vec![[0.0; 3]; n];
    let mut k1 = vec![[0.0; 3]; n];
    let mut m1 = m.clone();
    let mut h2 = vec![[0.0; 3]; n];
    for step in 0..=disc.steps {
        div_a_grad_into(faces, &m, &mut h);
        observe(&MicroFrame {
            step,
            time: if step == disc.steps {
                disc.eta
            } else {
                step as f64 * dt
            },
            grid,
            m: &m,
            field: &h,
        });
        if step == disc.steps {
            break;
        }
        for &i in &interior {
            k1[i] = llg_rhs_node(m[i], h[i], alpha);
            m1[i] = vec3::axpy(m[i], dt, k1[i]);
        }
        div_a_grad_into(faces, &m1, &mut h2);
        for &i in &interior {
            let k2 = llg_rhs_node(m1[i], h2[i], alpha);
            let v = vec3::axpy(m[i], 0.5 * dt, vec3::add(k1[i], k2));
            let nv = vec3::norm(v);
            if !(nv <= BLOWUP_NORM) {
                return Err(MicroError::InstabilityDetected { step: step + 1 });
            }
            m[i] = vec3::scale(1.0 / nv, v);
        }
    }
    let norm_drift = m
        .iter()
        .map(|v| (vec3::norm(*v) - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(MicroResult {
        h_avg: [0.0; 3],
        norm_drift,
        steps: disc.steps,
        dt,
        dx: disc.dx,
        nodes: n,
    })
}

fn check_initial(
    initial: &MagnetizationField,
    disc: &MicroDiscretization,
) -> Result<(), MicroError> {
    let g = initial.grid();
    let expected = 2 * disc.half_nodes + 1;
    if g.dim() != disc.dim || (0..g.dim()).any(|a| g.count(a) != expected) {
        return Err(MicroError::InvalidSetup(format!(
            "initial data must live on the {expected}^{} micro grid",
            disc.dim
        )));
    }
    Ok(())
}

fn sample_times(disc: &MicroDiscretization) -> Vec<f64> {
    (0..=disc.steps)
        .map(|n| {
            if n == disc.steps {
                disc.eta
            } else {
                n as f64 * disc.dt
            }
        })
        .collect()
}

/// Solves the micro problem around `center` and returns the upscaled field,
/// streaming every step into the kernel average. `observe` sees each frame.
pub fn solve_micro_with(
    initial: &MagnetizationField,
    coef: &Coefficient,
    center: &[f64; 3],
    setup: &MicroSetup,
    observe: impl FnMut(&MicroFrame),
) -> Result<MicroResult, MicroError> {
    let mut multi = solve_micro_multi_with(initial, coef, center, setup, &[setup.mu], observe)?;
    let mut base = multi.base;
    base.h_avg = multi.h_avg.pop().unwrap_or([0.0; 3]);
    Ok(base)
}

pub fn solve_micro(
    initial: &MagnetizationField,
    coef: &Coefficient,
    center: &[f64; 3],
    setup: &MicroSetup,
) -> Result<MicroResult, MicroError> {
    solve_micro_with(initial, coef, center, setup, |_| {})
}

/// One solve, upscaled with each averaging width in `mus` (units of `ε`).
pub fn solve_micro_multi(
    initial: &MagnetizationField,
    coef: &Coefficient,
    center: &[f64; 3],
    setup: &MicroSetup,
    mus: &[f64],
) -> Result<MultiResult, MicroError> {
    solve_micro_multi_with(initial, coef, center, setup, mus, |_| {})
}

fn solve_micro_multi_with(
    initial: &MagnetizationField,
    coef: &Coefficient,
    center: &[f64; 3],
    setup: &MicroSetup,
    mus: &[f64],
    mut observe: impl FnMut(&MicroFrame),
) -> Result<MultiResult, MicroError> {
    let disc = setup.resolve(coef)?;
    check_initial(initial, &disc)?;
    let grid = initial.grid();
    let eps = disc.epsilon;
    if let Some(&bad) = mus.iter().find(|&&mu| !(mu > 0.0) || mu > setup.mu_prime) {
        return Err(MicroError::InvalidSetup(format!(
            "averaging width {bad} outside (0, μ′ = {}]",
            setup.mu_prime
        )));
    }
    let wx: Vec<Vec<(usize, f64)>> = mus
        .iter()
        .map(|mu| spatial_weights(grid, &setup.spatial, mu * eps).map(sparse_weights))
        .collect::<Result<_, _>>()?;
    let wt = temporal_weights(&sample_times(&disc), &setup.temporal, disc.eta)?;
    let faces = local_faces(coef, center, grid)?;
    let mut acc = vec![[0.0; 3]; mus.len()];
    let base = integrate(initial, &faces, &disc, |frame| {
        let w = wt[frame.step];
        if w != 0.0 {
            for (a, weights) in acc.iter_mut().zip(&wx) {
                let s = weights
                    .iter()
                    .fold([0.0; 3], |s, &(i, wi)| vec3::axpy(s, wi, frame.field[i]));
                *a = vec3::axpy(*a, w, s);
            }
        }
        observe(frame);
    })?;
    if let Some(bad) = acc.iter().position(|v| !vec3::is_finite(*v)) {
        return Err(MicroError::InstabilityDetected { step: bad });
    }
    Ok(MultiResult {
        mus: mus.to_vec(),
        h_avg: acc,
        base,
    })
}

/// Solves the micro problem and keeps `∇·(a∇m)` on `[-μ, μ]^d` for every step.
pub fn solve_micro_trajectory(
    initial: &MagnetizationField,
    coef: &Coefficient,
    center: &[f64; 3],
    setup: &MicroSetup,
) -> Result<(SampledTrajectory, MicroResult), MicroError> {
    let disc = setup.resolve(coef)?;
    check_initial(initial, &disc)?;
    let grid = initial.grid();
    let inner = ((disc.mu / disc.dx) - 1e-9).ceil() as usize;
    let inner = inner.min(disc.half_nodes);
    let sub = Grid::centered_box(disc.dim, inner, disc.dx)?;
    let shift = disc.half_nodes - inner;
    let map: Vec<usize> = (0..sub.len())
        .map(|i| {
            let mut mi = sub.multi_index(i);
            for v in mi.iter_mut().take(disc.dim) {
                *v += shift;
            }
            grid.index(mi)
        })
        .collect();
    let faces = local_faces(coef, center, grid)?;
    let mut traj = SampledTrajectory::new(sub);
    let base = integrate(initial, &faces, &disc, |frame| {
        traj.push(frame.time, map.iter().map(|&i| frame.field[i]).collect());
    })?;
    let h_avg = upscale(&traj, setup, &disc)?;
    Ok((traj, MicroResult { h_avg, ..base }))
}

/// Kernel average of a stored field trajectory with the setup's `μ` and `η`.
pub fn upscale(
    trajectory: &SampledTrajectory,
    setup: &MicroSetup,
    disc: &MicroDiscretization,
) -> Result<Vec3, MicroError> {
    Ok(space_time_average(
        trajectory,
        &setup.spatial,
        &setup.temporal,
        disc.mu,
        disc.eta,
    )?)
}
