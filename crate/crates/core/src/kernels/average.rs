use super::kernel::Kernel;
use super::KernelError;
use crate::grid_fd::Grid;
use crate::vec3::{self, Vec3};

/// Lattice snapshots of a vector quantity at increasing times.
#[derive(Clone, Debug, Default)]
pub struct SampledTrajectory {
    grid: Option<Grid>,
    times: Vec<f64>,
    frames: Vec<Vec<Vec3>>,
}

impl SampledTrajectory {
    pub fn new(grid: Grid) -> Self {
        Self {
            grid: Some(grid),
            times: Vec::new(),
            frames: Vec::new(),
        }
    }

    /// Appends a frame; panics if its length does not match the grid.
    pub fn push(&mut self, time: f64, frame: Vec<Vec3>) {
        let g = self.grid.as_ref().expect("trajectory has a grid");
        assert_eq!(frame.len(), g.len(), "frame size");
        self.times.push(time);
        self.frames.push(frame);
    }

    pub fn grid(&self) -> &Grid {
        self.grid.as_ref().expect("trajectory has a grid")
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn frames(&self) -> &[Vec<Vec3>] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

const BOX_SLACK: f64 = 1e-12;

/// Trapezoidal weights `K_μ(x_i) Δx^d` of the tensor kernel on `grid`.
///
/// The grid must cover `[-μ, μ]^d`.
pub fn spatial_weights(grid: &Grid, kernel: &Kernel, mu: f64) -> Result<Vec<f64>, KernelError> {
    for axis in 0..grid.dim() {
        let lo = grid.origin(axis);
        let hi = lo + grid.extent(axis);
        if lo > -mu + BOX_SLACK * mu.max(1.0) || hi < mu - BOX_SLACK * mu.max(1.0) {
            return Err(KernelError::AveragingBoxExceedsData(format!(
                "axis {axis} covers [{lo}, {hi}] but μ = {mu}"
            )));
        }
    }
    let vol = grid.cell_volume();
    Ok((0..grid.len())
        .map(|i| {
            let x = grid.coords(i);
            kernel.tensor_scaled_eval(mu, &x[..grid.dim()]) * vol
        })
        .collect())
}

/// Trapezoidal weights `K⁰_η(t_n) w_n` on the sample times, which must
/// span `[0, η]`.
pub fn temporal_weights(times: &[f64], kernel: &Kernel, eta: f64) -> Result<Vec<f64>, KernelError> {
    if !(eta > 0.0) {
        return Err(KernelError::AveragingBoxExceedsData(format!("η = {eta}")));
    }
    let slack = BOX_SLACK * eta;
    match (times.first(), times.last()) {
        (Some(&t0), Some(&t1)) if t0 <= slack && t1 >= eta - slack => {}
        _ => {
            return Err(KernelError::AveragingBoxExceedsData(format!(
                "samples do not span [0, {eta}]"
            )))
        }
    }
    let n = times.len();
    Ok((0..n)
        .map(|i| {
            let left = if i > 0 { times[i] - times[i - 1] } else { 0.0 };
            let right = if i + 1 < n {
                times[i + 1] - times[i]
            } else {
                0.0
            };
            0.5 * (left + right) * kernel.scaled_eval(eta, times[i])
        })
        .collect())
}

/// `∫∫ K_μ(x) K⁰_η(t) f(x,t) dx dt` by the trapezoidal rule in space and time.
pub fn space_time_average(
    trajectory: &SampledTrajectory,
    spatial: &Kernel,
    temporal: &Kernel,
    mu: f64,
    eta: f64,
) -> Result<Vec3, KernelError> {
    if trajectory.is_empty() {
        return Err(KernelError::AveragingBoxExceedsData(
            "empty trajectory".into(),
        ));
    }
    let wx = spatial_weights(trajectory.grid(), spatial, mu)?;
    let wt = temporal_weights(trajectory.times(), temporal, eta)?;
    let mut acc = [0.0; 3];
    for (frame, t) in trajectory.frames().iter().zip(&wt) {
        if *t == 0.0 {
            continue;
        }
        let mut s = [0.0; 3];
        for (v, w) in frame.iter().zip(&wx) {
            if *w != 0.0 {
                s = vec3::axpy(s, *w, *v);
            }
        }
        acc = vec3::axpy(acc, *t, s);
    }
    Ok(acc)
}
