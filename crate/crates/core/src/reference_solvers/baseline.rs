use super::{check_periodic, run_homogenized, run_with, ReferenceError, TimeStepping};
use crate::coefficients::Coefficient;
use crate::grid_fd::{FaceCoefficients, MagnetizationField};
use crate::integrators::{MicroExchange, Trajectory};

/// Midpoint samples per ε and axis for local means.
const MEAN_SAMPLES_PER_EPS: f64 = 32.0;

/// Arithmetic mean of `a` over the box of side `window` centred at `x`.
pub fn local_mean(coef: &Coefficient, x: &[f64; 3], window: f64) -> f64 {
    let d = coef.dim();
    let n = ((MEAN_SAMPLES_PER_EPS * window / coef.epsilon()).ceil() as usize).max(1);
    let h = window / n as f64;
    let total = n.pow(d as u32);
    let sum: f64 = (0..total)
        .map(|idx| {
            let mut y = *x;
            let mut rest = idx;
            for yr in y.iter_mut().take(d) {
                *yr += -0.5 * window + ((rest % n) as f64 + 0.5) * h;
                rest /= n;
            }
            coef.eval(&y)
        })
        .sum();
    sum / total as f64
}

/// Replaces `a^ε` by its local arithmetic mean over `window`.
///
/// A constant mean runs the homogenized solver with `ā I`; a varying mean
/// runs the conservative second-order stencil with `ā` at half points.
pub fn run_averaged_baseline(
    coef: &Coefficient,
    window: f64,
    initial: &MagnetizationField,
    order: usize,
    stepping: &TimeStepping,
) -> Result<Trajectory, ReferenceError> {
    let grid = initial.grid();
    check_periodic(grid)?;
    if !(window >= coef.epsilon() * (1.0 - 1e-12)) {
        return Err(ReferenceError::InvalidInput(format!(
            "averaging window {window:e} shorter than ε = {:e}",
            coef.epsilon()
        )));
    }
    let faces = FaceCoefficients::new(grid, |x| local_mean(coef, x, window))?;
    let d = grid.dim();
    let (lo, hi) = (0..d)
        .flat_map(|a| faces.face(a).iter().copied())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    if hi - lo <= 1e-10 * hi.abs() {
        let mean = 0.5 * (lo + hi);
        let mut ah = [[0.0; 3]; 3];
        for (r, row) in ah.iter_mut().enumerate().take(d) {
            row[r] = mean;
        }
        return run_homogenized(&ah, initial, order, stepping);
    }
    run_with(&MicroExchange::new(faces), initial, stepping)
}
