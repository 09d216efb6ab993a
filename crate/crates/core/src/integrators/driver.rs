use super::provider::FieldProvider;
use super::steppers::Stepper;
use super::{IntegratorError, Method};
use crate::grid_fd::MagnetizationField;

/// Magnetization snapshots at recorded times.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub frames: Vec<MagnetizationField>,
}

impl Trajectory {
    /// The last recorded frame.
    pub fn last(&self) -> Option<&MagnetizationField> {
        self.frames.last()
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

/// Step count and uniform step reaching `final_time` with steps no larger than `dt`.
pub fn uniform_steps(final_time: f64, dt: f64) -> Result<(usize, f64), IntegratorError> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(IntegratorError::InvalidStep(dt));
    }
    if !(final_time >= 0.0) || !final_time.is_finite() {
        return Err(IntegratorError::InvalidStep(final_time));
    }
    if final_time == 0.0 {
        return Ok((0, dt));
    }
    let n = (final_time / dt - 1e-9).ceil().max(1.0) as usize;
    Ok((n, final_time / n as f64))
}

/// Integrates from `t = 0` to `final_time` with steps of at most `dt`.
///
/// Frames are recorded at the step nearest to each entry of `outputs`
/// (which must lie in `[0, final_time]`); the final state is always recorded.
pub fn integrate<P: FieldProvider + ?Sized>(
    method: Method,
    provider: &P,
    initial: MagnetizationField,
    dt: f64,
    alpha: f64,
    final_time: f64,
    outputs: &[f64],
) -> Result<Trajectory, IntegratorError> {
    let (steps, dt) = uniform_steps(final_time, dt)?;
    let mut marks: Vec<usize> = outputs
        .iter()
        .map(|&t| {
            if !(0.0..=final_time * (1.0 + 1e-12)).contains(&t) {
                return Err(IntegratorError::InvalidStep(t));
            }
            Ok(if steps == 0 {
                0
            } else {
                (t / dt).round() as usize
            })
        })
        .collect::<Result<_, _>>()?;
    marks.push(steps);
    marks.sort_unstable();
    marks.dedup();
    let mut stepper = Stepper::new(method, initial, dt, alpha)?;
    let mut traj = Trajectory {
        times: Vec::with_capacity(marks.len()),
        frames: Vec::with_capacity(marks.len()),
    };
    let mut next = marks.iter().peekable();
    for k in 0..=steps {
        if next.peek() == Some(&&k) {
            next.next();
            traj.times.push(if k == steps {
                final_time
            } else {
                k as f64 * dt
            });
            traj.frames.push(stepper.current().clone());
        }
        if k < steps {
            stepper.step(provider)?;
        }
    }
    Ok(traj)
}
