use super::provider::FieldProvider;
use super::rhs::{cayley_update, compose_h_node, llg_rhs_node, project_unit};
use super::{IntegratorError, Method};
use crate::grid_fd::{Field, MagnetizationField};
use crate::vec3::{self, Vec3};

/// Default fixed-point tolerance of the implicit midpoint step.
pub const IMP_TOL: f64 = 1e-12;
/// Default iteration cap of the implicit midpoint step.
pub const IMP_MAX_ITER: usize = 200;

const UNIT_TOL: f64 = 1e-10;

/// Removes the roundoff drift of the norm-preserving updates, which would
/// otherwise accumulate linearly over very long runs.
#[inline]
fn unit(v: Vec3) -> Vec3 {
    vec3::scale(1.0 / vec3::norm(v), v)
}

/// Current magnetization plus the `h` lattices multistep methods reuse.
#[derive(Clone, Debug)]
pub struct IntegratorState {
    current: MagnetizationField,
    time: f64,
    dt: f64,
    step_index: usize,
    // h(m^{j-1}), h(m^{j-2}); most recent first
    history: Vec<Vec<Vec3>>,
    last_iterations: usize,
}

impl IntegratorState {
    pub fn new(initial: MagnetizationField, dt: f64) -> Result<Self, IntegratorError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(IntegratorError::InvalidStep(dt));
        }
        Ok(Self {
            current: initial,
            time: 0.0,
            dt,
            step_index: 0,
            history: Vec::new(),
            last_iterations: 0,
        })
    }

    pub fn current(&self) -> &MagnetizationField {
        &self.current
    }

    pub fn into_current(self) -> MagnetizationField {
        self.current
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }

    pub fn history_len(&self) -> usize {
        self.history.len()
    }

    /// Fixed-point iterations used by the last implicit midpoint step.
    pub fn last_iterations(&self) -> usize {
        self.last_iterations
    }

    /// Changes the step size and discards stored history.
    pub fn set_dt(&mut self, dt: f64) -> Result<(), IntegratorError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(IntegratorError::InvalidStep(dt));
        }
        self.dt = dt;
        self.history.clear();
        Ok(())
    }

    fn commit(&mut self, next: Vec<Vec3>, h_now: Option<Vec<Vec3>>) -> Result<(), IntegratorError> {
        if !next.iter().all(|v| vec3::is_finite(*v)) {
            return Err(IntegratorError::InstabilityDetected {
                step: self.step_index + 1,
            });
        }
        self.current = Field::from_values(self.current.grid().clone(), next)?;
        match h_now {
            Some(h) => {
                self.history.insert(0, h);
                self.history.truncate(2);
            }
            None => self.history.clear(),
        }
        self.time += self.dt;
        self.step_index += 1;
        Ok(())
    }
}

fn check_unit(m: &[Vec3]) -> Result<(), IntegratorError> {
    for (i, v) in m.iter().enumerate() {
        let n = vec3::norm(*v);
        if !((n - 1.0).abs() <= UNIT_TOL) {
            return Err(IntegratorError::NotUnitNorm { node: i, norm: n });
        }
    }
    Ok(())
}

fn eval<P: FieldProvider + ?Sized>(
    provider: &P,
    m: &[Vec3],
    t: f64,
) -> Result<Vec<Vec3>, IntegratorError> {
    if provider.len() != m.len() {
        return Err(IntegratorError::ShapeMismatch {
            expected: provider.len(),
            found: m.len(),
        });
    }
    let mut out = vec![[0.0; 3]; m.len()];
    provider.field(m, t, &mut out)?;
    Ok(out)
}

fn rhs(m: &[Vec3], h: &[Vec3], alpha: f64) -> Vec<Vec3> {
    m.iter()
        .zip(h)
        .map(|(m, h)| llg_rhs_node(*m, *h, alpha))
        .collect()
}

fn compose(m: &[Vec3], h: &[Vec3], alpha: f64) -> Vec<Vec3> {
    m.iter()
        .zip(h)
        .map(|(m, h)| compose_h_node(*m, *h, alpha))
        .collect()
}

fn shifted(m: &[Vec3], s: f64, k: &[Vec3]) -> Vec<Vec3> {
    m.iter()
        .zip(k)
        .map(|(m, k)| vec3::axpy(*m, s, *k))
        .collect()
}

/// Heun's method followed by nodewise projection onto the unit sphere.
pub fn step_heun_p<P: FieldProvider + ?Sized>(
    state: &mut IntegratorState,
    provider: &P,
    alpha: f64,
) -> Result<(), IntegratorError> {
    let m = state.current.values();
    check_unit(m)?;
    let (t, dt) = (state.time, state.dt);
    let h1 = eval(provider, m, t)?;
    let k1 = rhs(m, &h1, alpha);
    let m1 = shifted(m, dt, &k1);
    let h2 = eval(provider, &m1, t + dt)?;
    let k2 = rhs(&m1, &h2, alpha);
    let mut next: Vec<Vec3> = m
        .iter()
        .zip(k1.iter().zip(&k2))
        .map(|(m, (a, b))| vec3::axpy(*m, 0.5 * dt, vec3::add(*a, *b)))
        .collect();
    project_unit(&mut next)?;
    let hj = compose(m, &h1, alpha);
    state.commit(next, Some(hj))
}

/// Classical fourth-order Runge–Kutta followed by projection.
pub fn step_rk4_p<P: FieldProvider + ?Sized>(
    state: &mut IntegratorState,
    provider: &P,
    alpha: f64,
) -> Result<(), IntegratorError> {
    let m = state.current.values();
    check_unit(m)?;
    let (t, dt) = (state.time, state.dt);
    let h1 = eval(provider, m, t)?;
    let k1 = rhs(m, &h1, alpha);
    let m2 = shifted(m, 0.5 * dt, &k1);
    let k2 = rhs(&m2, &eval(provider, &m2, t + 0.5 * dt)?, alpha);
    let m3 = shifted(m, 0.5 * dt, &k2);
    let k3 = rhs(&m3, &eval(provider, &m3, t + 0.5 * dt)?, alpha);
    let m4 = shifted(m, dt, &k3);
    let k4 = rhs(&m4, &eval(provider, &m4, t + dt)?, alpha);
    let mut next: Vec<Vec3> = (0..m.len())
        .map(|i| {
            let s = vec3::add(
                vec3::add(k1[i], vec3::scale(2.0, k2[i])),
                vec3::add(vec3::scale(2.0, k3[i]), k4[i]),
            );
            vec3::axpy(m[i], dt / 6.0, s)
        })
        .collect();
    project_unit(&mut next)?;
    let hj = compose(m, &h1, alpha);
    state.commit(next, Some(hj))
}

/// Implicit midpoint rule solved by damped fixed-point iteration.
///
/// Each iterate applies the closed-form midpoint update with `h`
/// evaluated at the average of the old state and the current iterate. The
/// damping factor halves whenever the update difference grows.
pub fn step_implicit_midpoint<P: FieldProvider + ?Sized>(
    state: &mut IntegratorState,
    provider: &P,
    alpha: f64,
    tol: f64,
    max_iter: usize,
) -> Result<(), IntegratorError> {
    let m0 = state.current.values().to_vec();
    check_unit(&m0)?;
    let (t, dt) = (state.time, state.dt);
    let mut x = m0.clone();
    let mut omega = 1.0;
    let mut prev = f64::INFINITY;
    let mut res = f64::INFINITY;
    for it in 1..=max_iter {
        let mid: Vec<Vec3> = m0
            .iter()
            .zip(&x)
            .map(|(a, b)| vec3::scale(0.5, vec3::add(*a, *b)))
            .collect();
        let hf = eval(provider, &mid, t + 0.5 * dt)?;
        let cand: Vec<Vec3> = (0..m0.len())
            .map(|i| {
                unit(cayley_update(
                    m0[i],
                    compose_h_node(mid[i], hf[i], alpha),
                    dt,
                ))
            })
            .collect();
        res = cand
            .iter()
            .zip(&x)
            .map(|(a, b)| vec3::max_abs(vec3::sub(*a, *b)))
            .fold(0.0, f64::max);
        if !res.is_finite() {
            break;
        }
        if res <= tol {
            state.last_iterations = it;
            return state.commit(cand, None);
        }
        if res > prev {
            omega *= 0.5;
        }
        prev = res;
        for (xi, ci) in x.iter_mut().zip(&cand) {
            *xi = vec3::axpy(*xi, omega, vec3::sub(*ci, *xi));
        }
    }
    Err(IntegratorError::FixedPointDivergence {
        iterations: max_iter,
        residual: res,
    })
}

fn extrapolated_step<P: FieldProvider + ?Sized>(
    state: &mut IntegratorState,
    provider: &P,
    alpha: f64,
    weights: &[f64],
) -> Result<(), IntegratorError> {
    let needed = weights.len() - 1;
    if state.history.len() < needed {
        return Err(IntegratorError::MissingHistory {
            needed,
            available: state.history.len(),
        });
    }
    let m = state.current.values();
    check_unit(m)?;
    let (t, dt) = (state.time, state.dt);
    let hj = compose(m, &eval(provider, m, t)?, alpha);
    let next: Vec<Vec3> = (0..m.len())
        .map(|i| {
            let mut h = vec3::scale(weights[0], hj[i]);
            for (k, w) in weights[1..].iter().enumerate() {
                h = vec3::axpy(h, *w, state.history[k][i]);
            }
            unit(cayley_update(m[i], h, dt))
        })
        .collect();
    state.commit(next, Some(hj))
}

/// Midpoint update with `h` extrapolated from the two latest steps.
pub fn step_mpe<P: FieldProvider + ?Sized>(
    state: &mut IntegratorState,
    provider: &P,
    alpha: f64,
) -> Result<(), IntegratorError> {
    extrapolated_step(state, provider, alpha, &[1.5, -0.5])
}

/// Midpoint update with third-order extrapolation of `h` from three steps.
pub fn step_mpea<P: FieldProvider + ?Sized>(
    state: &mut IntegratorState,
    provider: &P,
    alpha: f64,
) -> Result<(), IntegratorError> {
    extrapolated_step(
        state,
        provider,
        alpha,
        &[23.0 / 12.0, -16.0 / 12.0, 5.0 / 12.0],
    )
}

/// Drives one method, taking RK4P steps until multistep history is available.
#[derive(Clone, Debug)]
pub struct Stepper {
    method: Method,
    alpha: f64,
    imp_tol: f64,
    imp_max_iter: usize,
    state: IntegratorState,
}

impl Stepper {
    pub fn new(
        method: Method,
        initial: MagnetizationField,
        dt: f64,
        alpha: f64,
    ) -> Result<Self, IntegratorError> {
        Ok(Self {
            method,
            alpha,
            imp_tol: IMP_TOL,
            imp_max_iter: IMP_MAX_ITER,
            state: IntegratorState::new(initial, dt)?,
        })
    }

    pub fn with_imp_settings(mut self, tol: f64, max_iter: usize) -> Self {
        self.imp_tol = tol;
        self.imp_max_iter = max_iter;
        self
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn state(&self) -> &IntegratorState {
        &self.state
    }

    pub fn current(&self) -> &MagnetizationField {
        self.state.current()
    }

    pub fn time(&self) -> f64 {
        self.state.time()
    }

    pub fn into_state(self) -> IntegratorState {
        self.state
    }

    pub fn step<P: FieldProvider + ?Sized>(&mut self, provider: &P) -> Result<(), IntegratorError> {
        let s = &mut self.state;
        let a = self.alpha;
        match self.method {
            Method::HeunP => step_heun_p(s, provider, a),
            Method::Rk4P => step_rk4_p(s, provider, a),
            Method::ImplicitMidpoint => {
                step_implicit_midpoint(s, provider, a, self.imp_tol, self.imp_max_iter)
            }
            Method::Mpe | Method::Mpea if s.history_len() < self.method.history() => {
                step_rk4_p(s, provider, a)
            }
            Method::Mpe => step_mpe(s, provider, a),
            Method::Mpea => step_mpea(s, provider, a),
        }
    }

    pub fn run<P: FieldProvider + ?Sized>(
        &mut self,
        provider: &P,
        steps: usize,
    ) -> Result<(), IntegratorError> {
        for _ in 0..steps {
            self.step(provider)?;
        }
        Ok(())
    }
}
