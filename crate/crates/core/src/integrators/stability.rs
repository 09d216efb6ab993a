use super::provider::FieldProvider;
use super::steppers::Stepper;
use super::{IntegratorError, Method};
use crate::grid_fd::MagnetizationField;
use crate::vec3;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Largest root modulus of the method's linear amplification at `z`.
fn amplification(method: Method, z: Complex64) -> f64 {
    let one = Complex64::new(1.0, 0.0);
    match method {
        Method::HeunP => (one + z + z * z / 2.0).norm(),
        Method::Rk4P => (one + z + z * z / 2.0 + z * z * z / 6.0 + z * z * z * z / 24.0).norm(),
        Method::ImplicitMidpoint => ((one + z / 2.0) / (one - z / 2.0)).norm(),
        Method::Mpe => {
            // ζ² - (1 + 3z/2) ζ + z/2 = 0
            let b = -(one + 1.5 * z);
            let c = z / 2.0;
            let disc = (b * b - 4.0 * c).sqrt();
            let r1 = (-b + disc) / 2.0;
            let r2 = (-b - disc) / 2.0;
            r1.norm().max(r2.norm())
        }
        Method::Mpea => {
            // ζ³ - (1 + 23z/12) ζ² + (16z/12) ζ - 5z/12 = 0
            let coeffs = [-(one + z * 23.0 / 12.0), z * 16.0 / 12.0, -z * 5.0 / 12.0];
            cubic_roots(coeffs)
                .iter()
                .map(|r| r.norm())
                .fold(0.0, f64::max)
        }
    }
}

/// Roots of `ζ³ + a ζ² + b ζ + c` by Durand–Kerner iteration.
fn cubic_roots([a, b, c]: [Complex64; 3]) -> [Complex64; 3] {
    let p = |x: Complex64| ((x + a) * x + b) * x + c;
    let seed = Complex64::new(0.4, 0.9);
    let mut r = [Complex64::new(1.0, 0.0), seed, seed * seed];
    for _ in 0..500 {
        let mut delta = 0.0f64;
        for i in 0..3 {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..3 {
                if i != j {
                    den *= r[i] - r[j];
                }
            }
            let step = p(r[i]) / den;
            r[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    r
}

/// Largest `w` such that the method's linear amplification stays bounded by
/// one on `[0, w]` along `z = w(-α + i)`, the eigenvalue ray of the
/// linearized damped precession with unit exchange eigenvalue.
pub fn linear_stability_radius(method: Method, alpha: f64) -> f64 {
    if method == Method::ImplicitMidpoint {
        return f64::INFINITY;
    }
    let dir = Complex64::new(-alpha, 1.0);
    let unstable = |w: f64| amplification(method, dir * w) > 1.0 + 1e-12;
    let step = 1e-3;
    let mut lo = 0.0;
    let mut hi = f64::NAN;
    let mut w = step;
    while w < 20.0 {
        if unstable(w) {
            hi = w;
            break;
        }
        lo = w;
        w += step;
    }
    if hi.is_nan() {
        return lo;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if unstable(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

/// Parameters of the twin-run instability detector.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilityProbe {
    /// Steps per trial run.
    pub steps: usize,
    /// Size of the random tangent perturbation.
    pub perturbation: f64,
    /// Growth of the twin-run distance that counts as unstable.
    pub growth: f64,
    pub seed: u64,
    /// Geometric bisection iterations.
    pub iterations: usize,
}

impl Default for StabilityProbe {
    fn default() -> Self {
        Self {
            steps: 200,
            perturbation: 1e-7,
            growth: 10.0,
            seed: 0x5eed,
            iterations: 12,
        }
    }
}

/// Runs `m0` and a slightly perturbed copy side by side and reports
/// whether their distance stays below `growth` times its initial value.
pub fn is_stable<P: FieldProvider + ?Sized>(
    method: Method,
    provider: &P,
    m0: &MagnetizationField,
    dt: f64,
    alpha: f64,
    probe: &StabilityProbe,
) -> Result<bool, IntegratorError> {
    let mut rng = ChaCha8Rng::seed_from_u64(probe.seed);
    let mut pert = m0.clone();
    for v in pert.values_mut() {
        let r = [
            rng.gen::<f64>() - 0.5,
            rng.gen::<f64>() - 0.5,
            rng.gen::<f64>() - 0.5,
        ];
        let tangent = vec3::cross(*v, r);
        *v = vec3::axpy(*v, probe.perturbation, tangent);
    }
    pert.normalize()?;
    let d0 = m0.max_distance(&pert);
    if d0 == 0.0 {
        return Ok(true);
    }
    let mut a = Stepper::new(method, m0.clone(), dt, alpha)?;
    let mut b = Stepper::new(method, pert, dt, alpha)?;
    for _ in 0..probe.steps {
        for s in [&mut a, &mut b] {
            match s.step(provider) {
                Ok(()) => {}
                Err(
                    IntegratorError::InstabilityDetected { .. }
                    | IntegratorError::ZeroNormBeforeProjection { .. }
                    | IntegratorError::NotUnitNorm { .. }
                    | IntegratorError::FixedPointDivergence { .. },
                ) => return Ok(false),
                Err(e) => return Err(e),
            }
        }
        let d = a.current().max_distance(b.current());
        if !(d <= probe.growth * d0) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityRow {
    pub dx: f64,
    pub dt_max: f64,
    /// `dt_max / dx²`
    pub c_stab: f64,
    /// Every probed step was stable; `dt_max` is the bracket top.
    pub at_bracket_top: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityTable {
    pub method: Method,
    pub rows: Vec<StabilityRow>,
    /// Least-squares slope of `log dt_max` against `log dx`.
    pub slope: f64,
}

fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    if x.len() < 2 {
        return f64::NAN;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Largest stable step for each `dx` by geometric bisection over
/// `[1e-8, 1] · 10 dx²`.
///
/// `build(dx)` returns the field provider and initial data on that grid.
pub fn estimate_stability_limit<P, F>(
    method: Method,
    dx_list: &[f64],
    alpha: f64,
    probe: &StabilityProbe,
    build: F,
) -> Result<StabilityTable, IntegratorError>
where
    P: FieldProvider,
    F: Fn(f64) -> Result<(P, MagnetizationField), IntegratorError>,
{
    let mut rows = Vec::with_capacity(dx_list.len());
    for &dx in dx_list {
        let (provider, m0) = build(dx)?;
        let mut hi = 10.0 * dx * dx;
        let mut lo = 1e-8 * hi;
        let stable = |dt: f64| is_stable(method, &provider, &m0, dt, alpha, probe);
        if stable(hi)? {
            rows.push(StabilityRow {
                dx,
                dt_max: hi,
                c_stab: hi / (dx * dx),
                at_bracket_top: true,
            });
            continue;
        }
        if !stable(lo)? {
            return Err(IntegratorError::NoStableStepFound { dx });
        }
        for _ in 0..probe.iterations {
            let mid = (lo * hi).sqrt();
            if stable(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        rows.push(StabilityRow {
            dx,
            dt_max: lo,
            c_stab: lo / (dx * dx),
            at_bracket_top: false,
        });
    }
    let lx: Vec<f64> = rows.iter().map(|r| r.dx.ln()).collect();
    let ly: Vec<f64> = rows.iter().map(|r| r.dt_max.ln()).collect();
    Ok(StabilityTable {
        method,
        slope: fit_slope(&lx, &ly),
        rows,
    })
}
