//! Wall time of single micro problems at fixed scaled parameters.

use super::{initial_data, Column, ExperimentConfig, ExperimentError, ExperimentResult};
use crate::coefficients::{Coefficient, Preset};
use crate::grid_fd::MagnetizationField;
use crate::micro::{macro_stencil, micro_grid, micro_initial_data, solve_micro, MicroSetup};
use std::time::Instant;

pub(super) fn run(config: &ExperimentConfig) -> Result<ExperimentResult, ExperimentError> {
    let p = &config.params;
    let preset = config.preset_or(Preset::Ex2);
    let epsilons = config.list(
        &config.sweep.epsilon,
        &[1.0 / 50.0, 1.0 / 100.0, 1.0 / 200.0],
    );
    let ks = config
        .sweep
        .points_per_eps
        .clone()
        .unwrap_or_else(|| vec![p.points_per_eps.unwrap_or(15)]);
    let (mu, mu_prime, eta) = (
        p.mu.unwrap_or(3.0),
        p.mu_prime.unwrap_or(5.0),
        p.eta.unwrap_or(0.3),
    );
    let alpha = p.micro_alpha.unwrap_or(1.2);
    let repeats = p.repeats.unwrap_or(5).max(1);
    let macro_dx = p.dx.unwrap_or(1.0 / 8.0);
    let center = config.center()?;
    let data = initial_data(preset);
    let dim = preset.dim();

    let mut result = ExperimentResult::new(
        "cost",
        vec![
            Column::new("preset", "name"),
            Column::new("epsilon", "1"),
            Column::new("points_per_eps", "1"),
            Column::new("nodes", "1"),
            Column::new("steps", "1"),
            Column::new("model_work", "1"),
            Column::timing("time", "s"),
            Column::timing("time_ratio", "1"),
            Column::timing("measured_over_model", "1"),
        ],
    );
    result.notes.push(format!(
        "mu={mu}; mu_prime={mu_prime}; eta={eta}; micro_alpha={alpha}; repeats={repeats} (minimum reported); \
         model=(eta/eps^2)(mu_prime/eps)^d K^(2+d)/c with c the step factor"
    ));

    struct Case {
        epsilon: f64,
        k: usize,
        coef: Coefficient,
        setup: MicroSetup,
        initial: MagnetizationField,
        model: f64,
        best: f64,
        steps: usize,
        nodes: usize,
    }
    let mut cases = Vec::new();
    for &k in &ks {
        for &epsilon in &epsilons {
            let coef = Coefficient::preset(preset, epsilon)?;
            let setup = MicroSetup::new(mu, mu_prime, eta)?
                .with_alpha(alpha)?
                .with_points_per_eps(k)?;
            let disc = setup.resolve(&coef)?;
            let stencil = macro_stencil(data, &center, macro_dx, setup.interp_order)?;
            let initial = micro_initial_data(&stencil, &micro_grid(&disc)?)?;
            // scaled quantities: η/ε², μ′/ε and the step factor c = dt/dx²
            let c = disc.dt / (disc.dx * disc.dx);
            let model =
                eta * (mu_prime * 2.0).powi(dim as i32) * (k as f64).powi(2 + dim as i32) / c;
            cases.push(Case {
                epsilon,
                k,
                coef,
                setup,
                initial,
                model,
                best: f64::INFINITY,
                steps: 0,
                nodes: 0,
            });
        }
    }

    // timings run one at a time so that workers do not compete; one untimed
    // warm-up, then rounds over all cases so that drift in machine speed
    // hits every case alike
    if let Some(c) = cases.first() {
        solve_micro(&c.initial, &c.coef, &center, &c.setup)?;
    }
    for _ in 0..repeats {
        for c in &mut cases {
            let start = Instant::now();
            let r = solve_micro(&c.initial, &c.coef, &center, &c.setup)?;
            c.best = c.best.min(start.elapsed().as_secs_f64());
            c.steps = r.steps;
            c.nodes = r.nodes;
        }
    }
    if let Some(first) = cases.first() {
        let (t0, m0) = (first.best, first.model);
        for c in &cases {
            result.push(vec![
                preset.name().into(),
                c.epsilon.into(),
                c.k.into(),
                c.nodes.into(),
                c.steps.into(),
                c.model.into(),
                c.best.into(),
                (c.best / t0).into(),
                ((c.best / t0) / (c.model / m0)).into(),
            ]);
        }
    }
    Ok(result)
}
