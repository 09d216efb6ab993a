//! Averaging error of single micro problems over the micro parameters.

use super::{
    initial_data, preset, reference_matrix, Column, ExperimentConfig, ExperimentError,
    ExperimentResult,
};
use crate::coefficients::{Coefficient, Preset};
use crate::micro::{
    homogenized_field, macro_stencil, micro_grid, micro_initial_data, solve_micro_multi,
    ErrorDecomposition, MicroSetup,
};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::time::Instant;

/// One micro solve: everything but the averaging widths.
#[derive(Clone, Copy, Debug)]
struct Group {
    epsilon: f64,
    mu_prime: f64,
    eta: f64,
    alpha: f64,
    k: usize,
}

/// Errors per μ, micro steps and wall time of one group.
type Solved = (Vec<ErrorDecomposition>, usize, f64);

pub(super) fn run(config: &ExperimentConfig) -> Result<ExperimentResult, ExperimentError> {
    let p = &config.params;
    let sw = &config.sweep;
    let presets: Vec<Preset> = match &sw.presets {
        Some(list) => list.iter().map(|s| preset(s)).collect::<Result<_, _>>()?,
        None => vec![config.preset_or(Preset::Ex2)],
    };
    let epsilons = config.list(&sw.epsilon, &[p.epsilon.unwrap_or(0.01)]);
    let mus = config.list(&sw.mu, &[p.mu.unwrap_or(3.9)]);
    let mu_primes = config.list(&sw.mu_prime, &[p.mu_prime.unwrap_or(14.0)]);
    let etas = config.list(&sw.eta, &[p.eta.unwrap_or(1.0)]);
    let alphas = config.list(&sw.alpha, &[p.micro_alpha.unwrap_or(1.2)]);
    let ks = sw
        .points_per_eps
        .clone()
        .unwrap_or_else(|| vec![p.points_per_eps.unwrap_or(15)]);
    let order = p.interp_order.unwrap_or(4);
    let macro_dx = p.dx.unwrap_or(1.0 / 12.0);
    let center = config.center()?;

    let mut groups = Vec::new();
    for &epsilon in &epsilons {
        for &mu_prime in &mu_primes {
            if let Some(&mu) = mus.iter().find(|&&mu| mu > mu_prime) {
                return Err(ExperimentError::Config(format!(
                    "mu = {mu} exceeds mu_prime = {mu_prime}"
                )));
            }
            for &eta in &etas {
                for &alpha in &alphas {
                    for &k in &ks {
                        groups.push(Group {
                            epsilon,
                            mu_prime,
                            eta,
                            alpha,
                            k,
                        });
                    }
                }
            }
        }
    }

    // homogenized references per (preset, resolution)
    let mut refs = BTreeMap::new();
    for &pr in &presets {
        for &k in &ks {
            let res = p.resolution.unwrap_or(k);
            if let std::collections::btree_map::Entry::Vacant(slot) = refs.entry((pr.name(), res)) {
                slot.insert(reference_matrix(pr, Some(res))?);
            }
        }
    }

    let points: Vec<(Preset, Group)> = presets
        .iter()
        .flat_map(|&pr| groups.iter().map(move |&g| (pr, g)))
        .collect();
    let solved: Vec<Result<Solved, ExperimentError>> = points
        .par_iter()
        .map(|&(pr, g)| {
            let ah = refs[&(pr.name(), p.resolution.unwrap_or(g.k))];
            let coef = Coefficient::preset(pr, g.epsilon)?;
            let data = initial_data(pr);
            let setup = MicroSetup::new(mus[0].min(g.mu_prime), g.mu_prime, g.eta)?
                .with_alpha(g.alpha)?
                .with_points_per_eps(g.k)?
                .with_interp_order(order)?;
            let start = Instant::now();
            let stencil = macro_stencil(data, &center, macro_dx, order)?;
            let disc = setup.resolve(&coef)?;
            let initial = micro_initial_data(&stencil, &micro_grid(&disc)?)?;
            let multi = solve_micro_multi(&initial, &coef, &center, &setup, &mus)?;
            let elapsed = start.elapsed().as_secs_f64();
            let dim = pr.dim();
            let init_ref = homogenized_field(&stencil.normalized_derivatives(&[0.0; 3])?, &ah, dim);
            let macro_ref = homogenized_field(&data.derivatives(&center), &ah, dim);
            let errs = multi
                .h_avg
                .iter()
                .map(|&h| ErrorDecomposition::new(h, init_ref, macro_ref))
                .collect();
            Ok((errs, multi.base.steps, elapsed))
        })
        .collect();

    let mut result = ExperimentResult::new(
        "micro-sweep",
        vec![
            Column::new("preset", "name"),
            Column::new("epsilon", "1"),
            Column::new("mu", "eps"),
            Column::new("mu_prime", "eps"),
            Column::new("eta", "eps^2"),
            Column::new("alpha", "1"),
            Column::new("points_per_eps", "1"),
            Column::new("e_avg", "1"),
            Column::new("e_disc", "1"),
            Column::new("e_approx", "1"),
            Column::new("micro_steps", "1"),
            Column::timing("solve_time", "s"),
        ],
    );
    result.notes.push(format!(
        "macro_dx={macro_dx}; interp_order={order}; center={:?}; reference=cell problem at {}",
        &center[..presets[0].dim()],
        p.resolution
            .map_or("points_per_eps".to_string(), |r| r.to_string())
    ));
    for (&(pr, g), solved) in points.iter().zip(solved) {
        let (errs, steps, elapsed) = solved?;
        for (&mu, e) in mus.iter().zip(errs) {
            result.push(vec![
                pr.name().into(),
                g.epsilon.into(),
                mu.into(),
                g.mu_prime.into(),
                g.eta.into(),
                g.alpha.into(),
                g.k.into(),
                e.e_avg.into(),
                e.e_disc.into(),
                e.e_approx.into(),
                steps.into(),
                elapsed.into(),
            ]);
        }
    }
    Ok(result)
}
