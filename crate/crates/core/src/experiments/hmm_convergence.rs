//! HMM error against a fine homogenized reference over macro spacing and
//! micro setup, with the averaged-coefficient baseline for comparison.

use super::{
    initial_data, matrix_bound, nodes_for, reference_matrix, safe_dt, Column, ExperimentConfig,
    ExperimentError, ExperimentResult,
};
use crate::coefficients::{Coefficient, Preset};
use crate::grid_fd::Grid;
use crate::integrators::Method;
use crate::macro_hmm::{run_hmm, HmmConfig};
use crate::micro::{MicroSetup, SetupPreset};
use crate::reference_solvers::{
    l2_error, run_averaged_baseline, run_homogenized, sample_initial, TimeStepping,
};
use std::time::Instant;

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(super) fn run(config: &ExperimentConfig) -> Result<ExperimentResult, ExperimentError> {
    let p = &config.params;
    let preset = config.preset_or(Preset::Ex2);
    let dim = preset.dim();
    let epsilon = p.epsilon.unwrap_or(0.01);
    let t_end = p.final_time.unwrap_or(0.05);
    let alpha = p.alpha.unwrap_or(0.01);
    let micro_alpha = p.micro_alpha.unwrap_or(1.2);
    let k = p.points_per_eps.unwrap_or(15);
    let interp = p.interp_order.unwrap_or(4);
    let order = p.order.unwrap_or(4);
    let fraction = p.dt_fraction.unwrap_or(0.9);
    let method = config.method_or(Method::Mpea);
    let dxs = config.list(&config.sweep.dx, &[1.0 / 8.0, 1.0 / 12.0, 1.0 / 16.0]);
    let nodes: Vec<usize> = dxs
        .iter()
        .map(|&dx| nodes_for(dx))
        .collect::<Result<_, _>>()?;
    let setups = config.parsed(&config.sweep.setups, &SetupPreset::ALL);

    let coef = Coefficient::preset(preset, epsilon)?;
    let ah = reference_matrix(preset, p.resolution)?;
    let data = initial_data(preset);

    // fine homogenized reference on a common refinement of every macro grid
    let common = nodes.iter().fold(1, |l, &n| l / gcd(l, n) * n);
    let n_ref = common * 48usize.div_ceil(common);
    let ref_grid = Grid::periodic_unit(dim, n_ref)?;
    let dt_ref = safe_dt(
        Method::Mpea,
        alpha,
        matrix_bound(&ah, dim),
        dim,
        1.0 / n_ref as f64,
        order,
    )?;
    let reference = run_homogenized(
        &ah,
        &sample_initial(&ref_grid, |x| data.value(x))?,
        order,
        &TimeStepping::new(dt_ref, alpha, t_end),
    )?
    .frames
    .pop()
    .expect("final frame");

    let mut result = ExperimentResult::new(
        "hmm-convergence",
        vec![
            Column::new("preset", "name"),
            Column::new("dx", "1"),
            Column::new("nodes", "1"),
            Column::new("setup", "name"),
            Column::new("mu", "eps"),
            Column::new("mu_prime", "eps"),
            Column::new("eta", "eps^2"),
            Column::new("macro_dt", "1"),
            Column::new("l2_error", "1"),
            Column::new("linf_error", "1"),
            Column::new("micro_solves", "1"),
            Column::timing("run_time", "s"),
        ],
    );
    result.notes.push(format!(
        "epsilon={epsilon}; T={t_end}; alpha={alpha}; micro_alpha={micro_alpha}; K={k}; method={method}; reference={n_ref} nodes order {order}"
    ));

    for (&dx, &n) in dxs.iter().zip(&nodes) {
        let grid = Grid::periodic_unit(dim, n)?;
        let m0 = sample_initial(&grid, |x| data.value(x))?;
        let mut dt = 0.0;
        for &s in &setups {
            let micro = MicroSetup::preset(s)?
                .with_alpha(micro_alpha)?
                .with_points_per_eps(k)?
                .with_interp_order(interp)?;
            let mut hc =
                HmmConfig::new(grid.clone(), coef.clone(), micro.clone(), alpha, t_end, 1.0);
            hc.method = method;
            hc.dt = (fraction * hc.max_stable_dt()).min(p.dt.unwrap_or(f64::INFINITY));
            dt = hc.dt;
            let start = Instant::now();
            let run = run_hmm(&hc, &m0, &[])?;
            let elapsed = start.elapsed().as_secs_f64();
            let err = l2_error(run.trajectory.last().expect("final frame"), &reference)?;
            result.push(vec![
                preset.name().into(),
                dx.into(),
                n.into(),
                s.name().into(),
                micro.mu.into(),
                micro.mu_prime.into(),
                micro.eta.into(),
                hc.dt.into(),
                err.l2.into(),
                err.linf.into(),
                run.micro_solves.into(),
                elapsed.into(),
            ]);
        }
        if setups.is_empty() {
            let probe = HmmConfig::new(
                grid.clone(),
                coef.clone(),
                MicroSetup::preset(SetupPreset::S1)?,
                alpha,
                t_end,
                1.0,
            );
            dt = (fraction * probe.max_stable_dt()).min(p.dt.unwrap_or(f64::INFINITY));
        }
        let start = Instant::now();
        let base = run_averaged_baseline(
            &coef,
            epsilon,
            &m0,
            order,
            &TimeStepping::new(dt, alpha, t_end).with_method(method),
        )?;
        let elapsed = start.elapsed().as_secs_f64();
        let err = l2_error(base.last().expect("final frame"), &reference)?;
        result.push(vec![
            preset.name().into(),
            dx.into(),
            n.into(),
            "baseline".into(),
            crate::experiments::Cell::Empty,
            crate::experiments::Cell::Empty,
            crate::experiments::Cell::Empty,
            dt.into(),
            err.l2.into(),
            err.linf.into(),
            0usize.into(),
            elapsed.into(),
        ]);
    }
    Ok(result)
}
