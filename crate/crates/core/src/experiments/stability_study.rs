//! Largest stable step against grid spacing and against damping.

use super::{
    initial_data, nodes_for, reference_matrix, Cell, Column, ExperimentConfig, ExperimentError,
    ExperimentResult,
};
use crate::coefficients::Preset;
use crate::grid_fd::{Grid, Mat3};
use crate::integrators::{
    estimate_stability_limit, HomogenizedExchange, IntegratorError, Method, StabilityProbe,
};
use crate::micro::InitialData;
use crate::reference_solvers::sample_initial;
use rayon::prelude::*;

fn builder(
    ah: Mat3,
    dim: usize,
    order: usize,
    data: InitialData,
) -> impl Fn(f64) -> Result<(HomogenizedExchange, crate::grid_fd::MagnetizationField), IntegratorError>
{
    move |dx| {
        let n = (1.0 / dx).round() as usize;
        let grid = Grid::periodic_unit(dim, n)?;
        let m0 =
            sample_initial(&grid, |x| data.value(x)).map_err(|e| IntegratorError::Provider {
                node: None,
                message: e.to_string(),
            })?;
        Ok((HomogenizedExchange::new(grid, ah, order)?, m0))
    }
}

pub(super) fn run(config: &ExperimentConfig) -> Result<ExperimentResult, ExperimentError> {
    let p = &config.params;
    let preset = config.preset_or(Preset::Ex1);
    let ah = reference_matrix(preset, p.resolution)?;
    let order = p.order.unwrap_or(2);
    let methods = config.parsed(&config.sweep.methods, &Method::EXPLICIT);
    if methods.contains(&Method::ImplicitMidpoint) {
        return Err(ExperimentError::Config(
            "the implicit midpoint method has no step limit to estimate".into(),
        ));
    }
    let dxs = config.list(&config.sweep.dx, &[1.0 / 25.0, 1.0 / 50.0, 1.0 / 100.0]);
    for &dx in &dxs {
        nodes_for(dx)?;
    }
    let alphas = config.list(&config.sweep.alpha, &[0.001, 0.01, 0.1, 0.5, 1.0]);
    let alpha0 = p.alpha.unwrap_or(0.01);
    let dx0 = p.dx.unwrap_or(1.0 / 50.0);
    nodes_for(dx0)?;
    let probe = StabilityProbe {
        seed: p.seed.unwrap_or(StabilityProbe::default().seed),
        ..StabilityProbe::default()
    };
    let build = builder(ah, preset.dim(), order, initial_data(preset));

    let by_dx: Vec<_> = methods
        .par_iter()
        .map(|&m| estimate_stability_limit(m, &dxs, alpha0, &probe, &build))
        .collect::<Result<_, _>>()?;
    let points: Vec<(Method, f64)> = methods
        .iter()
        .flat_map(|&m| alphas.iter().map(move |&a| (m, a)))
        .collect();
    let by_alpha: Vec<_> = points
        .par_iter()
        .map(|&(m, a)| estimate_stability_limit(m, &[dx0], a, &probe, &build))
        .collect::<Result<_, _>>()?;

    let mut result = ExperimentResult::new(
        "stability",
        vec![
            Column::new("table", "name"),
            Column::new("method", "name"),
            Column::new("dx", "1"),
            Column::new("alpha", "1"),
            Column::new("dt_max", "1"),
            Column::new("c_stab", "1"),
            Column::new("dx_slope", "1"),
            Column::new("stages", "1"),
            Column::new("cost", "stages/c_stab"),
            Column::new("at_bracket_top", "bool"),
        ],
    );
    result.seed = Some(probe.seed);
    result.notes.push(format!(
        "preset={preset}; order={order}; probe_steps={}",
        probe.steps
    ));
    let mut push = |table: &str,
                    m: Method,
                    alpha: f64,
                    slope: Option<f64>,
                    row: &crate::integrators::StabilityRow| {
        result.push(vec![
            table.into(),
            m.name().into(),
            row.dx.into(),
            alpha.into(),
            row.dt_max.into(),
            row.c_stab.into(),
            slope.into(),
            m.stages().into(),
            (m.stages() as f64 / row.c_stab).into(),
            Cell::Int(row.at_bracket_top as i64),
        ]);
    };
    for t in &by_dx {
        for row in &t.rows {
            push("dx", t.method, alpha0, Some(t.slope), row);
        }
    }
    for (&(m, a), t) in points.iter().zip(&by_alpha) {
        push("alpha", m, a, None, &t.rows[0]);
    }
    Ok(result)
}
