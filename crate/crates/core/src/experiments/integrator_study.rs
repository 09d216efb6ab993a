//! Error against a fine-step reference for each integrator and step size on
//! homogenized problems.

use super::{
    initial_data, matrix_bound, nodes_for, reference_matrix, safe_dt, Cell, Column,
    ExperimentConfig, ExperimentError, ExperimentResult,
};
use crate::coefficients::Preset;
use crate::grid_fd::{Grid, MagnetizationField, Mat3};
use crate::integrators::{integrate, HomogenizedExchange, IntegratorError, Method};
use crate::reference_solvers::{l2_error, sample_initial};
use rayon::prelude::*;

/// Errors above this count as an unstable run.
const UNSTABLE_ERROR: f64 = 0.1;

struct Problem {
    preset: Preset,
    provider: HomogenizedExchange,
    initial: MagnetizationField,
    reference: MagnetizationField,
}

pub(super) fn run(config: &ExperimentConfig) -> Result<ExperimentResult, ExperimentError> {
    let p = &config.params;
    let dx = p.dx.unwrap_or(1.0 / 50.0);
    let n = nodes_for(dx)?;
    let alpha = p.alpha.unwrap_or(0.01);
    let t_end = p.final_time.unwrap_or(0.02);
    let order = p.order.unwrap_or(2);
    let presets = config.parsed(&config.sweep.presets, &[Preset::Ex1, Preset::Ex2]);
    let methods = config.parsed(&config.sweep.methods, &Method::ALL);
    let default_dt: Vec<f64> = (-5..=2).rev().map(|k| dx * dx * 2f64.powi(k)).collect();
    let mut dts = config.list(&config.sweep.dt, &default_dt);
    dts.sort_by(|a, b| b.total_cmp(a));
    let dt_ref = p.dt.unwrap_or(dts[dts.len() - 1] / 4.0);

    let problems: Vec<Problem> = presets
        .iter()
        .map(|&preset| -> Result<Problem, ExperimentError> {
            let ah: Mat3 = reference_matrix(preset, p.resolution.or(Some(64)))?;
            let grid = Grid::periodic_unit(preset.dim(), n)?;
            let data = initial_data(preset);
            let initial = sample_initial(&grid, |x| data.value(x))?;
            let provider = HomogenizedExchange::new(grid, ah, order)?;
            let limit = safe_dt(
                Method::Rk4P,
                alpha,
                matrix_bound(&ah, preset.dim()),
                preset.dim(),
                dx,
                order,
            )?;
            if dt_ref > limit {
                return Err(ExperimentError::Config(format!(
                    "reference step {dt_ref:e} exceeds the RK4P stability estimate {limit:e}"
                )));
            }
            let reference = integrate(
                Method::Rk4P,
                &provider,
                initial.clone(),
                dt_ref,
                alpha,
                t_end,
                &[],
            )?
            .frames
            .pop()
            .expect("final frame");
            Ok(Problem {
                preset,
                provider,
                initial,
                reference,
            })
        })
        .collect::<Result<_, _>>()?;

    let mut points: Vec<(usize, Method, f64)> = Vec::new();
    for i in 0..problems.len() {
        for &m in &methods {
            points.extend(dts.iter().map(|&dt| (i, m, dt)));
        }
    }
    let errors: Vec<Result<Option<f64>, ExperimentError>> = points
        .par_iter()
        .map(|&(i, method, dt)| {
            let pr = &problems[i];
            match integrate(
                method,
                &pr.provider,
                pr.initial.clone(),
                dt,
                alpha,
                t_end,
                &[],
            ) {
                Ok(traj) => Ok(Some(
                    l2_error(traj.last().expect("final frame"), &pr.reference)?.l2,
                )),
                Err(
                    IntegratorError::InstabilityDetected { .. }
                    | IntegratorError::ZeroNormBeforeProjection { .. }
                    | IntegratorError::NotUnitNorm { .. }
                    | IntegratorError::FixedPointDivergence { .. },
                ) => Ok(None),
                Err(e) => Err(e.into()),
            }
        })
        .collect();

    let mut result = ExperimentResult::new(
        "integrators",
        vec![
            Column::new("preset", "name"),
            Column::new("method", "name"),
            Column::new("dx", "1"),
            Column::new("dt", "1"),
            Column::new("dt_over_dx2", "1"),
            Column::new("l2_error", "1"),
            Column::new("observed_order", "1"),
            Column::new("stable", "bool"),
        ],
    );
    result.notes.push(format!(
        "alpha={alpha}; T={t_end}; order={order}; reference=RK4P dt={dt_ref:e}"
    ));
    let mut prev: Option<(usize, Method, f64, f64)> = None;
    for (&(i, method, dt), err) in points.iter().zip(errors) {
        let err = err?;
        let stable = err.is_some_and(|e| e < UNSTABLE_ERROR);
        let order_est = match (prev, err) {
            (Some((pi, pm, pdt, pe)), Some(e)) if pi == i && pm == method && stable && e > 0.0 => {
                Some((pe / e).ln() / (pdt / dt).ln())
            }
            _ => None,
        };
        prev = match err {
            Some(e) if stable => Some((i, method, dt, e)),
            _ => None,
        };
        result.push(vec![
            problems[i].preset.name().into(),
            method.name().into(),
            dx.into(),
            dt.into(),
            (dt / (dx * dx)).into(),
            err.into(),
            order_est.into(),
            Cell::Int(stable as i64),
        ]);
    }
    Ok(result)
}
