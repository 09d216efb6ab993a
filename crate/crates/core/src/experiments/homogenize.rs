//! Homogenized matrices from the cell problem.

use super::{preset, Column, ExperimentConfig, ExperimentError, ExperimentResult};
use crate::coefficients::{solve_cell_problem, Coefficient, Preset};

pub(super) fn run(config: &ExperimentConfig) -> Result<ExperimentResult, ExperimentError> {
    let presets: Vec<Preset> = match &config.sweep.presets {
        Some(list) => list.iter().map(|s| preset(s)).collect::<Result<_, _>>()?,
        None => vec![config.preset_or(Preset::Ex2)],
    };
    let resolution = config.params.resolution.unwrap_or(128);
    let mut result = ExperimentResult::new(
        "homogenize",
        vec![
            Column::new("preset", "name"),
            Column::new("row", "1"),
            Column::new("col", "1"),
            Column::new("value", "1"),
            Column::new("cell_iterations", "1"),
        ],
    );
    result.notes.push(format!("resolution={resolution}"));
    for p in presets {
        if !p.is_periodic() {
            return Err(ExperimentError::Config(format!(
                "{p} is not periodic; it has no cell problem"
            )));
        }
        let coef = Coefficient::preset(p, 0.5)?;
        let cell = solve_cell_problem(coef.unit_cell(), p.dim(), resolution)?;
        let ah = cell.effective_matrix();
        for r in 0..p.dim() {
            for s in 0..p.dim() {
                result.push(vec![
                    p.name().into(),
                    (r + 1).into(),
                    (s + 1).into(),
                    ah.entry(r, s).into(),
                    cell.iterations()[r].into(),
                ]);
            }
        }
    }
    Ok(result)
}
