//! Non-periodic coefficients: HMM and averaged baseline against a direct
//! simulation, with cross-section dumps.

use super::{
    initial_data, nodes_for, safe_dt, Column, ExperimentConfig, ExperimentError, ExperimentResult,
};
use crate::coefficients::{Coefficient, Preset};
use crate::grid_fd::{Grid, MagnetizationField};
use crate::integrators::Method;
use crate::macro_hmm::{run_hmm, HmmConfig};
use crate::micro::MicroSetup;
use crate::reference_solvers::{
    commensurate_dns_grid, l2_error, run_averaged_baseline, run_dns, sample_initial, TimeStepping,
};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Desk-scale parameters of one showcase problem.
#[derive(Clone, Debug)]
struct Case {
    epsilon: f64,
    dx: f64,
    final_time: f64,
    alpha: f64,
    /// `(μ/ε, μ′/ε, η/ε²)`
    micro: (f64, f64, f64),
}

fn defaults(preset: Preset) -> Result<Case, ExperimentError> {
    let case = |epsilon, dx, final_time, alpha, micro| Case {
        epsilon,
        dx,
        final_time,
        alpha,
        micro,
    };
    Ok(match preset {
        Preset::Loc1d => case(0.01, 1.0 / 24.0, 0.1, 0.01, (3.9, 8.0, 0.9)),
        // the micro box (9ε) must fit inside two macro cells at ε = 1/50
        Preset::Quasi2d => case(0.02, 0.1, 0.2, 0.01, (6.5, 9.0, 0.7)),
        Preset::Loc2d => case(0.02, 1.0 / 12.0, 0.05, 0.1, (5.0, 7.0, 1.1)),
        p => {
            return Err(ExperimentError::Config(format!(
                "{p} is not a showcase problem"
            )))
        }
    })
}

/// Nodes on the line `x_2 = 1/2` (all nodes in 1D).
fn cross_section(field: &MagnetizationField) -> Vec<usize> {
    let g = field.grid();
    if g.dim() == 1 {
        return (0..g.len()).collect();
    }
    let row = g.count(1) / 2;
    (0..g.len())
        .filter(|&i| g.multi_index(i)[1] == row)
        .collect()
}

fn dump(path: &Path, field: &MagnetizationField) -> Result<(), ExperimentError> {
    let io = |e: std::io::Error| ExperimentError::Io(format!("{}: {e}", path.display()));
    let g = field.grid();
    let d = g.dim();
    let mut out = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
    let coords = ["x1", "x2", "x3"];
    writeln!(out, "node,{},m1,m2,m3", coords[..d].join(",")).map_err(io)?;
    for i in cross_section(field) {
        let x = g.coords(i);
        let m = field.values()[i];
        let xs: Vec<String> = x[..d].iter().map(|v| format!("{v:.12e}")).collect();
        writeln!(
            out,
            "{i},{},{:.12e},{:.12e},{:.12e}",
            xs.join(","),
            m[0],
            m[1],
            m[2]
        )
        .map_err(io)?;
    }
    out.flush().map_err(io)
}

fn dump_path(base: &Path, case: &str, solver: &str) -> PathBuf {
    let stem = base
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("showcase");
    base.with_file_name(format!("{stem}_{case}_{solver}.csv"))
}

pub(super) fn run(config: &ExperimentConfig) -> Result<ExperimentResult, ExperimentError> {
    let p = &config.params;
    let default_cases: &[Preset] = if config.long {
        &[Preset::Loc1d, Preset::Quasi2d, Preset::Loc2d]
    } else {
        &[Preset::Loc1d]
    };
    let cases = config.parsed(&config.sweep.cases, default_cases);
    let micro_alpha = p.micro_alpha.unwrap_or(1.2);
    let k = p.points_per_eps.unwrap_or(15);
    let order = p.order.unwrap_or(4);
    let fraction = p.dt_fraction.unwrap_or(0.75);

    let mut result = ExperimentResult::new(
        "showcase",
        vec![
            Column::new("case", "name"),
            Column::new("epsilon", "1"),
            Column::new("dx", "1"),
            Column::new("final_time", "1"),
            Column::new("alpha", "1"),
            Column::new("solver", "name"),
            Column::new("dns_nodes", "1"),
            Column::new("l2_vs_dns", "1"),
            Column::new("linf_vs_dns", "1"),
            Column::timing("run_time", "s"),
            Column::timing("dns_time", "s"),
        ],
    );
    result.notes.push(format!(
        "micro_alpha={micro_alpha}; K={k}; baseline order={order}"
    ));

    for preset in cases {
        let mut c = defaults(preset)?;
        if preset.dim() == 2 && !config.long && config.sweep.cases.is_some() {
            return Err(ExperimentError::Config(format!(
                "{preset} needs --long (2D direct simulation)"
            )));
        }
        c.epsilon = p.epsilon.unwrap_or(c.epsilon);
        c.dx = p.dx.unwrap_or(c.dx);
        c.final_time = p.final_time.unwrap_or(c.final_time);
        c.alpha = p.alpha.unwrap_or(c.alpha);
        c.micro = (
            p.mu.unwrap_or(c.micro.0),
            p.mu_prime.unwrap_or(c.micro.1),
            p.eta.unwrap_or(c.micro.2),
        );
        let n = nodes_for(c.dx)?;
        let coef = Coefficient::preset(preset, c.epsilon)?;
        let data = initial_data(preset);
        let dim = preset.dim();

        let grid = Grid::periodic_unit(dim, n)?;
        let m0 = sample_initial(&grid, |x| data.value(x))?;
        let micro = MicroSetup::new(c.micro.0, c.micro.1, c.micro.2)?
            .with_alpha(micro_alpha)?
            .with_points_per_eps(k)?;
        let mut hc = HmmConfig::new(grid, coef.clone(), micro, c.alpha, c.final_time, 1.0);
        hc.dt = (0.9 * hc.max_stable_dt()).min(p.dt.unwrap_or(f64::INFINITY));
        hc.validate()?;

        let dns_grid = commensurate_dns_grid(&coef, k, n)?;
        let dns_dx = dns_grid.spacing(0);
        let dns_dt = 2.0 * fraction * safe_dt(Method::Mpea, c.alpha, coef.a_max(), dim, dns_dx, 2)?;
        let start = Instant::now();
        let dns = run_dns(
            &coef,
            &sample_initial(&dns_grid, |x| data.value(x))?,
            &TimeStepping::new(dns_dt, c.alpha, c.final_time),
        )?
        .frames
        .pop()
        .expect("final frame");
        let dns_time = start.elapsed().as_secs_f64();

        let start = Instant::now();
        let hmm = run_hmm(&hc, &m0, &[])?;
        let hmm_time = start.elapsed().as_secs_f64();
        let hmm = hmm.trajectory.last().expect("final frame").clone();

        let start = Instant::now();
        let base = run_averaged_baseline(
            &coef,
            c.epsilon,
            &m0,
            order,
            &TimeStepping::new(hc.dt, c.alpha, c.final_time),
        )?
        .frames
        .pop()
        .expect("final frame");
        let base_time = start.elapsed().as_secs_f64();

        for (solver, field, time) in [("hmm", &hmm, hmm_time), ("baseline", &base, base_time)] {
            let err = l2_error(field, &dns)?;
            result.push(vec![
                preset.name().into(),
                c.epsilon.into(),
                c.dx.into(),
                c.final_time.into(),
                c.alpha.into(),
                solver.into(),
                dns_grid.len().into(),
                err.l2.into(),
                err.linf.into(),
                time.into(),
                dns_time.into(),
            ]);
        }
        if let Some(out) = &config.output {
            for (solver, field) in [("dns", &dns), ("hmm", &hmm), ("baseline", &base)] {
                dump(&dump_path(out, preset.name(), solver), field)?;
            }
        }
    }
    Ok(result)
}
