//! Command-line front end: one subcommand per experiment, CSV on stdout or
//! to `--out`.

use clap::{Args, Parser, Subcommand};
use llhmm::experiments::{
    parse_config_as, run_experiment, ExperimentConfig, ExperimentError, ExperimentKind,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "llhmm",
    version,
    about = "Multiscale Landau-Lifshitz experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Error against step size for each time integrator.
    Integrators(Common),
    /// Largest stable step against spacing and damping.
    Stability(Common),
    /// Averaging error against the micro box, horizon and damping.
    MicroSweep(Common),
    /// HMM error against a homogenized reference over macro spacing.
    HmmConvergence(Common),
    /// Non-periodic problems against a direct simulation.
    Showcase(Common),
    /// Wall time per micro problem across epsilon.
    Cost(Common),
    /// Homogenized matrix from the cell problem.
    Homogenize(Common),
}

#[derive(Args)]
struct Common {
    /// TOML experiment description; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV destination (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    /// Enable the expensive cases.
    #[arg(long)]
    long: bool,
}

impl Command {
    fn split(self) -> (ExperimentKind, Common) {
        match self {
            Command::Integrators(c) => (ExperimentKind::Integrators, c),
            Command::Stability(c) => (ExperimentKind::Stability, c),
            Command::MicroSweep(c) => (ExperimentKind::MicroSweep, c),
            Command::HmmConvergence(c) => (ExperimentKind::HmmConvergence, c),
            Command::Showcase(c) => (ExperimentKind::Showcase, c),
            Command::Cost(c) => (ExperimentKind::Cost, c),
            Command::Homogenize(c) => (ExperimentKind::Homogenize, c),
        }
    }
}

fn run(kind: ExperimentKind, args: Common) -> Result<(), ExperimentError> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ExperimentError::Config(format!("{}: {e}", path.display())))?;
            parse_config_as(kind, &text)?
        }
        None => ExperimentConfig::new(kind),
    };
    if args.out.is_some() {
        config.output = args.out;
    }
    if args.workers.is_some() {
        config.workers = args.workers;
    }
    config.long |= args.long;
    let result = run_experiment(&config)?;
    match &config.output {
        Some(path) => result.write_csv(path),
        None => {
            print!("{}", result.to_csv());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let (kind, args) = Cli::parse().command.split();
    match run(kind, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("llhmm {kind}: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
