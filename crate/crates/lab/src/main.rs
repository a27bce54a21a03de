use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use coupled_obs_lab::config::{DomainShape, ExperimentConfig};
use coupled_obs_lab::{experiment_id, run, Command};

#[derive(Parser)]
#[command(name = "coupled-obs", version, about = "Observability and control lab for a coupled parabolic system")]
struct Cli {
    /// TOML experiment config; defaults apply to missing fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output root; reports go to `<out>/<experiment-id>/`.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Spectral truncation (overrides `domain.n_modes`).
    #[arg(long, global = true)]
    modes: Option<usize>,
    /// Cells per axis (overrides `domain.cells` and `domain.cells_y`).
    #[arg(long, global = true)]
    grid: Option<usize>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Free evolution of the configured state and its observed trace.
    Simulate,
    /// Randomized Remez and sine-integral sweeps.
    Remez {
        /// Cases per sweep.
        #[arg(long)]
        cases: Option<usize>,
    },
    /// Interpolation inequalities, slice geometry and the ε/product equivalence.
    Interp,
    /// Vanishing-observation states.
    Counterexample {
        /// Number of vanishing times of the multi-time state.
        #[arg(long)]
        multi: Option<usize>,
    },
    /// Observability constant and its dependence on |D|.
    #[command(name = "estimate-L")]
    EstimateL,
    /// Duality-based null control with an L∞ certificate.
    NullControl,
    /// Minimal-time control by bisection, with bang-bang check.
    TimeOptimal,
    /// Telescoping chain over density-point rings.
    Telescope {
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Every experiment in one report.
    SweepAll,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg = match &cli.config {
        Some(p) => match ExperimentConfig::load(p) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("config error: {e}");
                return ExitCode::from(2);
            }
        },
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(m) = cli.modes {
        cfg.domain.n_modes = m;
    }
    if let Some(g) = cli.grid {
        cfg.domain.cells = g;
        if cfg.domain.kind == DomainShape::Rectangle {
            cfg.domain.cells_y = g;
        }
    }
    let cmd = match cli.command {
        Cmd::Simulate => Command::Simulate,
        Cmd::Remez { cases } => {
            if let Some(n) = cases {
                cfg.sweep.remez_cases = n;
                cfg.sweep.sine_cases = n;
            }
            Command::Remez
        }
        Cmd::Interp => Command::Interp,
        Cmd::Counterexample { multi } => {
            if let Some(m) = multi {
                cfg.counterexample.multi = m;
            }
            Command::Counterexample
        }
        Cmd::EstimateL => Command::EstimateL,
        Cmd::NullControl => Command::NullControl,
        Cmd::TimeOptimal => Command::TimeOptimal,
        Cmd::Telescope { depth } => {
            if let Some(d) = depth {
                cfg.interp.depth = d;
            }
            Command::Telescope
        }
        Cmd::SweepAll => Command::SweepAll,
    };
    if let Err(e) = cfg.validate() {
        eprintln!("config error: {e}");
        return ExitCode::from(2);
    }
    let dir = cli.out.join(experiment_id(cmd, &cfg));
    let report = run(cmd, &cfg);
    if let Err(e) = report.write(&dir) {
        eprintln!("cannot write {}: {e}", dir.display());
        return ExitCode::from(3);
    }
    println!("{}", dir.join("report.txt").display());
    println!("status: {}", report.status.as_str());
    ExitCode::from(report.status.exit_code() as u8)
}
