//! Experiment orchestration for the `coupled-obs` command-line lab.

pub mod config;
pub mod experiments;
pub mod report;

use sha2::{Digest, Sha256};

use config::ExperimentConfig;
use experiments::{timed, Context};
use report::{Report, Section};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Remez,
    Interp,
    Counterexample,
    EstimateL,
    NullControl,
    TimeOptimal,
    Telescope,
    SweepAll,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::Simulate,
        Command::Remez,
        Command::Interp,
        Command::Counterexample,
        Command::EstimateL,
        Command::NullControl,
        Command::TimeOptimal,
        Command::Telescope,
        Command::SweepAll,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Remez => "remez",
            Command::Interp => "interp",
            Command::Counterexample => "counterexample",
            Command::EstimateL => "estimate-L",
            Command::NullControl => "null-control",
            Command::TimeOptimal => "time-optimal",
            Command::Telescope => "telescope",
            Command::SweepAll => "sweep-all",
        }
    }

    fn steps(self) -> Vec<Command> {
        match self {
            Command::SweepAll => Command::ALL[..8].to_vec(),
            c => vec![c],
        }
    }
}

/// First 16 hex digits of SHA-256 over the command, the canonical config and the seed.
pub fn experiment_id(cmd: Command, cfg: &ExperimentConfig) -> String {
    let mut h = Sha256::new();
    h.update(cmd.name().as_bytes());
    h.update(b"\n");
    h.update(cfg.to_toml().as_bytes());
    h.update(format!("\nseed={}\n", cfg.seed).as_bytes());
    hex::encode(&h.finalize()[..8])
}

fn flatten(prefix: &str, value: &toml::Value, out: &mut Section) {
    match value {
        toml::Value::Table(t) => {
            for (k, v) in t {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        toml::Value::Float(f) => {
            out.num(prefix, *f);
        }
        toml::Value::String(s) => {
            out.text(prefix, s);
        }
        v => {
            out.text(prefix, v);
        }
    }
}

/// Config echo, one `section.field: value` line per setting.
pub fn config_section(cfg: &ExperimentConfig) -> Section {
    let mut s = Section::new("config");
    let value = toml::Value::try_from(cfg).expect("config serializes");
    flatten("", &value, &mut s);
    s
}

/// Runs a subcommand; the report carries every result, error and CSV series.
pub fn run(cmd: Command, cfg: &ExperimentConfig) -> Report {
    let mut report = Report::new(&experiment_id(cmd, cfg), cmd.name(), cfg.seed, config_section(cfg));
    let ctx = match Context::new(cfg) {
        Ok(c) => c,
        Err(e) => {
            report.record_error("setup", &e);
            return report;
        }
    };
    for step in cmd.steps() {
        let runner = match step {
            Command::Simulate => experiments::simulate,
            Command::Remez => experiments::remez,
            Command::Interp => experiments::interp,
            Command::Counterexample => experiments::counterexample,
            Command::EstimateL => experiments::estimate_l_curve,
            Command::NullControl => experiments::null_control,
            Command::TimeOptimal => experiments::time_optimal,
            Command::Telescope => experiments::telescope,
            Command::SweepAll => unreachable!("sweep-all expands to its steps"),
        };
        timed(&mut report, step.name(), |r| runner(&ctx, r));
    }
    report
}
