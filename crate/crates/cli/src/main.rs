use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use renorm_cli::config::{Experiment, ExperimentConfig, RawConfig};
use renorm_cli::error::CliError;
use renorm_cli::run::run;

/// Numerical experiments on renormalized products of matrices.
#[derive(Debug, Parser)]
#[command(name = "renorm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Matrix exponential of `matrix`, checked against its Taylor series.
    Exp(Common),
    /// Renormalized product at `n` for each `t`, against exp(tA).
    Product(Common),
    /// Convergence scan over `n_grid` for each `t`.
    Scan(Common),
    /// Ordered symmetric sums: limit, enumeration oracle and norm budget.
    Symsum(Common),
    /// Scalar renormalized products against exp(mean u).
    LemmaScalar(Common),
    /// Weighted averages with monomial weights against L / (k + 1).
    LemmaWeighted(Common),
    /// Two-horocycle walk in the Poincare disc: CSV and SVG.
    Hyperwalk(Common),
    /// The disc picture alone.
    Figure(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Configuration file of `key = value` lines.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Seed for stochastic models.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Evaluate the experiment's pass/fail check.
    #[arg(long)]
    check: bool,
    /// Record wall-clock runtimes in the artifacts (breaks byte-for-byte reproducibility).
    #[arg(long)]
    timing: bool,
    /// Override a config key; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl Command {
    fn split(self) -> (Experiment, Common) {
        match self {
            Command::Exp(c) => (Experiment::Exp, c),
            Command::Product(c) => (Experiment::Product, c),
            Command::Scan(c) => (Experiment::Scan, c),
            Command::Symsum(c) => (Experiment::Symsum, c),
            Command::LemmaScalar(c) => (Experiment::LemmaScalar, c),
            Command::LemmaWeighted(c) => (Experiment::LemmaWeighted, c),
            Command::Hyperwalk(c) => (Experiment::Hyperwalk, c),
            Command::Figure(c) => (Experiment::Figure, c),
        }
    }
}

fn load(experiment: Experiment, common: &Common) -> Result<ExperimentConfig, CliError> {
    let mut raw = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            RawConfig::parse(&text)?
        }
        None => RawConfig::default(),
    };
    // command-line flags win over the file
    for assignment in &common.overrides {
        raw.set(assignment)?;
    }
    if let Some(seed) = common.seed {
        raw.set(&format!("seed={seed}"))?;
    }
    if let Some(out) = &common.out {
        raw.set(&format!("out={}", out.display()))?;
    }
    if common.check {
        raw.set("check=true")?;
    }
    if common.timing {
        raw.set("timing=true")?;
    }
    ExperimentConfig::from_raw(experiment, &raw)
}

fn main() -> ExitCode {
    let (experiment, common) = Cli::parse().command.split();
    let outcome = load(experiment, &common).and_then(|cfg| run(&cfg));
    match outcome {
        Ok(outcome) => {
            for line in &outcome.lines {
                println!("{line}");
            }
            match outcome.check {
                Some(report) if !report.passed => ExitCode::from(1),
                _ => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
