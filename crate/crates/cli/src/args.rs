use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use seqscen::{Error, ExperimentConfig};

#[derive(Debug, Parser)]
#[command(
    name = "seqscen",
    version,
    about = "Sequential randomized algorithms for uncertain convex optimization"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print sample sizes, validation schedules and the termination bound.
    Bounds(Common),
    /// Execute one run and print its result.
    Run {
        #[command(flatten)]
        common: Common,
        /// Repetition index whose random streams are used.
        #[arg(long, default_value_t = 0)]
        rep: u32,
    },
    /// Repeat the configured algorithm and write a CSV report.
    Benchmark(Common),
    /// Check a design on fresh samples.
    Certify {
        #[command(flatten)]
        common: Common,
        /// Comma-separated design to check. When omitted, the configured
        /// algorithm is run once and its solution is certified.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        theta: Option<Vec<f64>>,
        /// Gap between the empirical violation and epsilon. Defaults to epsilon / 4.
        #[arg(long)]
        margin: Option<f64>,
    },
}

/// Flags shared by every subcommand. Each overrides the matching key of
/// the `--config` file.
#[derive(Debug, Args)]
pub struct Common {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Number of decision variables (`uncertain-lp` only; `toy-max` has 1).
    #[arg(long)]
    pub ntheta: Option<usize>,
    #[arg(long)]
    pub kt: Option<u32>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Number of discarded constraints.
    #[arg(long)]
    pub r: Option<u64>,
    #[arg(long, value_parser = ["greedy", "prefix"])]
    pub mode: Option<String>,
    #[arg(long, value_parser = ["full", "partial", "oneshot", "oneshot-discarded"])]
    pub algorithm: Option<String>,
    /// Benchmark problem: `toy-max` or `uncertain-lp`.
    #[arg(long)]
    pub problem: Option<String>,
    /// Coupling strength of the uncertain right-hand side of `uncertain-lp`.
    #[arg(long)]
    pub spread: Option<f64>,
    /// Seed of the `uncertain-lp` instance (not of the samples).
    #[arg(long)]
    pub problem_seed: Option<u64>,
    #[arg(long)]
    pub reps: Option<u32>,
    /// Master seed of all sample streams.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Record wall times in the report (makes output non-reproducible).
    #[arg(long)]
    pub timing: bool,
    /// Run repetitions on one thread.
    #[arg(long)]
    pub serial: bool,
    /// Machine-readable JSON on stdout.
    #[arg(long)]
    pub json: bool,
}

impl Common {
    /// Defaults, then the config file, then explicit flags.
    pub fn resolve(&self) -> Result<ExperimentConfig, Error> {
        let mut config = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
                ExperimentConfig::from_kv_str(&text)?
            }
            None => ExperimentConfig::default(),
        };
        let overrides: [(&str, Option<String>); 14] = [
            ("epsilon", self.epsilon.map(|v| v.to_string())),
            ("delta", self.delta.map(|v| v.to_string())),
            ("ntheta", self.ntheta.map(|v| v.to_string())),
            ("kt", self.kt.map(|v| v.to_string())),
            ("alpha", self.alpha.map(|v| v.to_string())),
            ("r", self.r.map(|v| v.to_string())),
            ("mode", self.mode.clone()),
            ("algorithm", self.algorithm.clone()),
            ("problem", self.problem.clone()),
            ("spread", self.spread.map(|v| v.to_string())),
            ("problem-seed", self.problem_seed.map(|v| v.to_string())),
            ("reps", self.reps.map(|v| v.to_string())),
            ("seed", self.seed.map(|v| v.to_string())),
            ("out", self.out.as_ref().map(|p| p.display().to_string())),
        ];
        for (key, value) in overrides {
            if let Some(value) = value {
                config.set(key, &value)?;
            }
        }
        if self.timing {
            config.record_timing = true;
        }
        if self.serial {
            config.parallel = false;
        }
        Ok(config)
    }
}
