use std::path::PathBuf;

use serde::Serialize;

use crate::algorithms::Algorithm;
use crate::benchmarks::{toy_max_problem, uncertain_lp_problem, TOY_MAX, UNCERTAIN_LP};
use crate::bounds::{ProbabilisticLevels, ScheduleParams, DEFAULT_ALPHA};
use crate::error::{Error, Result};
use crate::problem::UncertainProblem;
use crate::solver::DiscardMode;

/// A benchmark problem by name plus its construction parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProblemSpec {
    pub name: String,
    /// Only meaningful for `uncertain-lp`; `toy-max` is one-dimensional.
    pub n_theta: Option<usize>,
    pub spread: f64,
    pub seed: u64,
}

impl Default for ProblemSpec {
    fn default() -> Self {
        Self {
            name: TOY_MAX.to_string(),
            n_theta: None,
            spread: 0.3,
            seed: 7,
        }
    }
}

pub fn resolve_problem(spec: &ProblemSpec) -> Result<UncertainProblem> {
    match spec.name.as_str() {
        TOY_MAX => match spec.n_theta {
            None | Some(1) => Ok(toy_max_problem()),
            Some(n) => Err(Error::Config(format!("{TOY_MAX} has n_theta = 1, got {n}"))),
        },
        UNCERTAIN_LP => uncertain_lp_problem(spec.n_theta.unwrap_or(2), spec.spread, spec.seed),
        other => Err(Error::Config(format!(
            "unknown problem `{other}` (expected {TOY_MAX} or {UNCERTAIN_LP})"
        ))),
    }
}

/// Everything needed to reproduce a batch of runs.
///
/// Read from a flat `key = value` file (`#` starts a comment); individual
/// keys can then be overridden with [`ExperimentConfig::set`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub algorithm: Algorithm,
    pub epsilon: f64,
    pub delta: f64,
    pub kt: u32,
    pub alpha: f64,
    pub r: u64,
    pub mode: DiscardMode,
    pub repetitions: u32,
    pub master_seed: u64,
    pub out: Option<PathBuf>,
    /// Write measured wall times into the CSV. Off by default so that
    /// reports are byte-reproducible.
    pub record_timing: bool,
    pub parallel: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            problem: ProblemSpec::default(),
            algorithm: Algorithm::Full,
            epsilon: 0.1,
            delta: 0.1,
            kt: 5,
            alpha: DEFAULT_ALPHA,
            r: 0,
            mode: DiscardMode::Greedy,
            repetitions: 100,
            master_seed: 0,
            out: None,
            record_timing: false,
            parallel: true,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value `{value}` for `{key}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::Config(format!(
            "invalid boolean `{value}` for `{key}`"
        ))),
    }
}

impl ExperimentConfig {
    /// Sets one key. Keys match the CLI flag names; `_` and `-` are interchangeable.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        match key.as_str() {
            "problem" => self.problem.name = value.to_string(),
            "ntheta" | "n-theta" => self.problem.n_theta = Some(parse(&key, value)?),
            "spread" => self.problem.spread = parse(&key, value)?,
            "problem-seed" => self.problem.seed = parse(&key, value)?,
            "algorithm" => self.algorithm = value.parse()?,
            "epsilon" => self.epsilon = parse(&key, value)?,
            "delta" => self.delta = parse(&key, value)?,
            "kt" => self.kt = parse(&key, value)?,
            "alpha" => self.alpha = parse(&key, value)?,
            "r" => self.r = parse(&key, value)?,
            "mode" => self.mode = value.parse()?,
            "reps" | "repetitions" => self.repetitions = parse(&key, value)?,
            "seed" => self.master_seed = parse(&key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "timing" => self.record_timing = parse_bool(&key, value)?,
            "parallel" => self.parallel = parse_bool(&key, value)?,
            other => return Err(Error::Config(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    /// Parses a `key = value` manifest on top of the defaults.
    pub fn from_kv_str(text: &str) -> Result<Self> {
        let mut config = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            config.set(key, value)?;
        }
        Ok(config)
    }

    pub fn levels(&self) -> Result<ProbabilisticLevels> {
        ProbabilisticLevels::new(self.epsilon, self.delta)
    }

    /// Schedule parameters for the configured problem.
    pub fn schedule_params(&self, n_theta: usize) -> Result<ScheduleParams> {
        let r = match self.algorithm {
            Algorithm::Full | Algorithm::OneShot => 0,
            Algorithm::Partial | Algorithm::OneShotDiscarded => self.r,
        };
        ScheduleParams::new(self.kt, self.alpha, r, n_theta as u64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        if matches!(self.algorithm, Algorithm::Full | Algorithm::OneShot) && self.r != 0 {
            return Err(Error::Config(format!(
                "algorithm {} does not discard constraints; r must be 0",
                self.algorithm.as_str()
            )));
        }
        self.levels()?;
        let problem = resolve_problem(&self.problem)?;
        self.schedule_params(problem.n_theta())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_manifest_with_comments() {
        let text = "\
# toy benchmark
problem = uncertain-lp
ntheta = 3
algorithm = partial   # sequential, discarding
epsilon=0.2
delta = 0.01
kt = 20
r = 2
mode = prefix
reps = 12
seed = 99
timing = no
";
        let c = ExperimentConfig::from_kv_str(text).unwrap();
        assert_eq!(c.problem.name, "uncertain-lp");
        assert_eq!(c.problem.n_theta, Some(3));
        assert_eq!(c.algorithm, Algorithm::Partial);
        assert_eq!((c.epsilon, c.delta, c.kt, c.r), (0.2, 0.01, 20, 2));
        assert_eq!(c.mode, DiscardMode::Prefix);
        assert_eq!((c.repetitions, c.master_seed), (12, 99));
        assert!(!c.record_timing);
        c.validate().unwrap();
    }

    #[test]
    fn overrides_win() {
        let mut c = ExperimentConfig::from_kv_str("reps = 3\nseed = 1").unwrap();
        c.set("seed", "2").unwrap();
        assert_eq!(c.master_seed, 2);
    }

    #[test]
    fn rejects_unknowns() {
        assert!(ExperimentConfig::from_kv_str("colour = red").is_err());
        assert!(ExperimentConfig::from_kv_str("reps").is_err());
        assert!(ExperimentConfig::from_kv_str("algorithm = magic").is_err());
        let c = ExperimentConfig::from_kv_str("problem = nope").unwrap();
        assert!(c.validate().is_err());
        let c = ExperimentConfig::from_kv_str("reps = 0").unwrap();
        assert!(c.validate().is_err());
        let c = ExperimentConfig::from_kv_str("algorithm = full\nr = 2").unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn toy_is_one_dimensional() {
        let spec = ProblemSpec {
            n_theta: Some(2),
            ..ProblemSpec::default()
        };
        assert!(resolve_problem(&spec).is_err());
    }
}
