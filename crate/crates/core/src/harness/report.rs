use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{resolve_problem, ExperimentConfig};
use crate::algorithms::{
    run_full, run_oneshot, run_oneshot_discarded, run_partial, Algorithm, RunResult, RunStatus,
};
use crate::error::Result;
use crate::problem::UncertainProblem;
use crate::rng::RunSeed;

/// Raw-row columns, in file order.
pub const CSV_COLUMNS: [&str; 15] = [
    "epsilon",
    "delta",
    "kt",
    "alpha",
    "r",
    "algorithm",
    "repetition",
    "status",
    "exit_iteration",
    "design_samples",
    "validation_samples",
    "cumulative_design",
    "cumulative_validation",
    "objective",
    "wall_time_s",
];

/// Mean, sample standard deviation (n - 1) and worst case (maximum).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stats {
    pub mean: f64,
    pub std: f64,
    pub worst: f64,
    pub count: usize,
}

impl Stats {
    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        let worst = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Some(Self {
            mean,
            std,
            worst,
            count: values.len(),
        })
    }
}

/// One repetition, as written to the CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRow {
    pub repetition: u32,
    pub status: RunStatus,
    pub exit_iteration: u32,
    pub design_samples: u64,
    pub validation_samples: u64,
    pub cumulative_design: u64,
    pub cumulative_validation: u64,
    pub objective: Option<f64>,
    pub wall_time_s: f64,
    /// Exact probability of violation of the returned design, when the
    /// problem has a closed form for it. Not part of the CSV.
    pub true_violation: Option<f64>,
}

impl RunRow {
    fn from_result(repetition: u32, run: &RunResult, problem: &UncertainProblem) -> Self {
        Self {
            repetition,
            status: run.status,
            exit_iteration: run.exit_iteration,
            design_samples: run.design_samples_at_exit,
            validation_samples: run.validation_samples_at_exit,
            cumulative_design: run.cumulative_design_samples,
            cumulative_validation: run.cumulative_validation_samples,
            objective: run.objective,
            wall_time_s: run.wall_time_s,
            true_violation: run
                .theta_sol
                .as_deref()
                .and_then(|t| problem.analytic_violation(t)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub rows: Vec<RunRow>,
    pub solutions: usize,
    pub infeasible: usize,
    pub numeric_failures: usize,
    /// Aggregates over runs that returned a solution.
    pub design_samples: Option<Stats>,
    pub validation_samples: Option<Stats>,
    pub objective: Option<Stats>,
    pub exit_iteration: Option<Stats>,
    /// Only with `record_timing`.
    pub wall_time: Option<Stats>,
}

/// Executes repetition `rep` of the configured experiment.
pub fn run_once(
    config: &ExperimentConfig,
    problem: &UncertainProblem,
    rep: u32,
) -> Result<RunResult> {
    let levels = config.levels()?;
    let seed = RunSeed::new(config.master_seed, rep);
    match config.algorithm {
        Algorithm::Full => run_full(
            problem,
            levels,
            config.schedule_params(problem.n_theta())?,
            seed,
        ),
        Algorithm::Partial => run_partial(
            problem,
            levels,
            config.schedule_params(problem.n_theta())?,
            config.mode,
            seed,
        ),
        Algorithm::OneShot => run_oneshot(problem, levels, seed),
        Algorithm::OneShotDiscarded => {
            run_oneshot_discarded(problem, levels, config.r, config.mode, seed)
        }
    }
}

/// Runs every repetition and aggregates. Rows are ordered by repetition
/// whether or not they were computed in parallel.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let problem = resolve_problem(&config.problem)?;
    let one = |rep: u32| {
        run_once(config, &problem, rep).map(|run| RunRow::from_result(rep, &run, &problem))
    };
    let rows: Vec<RunRow> = if config.parallel {
        (0..config.repetitions)
            .into_par_iter()
            .map(one)
            .collect::<Result<_>>()?
    } else {
        (0..config.repetitions).map(one).collect::<Result<_>>()?
    };
    Ok(ExperimentReport::from_rows(config.clone(), rows))
}

impl ExperimentReport {
    pub fn from_rows(config: ExperimentConfig, rows: Vec<RunRow>) -> Self {
        let solved: Vec<&RunRow> = rows
            .iter()
            .filter(|r| r.status == RunStatus::Solution)
            .collect();
        let stat = |f: &dyn Fn(&RunRow) -> f64| {
            Stats::from_values(&solved.iter().map(|r| f(r)).collect::<Vec<_>>())
        };
        let count = |s: RunStatus| rows.iter().filter(|r| r.status == s).count();
        Self {
            solutions: solved.len(),
            infeasible: count(RunStatus::InfeasibleDeclared),
            numeric_failures: count(RunStatus::NumericFailure),
            design_samples: stat(&|r| r.design_samples as f64),
            validation_samples: stat(&|r| r.validation_samples as f64),
            objective: stat(&|r| r.objective.unwrap_or(f64::NAN)),
            exit_iteration: stat(&|r| f64::from(r.exit_iteration)),
            wall_time: if config.record_timing {
                stat(&|r| r.wall_time_s)
            } else {
                None
            },
            config,
            rows,
        }
    }

    /// True when no repetition returned a solution, whether because of
    /// numeric failures or declared infeasibility.
    pub fn all_failed(&self) -> bool {
        self.solutions == 0
    }

    /// Raw rows followed by a `#`-prefixed summary block.
    pub fn to_csv(&self) -> Result<String> {
        let c = &self.config;
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(CSV_COLUMNS)?;
        for row in &self.rows {
            writer.write_record([
                c.epsilon.to_string(),
                c.delta.to_string(),
                c.kt.to_string(),
                c.alpha.to_string(),
                c.r.to_string(),
                c.algorithm.as_str().to_string(),
                row.repetition.to_string(),
                row.status.as_str().to_string(),
                row.exit_iteration.to_string(),
                row.design_samples.to_string(),
                row.validation_samples.to_string(),
                row.cumulative_design.to_string(),
                row.cumulative_validation.to_string(),
                row.objective
                    .map_or_else(|| "NA".to_string(), |v| v.to_string()),
                if c.record_timing {
                    row.wall_time_s.to_string()
                } else {
                    "NA".to_string()
                },
            ])?;
        }
        let bytes = writer
            .into_inner()
            .map_err(|e| crate::error::Error::Io(e.to_string()))?;
        let mut out = String::from_utf8(bytes).expect("csv output is utf-8");

        let _ = writeln!(
            out,
            "# runs={} solutions={} infeasible={} numeric_failures={} excluded={}",
            self.rows.len(),
            self.solutions,
            self.infeasible,
            self.numeric_failures,
            self.rows.len() - self.solutions
        );
        let _ = writeln!(out, "# metric,mean,std,worst");
        let metrics = [
            ("design_samples", self.design_samples),
            ("validation_samples", self.validation_samples),
            ("objective", self.objective),
            ("exit_iteration", self.exit_iteration),
            ("wall_time_s", self.wall_time),
        ];
        for (name, stats) in metrics {
            match stats {
                Some(s) => {
                    let _ = writeln!(out, "# {name},{},{},{}", s.mean, s.std, s.worst);
                }
                None => {
                    let _ = writeln!(out, "# {name},NA,NA,NA");
                }
            }
        }
        Ok(out)
    }

    /// Table-style text summary.
    pub fn render_text(&self) -> String {
        let c = &self.config;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} on {}: eps={} delta={} kt={} alpha={} r={} reps={} seed={}",
            c.algorithm.as_str(),
            c.problem.name,
            c.epsilon,
            c.delta,
            c.kt,
            c.alpha,
            c.r,
            c.repetitions,
            c.master_seed
        );
        let _ = writeln!(
            out,
            "solutions {}  infeasible {}  numeric failures {}",
            self.solutions, self.infeasible, self.numeric_failures
        );
        let _ = writeln!(
            out,
            "{:<20} {:>12} {:>12} {:>12}",
            "metric", "mean", "std", "worst"
        );
        let metrics = [
            ("design samples", self.design_samples),
            ("validation samples", self.validation_samples),
            ("objective", self.objective),
            ("exit iteration", self.exit_iteration),
            ("wall time (s)", self.wall_time),
        ];
        for (name, stats) in metrics {
            if let Some(s) = stats {
                let _ = writeln!(
                    out,
                    "{name:<20} {:>12.4} {:>12.4} {:>12.4}",
                    s.mean, s.std, s.worst
                );
            }
        }
        let violations: Vec<f64> = self.rows.iter().filter_map(|r| r.true_violation).collect();
        if !violations.is_empty() {
            let bad = violations.iter().filter(|v| **v > c.epsilon).count();
            let _ = writeln!(
                out,
                "runs with V(theta_sol) > eps: {bad}/{} ({:.4})",
                violations.len(),
                bad as f64 / violations.len() as f64
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats_single_value() {
        let s = Stats::from_values(&[4.0]).unwrap();
        assert_eq!((s.mean, s.std, s.worst), (4.0, 0.0, 4.0));
        assert!(Stats::from_values(&[]).is_none());
    }

    #[test]
    fn stats_sample_std() {
        let s = Stats::from_values(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.mean, 2.5);
        assert!((s.std - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(s.worst, 4.0);
    }

    #[test]
    fn one_repetition_has_zero_spread() {
        let config = ExperimentConfig {
            repetitions: 1,
            ..ExperimentConfig::default()
        };
        let report = run_experiment(&config).unwrap();
        let d = report.design_samples.unwrap();
        assert_eq!(d.mean, d.worst);
        assert_eq!(d.std, 0.0);
        assert_eq!(d.mean, report.rows[0].design_samples as f64);
    }

    #[test]
    fn failures_are_excluded_and_flagged() {
        let config = ExperimentConfig {
            repetitions: 3,
            ..ExperimentConfig::default()
        };
        let mut rows: Vec<RunRow> = (0..3)
            .map(|i| RunRow {
                repetition: i,
                status: RunStatus::Solution,
                exit_iteration: 1,
                design_samples: 10 * (i as u64 + 1),
                validation_samples: 5,
                cumulative_design: 10,
                cumulative_validation: 5,
                objective: Some(0.5),
                wall_time_s: 0.0,
                true_violation: None,
            })
            .collect();
        rows[1].status = RunStatus::NumericFailure;
        rows[1].objective = None;
        let report = ExperimentReport::from_rows(config.clone(), rows.clone());
        assert_eq!(report.numeric_failures, 1);
        assert_eq!(report.design_samples.unwrap().mean, 20.0);
        assert!(!report.all_failed());
        assert!(report.to_csv().unwrap().contains("excluded=1"));

        for r in &mut rows {
            r.status = RunStatus::NumericFailure;
        }
        rows[2].status = RunStatus::InfeasibleDeclared;
        let report = ExperimentReport::from_rows(config, rows);
        assert!(report.all_failed());
        assert!(report.design_samples.is_none());
    }
}
