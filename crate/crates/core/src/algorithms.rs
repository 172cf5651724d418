//! The sequential randomized algorithms and the one-shot scenario baselines.
//!
//! A sequential run alternates design and validation. Iteration `k` solves a
//! scenario program on `N_k` fresh design samples; if `k < kt` the candidate
//! is tested on `M_k` fresh validation samples and returned when it passes.
//! At `k = kt` the candidate is returned unconditionally, its design size
//! being the full scenario bound at `delta / 2`.

use std::time::Instant;

use serde::Serialize;

use crate::bounds::{
    acceptance_threshold, build_schedule, smallest_discarded_n, smallest_scenario_n, DesignSize,
    Flavor, ProbabilisticLevels, SampleSchedule, ScheduleParams,
};
use crate::error::{domain, Result};
use crate::problem::{draw, empirical_violation, first_violation, UncertainProblem};
use crate::rng::{Purpose, RunSeed, StreamLabel};
use crate::solver::{
    discard_and_solve, solve_scenario_with, Backend, DiscardMode, SimplexBackend, SolveOutcome,
    SolveStatus,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Full,
    Partial,
    OneShot,
    OneShotDiscarded,
}

impl Algorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Full => "full",
            Algorithm::Partial => "partial",
            Algorithm::OneShot => "oneshot",
            Algorithm::OneShotDiscarded => "oneshot-discarded",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Algorithm::Full),
            "partial" => Ok(Algorithm::Partial),
            "oneshot" => Ok(Algorithm::OneShot),
            "oneshot-discarded" => Ok(Algorithm::OneShotDiscarded),
            other => Err(crate::error::Error::Config(format!(
                "unknown algorithm `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Solution,
    /// The sampled program was infeasible. This is sampled evidence that the
    /// original program is infeasible, not a proof.
    InfeasibleDeclared,
    NumericFailure,
}

impl RunStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RunStatus::Solution => "solution",
            RunStatus::InfeasibleDeclared => "infeasible",
            RunStatus::NumericFailure => "numeric_failure",
        }
    }
}

/// How a run ended. Exactly one per run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitPath {
    /// A candidate passed validation at some `k < kt`.
    Validated,
    /// The last iteration was reached and its candidate accepted.
    FinalIteration,
    /// One-shot scenario solve, no validation.
    SingleSolve,
    Infeasible,
    Failure,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationRecord {
    pub label: StreamLabel,
    /// `M_k`.
    pub size: u64,
    /// Violations counted. The all-satisfied test stops at the first one.
    pub violated: u64,
    pub evaluated: u64,
    /// Largest admissible empirical violation.
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub k: u32,
    pub design: DesignSize,
    pub design_label: StreamLabel,
    pub solve: SolveStatus,
    pub objective: Option<f64>,
    pub discarded: usize,
    pub validation: Option<ValidationRecord>,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunResult {
    pub algorithm: Algorithm,
    pub status: RunStatus,
    pub exit_path: ExitPath,
    pub theta_sol: Option<Vec<f64>>,
    pub objective: Option<f64>,
    pub exit_iteration: u32,
    /// `N_k` at the exit iteration.
    pub design_samples_at_exit: u64,
    /// `M_k` at the exit iteration; 0 when the run exits without validating.
    pub validation_samples_at_exit: u64,
    pub cumulative_design_samples: u64,
    pub cumulative_validation_samples: u64,
    pub trace: Vec<IterationRecord>,
    pub wall_time_s: f64,
    pub message: Option<String>,
}

impl RunResult {
    pub fn is_solution(&self) -> bool {
        self.status == RunStatus::Solution
    }
}

/// Solver backend and indicator tolerance used by a run.
#[derive(Clone, Copy)]
pub struct RunOptions<'a> {
    pub backend: &'a dyn Backend,
    /// Validation points with `f(theta, q) <= indicator_tol` count as satisfied.
    pub indicator_tol: f64,
}

static BUILTIN: SimplexBackend = SimplexBackend;

impl Default for RunOptions<'_> {
    fn default() -> Self {
        Self {
            backend: &BUILTIN,
            indicator_tol: 0.0,
        }
    }
}

fn check_dimension(problem: &UncertainProblem, n_theta: u64) -> Result<()> {
    if problem.n_theta() as u64 != n_theta {
        return Err(domain(format!(
            "schedule built for n_theta={n_theta} but the problem has {} design variables",
            problem.n_theta()
        )));
    }
    Ok(())
}

fn usize_of(n: u64) -> Result<usize> {
    usize::try_from(n).map_err(|_| domain(format!("sample count {n} does not fit in memory")))
}

struct Tally {
    trace: Vec<IterationRecord>,
    design_total: u64,
    validation_total: u64,
}

/// Finishes a run from the last solve.
fn conclude(
    algorithm: Algorithm,
    tally: Tally,
    solve: SolveOutcome,
    exit_path: ExitPath,
    start: Instant,
) -> RunResult {
    let last = tally.trace.last().expect("at least one iteration");
    let status = match exit_path {
        ExitPath::Infeasible => RunStatus::InfeasibleDeclared,
        ExitPath::Failure => RunStatus::NumericFailure,
        _ => RunStatus::Solution,
    };
    let solved = status == RunStatus::Solution;
    RunResult {
        algorithm,
        status,
        exit_path,
        theta_sol: solved.then(|| solve.theta.clone()).flatten(),
        objective: solved.then_some(solve.objective).flatten(),
        exit_iteration: last.k,
        design_samples_at_exit: last.design.drawn,
        validation_samples_at_exit: last.validation.as_ref().map_or(0, |v| v.size),
        cumulative_design_samples: tally.design_total,
        cumulative_validation_samples: tally.validation_total,
        trace: tally.trace,
        wall_time_s: start.elapsed().as_secs_f64(),
        message: solve.message,
    }
}

fn run_sequential(
    opts: &RunOptions<'_>,
    problem: &UncertainProblem,
    schedule: &SampleSchedule,
    mode: DiscardMode,
    seed: RunSeed,
) -> Result<RunResult> {
    let start = Instant::now();
    check_dimension(problem, schedule.params.n_theta())?;
    let algorithm = match schedule.flavor {
        Flavor::Full => Algorithm::Full,
        Flavor::Partial => Algorithm::Partial,
    };
    let kt = schedule.kt();
    let epsilon = schedule.levels.epsilon();
    let mut tally = Tally {
        trace: Vec::with_capacity(kt as usize),
        design_total: 0,
        validation_total: 0,
    };

    for k in 1..=kt {
        let design = schedule.design_at(u64::from(k));
        let design_label = seed.label(k, Purpose::Design);
        let samples = draw(problem, usize_of(design.drawn)?, seed.master, design_label)?;
        tally.design_total += design.drawn;
        let budget = usize_of(design.discard_budget())?;
        let solve = if budget == 0 {
            solve_scenario_with(opts.backend, problem, &samples)?
        } else {
            discard_and_solve(opts.backend, problem, &samples, budget, mode)?
        };
        let mut record = IterationRecord {
            k,
            design,
            design_label,
            solve: solve.status,
            objective: solve.objective,
            discarded: solve.discarded.len(),
            validation: None,
            accepted: false,
        };

        let terminal = match solve.status {
            SolveStatus::Infeasible => Some(ExitPath::Infeasible),
            SolveStatus::NumericFailure => Some(ExitPath::Failure),
            SolveStatus::Feasible if k == kt => {
                record.accepted = true;
                Some(ExitPath::FinalIteration)
            }
            SolveStatus::Feasible => None,
        };
        if let Some(path) = terminal {
            tally.trace.push(record);
            return Ok(conclude(algorithm, tally, solve, path, start));
        }

        let theta = solve
            .theta
            .as_deref()
            .expect("feasible outcome carries theta");
        let size = schedule
            .validation_at(u64::from(k))
            .expect("k < kt has a validation size");
        let validation_label = seed.label(k, Purpose::Validation);
        let points = draw(problem, usize_of(size)?, seed.master, validation_label)?;
        tally.validation_total += size;

        let validation = match schedule.beta {
            None => {
                let hit = first_violation(problem, theta, &points, opts.indicator_tol)?;
                ValidationRecord {
                    label: validation_label,
                    size,
                    violated: u64::from(hit.is_some()),
                    evaluated: hit.map_or(size, |i| i as u64 + 1),
                    threshold: 0.0,
                    passed: hit.is_none(),
                }
            }
            Some(beta) => {
                let threshold = acceptance_threshold(u64::from(k), beta.beta_v, epsilon);
                let v = empirical_violation(problem, theta, &points, opts.indicator_tol)?;
                ValidationRecord {
                    label: validation_label,
                    size,
                    violated: v.violated,
                    evaluated: v.total,
                    threshold,
                    passed: v.value() <= threshold,
                }
            }
        };
        let passed = validation.passed;
        record.accepted = passed;
        record.validation = Some(validation);
        tally.trace.push(record);
        if passed {
            return Ok(conclude(
                algorithm,
                tally,
                solve,
                ExitPath::Validated,
                start,
            ));
        }
    }
    unreachable!("the final iteration always exits")
}

/// Sequential algorithm with full constraint satisfaction.
pub fn run_full(
    problem: &UncertainProblem,
    levels: ProbabilisticLevels,
    params: ScheduleParams,
    seed: impl Into<RunSeed>,
) -> Result<RunResult> {
    run_full_with(&RunOptions::default(), problem, levels, params, seed)
}

pub fn run_full_with(
    opts: &RunOptions<'_>,
    problem: &UncertainProblem,
    levels: ProbabilisticLevels,
    params: ScheduleParams,
    seed: impl Into<RunSeed>,
) -> Result<RunResult> {
    let schedule = build_schedule(levels, params, Flavor::Full)?;
    run_sequential(opts, problem, &schedule, DiscardMode::Greedy, seed.into())
}

/// Sequential algorithm with partial constraint satisfaction: up to
/// `N_k - N_{k,r}` design constraints are discarded at iteration `k`, and
/// validation accepts when the empirical violation is at most
/// `(1 - (k beta_v)^(-1/2)) eps`.
pub fn run_partial(
    problem: &UncertainProblem,
    levels: ProbabilisticLevels,
    params: ScheduleParams,
    mode: DiscardMode,
    seed: impl Into<RunSeed>,
) -> Result<RunResult> {
    run_partial_with(&RunOptions::default(), problem, levels, params, mode, seed)
}

pub fn run_partial_with(
    opts: &RunOptions<'_>,
    problem: &UncertainProblem,
    levels: ProbabilisticLevels,
    params: ScheduleParams,
    mode: DiscardMode,
    seed: impl Into<RunSeed>,
) -> Result<RunResult> {
    let schedule = build_schedule(levels, params, Flavor::Partial)?;
    run_sequential(opts, problem, &schedule, mode, seed.into())
}

fn run_single(
    opts: &RunOptions<'_>,
    algorithm: Algorithm,
    problem: &UncertainProblem,
    big_n: u64,
    r: u64,
    mode: DiscardMode,
    seed: RunSeed,
) -> Result<RunResult> {
    let start = Instant::now();
    let label = seed.label(1, Purpose::Design);
    let samples = draw(problem, usize_of(big_n)?, seed.master, label)?;
    let solve = if r == 0 {
        solve_scenario_with(opts.backend, problem, &samples)?
    } else {
        discard_and_solve(opts.backend, problem, &samples, usize_of(r)?, mode)?
    };
    let path = match solve.status {
        SolveStatus::Feasible => ExitPath::SingleSolve,
        SolveStatus::Infeasible => ExitPath::Infeasible,
        SolveStatus::NumericFailure => ExitPath::Failure,
    };
    let record = IterationRecord {
        k: 1,
        design: DesignSize {
            drawn: big_n,
            constrained: big_n - r,
        },
        design_label: label,
        solve: solve.status,
        objective: solve.objective,
        discarded: solve.discarded.len(),
        validation: None,
        accepted: solve.is_feasible(),
    };
    let tally = Tally {
        trace: vec![record],
        design_total: big_n,
        validation_total: 0,
    };
    Ok(conclude(algorithm, tally, solve, path, start))
}

/// One scenario solve at the full bound for `(eps, delta)`, no validation.
pub fn run_oneshot(
    problem: &UncertainProblem,
    levels: ProbabilisticLevels,
    seed: impl Into<RunSeed>,
) -> Result<RunResult> {
    let opts = RunOptions::default();
    let big_n = smallest_scenario_n(levels, problem.n_theta() as u64)?;
    run_single(
        &opts,
        Algorithm::OneShot,
        problem,
        big_n,
        0,
        DiscardMode::Greedy,
        seed.into(),
    )
}

/// One scenario solve with `r` discarded constraints at the discarded-constraint bound.
pub fn run_oneshot_discarded(
    problem: &UncertainProblem,
    levels: ProbabilisticLevels,
    r: u64,
    mode: DiscardMode,
    seed: impl Into<RunSeed>,
) -> Result<RunResult> {
    let opts = RunOptions::default();
    let big_n = smallest_discarded_n(levels, problem.n_theta() as u64, r)?;
    run_single(
        &opts,
        Algorithm::OneShotDiscarded,
        problem,
        big_n,
        r,
        mode,
        seed.into(),
    )
}
