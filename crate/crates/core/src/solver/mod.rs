//! Scenario programs: minimize `c'theta` over the domain box subject to the
//! sampled constraints, optionally after discarding some of them.
//!
//! Solving goes through a [`Backend`], which sees only an [`AffineProgram`].
//! [`SimplexBackend`] is built in; a conic solver can be plugged in by
//! implementing the trait.

mod simplex;

pub use simplex::{solve_lp, AffineProgram, LpOutcome};

use serde::Serialize;

use crate::error::{domain, Result};
use crate::problem::{dot, Multisample, UncertainProblem};

/// Scale-relative tolerance for classifying solver output.
pub const SOLVER_TOL: f64 = 1e-8;

/// The contract between the scenario layer and an LP/convex solver.
pub trait Backend: Send + Sync {
    fn solve(&self, program: &AffineProgram) -> LpOutcome;
}

/// Built-in dense simplex with Bland's rule and lexicographic tie-breaking.
#[derive(Debug, Clone, Copy, Default)]
pub struct SimplexBackend;

impl Backend for SimplexBackend {
    fn solve(&self, program: &AffineProgram) -> LpOutcome {
        solve_lp(program)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Feasible,
    Infeasible,
    NumericFailure,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    /// Present iff `status == Feasible`.
    pub theta: Option<Vec<f64>>,
    pub objective: Option<f64>,
    /// Sample indices whose constraint is tight at `theta`.
    pub active_set: Vec<usize>,
    /// Sample indices left out of the program, ascending.
    pub discarded: Vec<usize>,
    pub message: Option<String>,
}

impl SolveOutcome {
    fn infeasible(discarded: Vec<usize>) -> Self {
        Self {
            status: SolveStatus::Infeasible,
            theta: None,
            objective: None,
            active_set: Vec::new(),
            discarded,
            message: None,
        }
    }

    fn failure(message: String, discarded: Vec<usize>) -> Self {
        Self {
            status: SolveStatus::NumericFailure,
            theta: None,
            objective: None,
            active_set: Vec::new(),
            discarded,
            message: Some(message),
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.status == SolveStatus::Feasible
    }
}

/// How the discarded constraints are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DiscardMode {
    /// Remove, one at a time, the constraint whose removal lowers the
    /// objective the most (lowest index on ties), re-solving after each.
    #[default]
    Greedy,
    /// Enforce only the first `count - r` samples.
    Prefix,
}

impl std::str::FromStr for DiscardMode {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(Self::Greedy),
            "prefix" => Ok(Self::Prefix),
            other => Err(crate::error::Error::Config(format!(
                "unknown discard mode `{other}`"
            ))),
        }
    }
}

/// Affine rows of every sample, in sample order.
struct SampledProgram<'a> {
    problem: &'a UncertainProblem,
    rows: Vec<crate::problem::AffineRow>,
}

impl<'a> SampledProgram<'a> {
    fn new(problem: &'a UncertainProblem, samples: &Multisample) -> Result<Self> {
        if samples.is_empty() {
            return Err(domain("scenario program needs at least one sample"));
        }
        if problem.domain().is_none() {
            return Err(domain("the built-in scenario solver needs a box domain"));
        }
        let rows = samples
            .points
            .iter()
            .map(|q| problem.constraint().affine(q))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| {
                domain("the built-in scenario solver needs constraints affine in theta")
            })?;
        Ok(Self { problem, rows })
    }

    fn solve(&self, backend: &dyn Backend, enforced: &[usize]) -> SolveOutcome {
        let domain_box = self.problem.domain().expect("checked in new");
        let program = AffineProgram {
            objective: self.problem.objective().to_vec(),
            rows: enforced.iter().map(|&i| self.rows[i].clone()).collect(),
            lower: domain_box.lower.clone(),
            upper: domain_box.upper.clone(),
        };
        let discarded: Vec<usize> = {
            let mut keep = vec![false; self.rows.len()];
            enforced.iter().for_each(|&i| keep[i] = true);
            (0..self.rows.len()).filter(|&i| !keep[i]).collect()
        };
        let theta = match backend.solve(&program) {
            LpOutcome::Optimal { x } => x,
            LpOutcome::Infeasible => return SolveOutcome::infeasible(discarded),
            LpOutcome::Failure(msg) => return SolveOutcome::failure(msg, discarded),
        };

        let mut active_set = Vec::new();
        for &i in enforced {
            let row = &self.rows[i];
            let scale = 1.0_f64.max(row.rhs.abs()).max(
                row.coeffs
                    .iter()
                    .zip(&theta)
                    .map(|(a, t)| (a * t).abs())
                    .sum(),
            );
            let value = row.eval(&theta);
            if value > SOLVER_TOL * scale {
                return SolveOutcome::failure(
                    format!("backend returned a point violating sample {i} by {value}"),
                    discarded,
                );
            }
            if value >= -SOLVER_TOL * scale {
                active_set.push(i);
            }
        }
        SolveOutcome {
            status: SolveStatus::Feasible,
            objective: Some(dot(self.problem.objective(), &theta)),
            theta: Some(theta),
            active_set,
            discarded,
            message: None,
        }
    }
}

/// Solves the scenario program over all samples with the built-in backend.
pub fn solve_scenario(problem: &UncertainProblem, samples: &Multisample) -> Result<SolveOutcome> {
    solve_scenario_with(&SimplexBackend, problem, samples)
}

pub fn solve_scenario_with(
    backend: &dyn Backend,
    problem: &UncertainProblem,
    samples: &Multisample,
) -> Result<SolveOutcome> {
    let program = SampledProgram::new(problem, samples)?;
    let all: Vec<usize> = (0..samples.len()).collect();
    Ok(program.solve(backend, &all))
}

/// Solves the scenario program after discarding `r` samples.
/// Requires `r < count - n_theta`.
pub fn solve_with_discarding(
    problem: &UncertainProblem,
    samples: &Multisample,
    r: usize,
    mode: DiscardMode,
) -> Result<SolveOutcome> {
    if r + problem.n_theta() >= samples.len() {
        return Err(domain(format!(
            "discarding r={r} of {} samples needs r < count - n_theta ({})",
            samples.len(),
            problem.n_theta()
        )));
    }
    discard_and_solve(&SimplexBackend, problem, samples, r, mode)
}

/// Like [`solve_with_discarding`] but only requires `r < count`. Intermediate
/// iterations of the sequential algorithms use this, since their design sets
/// may be smaller than the number of design variables.
pub(crate) fn discard_and_solve(
    backend: &dyn Backend,
    problem: &UncertainProblem,
    samples: &Multisample,
    r: usize,
    mode: DiscardMode,
) -> Result<SolveOutcome> {
    if r >= samples.len() {
        return Err(domain(format!(
            "cannot discard {r} of {} samples",
            samples.len()
        )));
    }
    let program = SampledProgram::new(problem, samples)?;
    match mode {
        DiscardMode::Prefix => {
            let kept: Vec<usize> = (0..samples.len() - r).collect();
            Ok(program.solve(backend, &kept))
        }
        DiscardMode::Greedy => Ok(greedy(&program, backend, samples.len(), r)),
    }
}

/// Ranks outcomes: feasible before infeasible, then by objective.
fn better(a: &SolveOutcome, b: &SolveOutcome) -> bool {
    match (a.objective, b.objective) {
        (Some(x), Some(y)) => x < y - 1e-12 * (1.0 + y.abs()),
        (Some(_), None) => true,
        _ => false,
    }
}

fn greedy(
    program: &SampledProgram<'_>,
    backend: &dyn Backend,
    count: usize,
    r: usize,
) -> SolveOutcome {
    let mut enforced: Vec<usize> = (0..count).collect();
    let mut current = program.solve(backend, &enforced);
    for _ in 0..r {
        if current.status == SolveStatus::NumericFailure {
            return current;
        }
        // Only tight constraints can improve a feasible optimum.
        let candidates: Vec<usize> = if current.is_feasible() && !current.active_set.is_empty() {
            current.active_set.clone()
        } else {
            enforced.clone()
        };
        let mut best: Option<(usize, SolveOutcome)> = None;
        for &cand in &candidates {
            let trial: Vec<usize> = enforced.iter().copied().filter(|&i| i != cand).collect();
            let outcome = program.solve(backend, &trial);
            if outcome.status == SolveStatus::NumericFailure {
                return outcome;
            }
            // candidates ascend, so keeping the first of equals breaks ties by index
            if best.as_ref().is_none_or(|(_, b)| better(&outcome, b)) {
                best = Some((cand, outcome));
            }
        }
        let (removed, outcome) = best.expect("at least one enforced constraint remains");
        enforced.retain(|&i| i != removed);
        current = outcome;
    }
    current
}
