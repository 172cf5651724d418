//! Sequential randomized algorithms for uncertain convex optimization.
//!
//! The scenario approach replaces `f(theta, q) <= 0 for all q` by the same
//! constraint at finitely many i.i.d. samples of `q`, and bounds the number
//! of samples so that the solution violates the original constraint with
//! probability at most `epsilon`, with confidence `1 - delta`.
//!
//! The sequential algorithms in [`algorithms`] solve a growing sequence of
//! reduced-size scenario programs and stop as soon as a candidate passes
//! a validation test on fresh samples:
//!
//! * [`run_full`] requires every design and validation sample to be satisfied;
//! * [`run_partial`] discards constraints and accepts a small empirical
//!   violation.
//!
//! Both keep `Pr{V(theta_sol) <= eps} >= 1 - delta`.

pub mod algorithms;
pub mod benchmarks;
pub mod bounds;
pub mod error;
pub mod harness;
pub mod lambert;
pub mod problem;
pub mod rng;
pub mod solver;

pub use algorithms::{
    run_full, run_oneshot, run_oneshot_discarded, run_partial, Algorithm, ExitPath, RunResult,
    RunStatus,
};
pub use bounds::{
    build_schedule, Flavor, ProbabilisticLevels, SampleSchedule, ScheduleParams, DEFAULT_ALPHA,
};
pub use error::{Error, Result};
pub use harness::{run_experiment, ExperimentConfig, ExperimentReport};
pub use lambert::lambert_w;
pub use problem::{Multisample, UncertainProblem};
pub use rng::{Purpose, RunSeed, StreamLabel};
pub use solver::{solve_scenario, solve_with_discarding, DiscardMode, SolveOutcome, SolveStatus};
