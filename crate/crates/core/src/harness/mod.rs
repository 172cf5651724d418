//! Batch experiments, a-posteriori certification and bound tables.

mod bounds_table;
mod certify;
mod config;
mod report;

pub use bounds_table::{bounds_report, BoundsReport, FlavorSummary};
pub use certify::{certification_size, certify, CertifyReport, Verdict};
pub use config::{resolve_problem, ExperimentConfig, ProblemSpec};
pub use report::{run_experiment, run_once, ExperimentReport, RunRow, Stats, CSV_COLUMNS};
