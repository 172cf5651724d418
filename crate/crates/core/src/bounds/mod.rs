//! Sample-complexity computations.
//!
//! Everything here is a pure function of its arguments. All "at least"
//! sample bounds are realized as the smallest admissible integer.

mod schedule;
mod tail;

pub use schedule::{
    acceptance_threshold, beta_params, build_schedule, design_size, hyperharmonic,
    max_termination_parameter, validation_size_full, validation_size_partial, BetaParams,
    DesignSize, Flavor, SampleSchedule,
};
pub use tail::{
    binomial_tail, ln_binomial_tail, smallest_discarded_n, smallest_scenario_n, SEARCH_CAP,
};

use serde::Serialize;

use crate::error::{domain, Result};

/// Accuracy `epsilon` and confidence complement `delta`, both in (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbabilisticLevels {
    epsilon: f64,
    delta: f64,
}

impl ProbabilisticLevels {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        let open_unit = |x: f64| x > 0.0 && x < 1.0;
        if !open_unit(epsilon) {
            return Err(domain(format!("epsilon must lie in (0,1), got {epsilon}")));
        }
        if !open_unit(delta) {
            return Err(domain(format!("delta must lie in (0,1), got {delta}")));
        }
        Ok(Self { epsilon, delta })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// The same accuracy at half the confidence budget, as used for the final
    /// design size of the sequential algorithms.
    pub fn halved(&self) -> Self {
        Self {
            epsilon: self.epsilon,
            delta: self.delta / 2.0,
        }
    }
}

/// Default tuning exponent of the hyperharmonic validation schedule.
pub const DEFAULT_ALPHA: f64 = 0.1;

/// Parameters of a sequential run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScheduleParams {
    kt: u32,
    alpha: f64,
    r: u64,
    n_theta: u64,
}

impl ScheduleParams {
    /// `kt` is the termination parameter (maximum number of iterations),
    /// `r` the discarded-constraint budget and `n_theta` the number of
    /// design variables.
    pub fn new(kt: u32, alpha: f64, r: u64, n_theta: u64) -> Result<Self> {
        if kt < 2 {
            return Err(domain(format!(
                "termination parameter kt must be > 1, got {kt}"
            )));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(domain(format!("alpha must be positive, got {alpha}")));
        }
        if n_theta == 0 {
            return Err(domain("n_theta must be at least 1"));
        }
        Ok(Self {
            kt,
            alpha,
            r,
            n_theta,
        })
    }

    pub fn with_defaults(kt: u32, n_theta: u64) -> Result<Self> {
        Self::new(kt, DEFAULT_ALPHA, 0, n_theta)
    }

    pub fn kt(&self) -> u32 {
        self.kt
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn n_theta(&self) -> u64 {
        self.n_theta
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levels_reject_boundary_values() {
        assert!(ProbabilisticLevels::new(0.0, 0.1).is_err());
        assert!(ProbabilisticLevels::new(1.0, 0.1).is_err());
        assert!(ProbabilisticLevels::new(0.1, 0.0).is_err());
        assert!(ProbabilisticLevels::new(0.1, 1.0).is_err());
        assert!(ProbabilisticLevels::new(f64::NAN, 0.1).is_err());
        assert!(ProbabilisticLevels::new(0.1, 0.1).is_ok());
    }

    #[test]
    fn params_require_kt_above_one() {
        assert!(ScheduleParams::new(1, 0.1, 0, 1).is_err());
        assert!(ScheduleParams::new(2, 0.0, 0, 1).is_err());
        assert!(ScheduleParams::new(2, 0.1, 0, 0).is_err());
        assert!(ScheduleParams::new(2, 0.1, 0, 1).is_ok());
    }
}
