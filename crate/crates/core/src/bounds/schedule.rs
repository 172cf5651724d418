use serde::Serialize;

use super::tail::{smallest_discarded_n, smallest_scenario_n};
use super::{ProbabilisticLevels, ScheduleParams};
use crate::error::{domain, Error, Result};
use crate::lambert::lambert_w;

/// `sum_{j=1}^{m} j^(-alpha)`, the finite hyperharmonic (p-)series.
pub fn hyperharmonic(m: u64, alpha: f64) -> f64 {
    // smallest terms first
    (1..=m).rev().map(|j| (j as f64).powf(-alpha)).sum()
}

fn check_validation_iteration(k: u64, kt: u32) -> Result<()> {
    if k == 0 || k >= u64::from(kt) {
        return Err(domain(format!(
            "validation runs only at iterations 1..{}, got k={k}",
            kt - 1
        )));
    }
    Ok(())
}

fn full_bound(k: u64, params: &ScheduleParams, levels: &ProbabilisticLevels) -> f64 {
    let alpha = params.alpha();
    let series = hyperharmonic(u64::from(params.kt()) - 1, alpha);
    let numerator = alpha * (k as f64).ln() + series.ln() + (2.0 / levels.delta()).ln();
    numerator / -(-levels.epsilon()).ln_1p()
}

fn partial_bound(
    k: u64,
    params: &ScheduleParams,
    levels: &ProbabilisticLevels,
    beta_v: f64,
) -> f64 {
    let kt = f64::from(params.kt());
    2.0 * k as f64 * beta_v / levels.epsilon() * (2.0 * kt / levels.delta()).ln()
}

/// Validation-set size `M_k` of the full-satisfaction algorithm:
/// `ceil((alpha ln k + ln S_{kt-1}(alpha) + ln(2/delta)) / ln(1/(1-eps)))`.
pub fn validation_size_full(
    k: u64,
    params: &ScheduleParams,
    levels: &ProbabilisticLevels,
) -> Result<u64> {
    check_validation_iteration(k, params.kt())?;
    Ok(full_bound(k, params, levels).ceil() as u64)
}

/// Validation-set size `M_k` of the partial-satisfaction algorithm:
/// `ceil(2 k beta_v / eps * ln(2 kt / delta))`.
pub fn validation_size_partial(
    k: u64,
    params: &ScheduleParams,
    levels: &ProbabilisticLevels,
    beta_v: f64,
) -> Result<u64> {
    check_validation_iteration(k, params.kt())?;
    if beta_v.is_nan() || beta_v < 1.0 {
        return Err(domain(format!("beta_v must be >= 1, got {beta_v}")));
    }
    Ok(partial_bound(k, params, levels, beta_v).ceil() as u64)
}

/// Scale parameters of the partial-satisfaction algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaParams {
    pub beta_w: f64,
    /// `max(1, beta_v_raw)`.
    pub beta_v: f64,
    /// `beta_w / (kt ln(2 kt / delta))` before clamping.
    pub beta_v_raw: f64,
}

pub fn beta_params(levels: &ProbabilisticLevels, kt: u32) -> Result<BetaParams> {
    if kt < 2 {
        return Err(domain(format!(
            "termination parameter kt must be > 1, got {kt}"
        )));
    }
    let kt = f64::from(kt);
    let beta_w = (1.0 / levels.delta()).ln() / (4.0 * levels.epsilon());
    let beta_v_raw = beta_w / (kt * (2.0 * kt / levels.delta()).ln());
    Ok(BetaParams {
        beta_w,
        beta_v: beta_v_raw.max(1.0),
        beta_v_raw,
    })
}

/// Right-hand side of the partial-satisfaction acceptance test,
/// `(1 - (k beta_v)^(-1/2)) eps`. Nonnegative whenever `beta_v >= 1`.
pub fn acceptance_threshold(k: u64, beta_v: f64, epsilon: f64) -> f64 {
    (1.0 - (k as f64 * beta_v).sqrt().recip()) * epsilon
}

/// Largest termination parameter for which the unclamped `beta_v` stays at
/// least one: `floor(beta_w / W(2 beta_w / delta))`, never below 1.
pub fn max_termination_parameter(levels: &ProbabilisticLevels) -> Result<u64> {
    let beta_w = (1.0 / levels.delta()).ln() / (4.0 * levels.epsilon());
    let w = lambert_w(2.0 * beta_w / levels.delta())?;
    Ok(((beta_w / w).floor() as u64).max(1))
}

/// Design sizes at one iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DesignSize {
    /// `N_k`: samples drawn for the design step.
    pub drawn: u64,
    /// `N_{k,r}`: samples kept as constraints after discarding.
    pub constrained: u64,
}

impl DesignSize {
    pub fn discard_budget(&self) -> u64 {
        self.drawn - self.constrained
    }
}

fn ceil_fraction(value: u64, k: u64, kt: u64) -> u64 {
    let num = u128::from(value) * u128::from(k);
    num.div_ceil(u128::from(kt)) as u64
}

/// `N_k = ceil(N k / kt)` and `N_{k,r} = ceil((N - r) k / kt)`.
pub fn design_size(k: u64, kt: u32, n_final: u64, r: u64) -> Result<DesignSize> {
    let kt = u64::from(kt);
    if k == 0 || k > kt {
        return Err(domain(format!("iteration k={k} outside 1..={kt}")));
    }
    if r >= n_final {
        return Err(domain(format!(
            "discard budget r={r} must be below N={n_final}"
        )));
    }
    Ok(DesignSize {
        drawn: ceil_fraction(n_final, k, kt),
        constrained: ceil_fraction(n_final - r, k, kt),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    /// Every sampled constraint must hold; validation accepts only when all
    /// validation points are satisfied.
    Full,
    /// Up to `r` sampled constraints may be discarded; validation compares the
    /// empirical violation against a threshold below `epsilon`.
    Partial,
}

/// Per-iteration sample sizes of one sequential run, fixed before it starts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleSchedule {
    pub flavor: Flavor,
    pub levels: ProbabilisticLevels,
    pub params: ScheduleParams,
    /// Scenario bound at confidence `delta / 2`.
    pub n_final: u64,
    /// One entry per iteration `1..=kt`.
    pub design: Vec<DesignSize>,
    /// One entry per iteration `1..kt`.
    pub validation: Vec<u64>,
    /// Present for the partial flavor only.
    pub beta: Option<BetaParams>,
}

impl SampleSchedule {
    pub fn kt(&self) -> u32 {
        self.params.kt()
    }

    pub fn design_at(&self, k: u64) -> DesignSize {
        self.design[(k - 1) as usize]
    }

    pub fn validation_at(&self, k: u64) -> Option<u64> {
        self.validation.get((k as usize).checked_sub(1)?).copied()
    }

    /// `sum_k (1-eps)^{M_k}`: the misclassification budget spent by the
    /// all-satisfied validation test. At most `delta / 2` for full schedules.
    pub fn validation_budget(&self) -> f64 {
        let ln_keep = (-self.levels.epsilon()).ln_1p();
        self.validation
            .iter()
            .map(|&m| (m as f64 * ln_keep).exp())
            .sum()
    }
}

/// Resolves the final design size at `delta / 2` and fills the design and
/// validation sizes for every iteration.
pub fn build_schedule(
    levels: ProbabilisticLevels,
    params: ScheduleParams,
    flavor: Flavor,
) -> Result<SampleSchedule> {
    let half = levels.halved();
    let kt = params.kt();
    let r = params.r();
    let (n_final, beta) = match flavor {
        Flavor::Full => {
            if r != 0 {
                return Err(domain(
                    "full constraint satisfaction takes no discard budget (r must be 0)",
                ));
            }
            (smallest_scenario_n(half, params.n_theta())?, None)
        }
        Flavor::Partial => (
            smallest_discarded_n(half, params.n_theta(), r)?,
            Some(beta_params(&levels, kt)?),
        ),
    };

    let design = (1..=u64::from(kt))
        .map(|k| design_size(k, kt, n_final, r))
        .collect::<Result<Vec<_>>>()?;
    let validation = (1..u64::from(kt))
        .map(|k| match beta {
            None => validation_size_full(k, &params, &levels),
            Some(b) => validation_size_partial(k, &params, &levels, b.beta_v),
        })
        .collect::<Result<Vec<_>>>()?;

    let schedule = SampleSchedule {
        flavor,
        levels,
        params,
        n_final,
        design,
        validation,
        beta,
    };
    if flavor == Flavor::Full && schedule.validation_budget() > half.delta() {
        return Err(Error::Numeric(format!(
            "validation budget {} exceeds delta/2",
            schedule.validation_budget()
        )));
    }
    Ok(schedule)
}
