use serde::Serialize;

use crate::bounds::ProbabilisticLevels;
use crate::error::{domain, Result};
use crate::problem::{draw, empirical_violation, EmpiricalViolation, UncertainProblem};
use crate::rng::{Purpose, RunSeed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Certified,
    Refuted,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifyReport {
    pub verdict: Verdict,
    pub empirical: EmpiricalViolation,
    pub empirical_value: f64,
    pub margin: f64,
    pub epsilon: f64,
    pub delta: f64,
    /// Plain-language statement of what the verdict means.
    pub statement: String,
}

/// Number of fresh points needed so that, by the additive Chernoff bound,
/// `V <= V_hat + margin` with probability at least `1 - delta`.
pub fn certification_size(delta: f64, margin: f64) -> Result<u64> {
    if !(margin > 0.0 && margin < 1.0) {
        return Err(domain(format!(
            "certification margin must lie in (0,1), got {margin}"
        )));
    }
    Ok(((1.0 / delta).ln() / (2.0 * margin * margin)).ceil() as u64)
}

/// A-posteriori check of a design on `ceil(ln(1/delta) / (2 margin^2))` fresh
/// points. Certified when `V_hat <= eps - margin`; `margin` defaults to `eps / 4`.
pub fn certify(
    problem: &UncertainProblem,
    theta: &[f64],
    levels: ProbabilisticLevels,
    seed: RunSeed,
    margin: Option<f64>,
) -> Result<CertifyReport> {
    let eps = levels.epsilon();
    let margin = margin.unwrap_or(eps / 4.0);
    let count = certification_size(levels.delta(), margin)?;
    let label = seed.label(0, Purpose::Certify);
    let points = draw(problem, count as usize, seed.master, label)?;
    let empirical = empirical_violation(problem, theta, &points, 0.0)?;
    let value = empirical.value();
    let verdict = if value <= eps - margin {
        Verdict::Certified
    } else {
        Verdict::Refuted
    };
    let statement = match verdict {
        Verdict::Certified => format!(
            "empirical violation {value} <= eps - margin = {}; with probability at least {} \
             over the {count} certification samples, V(theta) <= {eps}",
            eps - margin,
            1.0 - levels.delta()
        ),
        Verdict::Refuted => format!(
            "empirical violation {value} > eps - margin = {}; the one-sided test cannot \
             certify V(theta) <= {eps} at confidence {}",
            eps - margin,
            1.0 - levels.delta()
        ),
    };
    Ok(CertifyReport {
        verdict,
        empirical,
        empirical_value: value,
        margin,
        epsilon: eps,
        delta: levels.delta(),
        statement,
    })
}
