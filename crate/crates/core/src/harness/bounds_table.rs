use std::fmt::Write as _;

use serde::Serialize;

use crate::bounds::{
    build_schedule, max_termination_parameter, smallest_discarded_n, smallest_scenario_n,
    BetaParams, DesignSize, Flavor, ProbabilisticLevels, ScheduleParams,
};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlavorSummary {
    pub n_final: u64,
    pub design: Vec<DesignSize>,
    pub validation: Vec<u64>,
    pub beta: Option<BetaParams>,
}

/// All bounds for one `(eps, delta, n_theta, r, kt, alpha)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub epsilon: f64,
    pub delta: f64,
    pub n_theta: u64,
    pub r: u64,
    pub kt: u32,
    pub alpha: f64,
    /// One-shot scenario bound at `delta`.
    pub scenario_n: u64,
    /// One-shot discarded-constraint bound at `delta`, when `r > 0`.
    pub discarded_n: Option<u64>,
    pub full: FlavorSummary,
    pub partial: FlavorSummary,
    pub max_termination_parameter: u64,
    /// `kt` is above the termination bound, so `beta_v` is clamped to 1.
    pub kt_exceeds_termination_bound: bool,
}

pub fn bounds_report(
    levels: ProbabilisticLevels,
    n_theta: u64,
    r: u64,
    kt: u32,
    alpha: f64,
) -> Result<BoundsReport> {
    let summarize = |flavor: Flavor, r: u64| -> Result<FlavorSummary> {
        let s = build_schedule(levels, ScheduleParams::new(kt, alpha, r, n_theta)?, flavor)?;
        Ok(FlavorSummary {
            n_final: s.n_final,
            design: s.design,
            validation: s.validation,
            beta: s.beta,
        })
    };
    let max_kt = max_termination_parameter(&levels)?;
    Ok(BoundsReport {
        epsilon: levels.epsilon(),
        delta: levels.delta(),
        n_theta,
        r,
        kt,
        alpha,
        scenario_n: smallest_scenario_n(levels, n_theta)?,
        discarded_n: if r > 0 {
            Some(smallest_discarded_n(levels, n_theta, r)?)
        } else {
            None
        },
        full: summarize(Flavor::Full, 0)?,
        partial: summarize(Flavor::Partial, r)?,
        max_termination_parameter: max_kt,
        kt_exceeds_termination_bound: u64::from(kt) > max_kt,
    })
}

impl BoundsReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "eps={} delta={} n_theta={} r={} kt={} alpha={}",
            self.epsilon, self.delta, self.n_theta, self.r, self.kt, self.alpha
        );
        let _ = writeln!(
            out,
            "scenario bound N (delta):           {}",
            self.scenario_n
        );
        if let Some(n) = self.discarded_n {
            let _ = writeln!(out, "discarded-constraint bound N (delta): {n}");
        }
        let _ = writeln!(
            out,
            "sequential N_final (delta/2), full:    {}",
            self.full.n_final
        );
        let _ = writeln!(
            out,
            "sequential N_final (delta/2), partial: {}",
            self.partial.n_final
        );
        if let Some(b) = self.partial.beta {
            let _ = writeln!(
                out,
                "beta_w={} beta_v={} (unclamped {})",
                b.beta_w, b.beta_v, b.beta_v_raw
            );
        }
        let _ = writeln!(
            out,
            "max termination parameter:          {}",
            self.max_termination_parameter
        );
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{:>4} {:>10} {:>10} {:>10} {:>10} {:>10}",
            "k", "N_k full", "M_k full", "N_k part", "N_k,r", "M_k part"
        );
        for k in 0..self.kt as usize {
            let m = |v: &[u64]| v.get(k).map_or("-".to_string(), |m| m.to_string());
            let _ = writeln!(
                out,
                "{:>4} {:>10} {:>10} {:>10} {:>10} {:>10}",
                k + 1,
                self.full.design[k].drawn,
                m(&self.full.validation),
                self.partial.design[k].drawn,
                self.partial.design[k].constrained,
                m(&self.partial.validation)
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_fields() {
        let l = ProbabilisticLevels::new(0.2, 1e-2).unwrap();
        let r = bounds_report(l, 153, 0, 20, 0.1).unwrap();
        assert_eq!(r.full.validation[0], 37);
        assert_eq!(r.partial.validation[2], 249);
        assert_eq!(r.full.design.len(), 20);
        assert!(r.discarded_n.is_none());
        assert!(r.render_text().contains("scenario bound"));
    }
}
