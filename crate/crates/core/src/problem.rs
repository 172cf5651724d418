//! Uncertain convex programs `min c'theta s.t. f(theta, q) <= 0 for all q`,
//! their uncertainty samplers, and empirical violation.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore};
use serde::Serialize;

use crate::error::{domain, Result};
use crate::rng::{stream, StreamLabel};

/// Coefficients of a constraint affine in theta: `f(theta, q) = coeffs . theta - rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineRow {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
}

impl AffineRow {
    pub fn eval(&self, theta: &[f64]) -> f64 {
        dot(&self.coeffs, theta) - self.rhs
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The scalar constraint `f(theta, q)`, convex in theta for fixed q.
/// Must be deterministic.
pub trait Constraint: Send + Sync {
    fn eval(&self, theta: &[f64], q: &[f64]) -> Result<f64>;

    /// The affine form at `q`, when the constraint is affine in theta.
    /// The built-in solver only handles constraints that return `Some`.
    fn affine(&self, _q: &[f64]) -> Option<AffineRow> {
        None
    }
}

/// A constraint given by an affine row for each uncertainty point.
pub struct AffineConstraint<F> {
    row: F,
}

impl<F> AffineConstraint<F>
where
    F: Fn(&[f64]) -> AffineRow + Send + Sync,
{
    pub fn new(row: F) -> Self {
        Self { row }
    }
}

impl<F> Constraint for AffineConstraint<F>
where
    F: Fn(&[f64]) -> AffineRow + Send + Sync,
{
    fn eval(&self, theta: &[f64], q: &[f64]) -> Result<f64> {
        Ok((self.row)(q).eval(theta))
    }

    fn affine(&self, q: &[f64]) -> Option<AffineRow> {
        Some((self.row)(q))
    }
}

/// Source of i.i.d. uncertainty points.
pub trait Sampler: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;
    fn sample(&self, rng: &mut dyn RngCore) -> Vec<f64>;
}

/// Uniform distribution on an axis-aligned box.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl UniformBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(domain("uniform box needs matching, nonempty bounds"));
        }
        if lower
            .iter()
            .zip(&upper)
            .any(|(l, u)| !l.is_finite() || !u.is_finite() || l > u)
        {
            return Err(domain("uniform box needs finite lower <= upper"));
        }
        Ok(Self { lower, upper })
    }

    pub fn unit(dim: usize) -> Self {
        Self {
            lower: vec![0.0; dim],
            upper: vec![1.0; dim],
        }
    }
}

impl Sampler for UniformBox {
    fn dim(&self) -> usize {
        self.lower.len()
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| l + (u - l) * rng.random::<f64>())
            .collect()
    }
}

/// Box constraints on theta.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxDomain {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(domain("box bounds differ in length"));
        }
        if lower
            .iter()
            .zip(&upper)
            .any(|(l, u)| l.is_nan() || u.is_nan() || l > u)
        {
            return Err(domain("box needs lower <= upper"));
        }
        Ok(Self { lower, upper })
    }

    pub fn contains(&self, theta: &[f64], tol: f64) -> bool {
        theta
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(t, (l, u))| *t >= l - tol && *t <= u + tol)
    }
}

type ViolationFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// An uncertain convex program. Immutable once built and cheap to clone.
#[derive(Clone)]
pub struct UncertainProblem {
    name: String,
    objective: Vec<f64>,
    constraint: Arc<dyn Constraint>,
    sampler: Arc<dyn Sampler>,
    domain: Option<BoxDomain>,
    analytic_violation: Option<Arc<ViolationFn>>,
}

impl fmt::Debug for UncertainProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UncertainProblem")
            .field("name", &self.name)
            .field("objective", &self.objective)
            .field("sampler", &self.sampler)
            .field("domain", &self.domain)
            .field("analytic_violation", &self.analytic_violation.is_some())
            .finish()
    }
}

impl UncertainProblem {
    pub fn new(
        name: impl Into<String>,
        objective: Vec<f64>,
        constraint: Arc<dyn Constraint>,
        sampler: Arc<dyn Sampler>,
    ) -> Result<Self> {
        if objective.is_empty() {
            return Err(domain("objective needs at least one design variable"));
        }
        Ok(Self {
            name: name.into(),
            objective,
            constraint,
            sampler,
            domain: None,
            analytic_violation: None,
        })
    }

    pub fn with_domain(mut self, domain_box: BoxDomain) -> Result<Self> {
        if domain_box.lower.len() != self.n_theta() {
            return Err(domain("box dimension differs from n_theta"));
        }
        self.domain = Some(domain_box);
        Ok(self)
    }

    /// Replaces the sampler. Any analytic violation is dropped since it was
    /// tied to the previous distribution.
    pub fn with_sampler(mut self, sampler: Arc<dyn Sampler>) -> Self {
        self.sampler = sampler;
        self.analytic_violation = None;
        self
    }

    pub fn with_analytic_violation(
        mut self,
        violation: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.analytic_violation = Some(Arc::new(violation));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_theta(&self) -> usize {
        self.objective.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn constraint(&self) -> &dyn Constraint {
        self.constraint.as_ref()
    }

    pub fn sampler(&self) -> &dyn Sampler {
        self.sampler.as_ref()
    }

    pub fn domain(&self) -> Option<&BoxDomain> {
        self.domain.as_ref()
    }

    /// Exact probability of violation `V(theta)`, when known in closed form.
    pub fn analytic_violation(&self, theta: &[f64]) -> Option<f64> {
        self.analytic_violation.as_ref().map(|v| v(theta))
    }

    pub fn has_analytic_violation(&self) -> bool {
        self.analytic_violation.is_some()
    }

    fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.n_theta() {
            return Err(domain(format!(
                "theta has length {}, expected {}",
                theta.len(),
                self.n_theta()
            )));
        }
        Ok(())
    }
}

/// An ordered list of i.i.d. uncertainty points together with the stream
/// that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Multisample {
    pub points: Vec<Vec<f64>>,
    pub label: StreamLabel,
    pub master_seed: u64,
}

impl Multisample {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Draws `count` points from the problem's sampler on the stream named by
/// `(master_seed, label)`.
pub fn draw(
    problem: &UncertainProblem,
    count: usize,
    master_seed: u64,
    label: StreamLabel,
) -> Result<Multisample> {
    if count == 0 {
        return Err(domain("a multisample needs at least one point"));
    }
    let mut rng = stream(master_seed, label);
    let points = (0..count)
        .map(|_| problem.sampler().sample(&mut rng))
        .collect();
    Ok(Multisample {
        points,
        label,
        master_seed,
    })
}

/// `true` when `f(theta, q) > tol`, i.e. the indicator equals one.
pub fn indicator(problem: &UncertainProblem, theta: &[f64], q: &[f64], tol: f64) -> Result<bool> {
    problem.check_theta(theta)?;
    Ok(problem.constraint().eval(theta, q)? > tol)
}

/// Count of violated points over a multisample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EmpiricalViolation {
    pub violated: u64,
    pub total: u64,
}

impl EmpiricalViolation {
    pub fn value(&self) -> f64 {
        self.violated as f64 / self.total as f64
    }
}

/// Fraction of `samples` at which theta violates the constraint.
pub fn empirical_violation(
    problem: &UncertainProblem,
    theta: &[f64],
    samples: &Multisample,
    tol: f64,
) -> Result<EmpiricalViolation> {
    if samples.is_empty() {
        return Err(domain("empirical violation of an empty multisample"));
    }
    let mut violated = 0;
    for q in &samples.points {
        violated += u64::from(indicator(problem, theta, q, tol)?);
    }
    Ok(EmpiricalViolation {
        violated,
        total: samples.len() as u64,
    })
}

/// Index of the first violated point, if any. Stops at the first violation.
pub(crate) fn first_violation(
    problem: &UncertainProblem,
    theta: &[f64],
    samples: &Multisample,
    tol: f64,
) -> Result<Option<usize>> {
    for (i, q) in samples.points.iter().enumerate() {
        if indicator(problem, theta, q, tol)? {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::toy_max_problem;
    use crate::rng::Purpose;

    fn sample_of(points: &[f64]) -> Multisample {
        Multisample {
            points: points.iter().map(|p| vec![*p]).collect(),
            label: StreamLabel::new(0, 1, Purpose::Validation),
            master_seed: 0,
        }
    }

    #[test]
    fn indicator_signs() {
        let toy = toy_max_problem();
        // f = q - theta
        assert!(!indicator(&toy, &[0.5], &[-0.5], 0.0).unwrap());
        assert!(indicator(&toy, &[0.5], &[1.5], 0.0).unwrap());
        assert!(!indicator(&toy, &[0.5], &[0.5], 0.0).unwrap());
        assert!(indicator(&toy, &[0.5, 1.0], &[0.5], 0.0).is_err());
    }

    #[test]
    fn indicator_tolerance_is_monotone() {
        let toy = toy_max_problem();
        for f in [-1.0, -1e-9, 0.0, 1e-9, 1e-3, 1.0] {
            let q = [0.5 + f];
            let mut prev = true;
            for tol in [0.0, 1e-10, 1e-8, 1e-4, 0.5, 2.0] {
                let now = indicator(&toy, &[0.5], &q, tol).unwrap();
                assert!(prev || !now, "raising tol flipped 0 -> 1");
                prev = now;
            }
        }
    }

    #[test]
    fn empirical_violation_counts() {
        let toy = toy_max_problem();
        let v = empirical_violation(&toy, &[1.0], &sample_of(&[0.1, 0.9, 0.5]), 0.0).unwrap();
        assert_eq!(v.value(), 0.0);
        let v = empirical_violation(&toy, &[0.0], &sample_of(&[0.1, 0.9, 0.5]), 0.0).unwrap();
        assert_eq!(v.value(), 1.0);
        let pts = [0.9, 0.1, 0.8, 0.2, 0.3, 0.95, 0.4, 0.0, 0.5, 0.6];
        let v = empirical_violation(&toy, &[0.7], &sample_of(&pts), 0.0).unwrap();
        assert_eq!((v.violated, v.total), (3, 10));
        assert_eq!(v.value(), 0.3);
        assert!(empirical_violation(&toy, &[0.7], &sample_of(&[]), 0.0).is_err());
    }

    #[test]
    fn draw_is_deterministic_per_label() {
        let toy = toy_max_problem();
        let label = StreamLabel::new(0, 1, Purpose::Design);
        let a = draw(&toy, 5, 42, label).unwrap();
        let b = draw(&toy, 5, 42, label).unwrap();
        assert_eq!(a, b);
        assert!(draw(&toy, 0, 42, label).is_err());
    }

    #[test]
    fn design_and_validation_streams_differ() {
        let toy = toy_max_problem();
        let d = draw(&toy, 10_000, 1, StreamLabel::new(0, 1, Purpose::Design)).unwrap();
        let v = draw(&toy, 10_000, 1, StreamLabel::new(0, 1, Purpose::Validation)).unwrap();
        assert!(d.points.iter().zip(&v.points).any(|(a, b)| a != b));
    }

    #[test]
    fn uniform_sample_mean() {
        // 4 sigma for the mean of 1e6 uniforms is 4 * sqrt(1/12) / 1000 ~ 0.00115.
        let toy = toy_max_problem();
        let s = draw(
            &toy,
            1_000_000,
            2024,
            StreamLabel::new(0, 1, Purpose::Design),
        )
        .unwrap();
        let mean = s.points.iter().map(|p| p[0]).sum::<f64>() / s.len() as f64;
        assert!((mean - 0.5).abs() < 0.002, "mean={mean}");
    }

    #[test]
    fn empirical_violation_converges_on_toy() {
        // V(0.7) = 0.3; 5 sigma at 1e5 points is ~0.0072.
        let toy = toy_max_problem();
        let s = draw(
            &toy,
            100_000,
            77,
            StreamLabel::new(0, 1, Purpose::Validation),
        )
        .unwrap();
        let v = empirical_violation(&toy, &[0.7], &s, 0.0).unwrap();
        assert!((v.value() - 0.3).abs() <= 0.01);
    }
}
