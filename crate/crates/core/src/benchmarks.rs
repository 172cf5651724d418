//! Benchmark problems addressable by name.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Result};
use crate::problem::{AffineConstraint, AffineRow, BoxDomain, UncertainProblem, UniformBox};

pub const TOY_MAX: &str = "toy-max";
pub const UNCERTAIN_LP: &str = "uncertain-lp";

/// Largest `spread` for which [`uncertain_lp_problem`] keeps the lower box
/// corner feasible for every uncertainty point.
pub const LP_SPREAD_LIMIT: f64 = 2.0;

/// `min theta s.t. theta >= q, theta in [0, 1]`, `q ~ U[0, 1]`.
///
/// `f(theta, q) = q - theta`, so `V(theta) = 1 - theta` on `[0, 1]` and the
/// scenario solution is the sample maximum.
pub fn toy_max_problem() -> UncertainProblem {
    let constraint = AffineConstraint::new(|q: &[f64]| AffineRow {
        coeffs: vec![-1.0],
        rhs: -q[0],
    });
    UncertainProblem::new(
        TOY_MAX,
        vec![1.0],
        Arc::new(constraint),
        Arc::new(UniformBox::unit(1)),
    )
    .and_then(|p| p.with_domain(BoxDomain::new(vec![0.0], vec![1.0])?))
    .expect("toy problem is well formed")
    .with_analytic_violation(|theta| (1.0 - theta[0]).clamp(0.0, 1.0))
}

/// A randomly generated uncertain LP
/// `min c'theta s.t. a(q)'theta <= b(q), theta in [0, 2]^n`
/// with `q ~ U[-1, 1]^(n+1)`.
///
/// `c` has negative entries so the uncertain constraint is the binding one.
/// `a(q) = a0 + spread * A1 q` and `b(q) = 1 + spread * b1 . q`, where every
/// row of `A1` and `b1` has absolute sum at most 1/2. Hence `b(q) >= 1 - spread/2`,
/// and `theta = 0` is feasible for every sample while `spread < 2`.
/// The instance depends only on `(n_theta, spread, seed)`.
pub fn uncertain_lp_problem(n_theta: usize, spread: f64, seed: u64) -> Result<UncertainProblem> {
    if n_theta < 2 {
        return Err(domain(format!(
            "uncertain-lp needs n_theta >= 2, got {n_theta}"
        )));
    }
    if !(0.0..LP_SPREAD_LIMIT).contains(&spread) {
        return Err(domain(format!(
            "spread must lie in [0, {LP_SPREAD_LIMIT}), got {spread}"
        )));
    }
    let q_dim = n_theta + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let objective: Vec<f64> = (0..n_theta).map(|_| -rng.random_range(0.5..1.5)).collect();
    let nominal: Vec<f64> = (0..n_theta).map(|_| rng.random_range(0.5..1.5)).collect();
    let scale = 0.5 / q_dim as f64;
    let shift: Vec<Vec<f64>> = (0..n_theta)
        .map(|_| {
            (0..q_dim)
                .map(|_| scale * rng.random_range(-1.0..1.0))
                .collect()
        })
        .collect();
    let rhs_shift: Vec<f64> = (0..q_dim)
        .map(|_| scale * rng.random_range(-1.0..1.0))
        .collect();

    let constraint = AffineConstraint::new(move |q: &[f64]| AffineRow {
        coeffs: nominal
            .iter()
            .zip(&shift)
            .map(|(a, row)| a + spread * crate::problem::dot(row, q))
            .collect(),
        rhs: 1.0 + spread * crate::problem::dot(&rhs_shift, q),
    });
    let sampler = UniformBox::new(vec![-1.0; q_dim], vec![1.0; q_dim])?;
    UncertainProblem::new(
        UNCERTAIN_LP,
        objective,
        Arc::new(constraint),
        Arc::new(sampler),
    )?
    .with_domain(BoxDomain::new(vec![0.0; n_theta], vec![2.0; n_theta])?)
}
