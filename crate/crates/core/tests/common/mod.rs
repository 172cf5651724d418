#![allow(dead_code)]

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Float, Signed, Zero};
use seqscen::problem::Multisample;
use seqscen::{solve_scenario, SolveOutcome, UncertainProblem};

/// `epsilon = num / den` exactly, for the decimal levels used in tests.
pub fn exact_level(epsilon: f64) -> (u64, u64) {
    let den = 1_000_000u64;
    let num = (epsilon * den as f64).round() as u64;
    assert!(
        (num as f64 / den as f64 - epsilon).abs() < 1e-15,
        "{epsilon} is not a 6-digit decimal"
    );
    (num, den)
}

/// A nonnegative rational kept unreduced, so comparisons avoid gcd work.
pub struct Exact {
    pub numer: BigUint,
    pub denom: BigUint,
}

impl Exact {
    pub fn to_rational(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.numer.clone()),
            BigInt::from(self.denom.clone()),
        )
    }
}

/// `sum_{i=0}^{n} C(N,i) eps^i (1-eps)^(N-i)` exactly.
pub fn exact_tail(big_n: u64, n: u64, epsilon: f64) -> Exact {
    exact_tails(big_n, n, epsilon).pop().unwrap()
}

/// Exact tails for every `n` in `0..=max_n.min(N)`, sharing one pass over the terms.
pub fn exact_tails(big_n: u64, max_n: u64, epsilon: f64) -> Vec<Exact> {
    let (a, d) = exact_level(epsilon);
    let a = BigUint::from(a);
    let b = BigUint::from(d) - &a;
    let denom = BigUint::from(d).pow(big_n as u32);
    // term_i = C(N,i) a^i b^(N-i), an integer at every step
    let mut term = b.pow(big_n as u32);
    let mut numer = BigUint::zero();
    let mut out = Vec::new();
    for i in 0..=max_n.min(big_n) {
        if i > 0 {
            term = term * BigUint::from(big_n - i + 1) * &a / (BigUint::from(i) * &b);
        }
        numer += &term;
        out.push(Exact {
            numer: numer.clone(),
            denom: denom.clone(),
        });
    }
    out
}

/// `|approx - exact| <= 10^-digits * exact`, decided in integer arithmetic.
pub fn agrees_to_digits(approx: f64, exact: &Exact, digits: u32) -> bool {
    assert!(approx.is_finite() && approx >= 0.0);
    let (mantissa, exponent, _) = approx.integer_decode();
    // approx = mantissa * 2^exponent; scale both sides to clear the power of two
    let mut lhs = BigInt::from(mantissa) * BigInt::from(exact.denom.clone());
    let mut rhs = BigInt::from(exact.numer.clone());
    if exponent >= 0 {
        lhs <<= exponent as usize;
    } else {
        rhs <<= (-exponent) as usize;
    }
    let err = (lhs - &rhs).abs() * BigInt::from(10u32).pow(digits);
    err <= rhs
}

pub fn subset(samples: &Multisample, keep: &[usize]) -> Multisample {
    Multisample {
        points: keep.iter().map(|&i| samples.points[i].clone()).collect(),
        label: samples.label,
        master_seed: samples.master_seed,
    }
}

/// Best objective over every way of removing exactly `r` samples.
pub fn exhaustive_discard(problem: &UncertainProblem, samples: &Multisample, r: usize) -> f64 {
    let count = samples.len();
    let mut best = f64::INFINITY;
    let mut removed: Vec<usize> = (0..r).collect();
    loop {
        let keep: Vec<usize> = (0..count).filter(|i| !removed.contains(i)).collect();
        let out: SolveOutcome = solve_scenario(problem, &subset(samples, &keep)).unwrap();
        if let Some(v) = out.objective {
            best = best.min(v);
        }
        // next combination in lexicographic order
        let mut i = r;
        while i > 0 && removed[i - 1] == count - r + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return best;
        }
        removed[i - 1] += 1;
        for j in i..r {
            removed[j] = removed[j - 1] + 1;
        }
    }
}
