//! Shared fixtures for the criterion benches.

use seqscen::problem::{AffineRow, Multisample};
use seqscen::rng::{Purpose, StreamLabel};
use seqscen::solver::AffineProgram;

/// A toy-problem multisample with evenly spread points.
pub fn toy_samples(count: usize) -> Multisample {
    Multisample {
        points: (0..count)
            .map(|i| vec![(i as f64 * 0.618_034) % 1.0])
            .collect(),
        label: StreamLabel::new(0, 1, Purpose::Design),
        master_seed: 0,
    }
}

/// `min -sum(x)` over `x in [0, 2]^n` cut by `rows` random-looking halfspaces.
pub fn dense_program(n: usize, rows: usize) -> AffineProgram {
    let mut state = 0x9e37_79b9_7f4a_7c15u64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    AffineProgram {
        objective: vec![-1.0; n],
        rows: (0..rows)
            .map(|_| AffineRow {
                coeffs: (0..n).map(|_| 0.5 + next()).collect(),
                rhs: 1.0 + next(),
            })
            .collect(),
        lower: vec![0.0; n],
        upper: vec![2.0; n],
    }
}
