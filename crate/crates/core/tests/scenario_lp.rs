mod common;

use common::{exhaustive_discard, subset};
use seqscen::benchmarks::{toy_max_problem, uncertain_lp_problem};
use seqscen::problem::{draw, AffineRow, Multisample};
use seqscen::solver::{solve_lp, AffineProgram, LpOutcome};
use seqscen::{
    solve_scenario, solve_with_discarding, DiscardMode, Purpose, SolveStatus, StreamLabel,
    UncertainProblem,
};

fn samples(problem: &UncertainProblem, count: usize, seed: u64) -> Multisample {
    draw(
        problem,
        count,
        seed,
        StreamLabel::new(0, 1, Purpose::Design),
    )
    .unwrap()
}

/// Solves `m x = rhs` by Gaussian elimination with partial pivoting.
fn solve_square(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[piv][col].abs() < 1e-10 {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for row in 0..n {
            if row != col {
                let f = m[row][col] / m[col][col];
                let pivot_row = m[col].clone();
                for (x, p) in m[row][col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= f * p;
                }
                rhs[row] -= f * rhs[col];
            }
        }
    }
    Some((0..n).map(|i| rhs[i] / m[i][i]).collect())
}

/// Minimum of `c'x` over every feasible basic solution.
fn vertex_optimum(program: &AffineProgram) -> Option<f64> {
    let n = program.objective.len();
    let mut all: Vec<AffineRow> = program.rows.clone();
    for i in 0..n {
        let mut unit = vec![0.0; n];
        unit[i] = 1.0;
        all.push(AffineRow {
            coeffs: unit.clone(),
            rhs: program.upper[i],
        });
        unit[i] = -1.0;
        all.push(AffineRow {
            coeffs: unit,
            rhs: -program.lower[i],
        });
    }
    let mut best: Option<f64> = None;
    let m = all.len();
    let mut pick: Vec<usize> = (0..n).collect();
    loop {
        let mat = pick.iter().map(|&j| all[j].coeffs.clone()).collect();
        let rhs = pick.iter().map(|&j| all[j].rhs).collect();
        if let Some(x) = solve_square(mat, rhs) {
            if all.iter().all(|row| row.eval(&x) <= 1e-9) {
                let v: f64 = program.objective.iter().zip(&x).map(|(c, x)| c * x).sum();
                best = Some(best.map_or(v, |b: f64| b.min(v)));
            }
        }
        let mut i = n;
        while i > 0 && pick[i - 1] == m - n + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return best;
        }
        pick[i - 1] += 1;
        for j in i..n {
            pick[j] = pick[j - 1] + 1;
        }
    }
}

fn scenario_program(problem: &UncertainProblem, s: &Multisample) -> AffineProgram {
    let domain = problem.domain().unwrap();
    AffineProgram {
        objective: problem.objective().to_vec(),
        rows: s
            .points
            .iter()
            .map(|q| problem.constraint().affine(q).unwrap())
            .collect(),
        lower: domain.lower.clone(),
        upper: domain.upper.clone(),
    }
}

#[test]
fn simplex_matches_vertex_enumeration() {
    let mut checked = 0;
    for n in 2..=3 {
        for &spread in &[0.0, 0.5, 1.5] {
            for seed in 0..6u64 {
                let p = uncertain_lp_problem(n, spread, seed).unwrap();
                let s = samples(&p, 4 + seed as usize, seed + 100);
                let program = scenario_program(&p, &s);
                let expected = vertex_optimum(&program).expect("origin is feasible");
                let LpOutcome::Optimal { x } = solve_lp(&program) else {
                    panic!("n={n} spread={spread} seed={seed}: not optimal");
                };
                let got: f64 = program.objective.iter().zip(&x).map(|(c, x)| c * x).sum();
                assert!(
                    (got - expected).abs() <= 1e-8 * (1.0 + expected.abs()),
                    "n={n} spread={spread} seed={seed}: {got} vs {expected}"
                );
                let out = solve_scenario(&p, &s).unwrap();
                assert_eq!(out.status, SolveStatus::Feasible);
                assert!((out.objective.unwrap() - expected).abs() <= 1e-8 * (1.0 + expected.abs()));
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 36);
}

#[test]
fn greedy_never_worse_than_keeping_everything() {
    for seed in 0..10u64 {
        let p = uncertain_lp_problem(2, 0.8, seed).unwrap();
        let s = samples(&p, 12, seed);
        let base = solve_scenario(&p, &s).unwrap().objective.unwrap();
        let mut previous = base;
        for r in 1..=4 {
            let out = solve_with_discarding(&p, &s, r, DiscardMode::Greedy).unwrap();
            let v = out.objective.unwrap();
            assert!(v <= previous + 1e-12, "seed {seed} r {r}: {v} > {previous}");
            assert_eq!(out.discarded.len(), r);
            previous = v;
        }
    }
}

#[test]
fn greedy_is_bounded_by_the_exhaustive_optimum() {
    for seed in 0..8u64 {
        let p = uncertain_lp_problem(2, 1.0, seed).unwrap();
        let s = samples(&p, 9, seed + 7);
        for r in 1..=2 {
            let greedy = solve_with_discarding(&p, &s, r, DiscardMode::Greedy)
                .unwrap()
                .objective
                .unwrap();
            let best = exhaustive_discard(&p, &s, r);
            assert!(
                best <= greedy + 1e-9,
                "exhaustive {best} beat by greedy {greedy}"
            );
        }
    }
}

#[test]
fn prefix_discarding_solves_the_leading_samples() {
    let p = uncertain_lp_problem(3, 0.5, 4).unwrap();
    let s = samples(&p, 10, 2);
    let out = solve_with_discarding(&p, &s, 3, DiscardMode::Prefix).unwrap();
    assert_eq!(out.discarded, vec![7, 8, 9]);
    let head = solve_scenario(&p, &subset(&s, &(0..7).collect::<Vec<_>>())).unwrap();
    assert_eq!(out.objective, head.objective);
}

#[test]
fn toy_solution_ignores_sample_order() {
    let p = toy_max_problem();
    let s = samples(&p, 40, 9);
    let forward = solve_scenario(&p, &s).unwrap();
    let reversed: Vec<usize> = (0..s.len()).rev().collect();
    let backward = solve_scenario(&p, &subset(&s, &reversed)).unwrap();
    assert_eq!(forward.theta, backward.theta);

    let max = s.points.iter().map(|q| q[0]).fold(0.0, f64::max);
    assert_eq!(forward.theta.unwrap()[0], max);

    for r in 1..=3 {
        let a = solve_with_discarding(&p, &s, r, DiscardMode::Greedy).unwrap();
        let b = solve_with_discarding(&p, &subset(&s, &reversed), r, DiscardMode::Greedy).unwrap();
        assert_eq!(a.theta, b.theta, "r={r}");
    }
}

#[test]
fn toy_greedy_removes_the_largest_samples() {
    let p = toy_max_problem();
    let s = samples(&p, 30, 5);
    let mut sorted: Vec<f64> = s.points.iter().map(|q| q[0]).collect();
    sorted.sort_by(f64::total_cmp);
    for r in 0..4 {
        let out = solve_with_discarding(&p, &s, r, DiscardMode::Greedy).unwrap();
        assert_eq!(out.theta.unwrap()[0], sorted[sorted.len() - 1 - r]);
    }
}

#[test]
fn active_set_is_tight() {
    let p = uncertain_lp_problem(3, 0.7, 1).unwrap();
    let s = samples(&p, 15, 3);
    let out = solve_scenario(&p, &s).unwrap();
    let theta = out.theta.unwrap();
    for &i in &out.active_set {
        let slack = p.constraint().eval(&theta, &s.points[i]).unwrap();
        assert!(slack.abs() < 1e-7, "sample {i} slack {slack}");
    }
}
