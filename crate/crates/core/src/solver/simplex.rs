//! Dense revised simplex with Bland's rule for
//! `min c'x s.t. G x <= h, lower <= x <= upper`.
//!
//! The program is solved through its dual
//! `min h'y s.t. G'y = -c, y >= 0`, which has only `n` equality rows no
//! matter how many sampled constraints there are. The primal point is the
//! vector of simplex multipliers of the optimal dual basis. The box rows
//! make the dual always feasible, so an unbounded dual certifies an
//! infeasible primal.

use crate::problem::{dot, AffineRow};

/// An LP with a linear objective, affine inequality rows and a box.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineProgram {
    pub objective: Vec<f64>,
    /// Each row encodes `coeffs . x <= rhs`.
    pub rows: Vec<AffineRow>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64> },
    Infeasible,
    Failure(String),
}

const PIVOT_TOL: f64 = 1e-11;

/// Gauss-Jordan inverse with partial pivoting. `None` when singular.
fn invert(mut a: Vec<Vec<f64>>) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col];
        for j in 0..n {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for i in 0..n {
            if i != col {
                let f = a[i][col];
                if f != 0.0 {
                    for j in 0..n {
                        a[i][j] -= f * a[col][j];
                        inv[i][j] -= f * inv[col][j];
                    }
                }
            }
        }
    }
    Some(inv)
}

fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| dot(row, v)).collect()
}

fn mat_t_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    let n = m.len();
    (0..n)
        .map(|j| (0..n).map(|i| m[i][j] * v[i]).sum())
        .collect()
}

/// Standard-form problem `min cost'y s.t. A y = rhs, y >= 0` where the
/// columns of `A` are `columns[j]` followed by one signed artificial per row.
struct DualForm<'a> {
    columns: &'a [Vec<f64>],
    costs: &'a [f64],
    rhs: Vec<f64>,
    signs: Vec<f64>,
    n: usize,
}

enum Phase {
    Optimal,
    Unbounded,
}

struct Basis {
    vars: Vec<usize>,
    inv: Vec<Vec<f64>>,
}

impl DualForm<'_> {
    fn m(&self) -> usize {
        self.columns.len()
    }

    fn column(&self, j: usize) -> Vec<f64> {
        if j < self.m() {
            self.columns[j].clone()
        } else {
            let i = j - self.m();
            let mut e = vec![0.0; self.n];
            e[i] = self.signs[i];
            e
        }
    }

    /// `v . A_j` without materializing the column.
    fn col_dot(&self, v: &[f64], j: usize) -> f64 {
        if j < self.m() {
            dot(v, &self.columns[j])
        } else {
            let i = j - self.m();
            v[i] * self.signs[i]
        }
    }

    fn refactor(&self, vars: Vec<usize>) -> Option<Basis> {
        // rows of B are indexed by constraint, columns by basis position
        let cols: Vec<Vec<f64>> = vars.iter().map(|&j| self.column(j)).collect();
        let b: Vec<Vec<f64>> = (0..self.n)
            .map(|i| cols.iter().map(|c| c[i]).collect())
            .collect();
        invert(b).map(|inv| Basis { vars, inv })
    }

    /// Runs Bland-rule simplex iterations until optimality or unboundedness.
    fn iterate(
        &self,
        basis: &mut Basis,
        cost: &dyn Fn(usize) -> f64,
        allow_artificial: bool,
        budget: &mut usize,
    ) -> Result<Phase, String> {
        let total = if allow_artificial {
            self.m() + self.n
        } else {
            self.m()
        };
        let cost_scale = 1.0 + self.costs.iter().fold(0.0f64, |a, c| a.max(c.abs()));
        let d_tol = 1e-10 * cost_scale;
        loop {
            if *budget == 0 {
                return Err("simplex iteration limit reached".into());
            }
            *budget -= 1;
            let x_b = mat_vec(&basis.inv, &self.rhs);
            let c_b: Vec<f64> = basis.vars.iter().map(|&j| cost(j)).collect();
            let pi = mat_t_vec(&basis.inv, &c_b);

            let entering = (0..total)
                .find(|j| !basis.vars.contains(j) && cost(*j) - self.col_dot(&pi, *j) < -d_tol);
            let Some(q) = entering else {
                return Ok(Phase::Optimal);
            };

            let dir = mat_vec(&basis.inv, &self.column(q));
            let mut leave: Option<(usize, f64)> = None;
            for (i, &d) in dir.iter().enumerate() {
                if d <= PIVOT_TOL {
                    continue;
                }
                let ratio = x_b[i].max(0.0) / d;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((best, r)) => {
                        let tie = (ratio - r).abs() <= 1e-12 * (1.0 + r.abs());
                        if ratio < r && !tie || tie && basis.vars[i] < basis.vars[best] {
                            Some((i, ratio))
                        } else {
                            Some((best, r))
                        }
                    }
                };
            }
            let Some((row, _)) = leave else {
                return Ok(Phase::Unbounded);
            };
            let mut vars = basis.vars.clone();
            vars[row] = q;
            *basis = self
                .refactor(vars)
                .ok_or_else(|| "singular basis after pivot".to_string())?;
        }
    }
}

/// Returns the optimal primal point, `None` when the primal is infeasible. The second element reports dual degeneracy, i.e.
/// whether the primal optimum may fail to be unique.
fn solve_core(objective: &[f64], rows: &[AffineRow]) -> Result<Option<(Vec<f64>, bool)>, String> {
    let n = objective.len();
    let columns: Vec<Vec<f64>> = rows.iter().map(|r| r.coeffs.clone()).collect();
    let costs: Vec<f64> = rows.iter().map(|r| r.rhs).collect();
    let rhs: Vec<f64> = objective.iter().map(|c| -c).collect();
    let signs: Vec<f64> = rhs
        .iter()
        .map(|v| if *v < 0.0 { -1.0 } else { 1.0 })
        .collect();
    let form = DualForm {
        columns: &columns,
        costs: &costs,
        rhs,
        signs,
        n,
    };
    let m = form.m();
    let mut budget = 10_000 + 50 * (m + n);

    // Phase 1: drive the artificials to zero.
    let mut basis = form
        .refactor((m..m + n).collect())
        .ok_or_else(|| "singular initial basis".to_string())?;
    let phase1_cost = |j: usize| if j >= m { 1.0 } else { 0.0 };
    form.iterate(&mut basis, &phase1_cost, true, &mut budget)?;
    let x_b = mat_vec(&basis.inv, &form.rhs);
    let rhs_scale = 1.0 + form.rhs.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let residual: f64 = basis
        .vars
        .iter()
        .zip(&x_b)
        .filter(|(j, _)| **j >= m)
        .map(|(_, v)| v.abs())
        .sum();
    if residual > 1e-9 * rhs_scale {
        return Err("dual infeasible: program unbounded below".into());
    }
    // Pivot leftover artificials out at zero level.
    for pos in 0..n {
        if basis.vars[pos] < m {
            continue;
        }
        let replacement = (0..m)
            .find(|j| !basis.vars.contains(j) && form.col_dot(&basis.inv[pos], *j).abs() > 1e-9);
        let Some(j) = replacement else {
            return Err("rank-deficient constraint system".into());
        };
        let mut vars = basis.vars.clone();
        vars[pos] = j;
        basis = form
            .refactor(vars)
            .ok_or_else(|| "singular basis while removing artificials".to_string())?;
    }

    // Phase 2.
    let phase2_cost = |j: usize| costs[j];
    match form.iterate(&mut basis, &phase2_cost, false, &mut budget)? {
        Phase::Unbounded => Ok(None),
        Phase::Optimal => {
            let c_b: Vec<f64> = basis.vars.iter().map(|&j| costs[j]).collect();
            let x = mat_t_vec(&basis.inv, &c_b);
            let y_b = mat_vec(&basis.inv, &form.rhs);
            let degenerate = y_b.iter().any(|v| v.abs() <= 1e-9 * rhs_scale);
            Ok(Some((x, degenerate)))
        }
    }
}

fn box_rows(lower: &[f64], upper: &[f64]) -> Vec<AffineRow> {
    let n = lower.len();
    let unit = |i: usize, s: f64| (0..n).map(|j| if i == j { s } else { 0.0 }).collect();
    (0..n)
        .flat_map(|i| {
            [
                AffineRow {
                    coeffs: unit(i, 1.0),
                    rhs: upper[i],
                },
                AffineRow {
                    coeffs: unit(i, -1.0),
                    rhs: -lower[i],
                },
            ]
        })
        .collect()
}

/// Solves the program and returns the lexicographically smallest optimizer.
///
/// When the optimum is not certified unique, the coordinates are fixed one
/// at a time: minimize `x_0` over the optimal face, then `x_1`, and so on.
pub fn solve_lp(program: &AffineProgram) -> LpOutcome {
    let n = program.objective.len();
    if program.lower.len() != n || program.upper.len() != n {
        return LpOutcome::Failure("box dimension differs from objective".into());
    }
    if program.rows.iter().any(|r| r.coeffs.len() != n) {
        return LpOutcome::Failure("constraint row dimension differs from objective".into());
    }
    let mut rows = box_rows(&program.lower, &program.upper);
    rows.extend(program.rows.iter().cloned());

    let (x, degenerate) = match solve_core(&program.objective, &rows) {
        Ok(Some(sol)) => sol,
        Ok(None) => return LpOutcome::Infeasible,
        Err(e) => return LpOutcome::Failure(e),
    };
    if !degenerate {
        return LpOutcome::Optimal { x };
    }

    let best = dot(&program.objective, &x);
    let slack = |v: f64| 1e-9 * (1.0 + v.abs());
    rows.push(AffineRow {
        coeffs: program.objective.clone(),
        rhs: best + slack(best),
    });
    let mut lex = x.clone();
    for i in 0..n {
        let mut unit = vec![0.0; n];
        unit[i] = 1.0;
        match solve_core(&unit, &rows) {
            Ok(Some((xi, _))) => {
                lex = xi;
                let v = lex[i];
                rows.push(AffineRow {
                    coeffs: unit,
                    rhs: v + slack(v),
                });
            }
            // The optimal face is nonempty; a failure here is round-off, so
            // fall back to the plain optimizer.
            _ => return LpOutcome::Optimal { x },
        }
    }
    LpOutcome::Optimal { x: lex }
}
