//! Exact linear programming over rationals.
//!
//! A small dense two-phase simplex with Bland's rule, pivoting in exact
//! rational arithmetic. Infeasible/feasible verdicts are therefore
//! certificates: phase 1 terminates (Bland's rule excludes cycling) and its
//! optimum is compared to zero exactly.
//!
//! Problems are given in equality standard form: `A x = b`, `x >= 0`. This is
//! all the garbling decision procedures need; they encode kernel row sums and
//! per-state matching constraints as equalities.

use num_traits::{Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    /// Optimal objective value and an optimal point.
    Optimal(Rational, Vec<Rational>),
    Infeasible,
    Unbounded,
}

struct Tableau {
    /// rows x (cols + 1); last column is the right-hand side.
    rows: Vec<Vec<Rational>>,
    /// reduced cost row, one entry per column plus the (negated) objective.
    cost: Vec<Rational>,
    basis: Vec<usize>,
    cols: usize,
    /// consecutive pivots without objective progress
    degenerate_streak: u32,
}

/// Degenerate pivots tolerated under Dantzig's rule before switching to
/// Bland's rule. The switch guarantees termination; the fast rule does the
/// bulk of the work on the heavily degenerate feasibility systems the
/// garbling searches produce.
const BLAND_THRESHOLD: u32 = 24;

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let pivot = self.rows[row][col].clone();
        for entry in self.rows[row].iter_mut() {
            *entry /= &pivot;
        }
        for r in 0..self.rows.len() {
            if r == row || self.rows[r][col].is_zero() {
                continue;
            }
            let factor = self.rows[r][col].clone();
            for c in 0..=self.cols {
                let delta = &factor * &self.rows[row][c];
                self.rows[r][c] -= delta;
            }
        }
        if !self.cost[col].is_zero() {
            let factor = self.cost[col].clone();
            for c in 0..=self.cols {
                let delta = &factor * &self.rows[row][c];
                self.cost[c] -= delta;
            }
        }
        self.basis[row] = col;
    }

    /// One simplex step over the first `allowed` columns. Enters by the
    /// most-negative reduced cost, falling back to Bland's smallest-index
    /// rule once pivots stall, so the walk is fast in practice and provably
    /// cannot cycle. Leaving ties always break by smallest basis variable
    /// (part of Bland's rule). Returns false at optimality.
    fn step(&mut self, allowed: usize) -> Result<bool, ()> {
        let entering = if self.degenerate_streak >= BLAND_THRESHOLD {
            (0..allowed).find(|&c| self.cost[c].is_negative())
        } else {
            let mut best: Option<usize> = None;
            for c in 0..allowed {
                if self.cost[c].is_negative()
                    && best.is_none_or(|b| self.cost[c] < self.cost[b])
                {
                    best = Some(c);
                }
            }
            best
        };
        let entering = match entering {
            Some(c) => c,
            None => return Ok(false),
        };
        let mut leaving: Option<usize> = None;
        for r in 0..self.rows.len() {
            if !self.rows[r][entering].is_positive() {
                continue;
            }
            let better = match leaving {
                None => true,
                Some(best) => {
                    let ratio_r = &self.rows[r][self.cols] / &self.rows[r][entering];
                    let ratio_best = &self.rows[best][self.cols] / &self.rows[best][entering];
                    ratio_r < ratio_best
                        || (ratio_r == ratio_best && self.basis[r] < self.basis[best])
                }
            };
            if better {
                leaving = Some(r);
            }
        }
        match leaving {
            Some(r) => {
                let before = self.cost[self.cols].clone();
                self.pivot(r, entering);
                if self.cost[self.cols] == before {
                    self.degenerate_streak += 1;
                } else {
                    self.degenerate_streak = 0;
                }
                Ok(true)
            }
            None => Err(()), // unbounded in the entering direction
        }
    }

    fn solution(&self, n_vars: usize) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); n_vars];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < n_vars {
                x[b] = self.rows[r][self.cols].clone();
            }
        }
        x
    }
}

/// Minimizes `c · x` subject to `A x = b`, `x >= 0`.
pub fn minimize(c: &[Rational], a: &[Vec<Rational>], b: &[Rational]) -> LpOutcome {
    let n = c.len();
    let m = a.len();
    debug_assert!(a.iter().all(|row| row.len() == n));
    debug_assert_eq!(b.len(), m);

    // Phase 1: artificial variable per row, flipping rows so b >= 0.
    let cols = n + m;
    let mut rows = Vec::with_capacity(m);
    for (i, row) in a.iter().enumerate() {
        let flip = b[i].is_negative();
        let mut t = Vec::with_capacity(cols + 1);
        for value in row {
            t.push(if flip { -value.clone() } else { value.clone() });
        }
        for j in 0..m {
            t.push(if j == i {
                Rational::from_integer(1.into())
            } else {
                Rational::zero()
            });
        }
        t.push(if flip { -b[i].clone() } else { b[i].clone() });
        rows.push(t);
    }
    // Phase-1 reduced costs: minimize the artificial sum, which starts basic.
    let mut cost = vec![Rational::zero(); cols + 1];
    for row in &rows {
        for (j, entry) in row.iter().take(n).enumerate() {
            cost[j] -= entry;
        }
        cost[cols] -= &row[cols];
    }
    let mut tableau = Tableau {
        rows,
        cost,
        basis: (n..n + m).collect(),
        cols,
        degenerate_streak: 0,
    };
    loop {
        match tableau.step(cols) {
            Ok(true) => continue,
            Ok(false) => break,
            Err(()) => unreachable!("phase-1 objective is bounded below by 0"),
        }
    }
    let phase1_value = -tableau.cost[cols].clone();
    if !phase1_value.is_zero() {
        return LpOutcome::Infeasible;
    }

    // Drive remaining artificial variables out of the basis; a row where
    // that is impossible is redundant and can be zeroed.
    for r in 0..tableau.rows.len() {
        if tableau.basis[r] >= n {
            let pivot_col = (0..n).find(|&c| !tableau.rows[r][c].is_zero());
            if let Some(c) = pivot_col {
                tableau.pivot(r, c);
            }
        }
    }

    // Phase 2 on the original objective, artificial columns frozen.
    let mut cost = vec![Rational::zero(); cols + 1];
    cost[..n].clone_from_slice(c);
    for (r, &bvar) in tableau.basis.iter().enumerate() {
        if bvar < n && !cost[bvar].is_zero() {
            let factor = cost[bvar].clone();
            for (slot, entry) in cost.iter_mut().zip(&tableau.rows[r]) {
                let delta = &factor * entry;
                *slot -= delta;
            }
        }
    }
    // Freeze artificials so they never re-enter.
    for item in cost.iter_mut().take(cols).skip(n) {
        *item = Rational::zero();
    }
    tableau.cost = cost;
    tableau.degenerate_streak = 0;
    loop {
        // Entering restricted to structural columns; artificials are frozen.
        match tableau.step(n) {
            Ok(true) => continue,
            Ok(false) => break,
            Err(()) => return LpOutcome::Unbounded,
        }
    }

    let x = tableau.solution(n);
    let value = c
        .iter()
        .zip(&x)
        .map(|(ci, xi)| ci * xi)
        .fold(Rational::zero(), |acc, t| acc + t);
    LpOutcome::Optimal(value, x)
}

/// A point satisfying `A x = b`, `x >= 0`, when one exists.
pub fn feasible_point(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.first().map_or(0, |row| row.len());
    let c = vec![Rational::zero(); n];
    match minimize(&c, a, b) {
        LpOutcome::Optimal(_, x) => Some(x),
        LpOutcome::Infeasible => None,
        LpOutcome::Unbounded => unreachable!("zero objective cannot be unbounded"),
    }
}
