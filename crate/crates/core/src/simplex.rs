//! A small dense-tableau simplex solver.
//!
//! Solves `maximize c·x subject to A_ub x <= b_ub, A_eq x = b_eq`, with all
//! `x >= 0` or all `x` free (unrestricted in sign). Free variables are split
//! as `x = x⁺ - x⁻`; the problem is solved in two phases (an auxiliary problem
//! finds a feasible basis, then the real objective is optimised), with
//! Bland's smallest-index rule in both phases so that degenerate pivots
//! cannot cycle.
//!
//! The instances this crate feeds it have a few dozen rows and columns, so a
//! dense `Vec<Vec<f64>>` tableau is the simplest correct choice.

/// Pivot and feasibility tolerance.
pub const TOLERANCE: f64 = 1e-9;

/// Hard limit on pivots per phase (Bland's rule terminates, this only guards
/// against numerical trouble).
const MAX_PIVOTS: usize = 50_000;

/// A linear program.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    /// `true`: every variable is `>= 0`; `false`: every variable is free.
    pub nonnegative: bool,
    /// Objective to maximise.
    pub objective: Vec<f64>,
    /// Rows of `A_ub x <= b_ub`.
    pub ub_rows: Vec<Vec<f64>>,
    pub ub_rhs: Vec<f64>,
    /// Rows of `A_eq x = b_eq`.
    pub eq_rows: Vec<Vec<f64>>,
    pub eq_rhs: Vec<f64>,
}

/// Outcome of [`LinearProgram::solve`].
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    /// An optimal vertex and its objective value.
    Optimal { x: Vec<f64>, value: f64 },
    /// No point satisfies the constraints; the phase-one optimum is the
    /// smallest total violation found.
    Infeasible { violation: f64 },
    /// The objective increases without bound along a feasible ray.
    Unbounded,
    /// The pivot limit was hit.
    IterationLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sense {
    Le,
    Ge,
    Eq,
}

struct Tableau {
    /// `rows x (cols + 1)`; the last column is the right-hand side.
    a: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.a[row][col];
        for v in self.a[row].iter_mut() {
            *v /= piv;
        }
        let pivot_row = self.a[row].clone();
        for (r, line) in self.a.iter_mut().enumerate() {
            if r == row {
                continue;
            }
            let f = line[col];
            if f != 0.0 {
                for (v, p) in line.iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Reduced cost of column `j` for cost vector `cost` (to maximise).
    fn reduced(&self, cost: &[f64], j: usize) -> f64 {
        let z: f64 = self
            .basis
            .iter()
            .enumerate()
            .map(|(r, &b)| cost[b] * self.a[r][j])
            .sum();
        cost[j] - z
    }

    /// Maximises `cost · x` over the current basis using Bland's rule, only
    /// letting columns in `allowed` enter.
    fn optimise(&mut self, cost: &[f64], allowed: &[bool]) -> Result<(), Outcome> {
        for _ in 0..MAX_PIVOTS {
            let entering = (0..self.cols).find(|&j| allowed[j] && self.reduced(cost, j) > TOLERANCE);
            let Some(col) = entering else {
                return Ok(());
            };
            let rhs = self.cols;
            let mut best: Option<(usize, f64)> = None;
            for r in 0..self.a.len() {
                let coef = self.a[r][col];
                if coef > TOLERANCE {
                    let ratio = self.a[r][rhs] / coef;
                    best = match best {
                        None => Some((r, ratio)),
                        Some((br, bv)) => {
                            if ratio < bv - TOLERANCE || (ratio <= bv + TOLERANCE && self.basis[r] < self.basis[br]) {
                                Some((r, ratio))
                            } else {
                                Some((br, bv))
                            }
                        }
                    };
                }
            }
            match best {
                None => return Err(Outcome::Unbounded),
                Some((row, _)) => self.pivot(row, col),
            }
        }
        Err(Outcome::IterationLimit)
    }

    fn value(&self, cost: &[f64]) -> f64 {
        self.basis
            .iter()
            .enumerate()
            .map(|(r, &b)| cost[b] * self.a[r][self.cols])
            .sum()
    }
}

impl LinearProgram {
    /// Number of (free) variables.
    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    /// Largest violation of any constraint at `x` (0 when feasible).
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let sign = if self.nonnegative {
            x.iter().map(|v| (-v).max(0.0)).fold(0.0, f64::max)
        } else {
            0.0
        };
        let dot = |row: &[f64]| row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        let ub = self
            .ub_rows
            .iter()
            .zip(&self.ub_rhs)
            .map(|(r, b)| (dot(r) - b).max(0.0));
        let eq = self.eq_rows.iter().zip(&self.eq_rhs).map(|(r, b)| (dot(r) - b).abs());
        ub.chain(eq).fold(sign, f64::max)
    }

    /// Objective value at `x`.
    pub fn value_at(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Solves the program.
    pub fn solve(&self) -> Outcome {
        let n = self.num_vars();
        let mut rows: Vec<(Vec<f64>, f64, Sense)> = Vec::new();
        for (r, &b) in self.ub_rows.iter().zip(&self.ub_rhs) {
            rows.push((r.clone(), b, Sense::Le));
        }
        for (r, &b) in self.eq_rows.iter().zip(&self.eq_rhs) {
            rows.push((r.clone(), b, Sense::Eq));
        }
        // normalise to non-negative right-hand sides
        for (r, b, s) in rows.iter_mut() {
            if *b < 0.0 {
                r.iter_mut().for_each(|v| *v = -*v);
                *b = -*b;
                *s = match *s {
                    Sense::Le => Sense::Ge,
                    Sense::Ge => Sense::Le,
                    Sense::Eq => Sense::Eq,
                };
            }
        }
        let m = rows.len();
        let slack_count = rows.iter().filter(|r| r.2 != Sense::Eq).count();
        let art_count = rows.iter().filter(|r| r.2 != Sense::Le).count();
        // columns: x⁺ (n), x⁻ (n, only for free variables), slacks, artificials
        let split = if self.nonnegative { 0 } else { n };
        let first_slack = n + split;
        let first_art = first_slack + slack_count;
        let cols = first_art + art_count;
        let mut a = vec![vec![0.0; cols + 1]; m];
        let mut basis = vec![0; m];
        let (mut s_idx, mut a_idx) = (first_slack, first_art);
        for (i, (row, b, sense)) in rows.iter().enumerate() {
            for j in 0..n {
                a[i][j] = row[j];
                if split > 0 {
                    a[i][n + j] = -row[j];
                }
            }
            a[i][cols] = *b;
            match sense {
                Sense::Le => {
                    a[i][s_idx] = 1.0;
                    basis[i] = s_idx;
                    s_idx += 1;
                }
                Sense::Ge => {
                    a[i][s_idx] = -1.0;
                    s_idx += 1;
                    a[i][a_idx] = 1.0;
                    basis[i] = a_idx;
                    a_idx += 1;
                }
                Sense::Eq => {
                    a[i][a_idx] = 1.0;
                    basis[i] = a_idx;
                    a_idx += 1;
                }
            }
        }
        let mut t = Tableau { a, basis, cols };

        // phase one: maximise -(sum of artificials)
        let mut cost1 = vec![0.0; cols];
        cost1[first_art..].iter_mut().for_each(|c| *c = -1.0);
        let all = vec![true; cols];
        if let Err(e) = t.optimise(&cost1, &all) {
            return e;
        }
        let violation = -t.value(&cost1);
        if violation > TOLERANCE * (1.0 + m as f64) {
            return Outcome::Infeasible { violation };
        }
        // drive zero-level artificials out of the basis; drop redundant rows
        let mut r = 0;
        while r < t.a.len() {
            if t.basis[r] >= first_art {
                // largest available pivot keeps the tableau well conditioned
                let best = (0..first_art)
                    .filter(|&j| t.a[r][j].abs() > TOLERANCE)
                    .max_by(|&i, &j| t.a[r][i].abs().total_cmp(&t.a[r][j].abs()));
                match best {
                    Some(j) => {
                        t.pivot(r, j);
                        r += 1;
                    }
                    None => {
                        t.a.remove(r);
                        t.basis.remove(r);
                    }
                }
            } else {
                r += 1;
            }
        }

        // phase two
        let mut cost2 = vec![0.0; cols];
        for j in 0..n {
            cost2[j] = self.objective[j];
            if split > 0 {
                cost2[n + j] = -self.objective[j];
            }
        }
        let allowed: Vec<bool> = (0..cols).map(|j| j < first_art).collect();
        if let Err(e) = t.optimise(&cost2, &allowed) {
            return e;
        }
        let mut x = vec![0.0; n];
        for (row, &b) in t.basis.iter().enumerate() {
            let v = t.a[row][cols];
            if b < n {
                x[b] += v;
            } else if b < n + split {
                x[b - n] -= v;
            }
        }
        let value = self.value_at(&x);
        Outcome::Optimal { x, value }
    }
}
