//! The linear program behind the symmetric degree-3 lower bound on
//! `W(3, Z_p, D/p)`, and the density threshold at which it turns positive.
//!
//! A symmetric degree-3 certificate is determined by a circulant quadratic
//! form on the `p - 1` powers of a primitive root `r`, with first row
//! `[u_0, u_1, ..., u_h, ..., u_1]` (`h = (p-1)/2`). The form must be
//! positive semidefinite — equivalently its circulant eigenvalues
//!
//! ```text
//! λ_j(u) = u_0 + sum_{l=1}^{h-1} 2 u_l cos(2 pi l j / (p-1)) + u_h cos(pi j),   j = 0..=h
//! ```
//!
//! are non-negative — and the certificate must reproduce the progression
//! polynomial on every orbit of distinct triples (coefficient 1 on the
//! progression orbit, 0 elsewhere). Among such `u` the best bound is
//!
//! ```text
//! max  [ ((D-1)/(p-1)) u_+ - u_0 ] · D(D-1),      u_+ = u_0 + 2 sum_{l<h} u_l + u_h.
//! ```
//!
//! The orbit equality rows are derived by expanding
//! `sum_a X_a sum_{k,m} u_{|k-m|} X_{a+r^k} X_{a+r^m}` symbolically for each
//! basis vector `u = e_l` and reading off ω-coordinates. They are
//! cross-checked against a direct counting matrix `V` (see
//! [`LpInstance::literal_v`]); any disagreement is a hard error.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modgroup::{is_prime, OrbitTable, PrimeModulus};
use crate::qfield::{rat, QuadExt, Rational};
use crate::simplex::{LinearProgram, Outcome, TOLERANCE};
use crate::sympoly::{omega_of, Monomial, SparsePoly};

/// Bound above which the LP value counts as positive.
pub const POSITIVITY_TOLERANCE: f64 = 1e-6;

/// The `D`-independent part of the LP at one prime.
#[derive(Debug, Clone, Serialize)]
pub struct LpInstance {
    pub p: PrimeModulus,
    /// The smallest primitive root.
    pub r: u32,
    /// `(p+1)/2`: the variables `u_0 ..= u_h`.
    pub num_vars: usize,
    /// Row `j` evaluates `λ_j(u)`; the constraint is `row · u >= 0`.
    pub ineq_rows: Vec<Vec<f64>>,
    /// One row per orbit of distinct triples, over `u_0 ..= u_h`.
    pub eq_rows: Vec<Vec<f64>>,
    /// 1 on the progression orbit, 0 elsewhere.
    pub eq_rhs: Vec<f64>,
    /// Counting matrix over the full symmetric vector `[u_0, ..., u_{p-2}]`:
    /// row `i` (for exponents `i = 1..=p-2`) counts, over the three choices
    /// of centre `c` in `{0, 1, r^i}`, the `t` and column `j` with
    /// `{0, 1, r^i} - c = {0, r^t, r^(j+t)}`.
    pub literal_v: Vec<Vec<u32>>,
    /// Right-hand side marking only `r^i = 2`.
    pub literal_v_rhs: Vec<u32>,
    /// Whether `literal_v · u = literal_v_rhs` is solvable at all; it is not,
    /// because `{0, 1, r^i}` is a progression for `r^i` in `{2, -1, 1/2}`,
    /// and rows from one orbit must share a right-hand side.
    pub literal_v_consistent: bool,
}

/// Solver status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    NumericalFailure,
}

/// Result of one LP solve.
#[derive(Debug, Clone, Serialize)]
pub struct LpResult {
    pub p: u32,
    #[serde(rename = "D")]
    pub d: u32,
    /// Lower bound on `W(3, Z_p, D/p)` (the optimal value).
    pub bound: f64,
    /// Optimal `u_0 ..= u_h`.
    pub u_opt: Vec<f64>,
    pub status: LpStatus,
    /// Largest constraint violation at `u_opt`.
    pub residuals: f64,
    /// Explanation when the status is not optimal.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// One row of the threshold curve.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ThresholdRow {
    pub p: u32,
    #[serde(rename = "Dstar")]
    pub dstar: u32,
    /// `D* / p`.
    pub delta_star: f64,
    /// `ceil((p+3)/4)`.
    pub lower_bracket: u32,
    /// `(p+3)/2`.
    pub upper_bracket: u32,
}

/// `|k - m|` folded into `0..=h` on the cycle of length `p - 1`.
fn fold(diff: i64, p: u32) -> usize {
    let n = (p - 1) as i64;
    let d = diff.rem_euclid(n);
    d.min(n - d) as usize
}

/// Rank of a rational matrix.
fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, piv);
        let lead = m[r][c].clone();
        let pivot_row: Vec<Rational> = m[r].iter().map(|x| x / &lead).collect();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        m[r] = pivot_row;
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

fn augment(rows: &[Vec<Rational>], rhs: &[Rational]) -> Vec<Vec<Rational>> {
    rows.iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut r = r.clone();
            r.push(b.clone());
            r
        })
        .collect()
}

/// Orbit-derived equality system: `(rows, rhs)` over `u_0 ..= u_h`.
fn orbit_rows(p: PrimeModulus, table: &OrbitTable) -> Result<(Vec<Vec<Rational>>, Vec<Rational>)> {
    let n = p.get();
    let h = p.half() as usize;
    let pow = p.powers();
    let one = QuadExt::one();
    let mut columns = Vec::with_capacity(h + 1);
    for l in 0..=h {
        let mut poly = SparsePoly::zero(p);
        for a in 0..n {
            for k in 0..n - 1 {
                for m in 0..n - 1 {
                    if fold(k as i64 - m as i64, n) != l {
                        continue;
                    }
                    let x = (a + pow[k as usize]) % n;
                    let y = (a + pow[m as usize]) % n;
                    poly.add_term(Monomial::new(&[a, x, y])?, &one)?;
                }
            }
        }
        let omega = omega_of(&poly, table)?;
        let col: Vec<Rational> = omega
            .a111
            .iter()
            .map(|c| {
                c.to_rational().ok_or_else(|| Error::ConstraintMismatch {
                    p: n as u64,
                    detail: format!("irrational orbit coefficient {c}"),
                })
            })
            .collect::<Result<_>>()?;
        columns.push(col);
    }
    let orbits = table.num_orbits();
    let rows = (0..orbits)
        .map(|t| columns.iter().map(|c| c[t].clone()).collect())
        .collect();
    let rhs = (0..orbits)
        .map(|t| if t == table.ap_orbit() { rat(1) } else { rat(0) })
        .collect();
    Ok((rows, rhs))
}

/// The counting matrix `V` over `[u_0, ..., u_{p-2}]` and the literal `v`.
fn literal_system(p: PrimeModulus) -> (Vec<Vec<u32>>, Vec<u32>, Vec<u32>) {
    let n = p.get();
    let pow = p.powers();
    let logs = p.logs();
    let two_inv = p.inv(2);
    let mut v_mat = Vec::new();
    let mut v_literal = Vec::new();
    let mut v_orbit = Vec::new();
    for &x in &pow[1..] {
        let triple = [0, 1, x];
        let mut row = vec![0u32; (n - 1) as usize];
        for c in triple {
            let others: Vec<u32> = triple.iter().filter(|&&y| y != c).map(|&y| (y + n - c) % n).collect();
            let (la, lb) = (logs[others[0] as usize] as i64, logs[others[1] as usize] as i64);
            let order = (n - 1) as i64;
            row[(lb - la).rem_euclid(order) as usize] += 1;
            row[(la - lb).rem_euclid(order) as usize] += 1;
        }
        v_mat.push(row);
        v_literal.push(u32::from(x == 2));
        v_orbit.push(u32::from(x == 2 || x == n - 1 || x == two_inv));
    }
    (v_mat, v_literal, v_orbit)
}

fn fold_columns(p: PrimeModulus, row: &[u32]) -> Vec<Rational> {
    let h = p.half() as usize;
    let mut out = vec![Rational::zero(); h + 1];
    for (j, &c) in row.iter().enumerate() {
        out[fold(j as i64, p.get())] += rat(c as i64);
    }
    out
}

/// Builds the constraints at `p`, checking the two equality systems agree.
pub fn build_constraints(p: u64) -> Result<LpInstance> {
    let p = PrimeModulus::new(p)?;
    let n = p.get();
    let h = p.half() as usize;
    let table = OrbitTable::new(p);
    let (rows, rhs) = orbit_rows(p, &table)?;
    let (v_mat, v_literal, v_orbit) = literal_system(p);

    let folded: Vec<Vec<Rational>> = v_mat.iter().map(|r| fold_columns(p, r)).collect();
    let to_q = |v: &[u32]| v.iter().map(|&x| rat(x as i64)).collect::<Vec<_>>();
    let rank_o = rank(&rows);
    let rank_v = rank(&folded);
    let rank_both = rank(&[rows.clone(), folded.clone()].concat());
    let aug_o = augment(&rows, &rhs);
    let aug_v = augment(&folded, &to_q(&v_orbit));
    let rank_aug_o = rank(&aug_o);
    let rank_aug_v = rank(&aug_v);
    let rank_aug_both = rank(&[aug_o, aug_v].concat());
    if !(rank_o == rank_v && rank_v == rank_both && rank_aug_o == rank_aug_v && rank_aug_v == rank_aug_both) {
        return Err(Error::ConstraintMismatch {
            p: n as u64,
            detail: format!(
                "ranks orbit={rank_o} counting={rank_v} stacked={rank_both}; \
                 augmented orbit={rank_aug_o} counting={rank_aug_v} stacked={rank_aug_both}"
            ),
        });
    }
    let literal_v_consistent = rank(&augment(&folded, &to_q(&v_literal))) == rank_v;

    let order = (n - 1) as f64;
    let ineq_rows = (0..=h)
        .map(|j| {
            (0..=h)
                .map(|l| {
                    if l == 0 {
                        1.0
                    } else if l == h {
                        if j % 2 == 0 {
                            1.0
                        } else {
                            -1.0
                        }
                    } else {
                        2.0 * (2.0 * std::f64::consts::PI * (l * j) as f64 / order).cos()
                    }
                })
                .collect()
        })
        .collect();
    let to_f = |x: &Rational| x.to_f64().expect("small rational");
    Ok(LpInstance {
        p,
        r: p.primitive_root(),
        num_vars: h + 1,
        ineq_rows,
        eq_rows: rows.iter().map(|r| r.iter().map(to_f).collect()).collect(),
        eq_rhs: rhs.iter().map(to_f).collect(),
        literal_v: v_mat,
        literal_v_rhs: v_literal,
        literal_v_consistent,
    })
}

/// [`build_constraints`], memoised per prime.
pub fn instance(p: u64) -> Result<Arc<LpInstance>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<LpInstance>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(inst) = cache.lock().expect("cache poisoned").get(&p) {
        return Ok(Arc::clone(inst));
    }
    let inst = Arc::new(build_constraints(p)?);
    cache
        .lock()
        .expect("cache poisoned")
        .entry(p)
        .or_insert_with(|| Arc::clone(&inst));
    Ok(inst)
}

impl LpInstance {
    /// Objective coefficients over `u_0 ..= u_h` for cardinality `d`.
    pub fn objective(&self, d: u32) -> Vec<f64> {
        let p = self.p.get() as f64;
        let d = d as f64;
        let scale = d * (d - 1.0);
        let w = (d - 1.0) / (p - 1.0);
        let h = self.num_vars - 1;
        (0..=h)
            .map(|l| {
                let plus = if l == 0 || l == h { 1.0 } else { 2.0 };
                let own = if l == 0 { 1.0 } else { 0.0 };
                (w * plus - own) * scale
            })
            .collect()
    }

    /// `u_+ = u_0 + 2 sum u_l + u_h`.
    pub fn u_plus(&self, u: &[f64]) -> f64 {
        let h = self.num_vars - 1;
        u.iter()
            .enumerate()
            .map(|(l, x)| if l == 0 || l == h { *x } else { 2.0 * x })
            .sum()
    }

    /// The program over the original variables `u` (used for re-checking).
    fn program(&self, d: u32) -> LinearProgram {
        LinearProgram {
            nonnegative: false,
            objective: self.objective(d),
            ub_rows: self.ineq_rows.iter().map(|r| r.iter().map(|x| -x).collect()).collect(),
            ub_rhs: vec![0.0; self.ineq_rows.len()],
            eq_rows: self.eq_rows.clone(),
            eq_rhs: self.eq_rhs.clone(),
        }
    }

    /// `u = C λ / (p-1)`: the eigenvalue rows are their own inverse up to the
    /// factor `p - 1`.
    pub fn u_from_eigenvalues(&self, lambda: &[f64]) -> Vec<f64> {
        let n = (self.p.get() - 1) as f64;
        self.ineq_rows
            .iter()
            .map(|row| row.iter().zip(lambda).map(|(a, b)| a * b).sum::<f64>() / n)
            .collect()
    }

    /// The same program with the eigenvalues as variables. The inequality
    /// rows become plain sign constraints, leaving a standard-form program
    /// whose only rows are the orbit equalities; this is far better
    /// conditioned than splitting free `u` into positive and negative parts.
    fn eigen_program(&self, d: u32) -> LinearProgram {
        // row · u = row · C λ / (p-1)
        let through = |row: &[f64]| self.u_from_eigenvalues_row(row);
        LinearProgram {
            nonnegative: true,
            objective: through(&self.objective(d)),
            ub_rows: Vec::new(),
            ub_rhs: Vec::new(),
            eq_rows: self.eq_rows.iter().map(|r| through(r)).collect(),
            eq_rhs: self.eq_rhs.clone(),
        }
    }

    /// `row^T C / (p-1)`.
    fn u_from_eigenvalues_row(&self, row: &[f64]) -> Vec<f64> {
        let n = (self.p.get() - 1) as f64;
        (0..self.num_vars)
            .map(|j| row.iter().zip(&self.ineq_rows).map(|(a, c)| a * c[j]).sum::<f64>() / n)
            .collect()
    }
}

/// Solves the LP for a prebuilt instance.
pub fn solve_with(inst: &LpInstance, d: u32) -> Result<LpResult> {
    let p = inst.p.get();
    if d > p {
        return Err(Error::InvalidArgument(format!("D = {d} outside 0..={p}")));
    }
    let lp = inst.program(d);
    let mut result = LpResult {
        p,
        d,
        bound: f64::NAN,
        u_opt: Vec::new(),
        status: LpStatus::NumericalFailure,
        residuals: f64::NAN,
        detail: None,
    };
    match inst.eigen_program(d).solve() {
        Outcome::Optimal { x, .. } => {
            let u = inst.u_from_eigenvalues(&x);
            let residual = lp.max_violation(&u);
            result.residuals = residual;
            result.bound = lp.value_at(&u);
            result.u_opt = u;
            if residual <= TOLERANCE {
                result.status = LpStatus::Optimal;
            } else {
                result.detail = Some(format!("constraint violation {residual:e} at the reported optimum"));
            }
        }
        Outcome::Infeasible { violation } => {
            result.status = LpStatus::Infeasible;
            result.residuals = violation;
            result.detail = Some(format!("phase one ended with total violation {violation:e}"));
        }
        Outcome::Unbounded => {
            result.detail = Some("objective unbounded along a feasible ray".into());
        }
        Outcome::IterationLimit => {
            result.detail = Some("pivot limit reached".into());
        }
    }
    Ok(result)
}

/// Solves the LP at `(p, d)`.
pub fn solve_lp(p: u64, d: u32) -> Result<LpResult> {
    solve_with(&*instance(p)?, d)
}

/// Converts a non-optimal result into the matching error.
pub fn require_optimal(r: LpResult) -> Result<LpResult> {
    let detail = r.detail.clone().unwrap_or_default();
    match r.status {
        LpStatus::Optimal => Ok(r),
        LpStatus::Infeasible => Err(Error::Infeasible {
            p: r.p as u64,
            d: r.d as u64,
            detail,
        }),
        LpStatus::NumericalFailure => Err(Error::NumericalFailure {
            p: r.p as u64,
            d: r.d as u64,
            detail,
        }),
    }
}

/// `(ceil((p+3)/4), (p+3)/2)`.
pub fn bracket(p: u32) -> (u32, u32) {
    ((p + 3).div_ceil(4), (p + 3) / 2)
}

/// Smallest `D` whose LP bound exceeds [`POSITIVITY_TOLERANCE`].
pub fn threshold(p: u64) -> Result<u32> {
    let inst = instance(p)?;
    let n = inst.p.get();
    let (lower, upper) = bracket(n);
    for d in 0..=n {
        let r = require_optimal(solve_with(&inst, d)?)?;
        if r.bound > POSITIVITY_TOLERANCE {
            if d < lower || d > upper {
                return Err(Error::ThresholdOutOfBracket {
                    p: n as u64,
                    dstar: d as u64,
                    lower: lower as u64,
                    upper: upper as u64,
                });
            }
            return Ok(d);
        }
    }
    Err(Error::ThresholdOutOfBracket {
        p: n as u64,
        dstar: n as u64 + 1,
        lower: lower as u64,
        upper: upper as u64,
    })
}

/// Threshold rows for every prime `5 <= p <= p_max`, in increasing `p`.
pub fn threshold_curve(p_max: u64) -> Result<Vec<ThresholdRow>> {
    let primes: Vec<u64> = (5..=p_max).filter(|&p| is_prime(p)).collect();
    primes
        .par_iter()
        .map(|&p| {
            let dstar = threshold(p)?;
            let p = p as u32;
            let (lower_bracket, upper_bracket) = bracket(p);
            Ok(ThresholdRow {
                p,
                dstar,
                delta_star: dstar as f64 / p as f64,
                lower_bracket,
                upper_bracket,
            })
        })
        .collect()
}
