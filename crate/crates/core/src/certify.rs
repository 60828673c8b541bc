//! Closed-form sum-of-squares certificates for lower bounds on
//! `W(3, Z_p, D/p)`, and their exact verification.
//!
//! A certificate proves `W(3, Z_p, D/p) >= λ(D)` by exhibiting the identity
//!
//! ```text
//! sum_{APs {i,j,k}} X_i X_j X_k - λ(D)
//!     = sum_i X_i · (sums of squares)  +  σ_cube (D - sum X_i^3)
//!       + σ_pair (sum_{i != j} X_i^2 X_j - D(D-1))
//! ```
//!
//! whose right-hand side is non-negative on 0/1 vectors with `D` ones. Every
//! coefficient is a polynomial of degree at most 3 in `D`, so the identity
//! holds for all `D` iff it holds at the four points `D = 0, 1, 2, 3`;
//! verification expands both sides exactly at those points.
//!
//! Two families are provided:
//!
//! * the *general* certificate, valid for every prime `p >= 5`, with
//!   `λ(D) = (D^3 - ((p+3)/2) D^2 + ((p+3)/2 - 1) D) / (p-1)`;
//! * sharper *small-prime* certificates for `p` in `{5, 7, 11, 13, 17}`,
//!   whose coefficients live in `Q(sqrt 5)` (`p = 11`) or `Q(sqrt 3)`
//!   (`p = 13`).
//!
//! The published formulas leave a few index conventions open (summation
//! ranges, how the subscript `r^(i+j)` is anchored, which coefficient goes
//! with which angle). Rather than guessing, the verifier tries each
//! documented reading in a fixed order, reports the first one for which the
//! identity holds exactly, and keeps the residuals of every rejected reading
//! in the report.

use std::fmt;
use std::ops::RangeInclusive;
use std::sync::{Arc, Mutex};

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::apcount;
use crate::error::{Error, Result};
use crate::modgroup::{OrbitTable, PrimeModulus};
use crate::qfield::{exact_cos, rat, ratio, QuadExt, Rational};
use crate::sympoly::{ap_polynomial, omega_of, Monomial, OmegaVector, SparsePoly};

/// The evaluation points of the identity.
pub const CHECK_POINTS: [i64; 4] = [0, 1, 2, 3];

/// Primes with a small-prime certificate.
pub const SMALL_PRIMES: [u32; 5] = [5, 7, 11, 13, 17];

/// A polynomial in `D` with [`QuadExt`] coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DPoly(pub Vec<QuadExt>);

impl DPoly {
    /// The constant `c`.
    pub fn constant(c: QuadExt) -> Self {
        DPoly(vec![c])
    }

    /// Rational coefficients `c[0] + c[1] D + ...` given as `(num, den)` pairs.
    pub fn rational(coeffs: &[(i64, i64)]) -> Self {
        DPoly(coeffs.iter().map(|&(n, d)| QuadExt::frac(n, d)).collect())
    }

    /// Value at the integer `d`.
    pub fn eval(&self, d: i64) -> QuadExt {
        let x = QuadExt::int(d);
        self.0.iter().rev().fold(QuadExt::zero(), |acc, c| &(&acc * &x) + c)
    }

    /// Adds a constant to the polynomial.
    pub fn shifted(&self, delta: &QuadExt) -> Result<Self> {
        let mut c = self.0.clone();
        if c.is_empty() {
            c.push(QuadExt::zero());
        }
        c[0] = c[0].try_add(delta)?;
        Ok(DPoly(c))
    }

    /// Multiplies by a scalar.
    pub fn scaled(&self, s: &QuadExt) -> Result<Self> {
        Ok(DPoly(self.0.iter().map(|c| c.try_mul(s)).collect::<Result<_>>()?))
    }

    /// Integer roots in `lo..=hi` when the polynomial is rational and splits
    /// completely over them: `(leading coefficient, roots)`.
    fn integer_factorization(&self, lo: i64, hi: i64) -> Option<(Rational, Vec<i64>)> {
        let mut coeffs: Vec<Rational> = self.0.iter().map(QuadExt::to_rational).collect::<Option<_>>()?;
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        let degree = coeffs.len().checked_sub(1)?;
        let mut roots = Vec::new();
        'outer: while coeffs.len() > 1 {
            for r in lo..=hi {
                // synthetic division by (D - r)
                let rr = rat(r);
                let mut q = vec![Rational::zero(); coeffs.len() - 1];
                let mut carry = Rational::zero();
                for i in (1..coeffs.len()).rev() {
                    carry = &carry * &rr + &coeffs[i];
                    q[i - 1] = carry.clone();
                }
                if (&carry * &rr + &coeffs[0]).is_zero() {
                    roots.push(r);
                    coeffs = q;
                    continue 'outer;
                }
            }
            return None;
        }
        debug_assert_eq!(roots.len(), degree);
        roots.sort_unstable();
        Some((coeffs[0].clone(), roots))
    }

    /// `c*(D - r1)*(D - r2)*...` when the polynomial splits over small integers.
    pub fn factored(&self) -> Option<String> {
        let (lead, roots) = self.integer_factorization(-64, 64)?;
        if roots.is_empty() {
            return None;
        }
        let mut s = String::new();
        for r in &roots {
            match r.cmp(&0) {
                std::cmp::Ordering::Equal => s.push('D'),
                std::cmp::Ordering::Greater => s.push_str(&format!("(D-{r})")),
                std::cmp::Ordering::Less => s.push_str(&format!("(D+{})", -r)),
            }
        }
        Some(if lead.is_one() {
            s
        } else if lead.numer().is_one() {
            format!("{s}/{}", lead.denom())
        } else {
            format!("{lead}*{s}")
        })
    }
}

impl fmt::Display for DPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            // rational coefficients carry their sign into the joiner
            let (negative, body) = match c.to_rational() {
                Some(r) => (r.is_negative(), r.abs().to_string()),
                None => (false, format!("({c})")),
            };
            let term = match k {
                0 => body,
                1 => format!("{body}*D"),
                _ => format!("{body}*D^{k}"),
            };
            match (first, negative) {
                (true, true) => write!(f, "-{term}")?,
                (true, false) => write!(f, "{term}")?,
                (false, true) => write!(f, " - {term}")?,
                (false, false) => write!(f, " + {term}")?,
            }
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// How the subscript of an indexed square is computed from the centre `i`
/// and the running index `j`, with `r` the smallest primitive root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IndexRule {
    /// `r^(i+j) + 1` (the subscript read verbatim).
    PowerPlusOne,
    /// `r^(i+j)`.
    Power,
    /// `i + r^j`: a fixed pattern of offsets translated to the centre.
    Centred,
    /// `i + r^(i+j)`.
    CentredPower,
}

impl IndexRule {
    /// Reading order: verbatim first.
    pub const ALL: [IndexRule; 4] = [
        IndexRule::PowerPlusOne,
        IndexRule::Power,
        IndexRule::Centred,
        IndexRule::CentredPower,
    ];

    fn index(self, p: u32, pow: &[u32], i: u32, j: u32) -> u32 {
        let e = |x: u32| pow[(x % (p - 1)) as usize];
        match self {
            IndexRule::PowerPlusOne => (e(i + j) + 1) % p,
            IndexRule::Power => e(i + j),
            IndexRule::Centred => (i + e(j)) % p,
            IndexRule::CentredPower => (i + e(i + j)) % p,
        }
    }

    /// Human-readable form.
    pub fn label(self) -> &'static str {
        match self {
            IndexRule::PowerPlusOne => "X_{r^(i+j)+1}",
            IndexRule::Power => "X_{r^(i+j)}",
            IndexRule::Centred => "X_{i+r^j}",
            IndexRule::CentredPower => "X_{i+r^(i+j)}",
        }
    }
}

/// Shape of one summand of a certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TermKind {
    /// `sum_i X_i * sum_forms (sum_a w_a(D) X_{i+a})^2`: each form is a list
    /// of (offset from the centre, weight) pairs.
    CentredSquares { forms: Vec<Vec<(i64, DPoly)>> },
    /// `sum_i X_i * |sum_{j in js} e^{2 pi sqrt(-1) freq j / q} X_{idx(i,j)}|^2`,
    /// i.e. `(sum cos(.) X)^2 + (sum sin(.) X)^2`, expanded exactly as
    /// `sum_{j,l} cos(2 pi freq (j - l) / q) X_{idx(i,j)} X_{idx(i,l)}`.
    Phased {
        freq: i64,
        q: i64,
        js: RangeInclusive<u32>,
        rule: IndexRule,
    },
    /// `D - sum_i X_i^3`.
    CubeConstraint,
    /// `sum_{i != j} X_i^2 X_j - D(D-1)`.
    PairConstraint,
}

/// One summand: a coefficient polynomial in `D` times a [`TermKind`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub name: String,
    pub coef: DPoly,
    pub kind: TermKind,
}

/// Which family a certificate belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Theorem {
    /// The general certificate, any prime `p >= 5`.
    General,
    /// The sharper certificates for `p` in `{5, 7, 11, 13, 17}`.
    SmallPrime,
}

impl Serialize for Theorem {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(match self {
            Theorem::General => "general",
            Theorem::SmallPrime => "small-prime",
        })
    }
}

impl std::str::FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general" => Ok(Theorem::General),
            "small" | "small-prime" => Ok(Theorem::SmallPrime),
            other => Err(Error::InvalidArgument(format!(
                "unknown certificate family {other:?} (expected general or small)"
            ))),
        }
    }
}

/// A fully specified certificate candidate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub p: PrimeModulus,
    pub theorem: Theorem,
    /// Which reading of the open conventions this candidate uses.
    pub convention: String,
    pub lambda: DPoly,
    pub terms: Vec<Term>,
}

impl Certificate {
    /// Copy with `delta` added to the constant coefficient of term `index`
    /// (used to check that verification is sensitive to every coefficient).
    pub fn perturbed(&self, index: usize, delta: &QuadExt) -> Result<Certificate> {
        let mut out = self.clone();
        let term = out
            .terms
            .get_mut(index)
            .ok_or_else(|| Error::InvalidArgument(format!("certificate has no term {index}")))?;
        term.coef = term.coef.shifted(delta)?;
        Ok(out)
    }

    /// Copy with `delta` added to the constant of `λ`.
    pub fn perturbed_lambda(&self, delta: &QuadExt) -> Result<Certificate> {
        let mut out = self.clone();
        out.lambda = out.lambda.shifted(delta)?;
        Ok(out)
    }
}

/// `kind` expanded at `d` with unit coefficient.
fn expand_kind(kind: &TermKind, p: PrimeModulus, d: i64) -> Result<SparsePoly> {
    let n = p.get();
    let mut out = SparsePoly::zero(p);
    match kind {
        TermKind::CentredSquares { forms } => {
            for form in forms {
                // weight products do not depend on the centre
                let w: Vec<QuadExt> = form.iter().map(|(_, w)| w.eval(d)).collect();
                let prod: Vec<Vec<QuadExt>> = w
                    .iter()
                    .map(|x| w.iter().map(|y| x.try_mul(y)).collect::<Result<_>>())
                    .collect::<Result<_>>()?;
                for i in 0..n {
                    let idx: Vec<u32> = form.iter().map(|(a, _)| p.reduce(i as i64 + a)).collect();
                    for (x, row) in prod.iter().enumerate() {
                        for (y, c) in row.iter().enumerate() {
                            out.add_term(Monomial::new(&[i, idx[x], idx[y]])?, c)?;
                        }
                    }
                }
            }
        }
        TermKind::Phased { freq, q, js, rule } => {
            let pow = p.powers();
            let js: Vec<u32> = js.clone().collect();
            let span = *js.last().unwrap_or(&0) as i64 - *js.first().unwrap_or(&0) as i64;
            // cos(2 pi freq k / q) for k = j - l in -span..=span
            let cos: Vec<QuadExt> = (-span..=span).map(|k| exact_cos(freq * k, *q)).collect::<Result<_>>()?;
            for i in 0..n {
                let idx: Vec<u32> = js.iter().map(|&j| rule.index(n, &pow, i, j)).collect();
                for (x, &j) in js.iter().enumerate() {
                    for (y, &l) in js.iter().enumerate() {
                        let c = &cos[(j as i64 - l as i64 + span) as usize];
                        out.add_term(Monomial::new(&[i, idx[x], idx[y]])?, c)?;
                    }
                }
            }
        }
        TermKind::CubeConstraint => {
            out.add_term(Monomial::ONE, &QuadExt::int(d))?;
            let neg = QuadExt::int(-1);
            for i in 0..n {
                out.add_term(Monomial::new(&[i, i, i])?, &neg)?;
            }
        }
        TermKind::PairConstraint => {
            out.add_term(Monomial::ONE, &QuadExt::int(-d * (d - 1)))?;
            let one = QuadExt::one();
            for i in 0..n {
                for j in (0..n).filter(|&j| j != i) {
                    out.add_term(Monomial::new(&[i, i, j])?, &one)?;
                }
            }
        }
    }
    Ok(out)
}

/// A term shape together with the density it was expanded at.
type ExpansionKey = (TermKind, i64);

/// Memoised term expansions: candidate readings share most of their terms,
/// so each `(kind, D)` is expanded once.
pub struct Expander {
    p: PrimeModulus,
    cache: Mutex<Vec<(ExpansionKey, Arc<SparsePoly>)>>,
}

impl Expander {
    pub fn new(p: PrimeModulus) -> Self {
        Expander {
            p,
            cache: Mutex::new(Vec::new()),
        }
    }

    fn base(&self, kind: &TermKind, d: i64) -> Result<Arc<SparsePoly>> {
        let lookup = |c: &Vec<((TermKind, i64), Arc<SparsePoly>)>| {
            c.iter()
                .find(|((k, e), _)| *e == d && k == kind)
                .map(|(_, v)| Arc::clone(v))
        };
        if let Some(hit) = lookup(&self.cache.lock().expect("cache poisoned")) {
            return Ok(hit);
        }
        let poly = Arc::new(expand_kind(kind, self.p, d)?);
        let mut cache = self.cache.lock().expect("cache poisoned");
        if let Some(hit) = lookup(&cache) {
            return Ok(hit);
        }
        cache.push(((kind.clone(), d), Arc::clone(&poly)));
        Ok(poly)
    }

    /// Expansion of one term (coefficient included) at `d`.
    pub fn term(&self, term: &Term, d: i64) -> Result<SparsePoly> {
        let base = self.base(&term.kind, d)?;
        let mut out = SparsePoly::zero(self.p);
        out.add_scaled(&base, &term.coef.eval(d))?;
        Ok(out)
    }

    /// `sum(terms) - (AP polynomial - λ)` at `d`.
    pub fn residual(&self, cert: &Certificate, table: &OrbitTable, d: i64) -> Result<SparsePoly> {
        let mut acc = SparsePoly::zero(self.p);
        for t in &cert.terms {
            acc.add_scaled(&*self.base(&t.kind, d)?, &t.coef.eval(d))?;
        }
        acc.add_scaled(&ap_polynomial(table), &QuadExt::int(-1))?;
        acc.add_term(Monomial::ONE, &cert.lambda.eval(d))?;
        Ok(acc)
    }
}

/// Expansion of one term at the integer `d`.
pub fn expand_term(term: &Term, p: PrimeModulus, d: i64) -> Result<SparsePoly> {
    Expander::new(p).term(term, d)
}

/// `sum(terms) - (AP polynomial - λ)` at `d`: zero iff the identity holds there.
pub fn residual_poly(cert: &Certificate, table: &OrbitTable, d: i64) -> Result<SparsePoly> {
    Expander::new(cert.p).residual(cert, table, d)
}

/// Residual of the identity at one evaluation point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidualAtD {
    #[serde(rename = "D")]
    pub d: i64,
    /// ω-coordinates of the residual (absent if it is not affine-invariant).
    pub omega: Option<OmegaVector>,
    /// Number of non-zero monomials in the residual.
    pub nonzero_terms: usize,
    /// Why `omega` is absent, or an arithmetic failure.
    pub diagnostic: Option<String>,
}

impl ResidualAtD {
    /// True iff the residual polynomial vanishes identically.
    pub fn is_zero(&self) -> bool {
        self.nonzero_terms == 0 && self.diagnostic.is_none()
    }
}

/// Outcome of checking one convention.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trial {
    pub convention: String,
    pub verified: bool,
    pub residual: Vec<ResidualAtD>,
}

/// ω-coordinates of one certificate term at one point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TermLine {
    pub term: String,
    #[serde(rename = "D")]
    pub d: i64,
    pub omega: Option<OmegaVector>,
    pub diagnostic: Option<String>,
}

/// Verdict on a certificate family for one prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertificateReport {
    pub p: PrimeModulus,
    pub theorem: Theorem,
    /// True iff some convention made the identity hold at every checked `D`.
    pub verified: bool,
    #[serde(rename = "checked_D")]
    pub checked_d: Vec<i64>,
    /// Winning convention, or `None` if no candidate verified.
    pub convention: Option<String>,
    /// Residual of the winning candidate (or of the first candidate if none won).
    pub residual: Vec<ResidualAtD>,
    /// ω-line of every term of the reported candidate at every checked `D`.
    pub term_lines: Vec<TermLine>,
    /// `λ(D)` rendered, with a factored form when one exists.
    pub bound_formula: String,
    /// Every candidate tried, in order.
    pub trials: Vec<Trial>,
}

/// Checks a single certificate candidate at the given points.
pub fn check_certificate(cert: &Certificate, table: &OrbitTable, ds: &[i64]) -> Trial {
    check_with(&Expander::new(cert.p), cert, table, ds)
}

fn check_with(ex: &Expander, cert: &Certificate, table: &OrbitTable, ds: &[i64]) -> Trial {
    let residual: Vec<ResidualAtD> = ds
        .par_iter()
        .map(|&d| match ex.residual(cert, table, d) {
            Ok(poly) => {
                let (omega, diagnostic) = match omega_of(&poly, table) {
                    Ok(w) => (Some(w), None),
                    Err(e) => (None, Some(e.to_string())),
                };
                ResidualAtD {
                    d,
                    omega,
                    nonzero_terms: poly.len(),
                    diagnostic,
                }
            }
            Err(e) => ResidualAtD {
                d,
                omega: None,
                nonzero_terms: usize::MAX,
                diagnostic: Some(e.to_string()),
            },
        })
        .collect();
    Trial {
        convention: cert.convention.clone(),
        verified: residual.iter().all(ResidualAtD::is_zero),
        residual,
    }
}

/// ω-lines of every term of a certificate at the given points.
pub fn term_lines(cert: &Certificate, table: &OrbitTable, ds: &[i64]) -> Vec<TermLine> {
    lines_with(&Expander::new(cert.p), cert, table, ds)
}

fn lines_with(ex: &Expander, cert: &Certificate, table: &OrbitTable, ds: &[i64]) -> Vec<TermLine> {
    let jobs: Vec<(&Term, i64)> = cert
        .terms
        .iter()
        .flat_map(|t| ds.iter().map(move |&d| (t, d)))
        .collect();
    jobs.par_iter()
        .map(|&(t, d)| {
            let (omega, diagnostic) = match ex.term(t, d).and_then(|x| omega_of(&x, table)) {
                Ok(w) => (Some(w), None),
                Err(e) => (None, Some(e.to_string())),
            };
            TermLine {
                term: t.name.clone(),
                d,
                omega,
                diagnostic,
            }
        })
        .collect()
}

fn bound_formula(lambda: &DPoly) -> String {
    match lambda.factored() {
        Some(f) => format!("{lambda} = {f}"),
        None => lambda.to_string(),
    }
}

/// Tries candidates in order, stopping at the first that verifies.
fn run_candidates(p: PrimeModulus, theorem: Theorem, candidates: Vec<Certificate>) -> CertificateReport {
    let table = OrbitTable::new(p);
    let ex = Expander::new(p);
    let mut trials = Vec::new();
    let mut winner = None;
    for cert in &candidates {
        let trial = check_with(&ex, cert, &table, &CHECK_POINTS);
        let ok = trial.verified;
        trials.push(trial);
        if ok {
            winner = Some(cert);
            break;
        }
    }
    let reported = winner.unwrap_or(&candidates[0]);
    let residual = trials[if winner.is_some() { trials.len() - 1 } else { 0 }]
        .residual
        .clone();
    CertificateReport {
        p,
        theorem,
        verified: winner.is_some(),
        checked_d: CHECK_POINTS.to_vec(),
        convention: winner.map(|c| c.convention.clone()),
        residual,
        term_lines: lines_with(&ex, reported, &table, &CHECK_POINTS),
        bound_formula: bound_formula(&reported.lambda),
        trials,
    }
}

// ---------------------------------------------------------------------------
// General certificate
// ---------------------------------------------------------------------------

/// `λ(D) = (D^3 - ((p+3)/2) D^2 + ((p+3)/2 - 1) D) / (p - 1)`.
pub fn lambda_general(p: PrimeModulus, d: i64) -> Rational {
    general_lambda(p).eval(d).to_rational().expect("rational coefficients")
}

fn general_lambda(p: PrimeModulus) -> DPoly {
    let p = p.get() as i64;
    // (p+3)/2 = h; coefficients over (p-1), with h possibly half-integral
    DPoly::rational(&[(0, 1), (p + 1, 2 * (p - 1)), (-(p + 3), 2 * (p - 1)), (1, p - 1)])
}

/// Summation range of the four-term squares.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairRange {
    /// `0 < j < k < (p-1)/2`, read verbatim.
    Strict,
    /// `0 < j < k <= (p-1)/2`.
    Inclusive,
    /// All `j, k >= 1` with `j + k <= (p-1)/2`.
    OffsetPairs,
}

impl PairRange {
    /// Reading order.
    pub const ALL: [PairRange; 3] = [PairRange::Strict, PairRange::Inclusive, PairRange::OffsetPairs];

    fn pairs(self, h: i64) -> Vec<(i64, i64)> {
        let mut out = Vec::new();
        for j in 1..=h {
            for k in 1..=h {
                let keep = match self {
                    PairRange::Strict => j < k && k < h,
                    PairRange::Inclusive => j < k && k <= h,
                    PairRange::OffsetPairs => j + k <= h,
                };
                if keep {
                    out.push((j, k));
                }
            }
        }
        out
    }

    fn label(self) -> &'static str {
        match self {
            PairRange::Strict => "0<j<k<(p-1)/2",
            PairRange::Inclusive => "0<j<k<=(p-1)/2",
            PairRange::OffsetPairs => "j,k>=1, j+k<=(p-1)/2",
        }
    }
}

/// Coefficient of the pair constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairCoefficient {
    /// `(4D - p + 3) / (2(p-1))`.
    PlusThree,
    /// `(4D - p - 3) / (2(p-1))`, i.e. `(2D - (p+3)/2) / (p-1)`.
    MinusThree,
}

impl PairCoefficient {
    /// Reading order.
    pub const ALL: [PairCoefficient; 2] = [PairCoefficient::PlusThree, PairCoefficient::MinusThree];

    fn poly(self, p: i64) -> DPoly {
        let c0 = match self {
            PairCoefficient::PlusThree => 3 - p,
            PairCoefficient::MinusThree => -3 - p,
        };
        DPoly::rational(&[(c0, 2 * (p - 1)), (4, 2 * (p - 1))])
    }

    fn label(self) -> &'static str {
        match self {
            PairCoefficient::PlusThree => "(4D-p+3)/(2(p-1))",
            PairCoefficient::MinusThree => "(4D-p-3)/(2(p-1))",
        }
    }
}

/// `(D X_i - sum_j X_j)^2` as a centred form: offset 0 has weight `D - 1`.
fn deviation_form(p: i64) -> Vec<(i64, DPoly)> {
    let mut form = vec![(0, DPoly::rational(&[(-1, 1), (1, 1)]))];
    form.extend((1..p).map(|a| (a, DPoly::rational(&[(-1, 1)]))));
    form
}

/// The general certificate under a given reading of its conventions.
pub fn general_certificate(p: PrimeModulus, range: PairRange, pair: PairCoefficient) -> Certificate {
    let pi = p.get() as i64;
    let h = (pi - 1) / 2;
    let one = || DPoly::rational(&[(1, 1)]);
    let forms = range
        .pairs(h)
        .into_iter()
        .map(|(j, k)| {
            vec![
                (j, one()),
                (j + k, DPoly::rational(&[(-1, 1)])),
                (-j - k, DPoly::rational(&[(-1, 1)])),
                (-j, one()),
            ]
        })
        .collect();
    Certificate {
        p,
        theorem: Theorem::General,
        convention: format!("sigma1 over {}; sigma4 = {}", range.label(), pair.label()),
        lambda: general_lambda(p),
        terms: vec![
            Term {
                name: "sigma1".into(),
                coef: DPoly::rational(&[(1, pi - 1)]),
                kind: TermKind::CentredSquares { forms },
            },
            Term {
                name: "sigma2".into(),
                coef: DPoly::rational(&[(1, pi - 1)]),
                kind: TermKind::CentredSquares {
                    forms: vec![deviation_form(pi)],
                },
            },
            Term {
                name: "sigma3".into(),
                coef: DPoly::rational(&[(1, pi - 1), (-2, pi - 1), (1, pi - 1)]),
                kind: TermKind::CubeConstraint,
            },
            Term {
                name: "sigma4".into(),
                coef: pair.poly(pi),
                kind: TermKind::PairConstraint,
            },
        ],
    }
}

/// Every reading of the general certificate, in the order they are tried.
pub fn general_candidates(p: PrimeModulus) -> Vec<Certificate> {
    let mut out = Vec::new();
    for range in PairRange::ALL {
        for pair in PairCoefficient::ALL {
            out.push(general_certificate(p, range, pair));
        }
    }
    out
}

/// Expands and checks the general certificate at `p`.
pub fn verify_general(p: PrimeModulus) -> CertificateReport {
    run_candidates(p, Theorem::General, general_candidates(p))
}

// ---------------------------------------------------------------------------
// Small-prime certificates
// ---------------------------------------------------------------------------

fn small_prime(p: PrimeModulus) -> Result<u32> {
    let n = p.get();
    if SMALL_PRIMES.contains(&n) {
        Ok(n)
    } else {
        Err(Error::UnsupportedSmallPrime(n as u64))
    }
}

fn q3(a: (i64, i64), b: (i64, i64)) -> QuadExt {
    QuadExt::new(ratio(a.0, a.1), ratio(b.0, b.1), 3).expect("supported radicand")
}

fn q5(a: (i64, i64), b: (i64, i64)) -> QuadExt {
    QuadExt::new(ratio(a.0, a.1), ratio(b.0, b.1), 5).expect("supported radicand")
}

/// `(c, σ_cube, σ_pair, λ)` of the small-prime certificate at `p`.
fn small_common(p: u32) -> (QuadExt, DPoly, DPoly, DPoly) {
    let f = QuadExt::frac;
    match p {
        5 => (
            f(1, 6),
            DPoly::rational(&[(1, 6), (-2, 6), (1, 6)]),
            DPoly::rational(&[(-3, 6), (2, 6)]),
            DPoly::rational(&[(0, 1), (2, 6), (-3, 6), (1, 6)]),
        ),
        7 => (
            f(1, 8),
            DPoly::rational(&[(1, 8), (-2, 8), (1, 8)]),
            DPoly::rational(&[(-2, 4), (1, 4)]),
            DPoly::rational(&[(0, 1), (3, 8), (-4, 8), (1, 8)]),
        ),
        11 => {
            let c = q5((0, 1), (1, 30));
            (
                c.clone(),
                DPoly(vec![c.clone(), c.scale(&rat(-2)), c.clone()]),
                DPoly(vec![q5((15, 30), (-12, 30)), q5((0, 1), (2, 30))]),
                DPoly(vec![
                    QuadExt::zero(),
                    q5((-15, 30), (11, 30)),
                    q5((15, 30), (-12, 30)),
                    c,
                ]),
            )
        }
        13 => {
            let c = q3((21, 286), (-2, 286));
            (
                c.clone(),
                DPoly(vec![c.clone(), c.scale(&rat(-2)), c.clone()]),
                DPoly(vec![q3((-151, 286), (28, 286)), c.scale(&rat(2))]),
                DPoly(vec![
                    QuadExt::zero(),
                    q3((5, 11), (-1, 11)),
                    q3((-151, 286), (28, 286)),
                    c,
                ]),
            )
        }
        17 => (
            f(1, 24),
            DPoly::rational(&[(1, 24), (-2, 24), (1, 24)]),
            DPoly::rational(&[(-6, 24), (2, 24)]),
            DPoly::rational(&[(0, 1), (5, 24), (-6, 24), (1, 24)]),
        ),
        _ => unreachable!("checked by small_prime"),
    }
}

/// `λ(D)` of the small-prime certificate at `p`.
pub fn lambda_small(p: PrimeModulus, d: i64) -> Result<QuadExt> {
    let n = small_prime(p)?;
    Ok(small_common(n).3.eval(d))
}

/// Summation range of the running index `j` in the indexed squares.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JRange {
    /// The range as printed (for `p = 17` this is `0..=16`, one index too many).
    Printed,
    /// `0..=p-2`: one index per power of the primitive root.
    Reduced,
}

/// Which coefficient goes with which angle in the two-frequency square (`p = 13`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pairing {
    /// As printed: `(23-9 sqrt3)/286` with `4 pi j / 12`, `(5-sqrt3)/22` with `2 pi j / 12`.
    Printed,
    /// Coefficients exchanged between the two angles.
    Swapped,
}

/// One small-prime certificate reading.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmallReading {
    pub rule: IndexRule,
    pub range: JRange,
    pub pairing: Pairing,
}

/// The small-prime certificate at `p` under a given reading.
pub fn small_certificate(p: PrimeModulus, reading: SmallReading) -> Result<Certificate> {
    let n = small_prime(p)?;
    let pi = n as i64;
    let (c, cube, pair, lambda) = small_common(n);
    let mut terms = vec![
        Term {
            name: "sigma1".into(),
            coef: DPoly::constant(c),
            kind: TermKind::CentredSquares {
                forms: vec![deviation_form(pi)],
            },
        },
        Term {
            name: "sigma2".into(),
            coef: cube,
            kind: TermKind::CubeConstraint,
        },
        Term {
            name: "sigma3".into(),
            coef: pair,
            kind: TermKind::PairConstraint,
        },
    ];
    let js = match (reading.range, n) {
        (JRange::Printed, 17) => 0..=16,
        _ => 0..=n - 2,
    };
    let phased = |name: &str, coef: QuadExt, freq: i64, q: i64| Term {
        name: name.into(),
        coef: DPoly::constant(coef),
        kind: TermKind::Phased {
            freq,
            q,
            js: js.clone(),
            rule: reading.rule,
        },
    };
    let mut convention = String::from("no indexed squares");
    match n {
        7 => {
            let signs = [1, 1, -1, 1, -1, -1];
            let form = (1..=6)
                .zip(signs)
                .map(|(a, s)| (a, DPoly::rational(&[(s, 1)])))
                .collect();
            terms.push(Term {
                name: "sigma4".into(),
                coef: DPoly::rational(&[(1, 8)]),
                kind: TermKind::CentredSquares { forms: vec![form] },
            });
            convention = "explicit offsets 1..6".into();
        }
        11 => {
            terms.push(phased("sigma4", q5((-15, 30), (9, 30)), 2, 10));
        }
        13 => {
            let (wide, narrow) = (q3((23, 286), (-9, 286)), q3((5, 22), (-1, 22)));
            let (c2, c1) = match reading.pairing {
                Pairing::Printed => (wide, narrow),
                Pairing::Swapped => (narrow, wide),
            };
            terms.push(phased("sigma4[4pi j/12]", c2, 2, 12));
            terms.push(phased("sigma4[2pi j/12]", c1, 1, 12));
        }
        17 => {
            // (sum (-1)^j X)^2 is the q = 2 case of the phased square
            terms.push(phased("sigma4", QuadExt::frac(1, 8), 1, 2));
        }
        _ => {}
    }
    if matches!(n, 11 | 13 | 17) {
        convention = format!(
            "{}, j in {}..={}{}",
            reading.rule.label(),
            js.start(),
            js.end(),
            match (n, reading.pairing) {
                (13, Pairing::Printed) => ", coefficients paired as printed",
                (13, Pairing::Swapped) => ", coefficients swapped between angles",
                _ => "",
            }
        );
    }
    Ok(Certificate {
        p,
        theorem: Theorem::SmallPrime,
        convention,
        lambda,
        terms,
    })
}

/// Every distinct reading of the small-prime certificate, in the order tried.
pub fn smallprime_candidates(p: PrimeModulus) -> Result<Vec<Certificate>> {
    let n = small_prime(p)?;
    let mut out: Vec<Certificate> = Vec::new();
    for rule in IndexRule::ALL {
        for range in [JRange::Printed, JRange::Reduced] {
            for pairing in [Pairing::Printed, Pairing::Swapped] {
                if n != 13 && pairing == Pairing::Swapped {
                    continue;
                }
                let cert = small_certificate(p, SmallReading { rule, range, pairing })?;
                if !out.iter().any(|c| c.convention == cert.convention) {
                    out.push(cert);
                }
            }
        }
    }
    Ok(out)
}

/// Expands and checks the small-prime certificate at `p`.
pub fn verify_smallprime(p: PrimeModulus) -> Result<CertificateReport> {
    Ok(run_candidates(p, Theorem::SmallPrime, smallprime_candidates(p)?))
}

/// Check the verified certificate of `theorem` at `p` after adding `delta`
/// to one coefficient: the constant of the term named `target`, or of `λ`
/// when `target` is `"lambda"`.
///
/// A sound verifier rejects every such corruption with `delta != 0`; the
/// report shows where the residual stops vanishing.
pub fn verify_perturbed(p: PrimeModulus, theorem: Theorem, target: &str, delta: &QuadExt) -> Result<CertificateReport> {
    let (report, candidates) = match theorem {
        Theorem::General => (verify_general(p), general_candidates(p)),
        Theorem::SmallPrime => (verify_smallprime(p)?, smallprime_candidates(p)?),
    };
    let convention = report
        .convention
        .ok_or_else(|| Error::InvalidArgument(format!("no verified {theorem:?} certificate at p = {p}")))?;
    let cert = candidates
        .into_iter()
        .find(|c| c.convention == convention)
        .expect("winning convention is among the candidates");
    let mut bad = if target == "lambda" {
        cert.perturbed_lambda(delta)?
    } else {
        let index = cert.terms.iter().position(|t| t.name == target).ok_or_else(|| {
            let names: Vec<&str> = cert.terms.iter().map(|t| t.name.as_str()).collect();
            Error::InvalidArgument(format!("no term {target:?} (terms: {}, lambda)", names.join(", ")))
        })?;
        cert.perturbed(index, delta)?
    };
    bad.convention = format!("{convention} with {target} shifted by {delta}");
    Ok(run_candidates(p, theorem, vec![bad]))
}

// ---------------------------------------------------------------------------
// Comparison with exact values
// ---------------------------------------------------------------------------

/// One row of a bound comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundRow {
    #[serde(rename = "D")]
    pub d: i64,
    #[serde(serialize_with = "serialize_display")]
    pub lambda_general: Rational,
    pub lambda_small: Option<QuadExt>,
    pub w_exact: Option<u64>,
    /// False iff some available bound exceeds the exact value.
    pub sound: bool,
}

fn serialize_display<S: Serializer, T: fmt::Display>(x: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// `λ_general`, `λ_small` (when defined) and exact `W` (when `p <= cap`) for
/// `D = 0..=d_max`.
pub fn compare_bounds(p: PrimeModulus, d_max: i64, cap: usize) -> Result<Vec<BoundRow>> {
    let n = p.get() as i64;
    if d_max < 0 || d_max > n {
        return Err(Error::InvalidArgument(format!("D_max = {d_max} outside 0..={n}")));
    }
    let counter = (n as usize <= cap.min(crate::MAX_CAP))
        .then(|| apcount::ApCounter::new(n as usize, 3))
        .transpose()?;
    (0..=d_max)
        .map(|d| {
            let lg = lambda_general(p, d);
            let ls = lambda_small(p, d).ok();
            let w = match &counter {
                Some(c) => Some(apcount::min_aps_with(c, d as usize)?.min_count),
                None => None,
            };
            let sound = match w {
                None => true,
                Some(w) => {
                    let wq = QuadExt::int(w as i64);
                    lg <= rat(w as i64) && ls.as_ref().is_none_or(|s| s.signum() <= 0 || s <= &wq)
                }
            };
            Ok(BoundRow {
                d,
                lambda_general: lg,
                lambda_small: ls,
                w_exact: w,
                sound,
            })
        })
        .collect()
}
