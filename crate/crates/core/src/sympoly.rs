//! Sparse polynomials of degree at most 3 in `X_0..X_{p-1}` over
//! [`QuadExt`], and their projection onto ω-coordinates.
//!
//! An affine-invariant cubic (one unchanged by `X_i -> X_{a i + b}`) is
//! determined by a handful of numbers: its constant term `a0`, the common
//! coefficient `a3` of the `X_i^3`, the common coefficient `a21` of the
//! `X_i^2 X_j` (`i != j`), and one coefficient `a111_t` per affine orbit `t`
//! of 3-subsets `{i, j, k}`. [`omega_of`] computes this vector and reports
//! the first pair of monomials that breaks invariance, which makes it the
//! main debugging tool for certificates.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::modgroup::{OrbitTable, PrimeModulus, Triple};
use crate::qfield::QuadExt;

/// Degree bound enforced by the multiplication guard.
pub const MAX_DEGREE: usize = 3;

/// A monomial of degree at most 3: a sorted multiset of variable indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    deg: u8,
    vars: [u32; 3],
}

impl Monomial {
    /// The constant monomial 1.
    pub const ONE: Monomial = Monomial { deg: 0, vars: [0; 3] };

    /// Builds a monomial from at most three variable indices (any order).
    pub fn new(vars: &[u32]) -> Result<Self> {
        if vars.len() > MAX_DEGREE {
            return Err(Error::DegreeOverflow {
                degree: vars.len(),
                bound: MAX_DEGREE,
            });
        }
        let mut v = [0u32; 3];
        v[..vars.len()].copy_from_slice(vars);
        v[..vars.len()].sort_unstable();
        Ok(Monomial {
            deg: vars.len() as u8,
            vars: v,
        })
    }

    /// Total degree.
    pub fn degree(&self) -> usize {
        self.deg as usize
    }

    /// Sorted variable indices (with repetition).
    pub fn vars(&self) -> &[u32] {
        &self.vars[..self.deg as usize]
    }

    /// Product of two monomials, if the degree stays within `bound`.
    pub fn mul(&self, other: &Monomial, bound: usize) -> Result<Monomial> {
        let degree = self.degree() + other.degree();
        if degree > bound.min(MAX_DEGREE) {
            return Err(Error::DegreeOverflow { degree, bound });
        }
        let mut all = [0u32; 6];
        all[..self.degree()].copy_from_slice(self.vars());
        all[self.degree()..degree].copy_from_slice(other.vars());
        Monomial::new(&all[..degree])
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.deg == 0 {
            return f.write_str("1");
        }
        let vars = self.vars();
        let mut first = true;
        let mut i = 0;
        while i < vars.len() {
            let mut e = 1;
            while i + e < vars.len() && vars[i + e] == vars[i] {
                e += 1;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            write!(f, "X{}", vars[i])?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
            i += e;
        }
        Ok(())
    }
}

/// Sparse polynomial over `Z_p`-indexed variables with [`QuadExt`]
/// coefficients; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsePoly {
    p: PrimeModulus,
    terms: BTreeMap<Monomial, QuadExt>,
}

impl SparsePoly {
    /// The zero polynomial.
    pub fn zero(p: PrimeModulus) -> Self {
        SparsePoly {
            p,
            terms: BTreeMap::new(),
        }
    }

    /// The constant `c`.
    pub fn constant(p: PrimeModulus, c: QuadExt) -> Self {
        let mut out = Self::zero(p);
        out.add_term(Monomial::ONE, &c).expect("fresh polynomial");
        out
    }

    /// The variable `X_i` (`i` reduced mod `p`).
    pub fn var(p: PrimeModulus, i: u32) -> Self {
        let mut out = Self::zero(p);
        let m = Monomial::new(&[i % p.get()]).expect("degree 1");
        out.terms.insert(m, QuadExt::one());
        out
    }

    /// Modulus of the index set.
    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    /// Non-zero terms in monomial order.
    pub fn terms(&self) -> &BTreeMap<Monomial, QuadExt> {
        &self.terms
    }

    /// Number of non-zero terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// True iff there are no terms.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of a monomial (zero if absent).
    pub fn coeff(&self, m: &Monomial) -> QuadExt {
        self.terms.get(m).cloned().unwrap_or_else(QuadExt::zero)
    }

    /// Highest degree among the terms (0 for the zero polynomial).
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Adds `c * m` in place.
    pub fn add_term(&mut self, m: Monomial, c: &QuadExt) -> Result<()> {
        if c.is_zero() {
            return Ok(());
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            Entry::Occupied(mut o) => {
                let s = o.get().try_add(c)?;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
        Ok(())
    }

    /// Adds `scale * other` in place.
    pub fn add_scaled(&mut self, other: &SparsePoly, scale: &QuadExt) -> Result<()> {
        self.check_same(other)?;
        if scale.is_zero() {
            return Ok(());
        }
        for (m, c) in &other.terms {
            self.add_term(*m, &c.try_mul(scale)?)?;
        }
        Ok(())
    }

    /// The product with `X_i` (`i` reduced mod `p`).
    pub fn mul_var(&self, i: u32) -> Result<SparsePoly> {
        let x = Monomial::new(&[i % self.p.get()])?;
        let mut out = SparsePoly::zero(self.p);
        for (m, c) in &self.terms {
            out.add_term(m.mul(&x, MAX_DEGREE)?, c)?;
        }
        Ok(out)
    }

    fn check_same(&self, other: &SparsePoly) -> Result<()> {
        if self.p != other.p {
            return Err(Error::MixedModulus(self.p.get(), other.p.get()));
        }
        Ok(())
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})*{m}")?;
        }
        Ok(())
    }
}

/// `a + b`.
pub fn poly_add(a: &SparsePoly, b: &SparsePoly) -> Result<SparsePoly> {
    let mut out = a.clone();
    out.add_scaled(b, &QuadExt::one())?;
    Ok(out)
}

/// `a - b`.
pub fn poly_sub(a: &SparsePoly, b: &SparsePoly) -> Result<SparsePoly> {
    let mut out = a.clone();
    out.add_scaled(b, &QuadExt::int(-1))?;
    Ok(out)
}

/// `c * a`.
pub fn poly_scale(a: &SparsePoly, c: &QuadExt) -> Result<SparsePoly> {
    let mut out = SparsePoly::zero(a.p);
    out.add_scaled(a, c)?;
    Ok(out)
}

/// `a * b`; fails with [`Error::DegreeOverflow`] if the product would have
/// degree above 3.
pub fn poly_mul(a: &SparsePoly, b: &SparsePoly) -> Result<SparsePoly> {
    a.check_same(b)?;
    let degree = a.degree() + b.degree();
    if !a.is_empty() && !b.is_empty() && degree > MAX_DEGREE {
        return Err(Error::DegreeOverflow {
            degree,
            bound: MAX_DEGREE,
        });
    }
    let mut out = SparsePoly::zero(a.p);
    for (ma, ca) in &a.terms {
        for (mb, cb) in &b.terms {
            out.add_term(ma.mul(mb, MAX_DEGREE)?, &ca.try_mul(cb)?)?;
        }
    }
    Ok(out)
}

/// Expansion of `(sum_i c_i X_{v_i})^2` for a linear form given as
/// `(index, coefficient)` pairs. Repeated indices are merged first.
pub fn square_linear(p: PrimeModulus, coeffs: &[(u32, QuadExt)]) -> Result<SparsePoly> {
    let mut merged: BTreeMap<u32, QuadExt> = BTreeMap::new();
    for (i, c) in coeffs {
        let e = merged.entry(i % p.get()).or_insert_with(QuadExt::zero);
        *e = e.try_add(c)?;
    }
    let lin: Vec<(u32, QuadExt)> = merged.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    let mut out = SparsePoly::zero(p);
    for (x, (i, a)) in lin.iter().enumerate() {
        out.add_term(Monomial::new(&[*i, *i])?, &a.try_mul(a)?)?;
        for (j, b) in &lin[x + 1..] {
            let ab = a.try_mul(b)?;
            out.add_term(Monomial::new(&[*i, *j])?, &ab.try_add(&ab)?)?;
        }
    }
    Ok(out)
}

/// `sum X_i X_j X_k` over all 3-term progressions `{i, j, k}` of `Z_p`.
pub fn ap_polynomial(table: &OrbitTable) -> SparsePoly {
    let p = table.modulus();
    let mut out = SparsePoly::zero(p);
    for t in table.members(table.ap_orbit()) {
        out.terms.insert(Monomial::new(&t).expect("degree 3"), QuadExt::one());
    }
    out
}

/// ω-coordinates of an affine-invariant cubic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OmegaVector {
    pub a0: QuadExt,
    pub a3: QuadExt,
    pub a21: QuadExt,
    /// One entry per orbit, indexed by orbit id (the progression orbit first).
    pub a111: Vec<QuadExt>,
}

impl OmegaVector {
    /// The zero vector with `d` orbit slots.
    pub fn zero(d: usize) -> Self {
        OmegaVector {
            a0: QuadExt::zero(),
            a3: QuadExt::zero(),
            a21: QuadExt::zero(),
            a111: vec![QuadExt::zero(); d],
        }
    }

    /// Builds a vector from its slots in the order `a0, a3, a21, a111_1, ...`.
    pub fn from_slots(slots: Vec<QuadExt>) -> Result<Self> {
        if slots.len() < 4 {
            return Err(Error::InvalidArgument(format!(
                "an ω-vector needs at least 4 slots, got {}",
                slots.len()
            )));
        }
        let mut it = slots.into_iter();
        let a0 = it.next().expect("len checked");
        let a3 = it.next().expect("len checked");
        let a21 = it.next().expect("len checked");
        Ok(OmegaVector {
            a0,
            a3,
            a21,
            a111: it.collect(),
        })
    }

    /// All slots in order `a0, a3, a21, a111_1, ...`.
    pub fn slots(&self) -> Vec<&QuadExt> {
        let mut v = vec![&self.a0, &self.a3, &self.a21];
        v.extend(self.a111.iter());
        v
    }

    /// True iff every slot is zero.
    pub fn is_zero(&self) -> bool {
        self.slots().iter().all(|x| x.is_zero())
    }

    /// Slot-wise sum.
    pub fn try_add(&self, other: &OmegaVector) -> Result<OmegaVector> {
        self.zip(other, |a, b| a.try_add(b))
    }

    /// Slot-wise difference.
    pub fn try_sub(&self, other: &OmegaVector) -> Result<OmegaVector> {
        self.zip(other, |a, b| a.try_sub(b))
    }

    fn zip(&self, other: &OmegaVector, f: impl Fn(&QuadExt, &QuadExt) -> Result<QuadExt>) -> Result<OmegaVector> {
        if self.a111.len() != other.a111.len() {
            return Err(Error::InvalidArgument(format!(
                "ω-vectors have {} and {} orbit slots",
                self.a111.len(),
                other.a111.len()
            )));
        }
        Ok(OmegaVector {
            a0: f(&self.a0, &other.a0)?,
            a3: f(&self.a3, &other.a3)?,
            a21: f(&self.a21, &other.a21)?,
            a111: self
                .a111
                .iter()
                .zip(&other.a111)
                .map(|(a, b)| f(a, b))
                .collect::<Result<_>>()?,
        })
    }

    /// Names of the nonzero slots (`a0`, `a3`, `a21`, `a111[t]`).
    pub fn nonzero_slots(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (name, v) in [("a0", &self.a0), ("a3", &self.a3), ("a21", &self.a21)] {
            if !v.is_zero() {
                out.push(name.to_string());
            }
        }
        for (t, v) in self.a111.iter().enumerate() {
            if !v.is_zero() {
                out.push(format!("a111[{t}]"));
            }
        }
        out
    }
}

impl fmt::Display for OmegaVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.slots().iter().map(|x| x.to_string()).collect();
        write!(f, "ω({})", s.join(", "))
    }
}

/// Which invariant class a degree-3 or constant monomial belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Class {
    Constant,
    Cube,
    SquareTimesOther,
    Orbit(usize),
}

impl Class {
    fn of(m: &Monomial, table: &OrbitTable) -> Option<Class> {
        match *m.vars() {
            [] => Some(Class::Constant),
            [a, b, c] if a == b && b == c => Some(Class::Cube),
            [a, b, c] if a == b || b == c => Some(Class::SquareTimesOther),
            [a, b, c] => {
                let t: Triple = [a, b, c];
                Some(Class::Orbit(table.orbit_of(&t)))
            }
            _ => None,
        }
    }

    fn name(&self) -> String {
        match self {
            Class::Constant => "a0".into(),
            Class::Cube => "a3".into(),
            Class::SquareTimesOther => "a21".into(),
            Class::Orbit(t) => format!("a111[{t}]"),
        }
    }

    fn size(&self, table: &OrbitTable) -> usize {
        let p = table.modulus().get() as usize;
        match self {
            Class::Constant => 1,
            Class::Cube => p,
            Class::SquareTimesOther => p * (p - 1),
            Class::Orbit(t) => table.orbit_sizes()[*t],
        }
    }

    /// Some member of the class not present in `poly` (for diagnostics).
    fn missing_member(&self, poly: &SparsePoly, table: &OrbitTable) -> Option<Monomial> {
        let p = table.modulus().get();
        let absent = |m: Monomial| (!poly.terms.contains_key(&m)).then_some(m);
        match self {
            Class::Constant => absent(Monomial::ONE),
            Class::Cube => (0..p).find_map(|i| absent(Monomial::new(&[i, i, i]).ok()?)),
            Class::SquareTimesOther => (0..p)
                .flat_map(|i| (0..p).filter(move |&j| j != i).map(move |j| (i, j)))
                .find_map(|(i, j)| absent(Monomial::new(&[i, i, j]).ok()?)),
            Class::Orbit(t) => table
                .members(*t)
                .into_iter()
                .find_map(|tr| absent(Monomial::new(&tr).ok()?)),
        }
    }
}

/// Projects an affine-invariant cubic onto its ω-coordinates.
///
/// Fails with [`Error::NotInvariant`] naming the first offending pair of
/// monomials if coefficients within a class differ (an absent monomial
/// counts as coefficient zero), or if the polynomial has linear or
/// quadratic terms.
pub fn omega_of(poly: &SparsePoly, table: &OrbitTable) -> Result<OmegaVector> {
    if poly.p != table.modulus() {
        return Err(Error::MixedModulus(poly.p.get(), table.modulus().get()));
    }
    // class -> (first monomial, its coefficient, member count)
    let mut seen: BTreeMap<usize, (Class, Monomial, QuadExt, usize)> = BTreeMap::new();
    let slot = |c: &Class| match c {
        Class::Constant => 0,
        Class::Cube => 1,
        Class::SquareTimesOther => 2,
        Class::Orbit(t) => 3 + t,
    };
    for (m, c) in &poly.terms {
        let class = Class::of(m, table).ok_or_else(|| Error::NotInvariant {
            class: format!("degree {}", m.degree()),
            first: m.to_string(),
            first_coeff: c.to_string(),
            second: "(no invariant class)".into(),
            second_coeff: "0".into(),
        })?;
        match seen.get_mut(&slot(&class)) {
            None => {
                seen.insert(slot(&class), (class, *m, c.clone(), 1));
            }
            Some((_, m0, c0, count)) => {
                if c0 != c {
                    return Err(Error::NotInvariant {
                        class: class.name(),
                        first: m0.to_string(),
                        first_coeff: c0.to_string(),
                        second: m.to_string(),
                        second_coeff: c.to_string(),
                    });
                }
                *count += 1;
            }
        }
    }
    let mut out = OmegaVector::zero(table.num_orbits());
    for (class, m0, c0, count) in seen.into_values() {
        if count != class.size(table) {
            let missing = class
                .missing_member(poly, table)
                .expect("count below class size implies a missing member");
            return Err(Error::NotInvariant {
                class: class.name(),
                first: m0.to_string(),
                first_coeff: c0.to_string(),
                second: missing.to_string(),
                second_coeff: "0".into(),
            });
        }
        match class {
            Class::Constant => out.a0 = c0,
            Class::Cube => out.a3 = c0,
            Class::SquareTimesOther => out.a21 = c0,
            Class::Orbit(t) => out.a111[t] = c0,
        }
    }
    Ok(out)
}

/// The invariant cubic with the given ω-coordinates.
pub fn reconstruct(omega: &OmegaVector, table: &OrbitTable) -> Result<SparsePoly> {
    let p = table.modulus();
    let n = p.get();
    if omega.a111.len() != table.num_orbits() {
        return Err(Error::InvalidArgument(format!(
            "ω-vector has {} orbit slots, Z_{} has {} orbits",
            omega.a111.len(),
            n,
            table.num_orbits()
        )));
    }
    let mut out = SparsePoly::zero(p);
    out.add_term(Monomial::ONE, &omega.a0)?;
    for i in 0..n {
        out.add_term(Monomial::new(&[i, i, i])?, &omega.a3)?;
        for j in (0..n).filter(|&j| j != i) {
            out.add_term(Monomial::new(&[i, i, j])?, &omega.a21)?;
        }
    }
    for (t, c) in omega.a111.iter().enumerate() {
        for tr in table.members(t) {
            out.add_term(Monomial::new(&tr)?, c)?;
        }
    }
    Ok(out)
}
