//! Modular arithmetic over `Z_p`, primitive roots, and the decomposition of
//! 3-subsets of `Z_p` into orbits of the affine group `x -> a x + b`.
//!
//! The orbit table is what turns an affine-invariant cubic in `p` variables
//! into a short coordinate vector (see [`crate::sympoly::OmegaVector`]).

use serde::Serialize;

use crate::error::{Error, Result};

/// A 3-subset of `Z_p`, stored as a strictly increasing triple of residues.
pub type Triple = [u32; 3];

/// Deterministic primality test by trial division.
///
/// Moduli in this crate are at most a few hundred, so trial division is both
/// simple and fast enough.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// `base^exp mod m`.
pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    let mut result = 1 % m;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    result
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// The smallest primitive root modulo the prime `p`.
///
/// Accepts any prime `p >= 2` (for `p = 2` the answer is 1).
///
/// ```
/// use apdensity_core::modgroup::primitive_root;
/// assert_eq!(primitive_root(3).unwrap(), 2);
/// assert_eq!(primitive_root(11).unwrap(), 2);
/// assert_eq!(primitive_root(17).unwrap(), 3);
/// ```
pub fn primitive_root(p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::BadModulus { p, min: 2 });
    }
    if p == 2 {
        return Ok(1);
    }
    let factors = distinct_prime_factors(p - 1);
    (2..p)
        .find(|&g| factors.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1))
        .ok_or(Error::BadModulus { p, min: 2 })
}

/// An odd prime `p >= 5`, the modulus of every certificate and LP.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct PrimeModulus(u32);

impl PrimeModulus {
    /// Smallest modulus accepted: the certificates need `(p-1)/2 >= 2`.
    pub const MIN: u32 = 5;

    /// Validates `p` (prime, at least 5).
    pub fn new(p: u64) -> Result<Self> {
        if p < Self::MIN as u64 || p > u32::MAX as u64 || !is_prime(p) {
            return Err(Error::BadModulus {
                p,
                min: Self::MIN as u64,
            });
        }
        Ok(PrimeModulus(p as u32))
    }

    /// The prime as an integer.
    pub fn get(self) -> u32 {
        self.0
    }

    /// `(p - 1) / 2`.
    pub fn half(self) -> u32 {
        (self.0 - 1) / 2
    }

    /// The smallest primitive root of `p`.
    pub fn primitive_root(self) -> u32 {
        primitive_root(self.0 as u64).expect("validated prime") as u32
    }

    /// Reduces an arbitrary integer into `0..p`.
    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.0 as i64) as u32
    }

    /// Multiplicative inverse of a non-zero residue.
    pub fn inv(self, x: u32) -> u32 {
        debug_assert!(x % self.0 != 0);
        pow_mod(x as u64, self.0 as u64 - 2, self.0 as u64) as u32
    }

    /// Successive powers `r^0, r^1, ..., r^(p-2)` of the smallest primitive root.
    pub fn powers(self) -> Vec<u32> {
        let p = self.0 as u64;
        let r = self.primitive_root() as u64;
        let mut out = Vec::with_capacity(self.0 as usize - 1);
        let mut x = 1u64;
        for _ in 0..p - 1 {
            out.push(x as u32);
            x = x * r % p;
        }
        out
    }

    /// Discrete logarithms to the base of the smallest primitive root:
    /// `logs[x] = e` with `r^e = x` for `x` in `1..p`; `logs[0]` is unused.
    pub fn logs(self) -> Vec<u32> {
        let mut logs = vec![u32::MAX; self.0 as usize];
        for (e, x) in self.powers().into_iter().enumerate() {
            logs[x as usize] = e as u32;
        }
        logs
    }
}

impl std::fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Sorts three residues into a [`Triple`], or returns `None` on a repeat.
pub fn sorted_triple(a: u32, b: u32, c: u32) -> Option<Triple> {
    let mut t = [a, b, c];
    t.sort_unstable();
    (t[0] != t[1] && t[1] != t[2]).then_some(t)
}

/// Partition of all 3-subsets of `Z_p` into affine orbits.
///
/// Orbit ids are assigned in order of each orbit's lexicographically least
/// member, so the progression orbit (containing `{0,1,2}`) is always id 0.
#[derive(Debug, Clone)]
pub struct OrbitTable {
    p: PrimeModulus,
    /// Dense map `a*p^2 + b*p + c -> orbit id` for sorted triples; other slots are `u32::MAX`.
    orbit_of: Vec<u32>,
    orbit_sizes: Vec<usize>,
    representatives: Vec<Triple>,
    ap_orbit: usize,
}

impl OrbitTable {
    /// Enumerates the affine orbits of 3-subsets of `Z_p`.
    pub fn new(p: PrimeModulus) -> Self {
        let n = p.get() as usize;
        let mut orbit_of = vec![u32::MAX; n * n * n];
        let mut orbit_sizes = Vec::new();
        let mut representatives = Vec::new();
        let key = |t: &Triple| (t[0] as usize * n + t[1] as usize) * n + t[2] as usize;
        for a in 0..n as u32 {
            for b in a + 1..n as u32 {
                for c in b + 1..n as u32 {
                    let t = [a, b, c];
                    if orbit_of[key(&t)] != u32::MAX {
                        continue;
                    }
                    let id = representatives.len() as u32;
                    representatives.push(t);
                    let mut size = 0;
                    for m in 1..n as u64 {
                        for s in 0..n as u64 {
                            let img = |x: u32| ((m * x as u64 + s) % n as u64) as u32;
                            let u = sorted_triple(img(a), img(b), img(c)).expect("affine maps are injective");
                            let slot = &mut orbit_of[key(&u)];
                            if *slot == u32::MAX {
                                *slot = id;
                                size += 1;
                            }
                        }
                    }
                    orbit_sizes.push(size);
                }
            }
        }
        OrbitTable {
            p,
            orbit_of,
            orbit_sizes,
            representatives,
            ap_orbit: 0,
        }
    }

    /// The modulus.
    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    /// Number of orbits `d`.
    pub fn num_orbits(&self) -> usize {
        self.orbit_sizes.len()
    }

    /// Sizes of the orbits, indexed by orbit id.
    pub fn orbit_sizes(&self) -> &[usize] {
        &self.orbit_sizes
    }

    /// Lexicographically least member of each orbit, indexed by orbit id.
    pub fn representatives(&self) -> &[Triple] {
        &self.representatives
    }

    /// Id of the orbit of `{0, 1, 2}`: the 3-term progressions.
    pub fn ap_orbit(&self) -> usize {
        self.ap_orbit
    }

    /// Orbit id of a sorted triple of distinct residues.
    pub fn orbit_of(&self, t: &Triple) -> usize {
        let n = self.p.get() as usize;
        let id = self.orbit_of[(t[0] as usize * n + t[1] as usize) * n + t[2] as usize];
        debug_assert!(id != u32::MAX, "triple {t:?} is not sorted/distinct");
        id as usize
    }

    /// All members of the given orbit in lexicographic order.
    pub fn members(&self, orbit: usize) -> Vec<Triple> {
        let n = self.p.get();
        let mut out = Vec::with_capacity(self.orbit_sizes[orbit]);
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    if self.orbit_of(&[a, b, c]) == orbit {
                        out.push([a, b, c]);
                    }
                }
            }
        }
        out
    }
}

/// Orbit table for `p` (see [`OrbitTable::new`]).
pub fn affine_orbits3(p: PrimeModulus) -> OrbitTable {
    OrbitTable::new(p)
}

/// Orbit id and least orbit member of an arbitrary 3-subset of `Z_p`.
///
/// The subset may be given in any order but must consist of three distinct
/// residues in `0..p`.
pub fn canonical_subset(subset: [u32; 3], table: &OrbitTable) -> Result<(usize, Triple)> {
    let p = table.modulus().get();
    if subset.iter().any(|&x| x >= p) {
        return Err(Error::InvalidArgument(format!(
            "subset {subset:?} has residues outside 0..{p}"
        )));
    }
    let t = sorted_triple(subset[0], subset[1], subset[2])
        .ok_or_else(|| Error::InvalidArgument(format!("subset {subset:?} has repeated elements")))?;
    let id = table.orbit_of(&t);
    Ok((id, table.representatives()[id]))
}
