//! Shared fixtures for the integration tests: published reference values and
//! brute-force oracles written independently of the library's fast paths.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use apdensity_core::qfield::ratio;
use apdensity_core::{OmegaVector, QuadExt};

const W3: &str = include_str!("../data/reference_w3.csv");
const W4: &str = include_str!("../data/reference_w4.csv");
const W5: &str = include_str!("../data/reference_w5.csv");
const WITNESSES: &str = include_str!("../data/reference_witnesses.csv");

/// Published `W(k, Z_n, D/n)` values keyed by `(n, D)`, for `k` in 3..=5.
pub fn reference_w(k: usize) -> BTreeMap<(usize, usize), u64> {
    let text = match k {
        3 => W3,
        4 => W4,
        5 => W5,
        _ => panic!("no reference table for k = {k}"),
    };
    text.lines()
        .skip(1)
        .map(|line| {
            let f: Vec<u64> = line.split(',').map(|x| x.parse().unwrap()).collect();
            ((f[0] as usize, f[1] as usize), f[2])
        })
        .collect()
}

/// A published minimizer: `(n, D, AP count, bit string)`.
pub struct Witness {
    pub n: usize,
    pub d: usize,
    pub count: u64,
    pub bits: String,
}

pub fn reference_witnesses() -> Vec<Witness> {
    WITNESSES
        .lines()
        .skip(1)
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            Witness {
                n: f[0].parse().unwrap(),
                d: f[1].parse().unwrap(),
                count: f[2].parse().unwrap(),
                bits: f[3].to_string(),
            }
        })
        .collect()
}

/// Distinct k-term progressions contained in `set`, by building every
/// progression as a set and deduplicating.
pub fn oracle_count(n: usize, k: usize, set: &BTreeSet<usize>) -> u64 {
    let mut seen = BTreeSet::new();
    for a in 0..n {
        for b in 1..n {
            let ap: BTreeSet<usize> = (0..k).map(|i| (a + i * b) % n).collect();
            if ap.len() == k && ap.is_subset(set) {
                seen.insert(ap);
            }
        }
    }
    seen.len() as u64
}

pub fn bits_to_set(bits: &[u8]) -> BTreeSet<usize> {
    bits.iter()
        .enumerate()
        .filter(|(_, &b)| b == 1)
        .map(|(i, _)| i)
        .collect()
}

/// Minimum of [`oracle_count`] over all `D`-subsets (no symmetry reduction).
pub fn oracle_min(n: usize, k: usize, d: usize) -> u64 {
    let mut best = u64::MAX;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != d {
            continue;
        }
        let set: BTreeSet<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        best = best.min(oracle_count(n, k, &set));
    }
    best
}

/// Lexicographically least rotations of every length-`n` string with `ones`
/// ones, in lexicographic order.
pub fn oracle_necklaces(n: usize, ones: usize) -> Vec<Vec<u8>> {
    let mut out = BTreeSet::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != ones {
            continue;
        }
        let bits: Vec<u8> = (0..n).map(|i| (mask >> i & 1) as u8).collect();
        let least = (0..n)
            .map(|r| {
                let mut v = bits.clone();
                v.rotate_left(r);
                v
            })
            .min()
            .unwrap();
        out.insert(least);
    }
    out.into_iter().collect()
}

// --- exact constants ---------------------------------------------------

pub fn q(n: i64, d: i64) -> QuadExt {
    QuadExt::frac(n, d)
}

/// `a + b sqrt(m)` with rational parts.
pub fn qs(a: (i64, i64), b: (i64, i64), m: u32) -> QuadExt {
    QuadExt::new(ratio(a.0, a.1), ratio(b.0, b.1), m).unwrap()
}

pub fn omega(a0: QuadExt, a3: QuadExt, a21: QuadExt, a111: Vec<QuadExt>) -> OmegaVector {
    OmegaVector { a0, a3, a21, a111 }
}

/// Number of distinct-triple orbits at prime `p`.
pub fn orbit_count(p: i64) -> usize {
    apdensity_core::OrbitTable::new(apdensity_core::PrimeModulus::new(p as u64).unwrap()).num_orbits()
}

/// The published ω-lines of the general certificate's four terms at `(p, D)`,
/// in the order sigma1, sigma2, sigma3, sigma4 (progression orbit first).
pub fn general_lines(p: i64, d: i64) -> [OmegaVector; 4] {
    let orbits = orbit_count(p);
    let den = p - 1;
    let z = QuadExt::zero;
    let rest = |first: QuadExt, others: QuadExt| {
        let mut v = vec![first];
        v.extend(std::iter::repeat_n(others, orbits - 1));
        v
    };
    // (2D - (p+3)/2)/(p-1) = (4D - p - 3) / (2(p-1))
    let s4 = q(4 * d - p - 3, 2 * den);
    [
        omega(z(), z(), q(p - 3, 2 * den), rest(q(p - 7, den), q(-6, den))),
        omega(
            z(),
            q((d - 1) * (d - 1), den),
            q(3 - 2 * d, den),
            rest(q(6, den), q(6, den)),
        ),
        omega(
            q(d * (d - 1) * (d - 1), den),
            q(-(d - 1) * (d - 1), den),
            z(),
            rest(z(), z()),
        ),
        omega(&s4 * &QuadExt::int(-d * (d - 1)), z(), s4, rest(z(), z())),
    ]
}

/// Published ω-lines of the small-prime certificates at `(p, D)`: the
/// deviation square, the cube constraint, the pair constraint and (where
/// present) the total of the indexed squares.
pub fn small_lines(p: i64, d: i64) -> Vec<OmegaVector> {
    let orbits = orbit_count(p);
    let di = QuadExt::int(d);
    let dm1 = QuadExt::int(d - 1);
    let z = QuadExt::zero;
    // c, pair coefficient s(D)
    let (c, s): (QuadExt, QuadExt) = match p {
        5 => (q(1, 6), q(2 * d - 3, 6)),
        7 => (q(1, 8), q(d - 2, 4)),
        11 => (
            qs((0, 1), (1, 30), 5),
            &(&qs((0, 1), (2, 30), 5) * &di) + &qs((15, 30), (-12, 30), 5),
        ),
        13 => (
            qs((21, 286), (-2, 286), 3),
            &(&qs((42, 286), (-4, 286), 3) * &di) + &qs((-151, 286), (28, 286), 3),
        ),
        17 => (q(1, 24), q(2 * d - 6, 24)),
        _ => panic!("no small-prime certificate at {p}"),
    };
    let zeros = || vec![z(); orbits];
    let dev = omega(
        z(),
        &c * &(&dm1 * &dm1),
        -(&c * &QuadExt::int(2 * d - 3)),
        vec![&c * &QuadExt::int(6); orbits],
    );
    let cube = omega(&(&c * &di) * &(&dm1 * &dm1), -(&c * &(&dm1 * &dm1)), z(), zeros());
    let pair = omega(-(&(&di * &dm1) * &s), z(), s, zeros());
    let mut out = vec![dev, cube, pair];
    let indexed = match p {
        7 => Some(omega(z(), z(), q(1, 8), vec![q(1, 4), q(-3, 4)])),
        11 => Some(omega(
            z(),
            z(),
            qs((-15, 30), (9, 30), 5),
            vec![qs((1, 1), (-1, 5), 5), qs((0, 1), (-1, 5), 5)],
        )),
        13 => {
            let c6 = -(&c * &QuadExt::int(6));
            Some(omega(
                z(),
                z(),
                qs((88, 286), (-22, 286), 3),
                vec![qs((80, 143), (6, 143), 3), c6.clone(), c6],
            ))
        }
        17 => Some(omega(z(), z(), q(1, 8), vec![q(3, 4), q(-1, 4), q(-1, 4)])),
        _ => None,
    };
    out.extend(indexed);
    out
}

/// Primes in `lo..=hi`.
pub fn primes(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&p| apdensity_core::modgroup::is_prime(p)).collect()
}
