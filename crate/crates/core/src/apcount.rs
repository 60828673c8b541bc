//! Exact counting of k-term arithmetic progressions in subsets of `Z_n`, and
//! brute-force minima `W(k, Z_n, D/n)` over all subsets of a given size.
//!
//! A progression is a *set* `{a, a+b, ..., a+(k-1)b}` (mod `n`) with `b != 0`
//! and `k` distinct elements; each set is counted once no matter how many
//! `(a, b)` pairs generate it. AP counts are invariant under rotation, so the
//! minimum over all `D`-subsets equals the minimum over fixed-density
//! necklaces, which is what the search enumerates.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::necklace::{self, bits_to_mask, BinaryNecklace, Order, Segment};
use crate::MAX_CAP;

/// Map from AP count to the number of necklaces with that count.
pub type Histogram = BTreeMap<u64, u64>;

/// Precomputed progressions of `Z_n` as membership masks.
///
/// Counting then reduces to one `AND` per progression. The list is built by
/// explicit set deduplication, which sidesteps the fact that a progression
/// can have several generating differences (in `Z_5`, `{0,1,2,3}` has
/// differences 1 and 2 and their negatives).
#[derive(Debug, Clone)]
pub struct ApCounter {
    n: usize,
    k: usize,
    masks: Vec<u64>,
}

impl ApCounter {
    /// Builds the list of distinct k-term progressions of `Z_n`.
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k < 3 {
            return Err(Error::InvalidArgument(format!("progression length {k} is below 3")));
        }
        if k > n {
            return Err(Error::InvalidArgument(format!(
                "progression length {k} exceeds n = {n}"
            )));
        }
        if n > 64 {
            return Err(Error::InvalidArgument(format!("n = {n} exceeds 64")));
        }
        let mut set = BTreeSet::new();
        for a in 0..n {
            for b in 1..n {
                let mask = (0..k).fold(0u64, |m, i| m | 1u64 << ((a + i * b) % n));
                if mask.count_ones() as usize == k {
                    set.insert(mask);
                }
            }
        }
        Ok(ApCounter {
            n,
            k,
            masks: set.into_iter().collect(),
        })
    }

    /// Length `n` of the cyclic group.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Progression length `k`.
    pub fn k(&self) -> usize {
        self.k
    }

    /// All progressions, as sorted membership masks.
    pub fn masks(&self) -> &[u64] {
        &self.masks
    }

    /// Number of progressions contained in the subset with membership `mask`.
    pub fn count_mask(&self, mask: u64) -> u64 {
        self.masks.iter().filter(|&&m| m & mask == m).count() as u64
    }

    /// Number of progressions contained in the subset with indicator `bits`.
    pub fn count(&self, bits: &[u8]) -> u64 {
        debug_assert_eq!(bits.len(), self.n);
        self.count_mask(bits_to_mask(bits))
    }
}

/// Number of k-term progressions inside the subset of `Z_n` whose indicator
/// is `bits` (`n = bits.len()`).
///
/// ```
/// use apdensity_core::apcount::count_aps;
/// use apdensity_core::necklace::parse_bits;
/// assert_eq!(count_aps(&parse_bits("0001111").unwrap(), 3).unwrap(), 2);
/// assert_eq!(count_aps(&[1; 7], 3).unwrap(), 21);
/// ```
pub fn count_aps(bits: &[u8], k: usize) -> Result<u64> {
    if bits.is_empty() {
        return Err(Error::InvalidArgument("empty subset indicator".into()));
    }
    Ok(ApCounter::new(bits.len(), k)?.count(bits))
}

/// Result of an exhaustive search over all `D`-subsets of `Z_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApStatistics {
    pub n: usize,
    pub k: usize,
    #[serde(rename = "D")]
    pub d: usize,
    /// `W(k, Z_n, D/n)`.
    pub min_count: u64,
    /// First necklace in cool-lex order attaining `min_count`.
    pub witness: BinaryNecklace,
    /// AP count distribution over all necklaces of this size.
    pub histogram: Histogram,
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if cap > MAX_CAP {
        return Err(Error::InvalidArgument(format!(
            "cap {cap} exceeds the maximum {MAX_CAP}"
        )));
    }
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    Ok(())
}

fn check_density(n: usize, d: usize) -> Result<()> {
    if d > n {
        return Err(Error::InvalidArgument(format!("D = {d} exceeds n = {n}")));
    }
    Ok(())
}

/// Per-segment partial result: minimum, its first witness, histogram.
struct Partial {
    min: u64,
    witness: Vec<u8>,
    histogram: Histogram,
}

fn scan_segment(counter: &ApCounter, segment: &Segment) -> Option<Partial> {
    let mut part: Option<Partial> = None;
    let _ = necklace::stream_segment(segment, Order::Coollex, |bits: &[u8]| -> Result<()> {
        let c = counter.count(bits);
        match &mut part {
            None => {
                part = Some(Partial {
                    min: c,
                    witness: bits.to_vec(),
                    histogram: Histogram::from([(c, 1)]),
                })
            }
            Some(p) => {
                *p.histogram.entry(c).or_insert(0) += 1;
                if c < p.min {
                    p.min = c;
                    p.witness = bits.to_vec();
                }
            }
        }
        Ok(())
    });
    part
}

/// Exhaustive search for `W(k, Z_n, D/n)`.
///
/// The necklace stream is cut into ordered segments that are scanned in
/// parallel; the reduction keeps the earliest minimizer, so the witness is
/// always the first one in cool-lex order regardless of thread count.
pub fn min_aps(n: usize, k: usize, d: usize, cap: usize) -> Result<ApStatistics> {
    check_cap(n, cap)?;
    check_density(n, d)?;
    let counter = ApCounter::new(n, k)?;
    min_aps_with(&counter, d)
}

/// [`min_aps`] with a prebuilt counter (no cap check).
pub fn min_aps_with(counter: &ApCounter, d: usize) -> Result<ApStatistics> {
    let n = counter.n();
    check_density(n, d)?;
    let depth = if n >= 18 { 3 } else { 0 };
    let segs = necklace::segments(n, d, Order::Coollex, depth)?;
    let parts: Vec<Partial> = segs.par_iter().filter_map(|s| scan_segment(counter, s)).collect();
    let mut iter = parts.into_iter();
    let mut acc = iter.next().expect("every (n, D) has at least one necklace");
    for p in iter {
        for (c, m) in p.histogram {
            *acc.histogram.entry(c).or_insert(0) += m;
        }
        if p.min < acc.min {
            acc.min = p.min;
            acc.witness = p.witness;
        }
    }
    Ok(ApStatistics {
        n,
        k: counter.k(),
        d,
        min_count: acc.min,
        witness: BinaryNecklace::from_canonical(&acc.witness),
        histogram: acc.histogram,
    })
}

/// Distribution of AP counts over all necklaces of length `n` with `D` ones.
pub fn distribution(n: usize, k: usize, d: usize, cap: usize) -> Result<Histogram> {
    Ok(min_aps(n, k, d, cap)?.histogram)
}

/// One cell of a `W` table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum TableCell {
    /// Exact value.
    Value(u64),
    /// Not computed; the reason (typically a cap error).
    Uncomputed(String),
}

impl TableCell {
    /// The value, if computed.
    pub fn value(&self) -> Option<u64> {
        match self {
            TableCell::Value(v) => Some(*v),
            TableCell::Uncomputed(_) => None,
        }
    }
}

/// One row `n` of a `W` table: cells for `D = 0..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WRow {
    pub n: usize,
    pub cells: Vec<TableCell>,
}

/// `W(k, Z_n, D/n)` for every `n` in the range and every `D` in `0..=n`.
///
/// Cells that cannot be computed (cap exceeded, `k > n`) are marked
/// [`TableCell::Uncomputed`] rather than failing the whole table.
pub fn w_table(k: usize, ns: RangeInclusive<usize>, cap: usize) -> Vec<WRow> {
    let jobs: Vec<(usize, usize)> = ns.clone().flat_map(|n| (0..=n).map(move |d| (n, d))).collect();
    let values: Vec<TableCell> = jobs
        .par_iter()
        .map(|&(n, d)| match min_aps(n, k, d, cap) {
            Ok(s) => TableCell::Value(s.min_count),
            Err(e) => TableCell::Uncomputed(e.to_string()),
        })
        .collect();
    let mut it = values.into_iter();
    ns.map(|n| WRow {
        n,
        cells: it.by_ref().take(n + 1).collect(),
    })
    .collect()
}
