//! Fixed-density binary necklaces.
//!
//! A necklace is the lexicographically least rotation of a binary string.
//! With the length `n` and the number of ones fixed, the necklaces are
//! generated by the recursion
//!
//! ```text
//! L(s, t, g) = 0^s 1^t g, L(s-1, 1, 0 1^(t-1) g), ..., L(s-1, t-j, 0 1^j g)   (s > 0)
//! L(0, t, g) = 1^t g
//! ```
//!
//! where `j` is the least value for which `0^(s-1) 1^(t-j) 0 1^j g` is a
//! necklace. Emitting `0^s 1^t g` before the children gives co-lex order
//! (pre-order traversal of the computation tree); emitting it after the
//! children gives cool-lex order (post-order), which is a Gray code. The
//! initial call is `L(n - ones, ones, ε)`.
//!
//! Here `j` is found by testing candidates for canonicity directly. That
//! costs `O(n)` per candidate instead of the amortized `O(1)` of an
//! incremental implementation, which is irrelevant next to the cost of the
//! work done per necklace downstream.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Traversal order of the generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    /// Co-lexicographic order (pre-order traversal).
    Colex,
    /// Cool-lex Gray code order (post-order traversal).
    Coollex,
}

impl FromStr for Order {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "colex" | "co-lex" => Ok(Order::Colex),
            "coollex" | "cool-lex" => Ok(Order::Coollex),
            other => Err(Error::InvalidArgument(format!(
                "unknown order {other:?} (expected colex or coollex)"
            ))),
        }
    }
}

/// True iff no rotation of `bits` is lexicographically smaller than `bits`.
///
/// Uses the linear-time prenecklace test: scan while tracking the length of
/// the longest Lyndon prefix; a string is a necklace iff it is a prenecklace
/// whose period divides its length.
pub fn is_necklace(bits: &[u8]) -> bool {
    let n = bits.len();
    let mut period = 1;
    for i in 1..n {
        match bits[i].cmp(&bits[i - period]) {
            std::cmp::Ordering::Less => return false,
            std::cmp::Ordering::Greater => period = i + 1,
            std::cmp::Ordering::Equal => {}
        }
    }
    n % period == 0
}

/// A binary string of fixed length and popcount that is its own least
/// rotation.
///
/// Bit `i` of the string is the membership of element `i` of `Z_n`, and the
/// string is written most-significant (index 0) first, exactly as printed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryNecklace {
    bits: Vec<u8>,
    ones: usize,
}

impl BinaryNecklace {
    /// Validates that `bits` is a non-empty 0/1 string in canonical rotation.
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::InvalidArgument("necklace must be non-empty".into()));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidArgument("necklace entries must be 0 or 1".into()));
        }
        if !is_necklace(&bits) {
            return Err(Error::InvalidArgument(format!(
                "{} is not its own least rotation",
                bits_to_string(&bits)
            )));
        }
        let ones = bits.iter().filter(|&&b| b == 1).count();
        Ok(BinaryNecklace { bits, ones })
    }

    pub(crate) fn from_canonical(bits: &[u8]) -> Self {
        debug_assert!(is_necklace(bits));
        let ones = bits.iter().filter(|&&b| b == 1).count();
        BinaryNecklace {
            bits: bits.to_vec(),
            ones,
        }
    }

    /// Length `n`.
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    /// Always false: necklaces are non-empty.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of ones.
    pub fn ones(&self) -> usize {
        self.ones
    }

    /// The bits, index 0 first.
    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Membership mask: bit `i` is set iff element `i` is in the subset.
    pub fn mask(&self) -> u64 {
        bits_to_mask(&self.bits)
    }
}

impl fmt::Display for BinaryNecklace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&bits_to_string(&self.bits))
    }
}

impl FromStr for BinaryNecklace {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BinaryNecklace::new(parse_bits(s)?)
    }
}

impl Serialize for BinaryNecklace {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// Parses a string of `0`/`1` characters.
pub fn parse_bits(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(Error::InvalidArgument(format!(
                "unexpected character {other:?} in bit string"
            ))),
        })
        .collect()
}

/// Renders bits as a `0`/`1` string.
pub fn bits_to_string(bits: &[u8]) -> String {
    bits.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()
}

/// Membership mask of a bit string of length at most 64.
pub fn bits_to_mask(bits: &[u8]) -> u64 {
    debug_assert!(bits.len() <= 64);
    bits.iter().enumerate().fold(0u64, |m, (i, &b)| m | ((b as u64) << i))
}

/// Replaces the first occurrence of `10` by `01`.
///
/// Fixed-density necklaces are closed under this operation (they form a
/// bubble language).
pub fn bubble_step(bits: &[u8]) -> Result<Vec<u8>> {
    let pos = bits
        .windows(2)
        .position(|w| w == [1, 0])
        .ok_or_else(|| Error::NoBubble(bits_to_string(bits)))?;
    let mut out = bits.to_vec();
    out.swap(pos, pos + 1);
    Ok(out)
}

fn check_args(n: usize, ones: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("necklace length must be at least 1".into()));
    }
    if ones > n {
        return Err(Error::InvalidArgument(format!("popcount {ones} exceeds length {n}")));
    }
    Ok(())
}

struct Walker<'a, F> {
    n: usize,
    order: Order,
    buf: Vec<u8>,
    scratch: Vec<u8>,
    visit: &'a mut F,
}

impl<F, E> Walker<'_, F>
where
    F: FnMut(&[u8]) -> std::result::Result<(), E>,
{
    /// Writes `0^s 1^t` in front of the suffix already stored at the tail.
    fn write_prefix(&mut self, s: usize, t: usize) {
        self.buf[..s].fill(0);
        self.buf[s..s + t].fill(1);
    }

    fn walk(&mut self, s: usize, t: usize) -> std::result::Result<(), E> {
        if s == 0 {
            self.write_prefix(0, t);
            return (self.visit)(&self.buf);
        }
        if self.order == Order::Colex {
            self.write_prefix(s, t);
            (self.visit)(&self.buf)?;
        }
        let glen = self.n - s - t;
        if let Some(j) = (0..t).find(|&i| self.candidate_is_necklace(s, t, i)) {
            for i in (j..t).rev() {
                // child suffix: 0 1^i g
                let start = self.n - glen - i - 1;
                self.buf[start] = 0;
                self.buf[start + 1..self.n - glen].fill(1);
                self.walk(s - 1, t - i)?;
            }
        }
        if self.order == Order::Coollex {
            self.write_prefix(s, t);
            (self.visit)(&self.buf)?;
        }
        Ok(())
    }
}

impl<F> Walker<'_, F> {
    fn split(&mut self, s: usize, t: usize, depth: usize, out: &mut Vec<Segment>) {
        if depth == 0 || s == 0 {
            out.push(Segment::Subtree {
                s,
                t,
                suffix: self.buf[s + t..].to_vec(),
            });
            return;
        }
        let leaf = |buf: &mut Vec<u8>| {
            buf[..s].fill(0);
            buf[s..s + t].fill(1);
            Segment::Leaf(buf.clone())
        };
        if self.order == Order::Colex {
            out.push(leaf(&mut self.buf));
        }
        let glen = self.n - s - t;
        if let Some(j) = (0..t).find(|&i| self.candidate_is_necklace(s, t, i)) {
            for i in (j..t).rev() {
                let start = self.n - glen - i - 1;
                self.buf[start] = 0;
                self.buf[start + 1..self.n - glen].fill(1);
                self.split(s - 1, t - i, depth - 1, out);
            }
        }
        if self.order == Order::Coollex {
            out.push(leaf(&mut self.buf));
        }
    }

    /// Is `0^(s-1) 1^(t-i) 0 1^i g` a necklace, where `g` is the current suffix?
    fn candidate_is_necklace(&mut self, s: usize, t: usize, i: usize) -> bool {
        let glen = self.n - s - t;
        let c = &mut self.scratch;
        c.clear();
        c.extend(std::iter::repeat_n(0, s - 1));
        c.extend(std::iter::repeat_n(1, t - i));
        c.push(0);
        c.extend(std::iter::repeat_n(1, i));
        c.extend_from_slice(&self.buf[self.n - glen..]);
        is_necklace(c)
    }
}

/// A contiguous piece of a generation order, used to split the work of a
/// traversal across threads while keeping the overall order reproducible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Segment {
    /// A single necklace.
    Leaf(Vec<u8>),
    /// The whole subtree of the recursion call `L(s, t, suffix)`.
    Subtree { s: usize, t: usize, suffix: Vec<u8> },
}

/// Splits the traversal of all `(n, ones)` necklaces into ordered segments
/// by expanding the recursion `depth` levels deep.
///
/// Visiting the segments in sequence with [`stream_segment`] reproduces
/// [`stream_in`] exactly; visiting them in parallel and concatenating the
/// per-segment results in segment order gives the same answer.
pub fn segments(n: usize, ones: usize, order: Order, depth: usize) -> Result<Vec<Segment>> {
    check_args(n, ones)?;
    let mut noop = |_: &[u8]| -> Result<()> { Ok(()) };
    let mut w = Walker {
        n,
        order,
        buf: vec![0; n],
        scratch: Vec::with_capacity(n),
        visit: &mut noop,
    };
    let mut out = Vec::new();
    w.split(n - ones, ones, depth, &mut out);
    Ok(out)
}

/// Visits the necklaces of one segment in the given order.
pub fn stream_segment<F, E>(segment: &Segment, order: Order, mut visitor: F) -> std::result::Result<(), E>
where
    F: FnMut(&[u8]) -> std::result::Result<(), E>,
{
    match segment {
        Segment::Leaf(bits) => visitor(bits),
        Segment::Subtree { s, t, suffix } => {
            let n = s + t + suffix.len();
            let mut buf = vec![0; n];
            buf[s + t..].copy_from_slice(suffix);
            let mut w = Walker {
                n,
                order,
                buf,
                scratch: Vec::with_capacity(n),
                visit: &mut visitor,
            };
            w.walk(*s, *t)
        }
    }
}

/// Visits every necklace of length `n` with `ones` ones in the given order
/// without materializing the list.
///
/// The visitor receives the bits of each necklace; returning an error aborts
/// the traversal and propagates that error.
pub fn stream_in<F, E>(n: usize, ones: usize, order: Order, mut visitor: F) -> std::result::Result<(), E>
where
    F: FnMut(&[u8]) -> std::result::Result<(), E>,
    E: From<Error>,
{
    check_args(n, ones)?;
    let mut w = Walker {
        n,
        order,
        buf: vec![0; n],
        scratch: Vec::with_capacity(n),
        visit: &mut visitor,
    };
    w.walk(n - ones, ones)
}

/// [`stream_in`] in cool-lex order.
pub fn stream<F, E>(n: usize, ones: usize, visitor: F) -> std::result::Result<(), E>
where
    F: FnMut(&[u8]) -> std::result::Result<(), E>,
    E: From<Error>,
{
    stream_in(n, ones, Order::Coollex, visitor)
}

/// All necklaces of length `n` with `ones` ones, in the given order.
pub fn generate(n: usize, ones: usize, order: Order) -> Result<Vec<BinaryNecklace>> {
    let mut out = Vec::new();
    stream_in(n, ones, order, |b: &[u8]| -> Result<()> {
        out.push(BinaryNecklace::from_canonical(b));
        Ok(())
    })?;
    Ok(out)
}

/// All necklaces of length `n` with `ones` ones, in co-lex order.
pub fn gen_colex(n: usize, ones: usize) -> Result<Vec<BinaryNecklace>> {
    generate(n, ones, Order::Colex)
}

/// All necklaces of length `n` with `ones` ones, in cool-lex order.
pub fn gen_coollex(n: usize, ones: usize) -> Result<Vec<BinaryNecklace>> {
    generate(n, ones, Order::Coollex)
}

/// Number of positions at which two equal-length strings differ.
pub fn hamming(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}
