//! Arithmetic progressions in dense subsets of cyclic groups.
//!
//! The crate answers one question from several directions: how few 3-term
//! (or k-term) arithmetic progressions can a subset of `Z_n` with `D`
//! elements contain?
//!
//! * [`necklace`] enumerates fixed-density binary necklaces in co-lex and
//!   cool-lex order, which is all a brute-force search needs to look at.
//! * [`apcount`] counts progressions exactly and computes `W(k, Z_n, D/n)`,
//!   the minimum over all `D`-subsets, together with witnesses and
//!   histograms.
//! * [`qfield`], [`sympoly`] and [`modgroup`] provide exact arithmetic in
//!   `Q`, `Q(sqrt 3)` and `Q(sqrt 5)`, sparse cubic polynomials in
//!   `X_0..X_{p-1}`, and the affine-orbit bookkeeping (the ω-coordinates)
//!   that makes invariant cubics finite-dimensional.
//! * [`certify`] expands the closed-form sum-of-squares certificates for
//!   lower bounds on `W(3, Z_p, D/p)` and checks them exactly.
//! * [`lpbound`] solves the linear program equivalent to the symmetric
//!   degree-3 relaxation, giving numeric lower bounds for any prime `p` and
//!   the density threshold at which those bounds turn positive.

pub mod apcount;
pub mod certify;
pub mod error;
pub mod lpbound;
pub mod modgroup;
pub mod necklace;
pub mod qfield;
pub mod simplex;
pub mod sympoly;

pub use apcount::{ApCounter, ApStatistics, Histogram, TableCell, WRow};
pub use certify::{Certificate, CertificateReport, Theorem};
pub use error::{Error, ErrorKind, Result};
pub use lpbound::{LpInstance, LpResult, LpStatus, ThresholdRow};
pub use modgroup::{OrbitTable, PrimeModulus, Triple};
pub use necklace::{BinaryNecklace, Order};
pub use qfield::{QuadExt, Rational};
pub use sympoly::{Monomial, OmegaVector, SparsePoly};

/// Default brute-force enumeration cap on `n`.
pub const DEFAULT_CAP: usize = 24;

/// Largest cap accepted anywhere; bit strings are stored in a `u64` mask and
/// the enumeration cost grows as `2^n / n`.
pub const MAX_CAP: usize = 32;
