//! Error type shared by every module of the crate.

use thiserror::Error;

/// Everything that can go wrong in this crate.
///
/// Variants are grouped by the module that raises them; the CLI maps them to
/// exit codes via [`Error::kind`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The modulus is not prime, or is below the supported minimum.
    #[error("modulus {p} is not an admissible prime (need a prime >= {min})")]
    BadModulus { p: u64, min: u64 },

    /// A caller-supplied argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Brute-force enumeration was requested above the configured cap.
    #[error("enumeration cap exceeded: n = {n} is above the cap {cap}")]
    CapExceeded { n: usize, cap: usize },

    /// `bubble_step` was called on a string of the form 0^a 1^b.
    #[error("no \"10\" substring in {0}")]
    NoBubble(String),

    /// Arithmetic between Q(sqrt m1) and Q(sqrt m2) with m1 != m2.
    #[error("mixed radicals: sqrt({0}) and sqrt({1}) cannot be combined")]
    MixedRadicals(u32, u32),

    /// The radicand is not one of the supported square-free values.
    #[error("unsupported radicand {0} (supported: 1, 3, 5)")]
    UnsupportedRadicand(u32),

    /// Exact division by zero.
    #[error("division by zero")]
    DivisionByZero,

    /// `cos(2 pi j / q)` is not representable in the supported fields.
    #[error("cos(2*pi*{j}/{q}) has no exact value in Q(sqrt 3) or Q(sqrt 5)")]
    UnsupportedCosine { j: i64, q: i64 },

    /// Polynomials over different moduli were combined.
    #[error("polynomials over Z_{0} and Z_{1} cannot be combined")]
    MixedModulus(u32, u32),

    /// A product would exceed the degree bound of a cubic consumer.
    #[error("degree overflow: product has degree {degree}, bound is {bound}")]
    DegreeOverflow { degree: usize, bound: usize },

    /// A polynomial passed to `omega_of` is not affine-invariant.
    #[error("not affine-invariant in class {class}: {first} has {first_coeff} but {second} has {second_coeff}")]
    NotInvariant {
        class: String,
        first: String,
        first_coeff: String,
        second: String,
        second_coeff: String,
    },

    /// A certificate or index convention name is not known.
    #[error("unsupported prime {0} for the small-prime certificates (supported: 5, 7, 11, 13, 17)")]
    UnsupportedSmallPrime(u64),

    /// The literal and orbit-derived equality systems disagree.
    #[error("equality constraints disagree at p = {p}: {detail}")]
    ConstraintMismatch { p: u64, detail: String },

    /// The LP has no feasible point.
    #[error("LP infeasible at p = {p}, D = {d}: {detail}")]
    Infeasible { p: u64, d: u64, detail: String },

    /// The simplex failed to produce a trustworthy optimum.
    #[error("LP numerical failure at p = {p}, D = {d}: {detail}")]
    NumericalFailure { p: u64, d: u64, detail: String },

    /// The computed threshold lies outside the proven bracket.
    #[error("threshold {dstar} for p = {p} lies outside [{lower}, {upper}]")]
    ThresholdOutOfBracket { p: u64, dstar: u64, lower: u64, upper: u64 },
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad input (exit status 2 in the CLI).
    Argument,
    /// A resource cap was hit (exit status 4 in the CLI).
    Resource,
    /// A mathematical check failed (exit status 3 in the CLI).
    Verification,
}

impl Error {
    /// Coarse category of this error.
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::CapExceeded { .. } => ErrorKind::Resource,
            Error::NotInvariant { .. }
            | Error::ConstraintMismatch { .. }
            | Error::Infeasible { .. }
            | Error::NumericalFailure { .. }
            | Error::ThresholdOutOfBracket { .. } => ErrorKind::Verification,
            _ => ErrorKind::Argument,
        }
    }

    /// Short stable identifier, used in machine-parsable diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::BadModulus { .. } => "bad_modulus",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::CapExceeded { .. } => "cap_exceeded",
            Error::NoBubble(_) => "no_bubble",
            Error::MixedRadicals(..) => "mixed_radicals",
            Error::UnsupportedRadicand(_) => "unsupported_radicand",
            Error::DivisionByZero => "division_by_zero",
            Error::UnsupportedCosine { .. } => "unsupported_cosine",
            Error::MixedModulus(..) => "mixed_modulus",
            Error::DegreeOverflow { .. } => "degree_overflow",
            Error::NotInvariant { .. } => "not_invariant",
            Error::UnsupportedSmallPrime(_) => "unsupported_prime",
            Error::ConstraintMismatch { .. } => "constraint_mismatch",
            Error::Infeasible { .. } => "lp_infeasible",
            Error::NumericalFailure { .. } => "lp_numerical_failure",
            Error::ThresholdOutOfBracket { .. } => "threshold_out_of_bracket",
        }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
