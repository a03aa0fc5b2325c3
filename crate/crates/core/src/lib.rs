//! Special values of Hecke L-series attached to the cubic-twist family
//! `y^2 = x^3 + D^3` over the field `K = Q(sqrt(-3))`.
//!
//! The lattice `L = omega * Z[tau]` with `tau = (-1 + sqrt(-3))/2` carries the
//! Weierstrass data `wp'^2 = 4 wp^3 - 1`, and the curve `y^2 = x^3 + D^3` with
//! `D` a product of primary primes of `Z[tau]` admits a Hecke character `psi`
//! whose L-value at `s = 1` collapses to a finite character sum
//!
//! ```text
//! -(D/omega) * (2|D)_2 * L_S(psi-bar, 1)
//!     = (sqrt(3)/4) * sum_c (c|D)_2 / (wp(sqrt(-3) c omega / D) + 2^(1/3))
//!       - (4^(1/3) / (4 sqrt(3))) * sum_c (c|D)_2
//! ```
//!
//! over a residue system `c` modulo `D` prime to `D`.  The crate computes both
//! sides to arbitrary precision, cross-checks against independent L-value
//! oracles, and emits exact 2-adic valuation certificates for the divisibility
//! `v_2(L_S / omega) >= n - 1` in the number of prime factors `n`.
//!
//! Modules:
//! * [`eisenstein`]: exact arithmetic in `Z[tau]`, residue systems, power
//!   residue symbols.
//! * [`numerics`]: arbitrary-precision real/complex scaffolding and
//!   deterministic summation.
//! * [`weierstrass`]: the period `omega`, Laurent data, and `wp`, `zeta`,
//!   `E_1^*` evaluators on the hexagonal lattice.
//! * [`hecke`]: the character `psi`, the closed character-sum formula, point
//!   counting, and the independent oracles.
//! * [`valuation`]: exact 2-adic bookkeeping and the divisibility certificate.

pub mod eisenstein;
pub mod hecke;
pub mod numerics;
pub mod valuation;
pub mod weierstrass;

use serde::Serialize;

/// Schema tag stamped on every JSON report emitted by this crate.
pub const REPORT_SCHEMA: u32 = 1;

/// Errors shared across the computational modules.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Division by zero in `Z[tau]`.
    #[error("division by zero in Z[tau]")]
    DivisionByZero,
    /// `gcd(0, 0)` has no canonical value.
    #[error("gcd(0, 0) is undefined in Z[tau]")]
    GcdOfZeros,
    /// Power residue symbol with arguments sharing a prime factor.
    #[error("power residue symbol requires coprime arguments: gcd({alpha}, {beta}) is not a unit")]
    SymbolNotCoprime { alpha: String, beta: String },
    /// Power residue symbol denominator touching the ramified or even places.
    #[error("power residue symbol denominator {beta} must be coprime to 6")]
    SymbolBadDenominator { beta: String },
    /// An element failed a primality requirement.
    #[error("{element} is not prime in Z[tau]: {reason}")]
    NotPrime { element: String, reason: String },
    /// An element failed the required congruence normalization.
    #[error("{element} violates the congruence normalization: {reason}")]
    CongruenceViolation { element: String, reason: String },
    /// Two listed primes generate the same ideal.
    #[error("primes {first} and {second} are associates; prime lists must be pairwise non-associate")]
    DuplicatePrime { first: String, second: String },
    /// A subset mask addressed more primes than the list holds.
    #[error("subset mask {mask:#b} out of range for a list of {count} primes")]
    SubsetMaskOutOfRange { mask: u32, count: usize },
    /// The two period routes failed to agree.
    #[error("period routes disagree: |q-series - quadrature| = {difference} exceeds {tolerance}")]
    PeriodRouteMismatch { difference: String, tolerance: String },
    /// Quadrature failed to converge within the level budget.
    #[error("tanh-sinh quadrature failed to converge: last delta {delta}")]
    QuadratureDivergence { delta: String },
    /// The differential-equation self-check failed after an evaluation.
    #[error("wp self-check failed at z = {at}: residual {residual} exceeds {tolerance}")]
    SelfCheckFailed { at: String, residual: String, tolerance: String },
    /// Two precisions disagreed beyond the escalation tolerance.
    #[error("precision escalation disagreement: {detail}")]
    PrecisionEscalation { detail: String },
    /// A character argument failed the `alpha = 1 (mod 2 sqrt(-3))` precondition.
    #[error("character argument {alpha} rejected: {reason}")]
    CharacterPrecondition { alpha: String, reason: String },
    /// The sextic and quadratic routes to `psi` disagreed.
    #[error("character routes disagree at {alpha}: sextic gives {sextic}, quadratic gives {quadratic}")]
    CharacterRouteMismatch { alpha: String, sextic: String, quadratic: String },
    /// Reduction of the curve is bad at the requested prime.
    #[error("bad reduction at {prime}: it divides 6 D")]
    BadReduction { prime: String },
    /// A point count landed outside the Hasse interval.
    #[error("point count {count} over field of size {field} violates the Hasse bound")]
    HasseBound { count: u64, field: u64 },
    /// No associate of the prime matches the Frobenius trace.
    #[error("no associate of {prime} has trace {trace}")]
    NoTraceMatch { prime: String, trace: i64 },
    /// Several associates match the Frobenius trace.
    #[error("trace {trace} is ambiguous among associates of {prime}")]
    AmbiguousTrace { prime: String, trace: i64 },
    /// Functional-equation solve for the root number failed.
    #[error("root number solve failed: {detail}")]
    RootNumber { detail: String },
    /// An oracle was invoked outside its domain.
    #[error("oracle unavailable: {detail}")]
    OracleUnavailable { detail: String },
    /// The brute-force and product subset sums disagreed.
    #[error("subset symbol sums disagree at c = {c}: brute force {brute}, product {product}")]
    SubsetSumMismatch { c: String, brute: i64, product: i64 },
    /// A certificate was requested for the trivial character.
    #[error("certificate requires n >= 1 primes: {detail}")]
    CertificateRequiresPrimes { detail: String },
    /// Text input failed to parse.
    #[error("parse error: {detail}")]
    Parse { detail: String },
    /// An internal invariant failed; indicates a bug, not bad input.
    #[error("internal invariant violated: {detail}")]
    Invariant { detail: String },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// One named check with its achieved error, tolerance, and verdict.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    /// Human-readable name of the identity or value being checked.
    pub name: String,
    /// Achieved absolute error, as a decimal string.
    pub error: String,
    /// Tolerance the error is held against, as a decimal string.
    pub tolerance: String,
    /// Whether the error is within tolerance.
    pub pass: bool,
    /// Optional worst-case witness (for per-term suites).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl CheckRow {
    /// True when every row in the slice passes.
    pub fn all_pass(rows: &[CheckRow]) -> bool {
        rows.iter().all(|r| r.pass)
    }
}

pub use eisenstein::{
    CongruenceClass, EisensteinInt, ResidueSystem, SquarefreeD, SubsetSelector, UnitRoot,
};
pub use hecke::{
    HeckeCharacterSpec, IdentityReport, LValueReport, OracleMethod, OracleResult, PointCount,
};
pub use numerics::{digits_to_bits, BigComplex, BigReal, ConstantSet};
pub use valuation::{CertLine, CertStatus, DyadicValue, ValuationCertificate};
pub use weierstrass::{KPoint, LatticeContext, WpEval};
