use std::fmt;

use serde::Serialize;

/// Errors raised by every fallible operation in this crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("ring context mismatch: {0}")]
    ContextMismatch(String),
    #[error("determinant is {0}, expected 1")]
    Determinant(String),
    #[error("generator set is not symmetric: {0}")]
    AsymmetricGenerators(String),
    #[error("name {0:?} is reserved for the word variable")]
    ReservedName(String),
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("element was not built from generator words; its length is undefined")]
    NoWord,
    #[error("operation requires a nonzero ring element")]
    ZeroElement,
    #[error("prime {p} divides the localized base N = {n}")]
    PrimeDividesBase { p: u64, n: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("denominator is not invertible modulo {0}")]
    NotInvertible(u64),
    #[error("localizer vanishes at every point of F_{p}^{t}")]
    LocalizerVanishes { p: u64, t: usize },
    #[error("enumeration cap exceeded: {needed} > {cap}")]
    CapExceeded { needed: u128, cap: u128 },
    #[error("polynomial is identically zero modulo {0}")]
    VanishesModP(u64),
    #[error("word is trivial in the free product")]
    TrivialWord,
    #[error("identity parameter is trivial: {0}")]
    TrivialParameter(String),
    #[error("group spec does not assert Zariski density")]
    DensityNotAsserted,
    #[error("prime window exhausted after {0} widenings")]
    WindowExhausted(u32),
    #[error("search budget exhausted: {0}")]
    BudgetExhausted(Box<Diagnostics>),
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by search budgets or enumeration capacity rather
    /// than by malformed input.
    pub fn is_capacity(&self) -> bool {
        matches!(
            self,
            Error::CapExceeded { .. } | Error::BudgetExhausted(_) | Error::WindowExhausted(_)
        )
    }
}

/// What an exhausted witness search saw before giving up.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Diagnostics {
    pub attempts: u64,
    pub k_reached: usize,
    pub primes_tried: Vec<u64>,
    /// Attempts where the mod-p image of w(γ) was the identity.
    pub modp_identity_hits: u64,
    /// Of those, attempts confirmed as the identity by exact evaluation.
    pub exact_identity_hits: u64,
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} attempts, k reached {}, {} distinct primes, {} mod-p identities ({} exact)",
            self.attempts,
            self.k_reached,
            self.primes_tried.len(),
            self.modp_identity_hits,
            self.exact_identity_hits
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
