//! Error taxonomy shared across the toolkit.
//!
//! The design is deliberately explicit about failure modes that a numerical
//! shortcut could otherwise paper over: factoring past the configured cap,
//! principality tests that exhaust their search budget, and ray class groups
//! whose generator set has not yet saturated the known group order all get
//! their own variants so callers (and the CLI exit-code mapping) can react
//! precisely.

use thiserror::Error;

/// Toolkit-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid input: malformed spec strings, non-squarefree `d`, and similar.
    #[error("validation error: {0}")]
    Validation(String),

    /// A norm exceeded the configured factoring cap.
    #[error("factoring-cap error: norm {norm} exceeds cap {cap}")]
    FactoringCap { norm: i128, cap: i128 },

    /// A principality test could not be decided within the search budget.
    /// Preferred over a heuristic answer that could be silently wrong.
    #[error("undecided: {0}")]
    Undecided(String),

    /// Ray class group construction did not reach the certified order.
    /// The caller should raise the generator norm bound.
    #[error("unsaturated ray class group: achieved order {achieved}, expected {expected}; raise the generator norm bound")]
    Unsaturated { achieved: u64, expected: u64 },

    /// Operation requires an ideal coprime to the modulus.
    #[error("ideal not coprime to the modulus: {0}")]
    NonCoprime(String),

    /// Command-line usage error.
    #[error("usage error: {0}")]
    Usage(String),

    /// Internal invariant violated; always a bug.
    #[error("internal error: {0}")]
    Internal(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
