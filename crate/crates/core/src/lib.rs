//! Exact-arithmetic toolkit for narrow ray class groups of quadratic
//! fields, the Selberg sieve over number fields, compactly supported
//! smoothings with Mellin transforms, and desk-scale verification
//! experiments around products of small degree-one prime ideals.
//!
//! Module map:
//! - [`quadfield`]: fields Q(√d), ideals in HNF, prime splitting, class
//!   groups, units, enumeration.
//! - [`abgroup`]: finite abelian groups, Smith normal form, characters,
//!   sumsets and Kneser's theorem.
//! - [`rayclass`]: the narrow ray class group H_q(K) with an explicit
//!   class map and exact order formula.
//! - [`sieve`]: the Selberg sieve weights λ_e(q) in exact rationals.
//! - [`analytic`]: the smoothing polynomial w₀, Mellin transforms, Hecke
//!   series partials, and the log-space constant ledger.
//! - [`verify`]: theorem-level experiments emitting structured reports.
//! - [`cli`]: command-line front end.

pub mod abgroup;
pub mod analytic;
pub mod error;
pub mod intutil;
pub mod cli;
pub mod poly;
pub mod report;
pub mod quadfield;
pub mod rayclass;
pub mod sieve;
pub mod verify;

pub use error::{Error, Result};
