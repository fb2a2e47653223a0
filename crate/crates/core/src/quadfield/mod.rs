//! Exact arithmetic for quadratic fields K = Q(√d).
//!
//! Conventions used throughout:
//! - d is a squarefree integer, d ∉ {0, 1}; d < 0 is the imaginary case,
//!   d > 0 the real case. A degenerate rational backend (no d) represents
//!   K = Q and is used only for cross-checks.
//! - ω = (1+√d)/2 when d ≡ 1 (mod 4), else ω = √d, so O_K = Z + Zω.
//!   ω satisfies ω² = tω − n₀ with t = Tr(ω) ∈ {0, 1} and n₀ = N(ω).
//! - The field discriminant is d when d ≡ 1 (mod 4), else 4d.
//!
//! Class numbers come from reduced binary quadratic forms (imaginary) or
//! reduced-form cycles (real); the fundamental unit from the continued
//! fraction of ω; the residue α_K of ζ_K at s = 1 from the analytic class
//! number formula.

mod elem;
mod forms;
mod ideal;
mod principal;
mod split;

pub use elem::AlgebraicNumber;
pub use forms::{FormI128, FundUnit};
pub use ideal::IdealHNF;
pub use split::{primes_above, EnumeratedIdeal, PrimeIdeal, PrimeKind};

pub use ideal::{ideal_lcm_gcd, ideal_product};
pub use principal::{form_of_ideal, narrow_class_tag, narrow_principal_generator};
pub use split::{enumerate_degree_one_primes, enumerate_ideals, factor_ideal};

use crate::error::{Error, Result};
use crate::intutil;
use serde::Serialize;
use std::fmt;

/// Default cap on norms passed to the trial-division factorizer.
pub const DEFAULT_FACTOR_CAP: i128 = 1_000_000_000_000;

/// A quadratic field Q(√d), or the rational backend Q.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
pub struct FieldSpec {
    /// Squarefree integer d ∉ {0, 1}; `None` means K = Q.
    pub d: Option<i64>,
}

impl FieldSpec {
    /// Quadratic field Q(√d). Validates squarefreeness.
    pub fn quadratic(d: i64) -> Result<Self> {
        if d == 0 || d == 1 {
            return Err(Error::Validation(format!("d = {d} is not allowed")));
        }
        if !intutil::is_squarefree(d) {
            return Err(Error::Validation(format!("d = {d} is not squarefree")));
        }
        Ok(FieldSpec { d: Some(d) })
    }

    /// The rational backend K = Q.
    pub fn rational() -> Self {
        FieldSpec { d: None }
    }

    pub fn is_quadratic(&self) -> bool {
        self.d.is_some()
    }

    /// The squarefree d, or an error on the rational backend.
    pub fn quad_d(&self) -> Result<i64> {
        self.d
            .ok_or_else(|| Error::Validation("operation requires a quadratic field".into()))
    }

    /// Field discriminant: d if d ≡ 1 (mod 4), else 4d (and 1 for Q).
    pub fn disc(&self) -> i64 {
        match self.d {
            None => 1,
            Some(d) => {
                if d.rem_euclid(4) == 1 {
                    d
                } else {
                    4 * d
                }
            }
        }
    }

    /// Trace of ω: 1 when d ≡ 1 (mod 4), else 0.
    pub fn omega_trace(&self) -> i128 {
        match self.d {
            Some(d) if d.rem_euclid(4) == 1 => 1,
            _ => 0,
        }
    }

    /// Norm of ω: (1−d)/4 when d ≡ 1 (mod 4), else −d.
    pub fn omega_norm(&self) -> i128 {
        match self.d {
            Some(d) if d.rem_euclid(4) == 1 => ((1 - d) / 4) as i128,
            Some(d) => -(d as i128),
            None => 0,
        }
    }

    /// Norm of x + yω.
    pub fn elem_norm(&self, x: i128, y: i128) -> i128 {
        x * x + self.omega_trace() * x * y + self.omega_norm() * y * y
    }

    /// Product (x1 + y1ω)(x2 + y2ω) in coordinates.
    pub fn elem_mul(&self, (x1, y1): (i128, i128), (x2, y2): (i128, i128)) -> (i128, i128) {
        let t = self.omega_trace();
        let n0 = self.omega_norm();
        (x1 * x2 - n0 * y1 * y2, x1 * y2 + x2 * y1 + t * y1 * y2)
    }

    /// Conjugate of x + yω.
    pub fn elem_conj(&self, (x, y): (i128, i128)) -> (i128, i128) {
        (x + self.omega_trace() * y, -y)
    }

    /// Real value of ω under the embedding sending √d to the positive root
    /// (real case only; meaningless for d < 0).
    pub fn omega_real(&self) -> f64 {
        match self.d {
            Some(d) if d.rem_euclid(4) == 1 => (1.0 + (d as f64).sqrt()) / 2.0,
            Some(d) => (d as f64).sqrt(),
            None => 0.0,
        }
    }

    /// Parse the field spec grammar: `Q` or `Q(sqrt:<d>)`.
    pub fn parse(input: &str) -> Result<Self> {
        let s = input.trim();
        if s == "Q" {
            return Ok(FieldSpec::rational());
        }
        if let Some(rest) = s.strip_prefix("Q(sqrt:").and_then(|r| r.strip_suffix(')')) {
            let d: i64 = rest
                .trim()
                .parse()
                .map_err(|_| Error::Validation(format!("bad field spec token: {rest:?}")))?;
            return FieldSpec::quadratic(d);
        }
        Err(Error::Validation(format!("bad field spec: {input:?}")))
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.d {
            None => write!(f, "Q"),
            Some(d) => write!(f, "Q(sqrt:{d})"),
        }
    }
}

/// Classical invariants of a quadratic field (or of Q for the degenerate
/// backend): discriminant, signature, class numbers, unit data, and the
/// residue α_K of ζ_K at s = 1.
#[derive(Clone, Debug, Serialize)]
pub struct QuadInvariants {
    pub spec: FieldSpec,
    pub disc: i64,
    /// Degree over Q.
    pub n: u32,
    pub r1: u32,
    pub r2: u32,
    /// Class number h_K.
    pub h: u64,
    /// Narrow class number: h if d < 0 or N(fundamental unit) = −1, else 2h.
    pub h_narrow: u64,
    /// Fundamental unit (real case only).
    pub fund_unit: Option<AlgebraicNumber>,
    /// Norm of the fundamental unit, ±1 (real case only).
    pub fund_unit_norm: Option<i8>,
    /// Regulator: log of the fundamental unit (1 by convention otherwise).
    pub regulator: f64,
    /// Number of roots of unity: 4 for Q(i), 6 for Q(√−3), else 2.
    pub mu_order: u32,
    /// Residue of ζ_K at s = 1: 2^{r1}(2π)^{r2} h R / (mu √|disc|).
    pub alpha: f64,
}

/// Compute all invariants of the field.
pub fn field_invariants(spec: FieldSpec) -> Result<QuadInvariants> {
    let Some(d) = spec.d else {
        // K = Q: h = 1, R = 1 (empty regulator determinant), μ = {±1},
        // and ζ_Q has residue 1 at s = 1.
        return Ok(QuadInvariants {
            spec,
            disc: 1,
            n: 1,
            r1: 1,
            r2: 0,
            h: 1,
            h_narrow: 1,
            fund_unit: None,
            fund_unit_norm: None,
            regulator: 1.0,
            mu_order: 2,
            alpha: 1.0,
        });
    };
    let disc = spec.disc();
    if d < 0 {
        let h = forms::class_number_imaginary(disc)?;
        let mu_order = match d {
            -1 => 4,
            -3 => 6,
            _ => 2,
        };
        let alpha = 2.0 * std::f64::consts::PI * (h as f64)
            / (mu_order as f64 * ((-(disc as f64)).sqrt()));
        Ok(QuadInvariants {
            spec,
            disc,
            n: 2,
            r1: 0,
            r2: 1,
            h,
            h_narrow: h,
            fund_unit: None,
            fund_unit_norm: None,
            regulator: 1.0,
            mu_order,
            alpha,
        })
    } else {
        let h_plus = forms::class_number_narrow_real(disc)?;
        let unit = forms::fundamental_unit(spec)?;
        let h = if unit.norm == -1 { h_plus } else { h_plus / 2 };
        let h_narrow = h_plus;
        let regulator = unit.log_value;
        let alpha = 4.0 * (h as f64) * regulator / (2.0 * (disc as f64).sqrt());
        Ok(QuadInvariants {
            spec,
            disc,
            n: 2,
            r1: 2,
            r2: 0,
            h,
            h_narrow,
            fund_unit: Some(unit.value.clone()),
            fund_unit_norm: Some(unit.norm),
            regulator,
            mu_order: 2,
            alpha,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_roundtrip() {
        for s in ["Q", "Q(sqrt:-1)", "Q(sqrt:3)", "Q(sqrt:-163)"] {
            let spec = FieldSpec::parse(s).unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert!(FieldSpec::parse("Q(sqrt:12)").is_err());
        assert!(FieldSpec::parse("Q(sqrt:0)").is_err());
        assert!(FieldSpec::parse("nonsense").is_err());
    }

    #[test]
    fn omega_identities() {
        for d in [-1i64, -2, -3, -5, -7, -11, 2, 3, 5, 13] {
            let spec = FieldSpec::quadratic(d).unwrap();
            let t = spec.omega_trace();
            let n0 = spec.omega_norm();
            // ω² = tω − n₀ means (0,1)·(0,1) = (−n₀, t).
            assert_eq!(spec.elem_mul((0, 1), (0, 1)), (-n0, t), "d = {d}");
            // Norm multiplicativity on a few elements.
            for e1 in [(3i128, 2i128), (-1, 5), (7, -4)] {
                for e2 in [(2i128, -3i128), (0, 1), (5, 5)] {
                    let p = spec.elem_mul(e1, e2);
                    assert_eq!(
                        spec.elem_norm(p.0, p.1),
                        spec.elem_norm(e1.0, e1.1) * spec.elem_norm(e2.0, e2.1)
                    );
                }
            }
            // Conjugation preserves norm and x+yω times its conjugate is the norm.
            let e = (4i128, -7i128);
            let c = spec.elem_conj(e);
            let prod = spec.elem_mul(e, c);
            assert_eq!(prod, (spec.elem_norm(e.0, e.1), 0));
        }
    }

    #[test]
    fn invariants_gaussian() {
        // d = −1: disc −4, h = 1, μ = 4, α = π/4 (by the analytic class
        // number formula with h = R = 1).
        let inv = field_invariants(FieldSpec::quadratic(-1).unwrap()).unwrap();
        assert_eq!(inv.disc, -4);
        assert_eq!((inv.h, inv.h_narrow, inv.mu_order), (1, 1, 4));
        assert!((inv.alpha - std::f64::consts::PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn invariants_d_minus5() {
        // d = −5: disc −20, h = 2 (reduced forms x²+5y² and 2x²+2xy+3y²),
        // α = 2π·2/(2√20).
        let inv = field_invariants(FieldSpec::quadratic(-5).unwrap()).unwrap();
        assert_eq!(inv.disc, -20);
        assert_eq!(inv.h, 2);
        let expected = 2.0 * std::f64::consts::PI * 2.0 / (2.0 * 20f64.sqrt());
        assert!((inv.alpha - expected).abs() < 1e-9);
        assert!((inv.alpha - 1.4049629).abs() < 1e-6);
    }

    #[test]
    fn invariants_real_3() {
        // d = 3: disc 12, fundamental unit 2+√3 of norm +1, h = 1,
        // narrow class number 2, R = log(2+√3).
        let inv = field_invariants(FieldSpec::quadratic(3).unwrap()).unwrap();
        assert_eq!(inv.disc, 12);
        assert_eq!((inv.h, inv.h_narrow), (1, 2));
        assert_eq!(inv.fund_unit_norm, Some(1));
        assert!((inv.regulator - (2.0 + 3f64.sqrt()).ln()).abs() < 1e-12);
        assert!((inv.regulator - 1.3169579).abs() < 1e-6);
    }

    #[test]
    fn rational_backend() {
        let inv = field_invariants(FieldSpec::rational()).unwrap();
        assert_eq!((inv.n, inv.r1, inv.r2), (1, 1, 0));
        assert!((inv.alpha - 1.0).abs() < 1e-15);
    }

    #[test]
    fn acf_exact_relation() {
        // α·μ·√|disc| = 2^{r1}(2π)^{r2}·h·R to 1e−12 relative tolerance.
        for d in [-1i64, -2, -3, -5, -7, -11, -163, 2, 3, 5, 13, 17] {
            let inv = field_invariants(FieldSpec::quadratic(d).unwrap()).unwrap();
            let lhs = inv.alpha * inv.mu_order as f64 * (inv.disc.unsigned_abs() as f64).sqrt();
            let rhs = 2f64.powi(inv.r1 as i32)
                * (2.0 * std::f64::consts::PI).powi(inv.r2 as i32)
                * inv.h as f64
                * inv.regulator;
            assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0), "d = {d}");
        }
    }

    #[test]
    fn rootdisc_and_class_number_bounds() {
        // |disc|^{1/n} ≥ π/2 and h ≤ 67(π²/5)^n |disc|^{3/4}, plus the
        // Friedman lower bound R/μ ≥ 0.09, for every constructed field.
        for d in [-1i64, -2, -3, -5, -7, -11, 2, 3, 5, 13] {
            let inv = field_invariants(FieldSpec::quadratic(d).unwrap()).unwrap();
            let n = inv.n as f64;
            let ad = inv.disc.unsigned_abs() as f64;
            assert!(ad.powf(1.0 / n) >= std::f64::consts::PI / 2.0);
            let pi2over5 = std::f64::consts::PI * std::f64::consts::PI / 5.0;
            assert!((inv.h as f64) <= 67.0 * pi2over5.powf(n) * ad.powf(0.75));
            assert!(inv.regulator / inv.mu_order as f64 >= 0.09);
        }
    }
}
