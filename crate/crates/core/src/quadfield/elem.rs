//! Field elements a + bω with exact rational coordinates.

use super::FieldSpec;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use std::fmt;

/// An element a + b·ω of K (ω as fixed by [`FieldSpec`]).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AlgebraicNumber {
    pub field: FieldSpec,
    pub a: BigRational,
    pub b: BigRational,
}

// Reports serialize elements in display form (e.g. "2 + 1*sqrt(3)").
impl Serialize for AlgebraicNumber {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl AlgebraicNumber {
    pub fn new(field: FieldSpec, a: BigRational, b: BigRational) -> Self {
        AlgebraicNumber { field, a, b }
    }

    pub fn from_integer_coords(field: FieldSpec, x: i128, y: i128) -> Self {
        AlgebraicNumber {
            field,
            a: BigRational::from(BigInt::from(x)),
            b: BigRational::from(BigInt::from(y)),
        }
    }

    pub fn zero(field: FieldSpec) -> Self {
        Self::from_integer_coords(field, 0, 0)
    }

    pub fn one(field: FieldSpec) -> Self {
        Self::from_integer_coords(field, 1, 0)
    }

    /// Exact norm: a² + t·ab + n₀·b².
    pub fn norm(&self) -> BigRational {
        let t = BigRational::from(BigInt::from(self.field.omega_trace()));
        let n0 = BigRational::from(BigInt::from(self.field.omega_norm()));
        &self.a * &self.a + t * &self.a * &self.b + n0 * &self.b * &self.b
    }

    /// Exact trace: 2a + t·b.
    pub fn trace(&self) -> BigRational {
        let t = BigRational::from(BigInt::from(self.field.omega_trace()));
        BigRational::from(BigInt::from(2)) * &self.a + t * &self.b
    }

    /// Field conjugate: a + b·t − b·ω.
    pub fn conj(&self) -> Self {
        let t = BigRational::from(BigInt::from(self.field.omega_trace()));
        AlgebraicNumber {
            field: self.field,
            a: &self.a + t * &self.b,
            b: -self.b.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let t = BigRational::from(BigInt::from(self.field.omega_trace()));
        let n0 = BigRational::from(BigInt::from(self.field.omega_norm()));
        AlgebraicNumber {
            field: self.field,
            a: &self.a * &other.a - &n0 * &self.b * &other.b,
            b: &self.a * &other.b + &other.a * &self.b + t * &self.b * &other.b,
        }
    }

    pub fn neg(&self) -> Self {
        AlgebraicNumber {
            field: self.field,
            a: -self.a.clone(),
            b: -self.b.clone(),
        }
    }

    /// True when both coordinates are integers (the element lies in O_K).
    pub fn is_integral(&self) -> bool {
        self.a.is_integer() && self.b.is_integer()
    }

    /// Integer coordinates, when integral and within i128 range.
    pub fn integer_coords(&self) -> Option<(i128, i128)> {
        if !self.is_integral() {
            return None;
        }
        Some((self.a.to_integer().to_i128()?, self.b.to_integer().to_i128()?))
    }

    /// Values under the real embeddings (σ1 uses the positive square root).
    /// Only meaningful for real quadratic fields.
    pub fn embeddings(&self) -> (f64, f64) {
        let w1 = self.field.omega_real();
        let w2 = match self.field.d {
            Some(d) if d.rem_euclid(4) == 1 => (1.0 - (d as f64).sqrt()) / 2.0,
            Some(d) => -(d as f64).sqrt(),
            None => 0.0,
        };
        let (a, b) = (big_to_f64(&self.a), big_to_f64(&self.b));
        (a + b * w1, a + b * w2)
    }

    /// Exact signs under the two real embeddings (real fields only).
    /// Sign of a + b√d is determined exactly by comparing a² with d·b².
    pub fn embedding_signs(&self) -> Result<(i8, i8)> {
        let d = self.field.quad_d()?;
        if d < 0 {
            return Err(Error::Validation(
                "totally-positive predicate is defined only for r1 = 2".into(),
            ));
        }
        // Write the element as (u + v√d)/2 with rational u, v.
        let two = BigRational::from(BigInt::from(2));
        let (u, v) = if d.rem_euclid(4) == 1 {
            (&two * &self.a + &self.b, self.b.clone())
        } else {
            (&two * &self.a, &two * &self.b)
        };
        let sign_at = |sqrt_sign: i8| -> i8 {
            // sign of u + s·v√d where s = ±1: compare u² with d v² exactly.
            if v.is_zero() {
                return sign_rat(&u);
            }
            let vs = sign_rat(&v) * sqrt_sign;
            if u.is_zero() {
                return vs;
            }
            let u2 = &u * &u;
            let dv2 = BigRational::from(BigInt::from(d)) * &v * &v;
            let su = sign_rat(&u);
            if su == vs {
                su
            } else if u2 > dv2 {
                su
            } else if u2 < dv2 {
                vs
            } else {
                0
            }
        };
        Ok((sign_at(1), sign_at(-1)))
    }

    /// Totally positive: positive under every real embedding. Defined only
    /// for real quadratic fields (r1 = 2).
    pub fn is_totally_positive(&self) -> Result<bool> {
        let (s1, s2) = self.embedding_signs()?;
        Ok(s1 > 0 && s2 > 0)
    }
}

fn sign_rat(r: &BigRational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

fn big_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let omega = match self.field.d {
            Some(d) if d.rem_euclid(4) == 1 => format!("(1+sqrt({d}))/2"),
            Some(d) => format!("sqrt({d})"),
            None => "0".into(),
        };
        if self.a.is_zero() {
            write!(f, "{}*{omega}", self.b)
        } else {
            write!(f, "{} + {}*{omega}", self.a, self.b)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_and_trace_match_integer_ops() {
        for d in [-1i64, -5, 5, 13, 2, 3] {
            let spec = FieldSpec::quadratic(d).unwrap();
            for (x, y) in [(3i128, 2i128), (-4, 7), (0, 1), (5, 0)] {
                let e = AlgebraicNumber::from_integer_coords(spec, x, y);
                assert_eq!(
                    e.norm(),
                    BigRational::from(BigInt::from(spec.elem_norm(x, y)))
                );
                let c = e.conj();
                assert_eq!(e.mul(&c).a, e.norm());
                assert!(e.mul(&c).b.is_zero());
                assert_eq!(e.trace(), &e.a + &c.a + (&e.b + &c.b) * omega_tr(spec));
            }
        }
    }

    fn omega_tr(spec: FieldSpec) -> BigRational {
        BigRational::from(BigInt::from(spec.omega_trace()))
    }

    #[test]
    fn total_positivity_sqrt3() {
        let spec = FieldSpec::quadratic(3).unwrap();
        // √3 has embeddings ±√3: not totally positive; norm −3.
        let e = AlgebraicNumber::from_integer_coords(spec, 0, 1);
        assert!(!e.is_totally_positive().unwrap());
        // 2+√3 is a totally positive unit.
        let u = AlgebraicNumber::from_integer_coords(spec, 2, 1);
        assert!(u.is_totally_positive().unwrap());
        assert!(u.neg().is_totally_positive().map(|b| !b).unwrap());
        // 2−√3 = conj is also totally positive.
        assert!(u.conj().is_totally_positive().unwrap());
    }

    #[test]
    fn exact_signs_match_float_embeddings() {
        let spec = FieldSpec::quadratic(13).unwrap();
        for (x, y) in [(1i128, 1i128), (-2, 1), (4, -1), (-7, 2), (2, -1)] {
            let e = AlgebraicNumber::from_integer_coords(spec, x, y);
            let (s1, s2) = e.embedding_signs().unwrap();
            let (f1, f2) = e.embeddings();
            assert_eq!(s1 as f64, f1.signum(), "({x},{y})");
            assert_eq!(s2 as f64, f2.signum(), "({x},{y})");
        }
    }

    #[test]
    fn imaginary_field_rejects_positivity() {
        let spec = FieldSpec::quadratic(-1).unwrap();
        let e = AlgebraicNumber::from_integer_coords(spec, 1, 1);
        assert!(e.is_totally_positive().is_err());
    }
}
