//! Exact univariate polynomials over Q: arithmetic, calculus, Sturm
//! sequences, root isolation, and certified sup-norm bounds on [0, 1].

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

/// A polynomial with exact rational coefficients, ascending order,
/// trailing zeros trimmed (the zero polynomial has no coefficients).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QPoly {
    pub coeffs: Vec<BigRational>,
}

pub fn rat_i(n: i128) -> BigRational {
    BigRational::from(BigInt::from(n))
}

pub fn rat(n: i128, d: i128) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl QPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn zero() -> Self {
        QPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    pub fn x() -> Self {
        Self::new(vec![BigRational::zero(), BigRational::one()])
    }

    pub fn from_i128(coeffs: &[i128]) -> Self {
        Self::new(coeffs.iter().map(|&c| rat_i(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports degree 0 here.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }

    pub fn add(&self, other: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![BigRational::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] += c;
        }
        QPoly::new(out)
    }

    pub fn neg(&self) -> QPoly {
        QPoly {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn sub(&self, other: &QPoly) -> QPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &QPoly) -> QPoly {
        if self.is_zero() || other.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly::new(out)
    }

    pub fn scale(&self, c: &BigRational) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, mut k: u32) -> QPoly {
        let mut base = self.clone();
        let mut acc = QPoly::constant(BigRational::one());
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Composition self(other(x)).
    pub fn compose(&self, other: &QPoly) -> QPoly {
        let mut acc = QPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(other).add(&QPoly::constant(c.clone()));
        }
        acc
    }

    pub fn derivative(&self) -> QPoly {
        if self.coeffs.len() <= 1 {
            return QPoly::zero();
        }
        QPoly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * rat_i(i as i128 + 1))
                .collect(),
        )
    }

    pub fn nth_derivative(&self, n: usize) -> QPoly {
        let mut p = self.clone();
        for _ in 0..n {
            p = p.derivative();
        }
        p
    }

    /// Antiderivative with constant term 0.
    pub fn antiderivative(&self) -> QPoly {
        let mut out = vec![BigRational::zero(); self.coeffs.len() + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i + 1] = c / rat_i(i as i128 + 1);
        }
        QPoly::new(out)
    }

    /// Exact definite integral ∫_a^b.
    pub fn integrate(&self, a: &BigRational, b: &BigRational) -> BigRational {
        let f = self.antiderivative();
        f.eval(b) - f.eval(a)
    }

    /// Euclidean division: (quotient, remainder) with deg r < deg divisor.
    pub fn div_rem(&self, divisor: &QPoly) -> (QPoly, QPoly) {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let mut rem = self.clone();
        let mut quo = vec![
            BigRational::zero();
            self.coeffs.len().saturating_sub(divisor.coeffs.len()) + 1
        ];
        let dl = divisor.leading();
        while !rem.is_zero() && rem.degree() >= divisor.degree() && !(rem.degree() == 0 && divisor.degree() > 0)
        {
            let shift = rem.degree() - divisor.degree();
            let c = rem.leading() / &dl;
            quo[shift] = c.clone();
            let mut sub = vec![BigRational::zero(); shift];
            sub.extend(divisor.coeffs.iter().map(|a| a * &c));
            rem = rem.sub(&QPoly::new(sub));
            if rem.coeffs.len() > shift + divisor.degree() {
                // Leading term must cancel exactly; guard against loops.
                rem.coeffs.truncate(shift + divisor.degree());
                rem = QPoly::new(rem.coeffs);
            }
        }
        (QPoly::new(quo), rem)
    }

    /// Sum of |cᵢ|: an upper bound for |p| on [−1, 1] ⊇ [0, 1].
    pub fn coeff_abs_sum(&self) -> BigRational {
        self.coeffs.iter().map(Signed::abs).sum()
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*t")?,
                _ => write!(f, "({c})*t^{i}")?,
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Sturm sequences and root isolation
// ---------------------------------------------------------------------------

/// The Sturm sequence p, p', then negated remainders.
pub fn sturm_sequence(p: &QPoly) -> Vec<QPoly> {
    let mut seq = vec![p.clone(), p.derivative()];
    while !seq.last().unwrap().is_zero() && seq.last().unwrap().degree() > 0 {
        let n = seq.len();
        let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
        if r.is_zero() {
            break;
        }
        seq.push(r.neg());
    }
    if seq.last().unwrap().is_zero() {
        seq.pop();
    }
    seq
}

fn sign_variations(seq: &[QPoly], x: &BigRational) -> usize {
    let mut vars = 0;
    let mut last = 0i8;
    for p in seq {
        let v = p.eval(x);
        let s = if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        };
        if s != 0 {
            if last != 0 && s != last {
                vars += 1;
            }
            last = s;
        }
    }
    vars
}

/// Number of distinct real roots in the half-open interval (a, b].
pub fn count_roots(p: &QPoly, a: &BigRational, b: &BigRational) -> usize {
    let seq = sturm_sequence(p);
    sign_variations(&seq, a) - sign_variations(&seq, b)
}

/// Disjoint intervals (lo, hi], each containing exactly one distinct root
/// of p in (a, b], refined by bisection until hi − lo ≤ width.
pub fn isolate_roots(
    p: &QPoly,
    a: &BigRational,
    b: &BigRational,
    width: &BigRational,
) -> Vec<(BigRational, BigRational)> {
    let seq = sturm_sequence(p);
    let mut out = Vec::new();
    let mut stack = vec![(a.clone(), b.clone())];
    let two = rat_i(2);
    while let Some((lo, hi)) = stack.pop() {
        let n = sign_variations(&seq, &lo) - sign_variations(&seq, &hi);
        if n == 0 {
            continue;
        }
        if n == 1 && &hi - &lo <= *width {
            out.push((lo, hi));
            continue;
        }
        let mid = (&lo + &hi) / &two;
        stack.push((lo, mid.clone()));
        stack.push((mid, hi));
    }
    out.sort_by(|x, y| x.0.cmp(&y.0));
    out
}

/// Certified upper bound for max |p| on [a, b] ⊆ [−1, 1], within `slack`
/// of the true maximum: samples p at endpoints of derivative-root
/// isolating intervals and pads by interval-width times a bound on |p'|.
pub fn sup_norm_upper_bound(
    p: &QPoly,
    a: &BigRational,
    b: &BigRational,
    slack: &BigRational,
) -> BigRational {
    let dp = p.derivative();
    // |p'| ≤ Σ|coeffs| on [−1, 1].
    let m = dp.coeff_abs_sum();
    let width = if m.is_zero() {
        b - a
    } else {
        (slack / &m).min(b - a)
    };
    let mut best = p.eval(a).abs().max(p.eval(b).abs());
    if !dp.is_zero() && dp.degree() >= 1 {
        for (lo, hi) in isolate_roots(&dp, a, b, &width) {
            let cand = p.eval(&lo).abs().max(p.eval(&hi).abs()) + (&hi - &lo) * &m;
            best = best.max(cand);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_calculus() {
        // (x−1)(x+2) = x² + x − 2
        let p = QPoly::from_i128(&[-1, 1]).mul(&QPoly::from_i128(&[2, 1]));
        assert_eq!(p, QPoly::from_i128(&[-2, 1, 1]));
        assert_eq!(p.eval(&rat_i(3)), rat_i(10));
        assert_eq!(p.derivative(), QPoly::from_i128(&[1, 2]));
        // ∫₀¹ (x² + x − 2) = 1/3 + 1/2 − 2 = −7/6
        assert_eq!(p.integrate(&rat_i(0), &rat_i(1)), rat(-7, 6));
        // derivative ∘ antiderivative = identity
        assert_eq!(p.antiderivative().derivative(), p);
    }

    #[test]
    fn division_and_composition() {
        let p = QPoly::from_i128(&[-2, 0, 0, 1]); // x³ − 2
        let d = QPoly::from_i128(&[-1, 1]); // x − 1
        let (q, r) = p.div_rem(&d);
        assert_eq!(q.mul(&d).add(&r), p);
        assert_eq!(r, QPoly::from_i128(&[-1])); // p(1) = −1
        // compose: (x²)∘(x+1) = x² + 2x + 1
        let sq = QPoly::from_i128(&[0, 0, 1]);
        let shift = QPoly::from_i128(&[1, 1]);
        assert_eq!(sq.compose(&shift), QPoly::from_i128(&[1, 2, 1]));
        // pow matches repeated mul
        assert_eq!(shift.pow(3), shift.mul(&shift).mul(&shift));
    }

    #[test]
    fn sturm_counts_known_roots() {
        // (x−1)(x−2)(x−3): 3 roots in (0, 10], 1 in (0, 3/2]
        let p = QPoly::from_i128(&[-1, 1])
            .mul(&QPoly::from_i128(&[-2, 1]))
            .mul(&QPoly::from_i128(&[-3, 1]));
        assert_eq!(count_roots(&p, &rat_i(0), &rat_i(10)), 3);
        assert_eq!(count_roots(&p, &rat_i(0), &rat(3, 2)), 1);
        // x² + 1: no real roots
        let q = QPoly::from_i128(&[1, 0, 1]);
        assert_eq!(count_roots(&q, &rat_i(-10), &rat_i(10)), 0);
        // repeated roots counted once: (x−1)²
        let r = QPoly::from_i128(&[1, -2, 1]);
        assert_eq!(count_roots(&r, &rat_i(0), &rat_i(2)), 1);
    }

    #[test]
    fn isolation_brackets_sqrt2() {
        let p = QPoly::from_i128(&[-2, 0, 1]);
        let roots = isolate_roots(&p, &rat_i(0), &rat_i(2), &rat(1, 1024));
        assert_eq!(roots.len(), 1);
        let (lo, hi) = &roots[0];
        let s = std::f64::consts::SQRT_2;
        assert!(lo.to_f64().unwrap() < s && s <= hi.to_f64().unwrap());
        assert!((hi - lo) <= rat(1, 1024));
    }

    #[test]
    fn sup_norm_bound_is_valid_and_tight() {
        // max of x(1−x) on [0,1] is 1/4 at x = 1/2.
        let p = QPoly::from_i128(&[0, 1]).mul(&QPoly::from_i128(&[1, -1]));
        let bound = sup_norm_upper_bound(&p, &rat_i(0), &rat_i(1), &rat(1, 1000));
        assert!(bound >= rat(1, 4));
        assert!(bound <= rat(1, 4) + rat(1, 1000));
        // Chebyshev-like wiggle: bound must dominate dense sampling.
        let q = QPoly::from_i128(&[1, -8, 40, -96, 64]);
        let bound = sup_norm_upper_bound(&q, &rat_i(0), &rat_i(1), &rat(1, 100));
        for k in 0..=200 {
            let x = rat(k, 200);
            assert!(q.eval(&x).abs() <= bound);
        }
    }
}
