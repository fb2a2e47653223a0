//! Binary quadratic forms: reduction with transformation tracking, class
//! number enumeration (definite and indefinite), cycles of reduced
//! indefinite forms, and the fundamental unit via the continued fraction
//! of ω.
//!
//! Conventions: a form f = (a, b, c) is ax² + bxy + cy² with discriminant
//! b² − 4ac; the right action is (f∘M)(u, v) = f(m11·u + m12·v,
//! m21·u + m22·v) for M ∈ SL₂(Z). Proper equivalence classes of primitive
//! forms of the field discriminant correspond to the narrow ideal class
//! group; for negative discriminants narrow and wide coincide.

use super::{AlgebraicNumber, FieldSpec};
use crate::error::{Error, Result};
use crate::intutil::{gcd_i128, isqrt};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::HashMap;

/// A binary quadratic form with machine-integer coefficients.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct FormI128 {
    pub a: i128,
    pub b: i128,
    pub c: i128,
}

/// A 2×2 integer matrix acting on forms on the right.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Mat2 {
    pub m: [[i128; 2]; 2],
}

impl Mat2 {
    pub fn identity() -> Self {
        Mat2 {
            m: [[1, 0], [0, 1]],
        }
    }

    pub fn mul(&self, other: &Mat2) -> Mat2 {
        let a = &self.m;
        let b = &other.m;
        Mat2 {
            m: [
                [
                    a[0][0] * b[0][0] + a[0][1] * b[1][0],
                    a[0][0] * b[0][1] + a[0][1] * b[1][1],
                ],
                [
                    a[1][0] * b[0][0] + a[1][1] * b[1][0],
                    a[1][0] * b[0][1] + a[1][1] * b[1][1],
                ],
            ],
        }
    }

    pub fn det(&self) -> i128 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Inverse of a unimodular matrix.
    pub fn inverse(&self) -> Mat2 {
        let d = self.det();
        debug_assert!(d == 1 || d == -1);
        Mat2 {
            m: [
                [d * self.m[1][1], -d * self.m[0][1]],
                [-d * self.m[1][0], d * self.m[0][0]],
            ],
        }
    }
}

impl FormI128 {
    pub fn disc(&self) -> i128 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn eval(&self, u: i128, v: i128) -> i128 {
        self.a * u * u + self.b * u * v + self.c * v * v
    }

    /// Right action by M: (f∘M)(u,v) = f(M·(u,v)ᵀ).
    pub fn apply(&self, mm: &Mat2) -> FormI128 {
        let [[p, q], [r, s]] = mm.m;
        FormI128 {
            a: self.eval(p, r),
            b: 2 * (self.a * p * q + self.c * r * s) + self.b * (p * s + q * r),
            c: self.eval(q, s),
        }
    }

    pub fn is_primitive(&self) -> bool {
        gcd_i128(gcd_i128(self.a, self.b), self.c) == 1
    }

    /// Reduced test for positive definite forms: |b| ≤ a ≤ c, with b ≥ 0
    /// when |b| = a or a = c.
    pub fn is_reduced_imaginary(&self) -> bool {
        self.a > 0
            && self.b.abs() <= self.a
            && self.a <= self.c
            && (self.b >= 0 || (self.b.abs() < self.a && self.a < self.c))
    }

    /// Reduced test for indefinite forms of non-square discriminant D > 0:
    /// 0 < b < √D and √D − b < 2|a| < √D + b (checked exactly).
    pub fn is_reduced_real(&self) -> bool {
        let dd = self.disc();
        if dd <= 0 {
            return false;
        }
        let fl = isqrt(dd);
        let b = self.b;
        let two_a = 2 * self.a.abs();
        b >= 1 && b <= fl && two_a >= fl - b + 1 && two_a <= fl + b
    }
}

/// Reduce a positive definite form, tracking M with f∘M = reduced.
pub fn reduce_imaginary(f: FormI128) -> (FormI128, Mat2) {
    debug_assert!(f.disc() < 0 && f.a > 0);
    let mut g = f;
    let mut m = Mat2::identity();
    loop {
        // Translate b into (−a, a].
        if g.b > g.a || g.b <= -g.a {
            let k = (g.a - g.b).div_euclid(2 * g.a);
            let t = Mat2 { m: [[1, k], [0, 1]] };
            g = g.apply(&t);
            m = m.mul(&t);
        }
        if g.a > g.c {
            let s = Mat2 {
                m: [[0, -1], [1, 0]],
            };
            g = g.apply(&s);
            m = m.mul(&s);
        } else {
            break;
        }
    }
    // Boundary normalizations keep the representative unique.
    if g.b < 0 && (g.b == -g.a || g.a == g.c) {
        let s = Mat2 {
            m: [[0, -1], [1, 0]],
        };
        let t = Mat2 { m: [[1, 1], [0, 1]] };
        if g.a == g.c {
            g = g.apply(&s);
            m = m.mul(&s);
        } else {
            g = g.apply(&t);
            m = m.mul(&t);
        }
    }
    debug_assert!(g.is_reduced_imaginary(), "not reduced: {g:?}");
    debug_assert_eq!(f.apply(&m), g);
    (g, m)
}

/// One step of the reduction operator ρ on indefinite forms, tracking the
/// step matrix: ρ(f) = f ∘ [[0, −1], [1, s]].
pub fn rho_real(f: FormI128) -> (FormI128, Mat2) {
    let dd = f.disc();
    let fl = isqrt(dd);
    let c = f.c;
    let cc = c.abs();
    debug_assert!(cc > 0);
    // b' ≡ −b (mod 2|c|), landed in the normalization interval.
    let b0 = (-f.b).rem_euclid(2 * cc);
    let bp = if cc * cc > dd {
        if b0 > cc {
            b0 - 2 * cc
        } else {
            b0
        }
    } else {
        fl - (fl - b0).rem_euclid(2 * cc)
    };
    debug_assert_eq!((bp + f.b).rem_euclid(2 * cc), 0);
    let s = (bp + f.b) / (2 * c);
    let step = Mat2 {
        m: [[0, -1], [1, s]],
    };
    let g = f.apply(&step);
    debug_assert_eq!(g, FormI128 {
        a: c,
        b: bp,
        c: (bp * bp - dd) / (4 * c),
    });
    (g, step)
}

/// Reduce an indefinite form by iterating ρ, tracking M with f∘M = reduced.
pub fn reduce_real(f: FormI128) -> Result<(FormI128, Mat2)> {
    debug_assert!(f.disc() > 0);
    let mut g = f;
    let mut m = Mat2::identity();
    for _ in 0..10_000 {
        if g.is_reduced_real() {
            debug_assert_eq!(f.apply(&m), g);
            return Ok((g, m));
        }
        let (next, step) = rho_real(g);
        g = next;
        m = m.mul(&step);
    }
    Err(Error::Internal(format!(
        "indefinite reduction did not terminate for {f:?}"
    )))
}

/// The ρ-cycle through a reduced indefinite form, starting at `f`.
pub fn reduced_cycle(f: FormI128) -> Vec<FormI128> {
    debug_assert!(f.is_reduced_real());
    let mut cycle = vec![f];
    let mut g = rho_real(f).0;
    while g != f {
        cycle.push(g);
        g = rho_real(g).0;
    }
    cycle
}

/// All primitive reduced positive definite forms of discriminant D < 0.
pub fn reduced_forms_imaginary(disc: i64) -> Vec<FormI128> {
    let dd = disc as i128;
    debug_assert!(dd < 0);
    let mut out = Vec::new();
    let mut a = 1i128;
    while 3 * a * a <= -dd {
        for b in -a..=a {
            if (b - dd).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - dd;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            let f = FormI128 { a, b, c };
            if f.is_reduced_imaginary() && f.is_primitive() {
                out.push(f);
            }
        }
        a += 1;
    }
    out.sort();
    out
}

/// All primitive reduced indefinite forms of (non-square) discriminant D > 0.
pub fn reduced_forms_real(disc: i64) -> Vec<FormI128> {
    let dd = disc as i128;
    debug_assert!(dd > 0);
    let fl = isqrt(dd);
    debug_assert!(fl * fl != dd, "square discriminant");
    let mut out = Vec::new();
    let mut b = 1i128;
    while b <= fl {
        if (dd - b * b).rem_euclid(4) == 0 {
            let prod = (b * b - dd) / 4; // = a·c < 0
            let m = -prod;
            let mut a_abs = 1i128;
            while a_abs * a_abs <= m {
                if m % a_abs == 0 {
                    for &a in &[a_abs, -a_abs, m / a_abs, -(m / a_abs)] {
                        let c = prod / a;
                        let f = FormI128 { a, b, c };
                        if f.is_reduced_real() && f.is_primitive() && !out.contains(&f) {
                            out.push(f);
                        }
                    }
                }
                a_abs += 1;
            }
        }
        b += 1;
    }
    out.sort();
    out
}

/// Class number of an imaginary quadratic field by counting reduced forms.
pub fn class_number_imaginary(disc: i64) -> Result<u64> {
    Ok(reduced_forms_imaginary(disc).len() as u64)
}

/// Narrow class number of a real quadratic field: the number of ρ-cycles
/// of primitive reduced indefinite forms.
pub fn class_number_narrow_real(disc: i64) -> Result<u64> {
    let forms = reduced_forms_real(disc);
    let mut seen: Vec<FormI128> = Vec::new();
    let mut cycles = 0u64;
    for &f in &forms {
        if seen.contains(&f) {
            continue;
        }
        cycles += 1;
        for g in reduced_cycle(f) {
            seen.push(g);
        }
    }
    if seen.len() != forms.len() {
        return Err(Error::Internal(
            "cycle partition does not cover all reduced forms".into(),
        ));
    }
    Ok(cycles)
}

/// The principal form of discriminant D: (1, b₀, (b₀²−D)/4) with b₀ ≡ D
/// (mod 2), already reduced for D < 0 and normalized via reduction for
/// D > 0 (b₀ taken maximal below √D).
pub fn principal_form(disc: i64) -> FormI128 {
    let dd = disc as i128;
    let parity = dd.rem_euclid(2);
    let b0 = if dd < 0 {
        parity
    } else {
        let fl = isqrt(dd);
        if fl.rem_euclid(2) == parity {
            fl
        } else {
            fl - 1
        }
    };
    FormI128 {
        a: 1,
        b: b0,
        c: (b0 * b0 - dd) / 4,
    }
}

/// Fundamental unit data for a real quadratic field.
#[derive(Clone, Debug)]
pub struct FundUnit {
    /// The unit ε > 1 in coordinates over (1, ω).
    pub value: AlgebraicNumber,
    /// N(ε) ∈ {+1, −1}.
    pub norm: i8,
    /// The regulator log ε.
    pub log_value: f64,
}

/// Fundamental unit of O_K via the continued fraction of ω: the expansion
/// of a quadratic irrational is eventually periodic, and one full period of
/// the periodic tail yields the fundamental automorphism, hence ε.
pub fn fundamental_unit(spec: FieldSpec) -> Result<FundUnit> {
    let d = spec.quad_d()?;
    if d <= 0 {
        return Err(Error::Validation("fundamental unit needs d > 0".into()));
    }
    let d = d as i128;
    let fl = isqrt(d);
    // State x_i = (P_i + √d)/Q_i, starting at ω.
    let (mut p, mut q) = if (d - 1).rem_euclid(4) == 0 {
        (1i128, 2i128)
    } else {
        (0i128, 1i128)
    };
    // Convergent matrices M_i = [[a_0,1],[1,0]]···[[a_{i−1},1],[1,0]].
    let mut hist: Vec<(i128, i128)> = Vec::new();
    let mut mats: Vec<[BigInt; 4]> = Vec::new();
    let mut seen: HashMap<(i128, i128), usize> = HashMap::new();
    let mut m: [BigInt; 4] = [
        BigInt::one(),
        BigInt::zero(),
        BigInt::zero(),
        BigInt::one(),
    ];
    for _ in 0..100_000 {
        if let Some(&j) = seen.get(&(p, q)) {
            // x_j = x_k with W = M_j⁻¹ · M_k fixing x_j; the unit is
            // η = w21·x_j + w22.
            let (pj, qj) = hist[j];
            let mj = &mats[j];
            let det_j = &mj[0] * &mj[3] - &mj[1] * &mj[2]; // ±1
            let inv = [
                &det_j * &mj[3],
                -(&det_j * &mj[1]),
                -(&det_j * &mj[2]),
                &det_j * &mj[0],
            ];
            let w21 = &inv[2] * &m[0] + &inv[3] * &m[2];
            let w22 = &inv[2] * &m[1] + &inv[3] * &m[3];
            return unit_from_cf(spec, d, pj, qj, w21, w22);
        }
        seen.insert((p, q), hist.len());
        hist.push((p, q));
        mats.push(m.clone());
        let a = (p + fl).div_euclid(q);
        let step = [
            BigInt::from(a),
            BigInt::one(),
            BigInt::one(),
            BigInt::zero(),
        ];
        m = [
            &m[0] * &step[0] + &m[1] * &step[2],
            &m[0] * &step[1] + &m[1] * &step[3],
            &m[2] * &step[0] + &m[3] * &step[2],
            &m[2] * &step[1] + &m[3] * &step[3],
        ];
        let p_next = a * q - p;
        let q_next = (d - p_next * p_next) / q;
        debug_assert_eq!((d - p_next * p_next) % q, 0);
        p = p_next;
        q = q_next;
    }
    Err(Error::Internal("continued fraction did not cycle".into()))
}

fn unit_from_cf(
    spec: FieldSpec,
    d: i128,
    pj: i128,
    qj: i128,
    w21: BigInt,
    w22: BigInt,
) -> Result<FundUnit> {
    // η = (A + B√d)/Q with A = w21·P_j + w22·Q_j, B = w21, Q = Q_j.
    let a_num = &w21 * BigInt::from(pj) + &w22 * BigInt::from(qj);
    let b_num = w21;
    let qbig = BigInt::from(qj);
    // Convert to coordinates over (1, ω).
    let (x, y) = if (d - 1).rem_euclid(4) == 0 {
        // √d = 2ω − 1.
        (
            BigRational::new(&a_num - &b_num, qbig.clone()),
            BigRational::new(BigInt::from(2) * &b_num, qbig),
        )
    } else {
        (
            BigRational::new(a_num, qbig.clone()),
            BigRational::new(b_num, qbig),
        )
    };
    let eta = AlgebraicNumber::new(spec, x, y);
    if !eta.is_integral() {
        return Err(Error::Internal("CF unit is not integral".into()));
    }
    let n = eta.norm();
    let norm: i8 = if n == BigRational::one() {
        1
    } else if n == -BigRational::one() {
        -1
    } else {
        return Err(Error::Internal(format!("CF element has norm {n}, not ±1")));
    };
    // Normalize to the associate > 1.
    let candidates = [
        eta.clone(),
        eta.neg(),
        eta.conj(),
        eta.conj().neg(),
    ];
    let mut best: Option<(f64, AlgebraicNumber)> = None;
    for cand in candidates {
        let v = embed_ln(&cand, d);
        if let Some(lv) = v {
            if lv > 1e-12 && best.as_ref().map_or(true, |(bl, _)| lv < *bl) {
                best = Some((lv, cand));
            }
        }
    }
    let (log_value, value) =
        best.ok_or_else(|| Error::Internal("no unit associate exceeds 1".into()))?;
    Ok(FundUnit {
        value,
        norm,
        log_value,
    })
}

/// Natural log of a positive embedding value, robust to coordinates far
/// beyond f64 range (falls back to bit-length arithmetic).
fn embed_ln(e: &AlgebraicNumber, d: i128) -> Option<f64> {
    let sqrt_d = (d as f64).sqrt();
    let omega = if (d - 1).rem_euclid(4) == 0 {
        (1.0 + sqrt_d) / 2.0
    } else {
        sqrt_d
    };
    let af = rat_to_f64_scaled(&e.a);
    let bf = rat_to_f64_scaled(&e.b);
    // v = a + b·ω as (mantissa, exponent) pairs to dodge overflow.
    let (ma, ea) = af;
    let (mb, eb) = bf;
    // Align exponents.
    let e_max = ea.max(eb);
    let va = ma * 2f64.powi((ea - e_max).max(-1060) as i32);
    let vb = mb * 2f64.powi((eb - e_max).max(-1060) as i32);
    let v = va + vb * omega;
    if v <= 0.0 {
        return None;
    }
    Some(v.ln() + (e_max as f64) * std::f64::consts::LN_2)
}

/// BigRational → (mantissa ∈ [1,2)∪(−2,−1]∪{0}, binary exponent).
fn rat_to_f64_scaled(r: &BigRational) -> (f64, i64) {
    if r.is_zero() {
        return (0.0, 0);
    }
    let num = r.numer();
    let den = r.denom();
    let shift_n = num.bits() as i64 - 64;
    let shift_d = den.bits() as i64 - 64;
    let top_n = if shift_n > 0 { num >> shift_n } else { num.clone() };
    let top_d = if shift_d > 0 { den >> shift_d } else { den.clone() };
    let mv = top_n.to_f64().unwrap_or(0.0) / top_d.to_f64().unwrap_or(1.0);
    let ex = shift_n.max(0) - shift_d.max(0);
    (mv, ex)
}
