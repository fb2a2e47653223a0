//! Principality testing with explicit generators.
//!
//! An ideal I = s·(aZ + (b+ω)Z) maps to the quadratic form
//! f(u, v) = N(ua + v(b+ω)) / N₁ of the field discriminant, where
//! N₁ = a is the norm of the primitive part. Proper equivalence classes of
//! forms realize the narrow class group, so:
//! - imaginary case: I is principal iff its reduced form equals the reduced
//!   principal form; the reduction transformation yields a generator.
//! - real case: I is (wide) principal iff its reduced form lies in the
//!   ρ-cycle of the principal form (generator of norm +N) or in the cycle
//!   of the form representing −1 (generator of norm −N). Walking the cycle
//!   with word tracking recovers the generator.
//!
//! Whether some associate of the generator is totally positive is decided
//! by scanning the finite group of unit sign classes (generated by −1 and
//! the fundamental unit).

use super::forms::{
    fundamental_unit, principal_form, reduce_imaginary, reduce_real, rho_real, FormI128, Mat2,
};
use super::{AlgebraicNumber, IdealHNF};
use crate::error::{Error, Result};

/// The quadratic form of the primitive part aZ + (b+ω)Z of an ideal:
/// (a, 2b+t, N(b+ω)/a), of the field discriminant.
pub fn form_of_ideal(x: &IdealHNF) -> FormI128 {
    let t = x.field.omega_trace();
    let nb = x.field.elem_norm(x.b, 1);
    debug_assert_eq!(nb % x.a, 0);
    let f = FormI128 {
        a: x.a,
        b: 2 * x.b + t,
        c: nb / x.a,
    };
    debug_assert_eq!(f.disc(), x.field.disc() as i128);
    f
}

/// Canonical narrow-class tag of an ideal: the reduced form (imaginary)
/// or the lexicographically smallest form in the reduced cycle (real).
/// Two ideals share a tag iff they lie in the same narrow ideal class.
pub fn narrow_class_tag(x: &IdealHNF) -> Result<FormI128> {
    let d = x.field.quad_d()?;
    let f = form_of_ideal(x);
    if d < 0 {
        Ok(reduce_imaginary(f).0)
    } else {
        let (red, _) = reduce_real(f)?;
        let mut min = red;
        let mut g = rho_real(red).0;
        while g != red {
            if g < min {
                min = g;
            }
            g = rho_real(g).0;
        }
        Ok(min)
    }
}

/// If `x` is principal, return a generator and whether some associate of
/// it is totally positive (vacuously true in the imaginary case, where
/// there are no real embeddings). Returns `None` for non-principal ideals.
pub fn narrow_principal_generator(
    x: &IdealHNF,
) -> Result<Option<(AlgebraicNumber, bool)>> {
    let d = x.field.quad_d()?;
    let result = if d < 0 {
        generator_imaginary(x)?
    } else {
        generator_real(x)?
    };
    match result {
        Some(gen) => {
            let tp = if d < 0 {
                true
            } else {
                totally_positive_associate_exists(&gen)?
            };
            Ok(Some((gen, tp)))
        }
        None => Ok(None),
    }
}

fn generator_imaginary(x: &IdealHNF) -> Result<Option<AlgebraicNumber>> {
    let disc = x.field.disc();
    let f = form_of_ideal(x);
    let (f_red, m) = reduce_imaginary(f);
    let (p_red, _) = reduce_imaginary(principal_form(disc));
    if f_red != p_red {
        return Ok(None);
    }
    match generator_from_transform(x, &m).or_else(|| fallback_search(x)) {
        Some(gen) => Ok(Some(gen)),
        None => Err(Error::Undecided(format!(
            "principality fallback exhausted for {x}"
        ))),
    }
}

fn generator_real(x: &IdealHNF) -> Result<Option<AlgebraicNumber>> {
    let disc = x.field.disc();
    let f = form_of_ideal(x);
    let (f_red, m0) = reduce_real(f)?;
    let fp = principal_form(disc);
    // The form representing −1 (same b as the principal form).
    let fneg = FormI128 {
        a: -1,
        b: fp.b,
        c: (fp.b * fp.b - disc as i128) / (-4),
    };
    debug_assert_eq!(fneg.disc(), disc as i128);
    for target in [fp, fneg] {
        let (t_red, mp) = reduce_real(target)?;
        // Walk the cycle of f_red looking for t_red, tracking the word.
        let mut g = f_red;
        let mut mc = Mat2::identity();
        loop {
            if g == t_red {
                let mtot = m0.mul(&mc).mul(&mp.inverse());
                debug_assert_eq!(f.apply(&mtot), target);
                match generator_from_transform(x, &mtot).or_else(|| fallback_search(x)) {
                    Some(gen) => return Ok(Some(gen)),
                    None => {
                        return Err(Error::Undecided(format!(
                            "principality fallback exhausted for {x}"
                        )))
                    }
                }
            }
            let (next, step) = rho_real(g);
            g = next;
            mc = mc.mul(&step);
            if g == f_red {
                break;
            }
        }
    }
    Ok(None)
}

/// Generator from a reduction word: with f∘M sending (1,0) to a value of
/// absolute value 1, the element u·a + v·(b+ω) for (u,v) the first column
/// of M has norm ±N of the primitive part; rescaling by s gives the
/// generator. Verified by exact ideal equality; `None` if the check fails
/// (callers then fall back to bounded search).
fn generator_from_transform(x: &IdealHNF, m: &Mat2) -> Option<AlgebraicNumber> {
    let (u, v) = (m.m[0][0], m.m[1][0]);
    let gx = x.s * (x.a * u + x.b * v);
    let gy = x.s * v;
    if (gx, gy) == (0, 0) {
        return None;
    }
    let cand = IdealHNF::from_element(x.field, gx, gy).ok()?;
    if cand == *x {
        Some(AlgebraicNumber::from_integer_coords(x.field, gx, gy))
    } else {
        None
    }
}

/// Bounded search over lattice combinations of the ideal basis for an
/// element generating the ideal.
fn fallback_search(x: &IdealHNF) -> Option<AlgebraicNumber> {
    const BOUND: i128 = 300;
    let target = x.norm();
    for v in -BOUND..=BOUND {
        for u in -BOUND..=BOUND {
            let gx = x.s * (x.a * u + x.b * v);
            let gy = x.s * v;
            if (gx, gy) == (0, 0) {
                continue;
            }
            if x.field.elem_norm(gx, gy).abs() != target {
                continue;
            }
            if let Ok(cand) = IdealHNF::from_element(x.field, gx, gy) {
                if cand == *x {
                    return Some(AlgebraicNumber::from_integer_coords(x.field, gx, gy));
                }
            }
        }
    }
    None
}

/// Does some associate u·γ (u a unit) have positive sign at both real
/// embeddings? The achievable sign adjustments form the subgroup of
/// {±1}² generated by the signs of −1 and of the fundamental unit.
fn totally_positive_associate_exists(gen: &AlgebraicNumber) -> Result<bool> {
    let (s1, s2) = gen.embedding_signs()?;
    if s1 == 0 || s2 == 0 {
        return Err(Error::Internal("generator with zero embedding".into()));
    }
    if s1 > 0 && s2 > 0 {
        return Ok(true);
    }
    let unit = fundamental_unit(gen.field)?;
    let (e1, e2) = unit.value.embedding_signs()?;
    // Sign subgroup: {(+,+), (−,−)} always (via −1), plus the signs of ε.
    let mut signs = vec![(1i8, 1i8), (-1, -1)];
    for &(a, b) in &[(e1, e2), (-e1, -e2)] {
        if !signs.contains(&(a, b)) {
            signs.push((a, b));
        }
    }
    Ok(signs.contains(&(s1, s2)))
}
