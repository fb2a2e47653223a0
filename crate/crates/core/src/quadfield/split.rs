//! Prime ideal splitting, ideal factorization, and enumeration of ideals
//! and degree-one primes.
//!
//! Splitting of a rational prime p follows the Kronecker symbol of the
//! field discriminant: +1 split, −1 inert, 0 ramified. For split and
//! ramified primes the HNF part pZ + (b+ω)Z requires a root b of
//! N(b+ω) ≡ 0 (mod p), obtained from a modular square root of the
//! discriminant via (2b+t)² ≡ disc (mod p).

use super::{ideal_product, FieldSpec, IdealHNF};
use crate::error::{Error, Result};
use crate::intutil;
use serde::Serialize;

/// Splitting behavior of a rational prime.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PrimeKind {
    Split,
    Inert,
    Ramified,
}

/// A prime ideal over a rational prime p.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
pub struct PrimeIdeal {
    pub p: u64,
    pub kind: PrimeKind,
    /// Selects the conjugate in the split case (false = smaller HNF b).
    pub conj: bool,
    pub hnf: IdealHNF,
    pub residue_degree: u8,
}

impl PrimeIdeal {
    pub fn norm(&self) -> i128 {
        (self.p as i128).pow(self.residue_degree as u32)
    }

    /// The conjugate prime ideal (self for inert/ramified primes).
    pub fn conjugate(&self, spec: FieldSpec) -> PrimeIdeal {
        if self.kind != PrimeKind::Split {
            return *self;
        }
        let all = primes_above(spec, self.p).expect("prime splits");
        all.into_iter()
            .find(|q| q.conj != self.conj)
            .expect("split prime has two conjugates")
    }
}

/// The prime ideals above p, in canonical order (split: conj=false first).
pub fn primes_above(spec: FieldSpec, p: u64) -> Result<Vec<PrimeIdeal>> {
    spec.quad_d()?;
    if !intutil::is_prime(p) {
        return Err(Error::Validation(format!("{p} is not prime")));
    }
    let disc = spec.disc();
    let t = spec.omega_trace();
    let kind = match intutil::kronecker(disc, p as i64) {
        1 => PrimeKind::Split,
        -1 => PrimeKind::Inert,
        _ => PrimeKind::Ramified,
    };
    match kind {
        PrimeKind::Inert => Ok(vec![PrimeIdeal {
            p,
            kind,
            conj: false,
            hnf: IdealHNF {
                field: spec,
                s: p as i128,
                a: 1,
                b: 0,
            },
            residue_degree: 2,
        }]),
        PrimeKind::Split | PrimeKind::Ramified => {
            let roots = norm_roots_mod_p(spec, p, disc, t);
            debug_assert_eq!(
                roots.len(),
                if kind == PrimeKind::Split { 2 } else { 1 },
                "root count mismatch for p={p}, disc={disc}"
            );
            let mut out = Vec::new();
            for (i, &b) in roots.iter().enumerate() {
                let hnf = IdealHNF {
                    field: spec,
                    s: 1,
                    a: p as i128,
                    b,
                };
                debug_assert_eq!(spec.elem_norm(b, 1).rem_euclid(p as i128), 0);
                out.push(PrimeIdeal {
                    p,
                    kind,
                    conj: i == 1,
                    hnf,
                    residue_degree: 1,
                });
            }
            Ok(out)
        }
    }
}

/// Sorted roots b ∈ [0, p) of N(b+ω) ≡ 0 (mod p).
fn norm_roots_mod_p(spec: FieldSpec, p: u64, disc: i64, t: i128) -> Vec<i128> {
    if p == 2 {
        let mut roots = Vec::new();
        for b in 0i128..2 {
            if spec.elem_norm(b, 1).rem_euclid(2) == 0 {
                roots.push(b);
            }
        }
        return roots;
    }
    // Solve (2b+t)² ≡ disc (mod p), p odd.
    let Some(r) = intutil::sqrt_mod(disc, p) else {
        return Vec::new();
    };
    let pp = p as i128;
    let inv2 = (pp + 1) / 2; // inverse of 2 mod odd p
    let mut roots: Vec<i128> = [r as i128, pp - r as i128]
        .iter()
        .map(|&root| ((root - t) * inv2).rem_euclid(pp))
        .collect();
    roots.sort();
    roots.dedup();
    roots
}

/// Factor an integral ideal into prime ideals with exponents, by factoring
/// its norm (capped trial division) and then valuation tests by lattice
/// containment.
pub fn factor_ideal(x: &IdealHNF, cap: i128) -> Result<Vec<(PrimeIdeal, u32)>> {
    let spec = x.field;
    spec.quad_d()?;
    let norm = x.norm();
    if norm > cap {
        return Err(Error::FactoringCap { norm, cap });
    }
    let mut out: Vec<(PrimeIdeal, u32)> = Vec::new();
    for (p, e) in intutil::factor_u64(norm as u64, cap)? {
        let above = primes_above(spec, p)?;
        match above[0].kind {
            PrimeKind::Inert => {
                if e % 2 != 0 {
                    return Err(Error::Internal(format!(
                        "odd valuation {e} at inert prime {p}"
                    )));
                }
                out.push((above[0], e / 2));
            }
            PrimeKind::Ramified => {
                out.push((above[0], e));
            }
            PrimeKind::Split => {
                let v0 = valuation_by_containment(x, &above[0].hnf, e);
                let v1 = e - v0;
                debug_assert_eq!(valuation_by_containment(x, &above[1].hnf, e), v1);
                if v0 > 0 {
                    out.push((above[0], v0));
                }
                if v1 > 0 {
                    out.push((above[1], v1));
                }
            }
        }
    }
    debug_assert_eq!(
        {
            let mut prod = IdealHNF::from_rational(spec, 1).unwrap();
            for (pr, e) in &out {
                for _ in 0..*e {
                    prod = ideal_product(&prod, &pr.hnf).unwrap();
                }
            }
            prod
        },
        *x,
        "factorization does not reconstruct the ideal"
    );
    Ok(out)
}

/// Largest k ≤ max_e with P^k ⊇ x.
fn valuation_by_containment(x: &IdealHNF, prime: &IdealHNF, max_e: u32) -> u32 {
    let mut power = *prime;
    let mut v = 0u32;
    while v < max_e {
        if power.contains(x) {
            v += 1;
            if v < max_e {
                power = ideal_product(&power, prime).expect("same field");
            }
        } else {
            break;
        }
    }
    v
}

/// All degree-one primes with norm ≤ X coprime to q, sorted by norm then
/// conjugate flag. Ramified primes are degree one but are included only
/// when `include_ramified` is set (the two theorems differ on this).
pub fn enumerate_degree_one_primes(
    spec: FieldSpec,
    x_max: i128,
    q: &IdealHNF,
    include_ramified: bool,
) -> Result<Vec<PrimeIdeal>> {
    spec.quad_d()?;
    let mut out = Vec::new();
    if x_max < 2 {
        return Ok(out);
    }
    for p in intutil::primes_up_to(x_max as u64) {
        for pr in primes_above(spec, p)? {
            if pr.residue_degree != 1 {
                continue;
            }
            if pr.kind == PrimeKind::Ramified && !include_ramified {
                continue;
            }
            // Coprimality to q: P | q iff q ⊆ P.
            if pr.hnf.contains(q) {
                continue;
            }
            out.push(pr);
        }
    }
    out.sort_by_key(|pr| (pr.norm(), pr.conj));
    Ok(out)
}

/// An enumerated ideal together with its factorization (the enumeration is
/// multiplicative, so the factorization comes for free and callers avoid
/// re-factoring).
#[derive(Clone, Debug)]
pub struct EnumeratedIdeal {
    pub ideal: IdealHNF,
    pub norm: i128,
    pub factors: Vec<(PrimeIdeal, u32)>,
}

impl EnumeratedIdeal {
    /// μ of the ideal: 0 unless squarefree, else (−1)^{#primes}.
    pub fn moebius(&self) -> i32 {
        if self.factors.iter().any(|(_, e)| *e > 1) {
            0
        } else if self.factors.len() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// φ(ideal) = ∏ (N(P)^e − N(P)^{e−1}).
    pub fn phi(&self) -> i128 {
        self.factors
            .iter()
            .map(|(pr, e)| {
                let np = pr.norm();
                np.pow(*e) - np.pow(*e - 1)
            })
            .product()
    }
}

/// Every integral ideal coprime to q of norm ≤ X, each exactly once,
/// sorted by norm (ties broken by HNF components). Built multiplicatively
/// from prime-ideal factorizations.
pub fn enumerate_ideals(spec: FieldSpec, x_max: i128, q: &IdealHNF) -> Result<Vec<EnumeratedIdeal>> {
    spec.quad_d()?;
    let mut primes: Vec<PrimeIdeal> = Vec::new();
    if x_max >= 2 {
        for p in intutil::primes_up_to(x_max as u64) {
            for pr in primes_above(spec, p)? {
                if pr.norm() <= x_max && !pr.hnf.contains(q) {
                    primes.push(pr);
                }
            }
        }
    }
    primes.sort_by_key(|pr| (pr.norm(), pr.conj));
    let mut out: Vec<EnumeratedIdeal> = Vec::new();
    let mut stack = EnumeratedIdeal {
        ideal: IdealHNF::one(spec),
        norm: 1,
        factors: Vec::new(),
    };
    if x_max >= 1 {
        dfs(&primes, 0, &mut stack, x_max, &mut out)?;
    }
    out.sort_by_key(|e| (e.norm, e.ideal.s, e.ideal.a, e.ideal.b));
    Ok(out)
}

fn dfs(
    primes: &[PrimeIdeal],
    idx: usize,
    current: &mut EnumeratedIdeal,
    x_max: i128,
    out: &mut Vec<EnumeratedIdeal>,
) -> Result<()> {
    out.push(current.clone());
    for (i, pr) in primes.iter().enumerate().skip(idx) {
        let np = pr.norm();
        if current.norm * np > x_max {
            continue;
        }
        let mut next = EnumeratedIdeal {
            ideal: ideal_product(&current.ideal, &pr.hnf)?,
            norm: current.norm * np,
            factors: current.factors.clone(),
        };
        next.factors.push((*pr, 1));
        // Extend along this prime's powers inside the recursion by allowing
        // the same index again is wrong (would duplicate); instead loop
        // powers here.
        loop {
            dfs(primes, i + 1, &mut next, x_max, out)?;
            if next.norm * np > x_max {
                break;
            }
            next.ideal = ideal_product(&next.ideal, &pr.hnf)?;
            next.norm *= np;
            next.factors.last_mut().unwrap().1 += 1;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::FieldSpec;

    fn gauss() -> FieldSpec {
        FieldSpec::quadratic(-1).unwrap()
    }

    #[test]
    fn splitting_in_gaussian_integers() {
        let f = gauss();
        let five = primes_above(f, 5).unwrap();
        assert_eq!(five.len(), 2);
        assert!(five.iter().all(|p| p.kind == PrimeKind::Split && p.norm() == 5));
        assert_eq!(five[0].hnf.conj(), five[1].hnf);

        let three = primes_above(f, 3).unwrap();
        assert_eq!(three.len(), 1);
        assert_eq!(three[0].kind, PrimeKind::Inert);
        assert_eq!(three[0].norm(), 9);

        let two = primes_above(f, 2).unwrap();
        assert_eq!(two.len(), 1);
        assert_eq!(two[0].kind, PrimeKind::Ramified);
        assert_eq!(two[0].norm(), 2);
        // (1+i) has the same HNF.
        assert_eq!(two[0].hnf, IdealHNF::from_element(f, 1, 1).unwrap());
    }

    #[test]
    fn splitting_matches_minpoly_roots() {
        // Kronecker-symbol splitting matches trial division of the minimal
        // polynomial of ω mod p: the number of roots of N(b+ω) mod p is
        // 2/0/1 for split/inert/ramified.
        for d in [-1i64, -2, -3, -5, -7, -11, 2, 3, 5, 13] {
            let spec = FieldSpec::quadratic(d).unwrap();
            for p in intutil::primes_up_to(10_000) {
                let above = primes_above(spec, p).unwrap();
                let count = (0..p as i128)
                    .filter(|&b| spec.elem_norm(b, 1).rem_euclid(p as i128) == 0)
                    .count();
                let expected = match above[0].kind {
                    PrimeKind::Split => 2,
                    PrimeKind::Inert => 0,
                    PrimeKind::Ramified => 1,
                };
                assert_eq!(count, expected, "d={d}, p={p}");
                if p > 1000 {
                    break; // full scan below 1000, spot checks after
                }
            }
        }
    }

    #[test]
    fn factoring_six_in_gauss() {
        let f = gauss();
        let six = IdealHNF::from_rational(f, 6).unwrap();
        let factors = factor_ideal(&six, 1 << 40).unwrap();
        // (6) = (1+i)²·(3).
        assert_eq!(factors.len(), 2);
        assert_eq!(factors[0].0.p, 2);
        assert_eq!(factors[0].1, 2);
        assert_eq!(factors[1].0.p, 3);
        assert_eq!(factors[1].1, 1);
        // (1) factors as the empty product.
        assert!(factor_ideal(&IdealHNF::one(f), 1 << 40).unwrap().is_empty());
    }

    #[test]
    fn degree_one_prime_enumeration() {
        let f = gauss();
        let q = IdealHNF::from_rational(f, 3).unwrap();
        let without = enumerate_degree_one_primes(f, 10, &q, false).unwrap();
        assert_eq!(without.len(), 2);
        assert!(without.iter().all(|p| p.norm() == 5));
        let with = enumerate_degree_one_primes(f, 10, &q, true).unwrap();
        assert_eq!(with.len(), 3);
        assert_eq!(with[0].norm(), 2);
        assert!(enumerate_degree_one_primes(f, 1, &q, true).unwrap().is_empty());
    }

    #[test]
    fn ideal_enumeration_gauss() {
        let f = gauss();
        let one = IdealHNF::one(f);
        let ideals = enumerate_ideals(f, 5, &one).unwrap();
        // (1), (1+i), (2), (2+i), (2−i).
        assert_eq!(ideals.len(), 5);
        let norms: Vec<i128> = ideals.iter().map(|e| e.norm).collect();
        assert_eq!(norms, vec![1, 2, 4, 5, 5]);
        // Norm-coprimality filter.
        let q3 = IdealHNF::from_rational(f, 3).unwrap();
        let coprime = enumerate_ideals(f, 9, &q3).unwrap();
        assert!(coprime.iter().all(|e| e.ideal.is_coprime(&q3)));
        assert!(enumerate_ideals(f, 0, &one).unwrap().is_empty());
    }

    #[test]
    fn ideal_count_matches_r2_oracle() {
        // #ideals of Q(i) of norm n equals r₂(n)/4 = ∑_{m|n} χ₋₄(m); the
        // cumulative count up to X must match the divisor-sum oracle.
        let f = gauss();
        let x_max = 300i128;
        let ideals = enumerate_ideals(f, x_max, &IdealHNF::one(f)).unwrap();
        let mut by_norm = vec![0i64; x_max as usize + 1];
        for e in &ideals {
            by_norm[e.norm as usize] += 1;
        }
        for n in 1..=x_max as usize {
            let mut oracle = 0i64;
            for m in 1..=n {
                if n % m == 0 {
                    oracle += match m % 4 {
                        1 => 1,
                        3 => -1,
                        _ => 0,
                    };
                }
            }
            assert_eq!(by_norm[n], oracle, "n = {n}");
        }
    }

    #[test]
    fn enumeration_has_no_duplicates() {
        for d in [-5i64, 3, 5] {
            let spec = FieldSpec::quadratic(d).unwrap();
            let ideals = enumerate_ideals(spec, 60, &IdealHNF::one(spec)).unwrap();
            let mut seen = std::collections::HashSet::new();
            for e in &ideals {
                assert!(seen.insert(e.ideal), "duplicate {:?} for d={d}", e.ideal);
                assert_eq!(e.ideal.norm(), e.norm);
            }
        }
    }
}
