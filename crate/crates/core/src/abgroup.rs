//! Finite abelian groups presented by generators and relations.
//!
//! Groups are stored by invariant factors d₁ | d₂ | … | d_k (each ≥ 2);
//! elements are reduced exponent vectors. Smith normal form over Z with
//! verified unimodular transforms turns relation matrices into invariant
//! factors. Characters are exponent vectors with exact rational phases.
//!
//! The covering machinery of the main theorem lives here: sumsets, the
//! stabilizer subgroup of a sumset (brute force over G — this module is a
//! correctness oracle, not a performance kernel), Kneser's bound
//! |B+B| ≥ (2λ−1)|H|, and the pigeonhole predicates that force
//! A·A·A = G. The source paper phrases §9 multiplicatively; everything
//! here is the same content in additive notation.

use crate::error::{Error, Result};
use num_rational::Rational64;
use num_traits::Zero;
use serde::Serialize;
use std::collections::BTreeSet;

/// A finite abelian group ⊕ Z/dᵢ with d₁ | d₂ | … (trivial group: empty).
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct FinAbGroup {
    pub invariant_factors: Vec<u64>,
}

/// A group element: exponent vector reduced mod the invariant factors.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub struct Element {
    pub coords: Vec<u64>,
}

impl FinAbGroup {
    pub fn new(invariant_factors: Vec<u64>) -> Result<Self> {
        for w in invariant_factors.windows(2) {
            if w[1] % w[0] != 0 {
                return Err(Error::Validation(format!(
                    "invariant factors must form a divisibility chain: {invariant_factors:?}"
                )));
            }
        }
        if invariant_factors.iter().any(|&d| d < 2) {
            return Err(Error::Validation(
                "invariant factors must be at least 2".into(),
            ));
        }
        Ok(FinAbGroup { invariant_factors })
    }

    pub fn trivial() -> Self {
        FinAbGroup {
            invariant_factors: Vec::new(),
        }
    }

    pub fn order(&self) -> u64 {
        self.invariant_factors.iter().product()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }

    pub fn zero(&self) -> Element {
        Element {
            coords: vec![0; self.rank()],
        }
    }

    pub fn reduce(&self, raw: &[i128]) -> Element {
        Element {
            coords: raw
                .iter()
                .zip(&self.invariant_factors)
                .map(|(&x, &d)| x.rem_euclid(d as i128) as u64)
                .collect(),
        }
    }

    pub fn add(&self, x: &Element, y: &Element) -> Element {
        Element {
            coords: x
                .coords
                .iter()
                .zip(&y.coords)
                .zip(&self.invariant_factors)
                .map(|((&a, &b), &d)| (a + b) % d)
                .collect(),
        }
    }

    pub fn neg(&self, x: &Element) -> Element {
        Element {
            coords: x
                .coords
                .iter()
                .zip(&self.invariant_factors)
                .map(|(&a, &d)| (d - a) % d)
                .collect(),
        }
    }

    pub fn sub(&self, x: &Element, y: &Element) -> Element {
        self.add(x, &self.neg(y))
    }

    pub fn scalar_mul(&self, k: i128, x: &Element) -> Element {
        let raw: Vec<i128> = x.coords.iter().map(|&a| k * a as i128).collect();
        self.reduce(&raw)
    }

    /// All elements, in lexicographic coordinate order.
    pub fn elements(&self) -> Vec<Element> {
        let mut out = vec![self.zero()];
        for (i, &d) in self.invariant_factors.iter().enumerate() {
            let mut next = Vec::with_capacity(out.len() * d as usize);
            for e in &out {
                for v in 0..d {
                    let mut c = e.coords.clone();
                    c[i] = v;
                    next.push(Element { coords: c });
                }
            }
            out = next;
        }
        out
    }

    /// Order of an element.
    pub fn element_order(&self, x: &Element) -> u64 {
        let mut ord = 1u64;
        for (&c, &d) in x.coords.iter().zip(&self.invariant_factors) {
            if c != 0 {
                let g = num_integer::gcd(c, d);
                ord = num_integer::lcm(ord, d / g);
            }
        }
        ord
    }
}

/// All abelian groups of a given order, one per isomorphism class
/// (invariant-factor chains with the given product).
pub fn abelian_groups_of_order(n: u64) -> Vec<FinAbGroup> {
    fn rec(n: u64, max_last: u64, chain: &mut Vec<u64>, out: &mut Vec<FinAbGroup>) {
        if n == 1 {
            let mut factors = chain.clone();
            factors.reverse();
            out.push(FinAbGroup {
                invariant_factors: factors,
            });
            return;
        }
        // Choose the largest factor first (stored reversed); each later
        // factor must divide the previous one.
        let mut d = 2u64;
        while d <= max_last.min(n) {
            if n % d == 0 && max_last % d == 0 {
                chain.push(d);
                rec(n / d, d, chain, out);
                chain.pop();
            }
            d += 1;
        }
    }
    if n == 1 {
        return vec![FinAbGroup::trivial()];
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| a.invariant_factors.cmp(&b.invariant_factors));
    out
}

// ---------------------------------------------------------------------------
// Smith normal form
// ---------------------------------------------------------------------------

/// Smith normal form: returns (D, U, V) with U·M·V = D, U and V unimodular
/// (verified: determinant ±1 and the product identity), and the diagonal
/// of D forming a divisibility chain of nonnegative integers.
pub fn smith_normal_form(
    m: &[Vec<i128>],
) -> (Vec<Vec<i128>>, Vec<Vec<i128>>, Vec<Vec<i128>>) {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut d: Vec<Vec<i128>> = m.to_vec();
    let mut u = identity(rows);
    let mut v = identity(cols);
    let steps = rows.min(cols);
    'outer: loop {
        for t in 0..steps {
            diagonalize_at(&mut d, &mut u, &mut v, t);
        }
        // Enforce the divisibility chain; a violation folds d_j into
        // column i and restarts the elimination.
        for i in 0..steps {
            for j in i + 1..steps {
                if d[i][i] != 0 && d[j][j] % d[i][i] != 0 {
                    for r in 0..rows {
                        d[r][i] += d[r][j];
                    }
                    for r in 0..cols {
                        v[r][i] += v[r][j];
                    }
                    continue 'outer;
                }
            }
        }
        break;
    }
    // Normalize signs to nonnegative diagonal.
    for t in 0..steps {
        if d[t][t] < 0 {
            for c in 0..cols {
                d[t][c] = -d[t][c];
            }
            for c in 0..rows {
                u[t][c] = -u[t][c];
            }
        }
    }
    debug_assert!(verify_snf(m, &d, &u, &v), "SNF identity failed");
    (d, u, v)
}

fn diagonalize_at(d: &mut [Vec<i128>], u: &mut [Vec<i128>], v: &mut [Vec<i128>], t: usize) {
    let rows = d.len();
    let cols = d[0].len();
    loop {
        // Find the absolutely smallest nonzero entry in the submatrix.
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if d[i][j] != 0
                    && pivot.map_or(true, |(pi, pj)| d[i][j].abs() < d[pi][pj].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else {
            return; // submatrix is zero
        };
        if pi != t {
            d.swap(pi, t);
            u.swap(pi, t);
        }
        if pj != t {
            for row in d.iter_mut() {
                row.swap(pj, t);
            }
            for row in v.iter_mut() {
                row.swap(pj, t);
            }
        }
        let p = d[t][t];
        let mut clean = true;
        for i in t + 1..rows {
            let q = d[i][t].div_euclid(p);
            if q != 0 {
                for c in 0..cols {
                    d[i][c] -= q * d[t][c];
                }
                for c in 0..rows {
                    let sub = q * u[t][c];
                    u[i][c] -= sub;
                }
            }
            if d[i][t] != 0 {
                clean = false;
            }
        }
        for j in t + 1..cols {
            let q = d[t][j].div_euclid(p);
            if q != 0 {
                for r in 0..rows {
                    d[r][j] -= q * d[r][t];
                }
                for r in 0..cols {
                    let sub = q * v[r][t];
                    v[r][j] -= sub;
                }
            }
            if d[t][j] != 0 {
                clean = false;
            }
        }
        if clean {
            return;
        }
    }
}

fn identity(n: usize) -> Vec<Vec<i128>> {
    (0..n)
        .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
        .collect()
}

fn mat_mul(a: &[Vec<i128>], b: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let n = a.len();
    let k = if n == 0 { 0 } else { a[0].len() };
    let m = if b.is_empty() { 0 } else { b[0].len() };
    let mut out = vec![vec![0i128; m]; n];
    for i in 0..n {
        for t in 0..k {
            if a[i][t] == 0 {
                continue;
            }
            for j in 0..m {
                out[i][j] += a[i][t] * b[t][j];
            }
        }
    }
    out
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn determinant(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m.to_vec();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(swap) = (k + 1..n).find(|&i| a[i][k] != 0) else {
                return 0;
            };
            a.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

fn verify_snf(m: &[Vec<i128>], d: &[Vec<i128>], u: &[Vec<i128>], v: &[Vec<i128>]) -> bool {
    if mat_mul(&mat_mul(u, m), v) != *d {
        return false;
    }
    determinant(u).abs() == 1 && determinant(v).abs() == 1
}

// ---------------------------------------------------------------------------
// Groups from relations
// ---------------------------------------------------------------------------

/// A homomorphism Z^n → G sending exponent vectors to group elements
/// (the quotient projection of [`group_from_relations`]).
#[derive(Clone, Debug)]
pub struct Projection {
    pub group: FinAbGroup,
    /// Column basis change V of the SNF (x ↦ x·V before reduction).
    v: Vec<Vec<i128>>,
    /// Columns of x·V that carry nontrivial invariant factors.
    keep: Vec<usize>,
}

impl Projection {
    pub fn apply(&self, x: &[i128]) -> Element {
        let n = self.v.len();
        assert_eq!(x.len(), n, "exponent vector length mismatch");
        let raw: Vec<i128> = self
            .keep
            .iter()
            .map(|&j| (0..n).map(|i| x[i] * self.v[i][j]).sum())
            .collect();
        self.group.reduce(&raw)
    }
}

/// The finite quotient Z^{n_gens} / rowspan(relations), with its
/// projection. Errors when the quotient is infinite.
pub fn group_from_relations(
    n_gens: usize,
    relations: &[Vec<i128>],
) -> Result<(FinAbGroup, Projection)> {
    let m: Vec<Vec<i128>> = relations.to_vec();
    if m.len() < n_gens {
        return Err(Error::Validation(format!(
            "quotient is infinite: {} relations < {} generators",
            m.len(),
            n_gens
        )));
    }
    for row in &m {
        if row.len() != n_gens {
            return Err(Error::Validation("relation width mismatch".into()));
        }
    }
    let (d, _u, v) = smith_normal_form(&m);
    let mut factors = Vec::new();
    let mut keep = Vec::new();
    for j in 0..n_gens {
        let dj = if j < d.len() { d[j][j] } else { 0 };
        if dj == 0 {
            return Err(Error::Validation(
                "quotient is infinite: relation lattice has deficient rank".into(),
            ));
        }
        if dj > 1 {
            factors.push(dj as u64);
            keep.push(j);
        }
    }
    let group = FinAbGroup::new(factors)?;
    Ok((
        group.clone(),
        Projection {
            group,
            v,
            keep,
        },
    ))
}

// ---------------------------------------------------------------------------
// Characters
// ---------------------------------------------------------------------------

/// A character of a finite abelian group: exponent vector (e₁…e_k) with
/// value exp(2πi·∑ eᵢxᵢ/dᵢ) on the element (x₁…x_k).
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Character {
    pub exponents: Vec<u64>,
}

impl Character {
    /// Exact phase in Q/Z, reduced to [0, 1).
    pub fn phase(&self, g: &FinAbGroup, x: &Element) -> Rational64 {
        let mut sum = Rational64::zero();
        for ((&e, &c), &d) in self.exponents.iter().zip(&x.coords).zip(&g.invariant_factors) {
            sum += Rational64::new(((e as i64) * (c as i64)).rem_euclid(d as i64), d as i64);
        }
        let fl = sum.floor();
        sum - fl
    }

    /// Complex value exp(2πi·phase).
    pub fn value(&self, g: &FinAbGroup, x: &Element) -> num_complex::Complex64 {
        let ph = self.phase(g, x);
        let theta = 2.0 * std::f64::consts::PI * (*ph.numer() as f64) / (*ph.denom() as f64);
        num_complex::Complex64::new(theta.cos(), theta.sin())
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    /// Order of the character in the dual group.
    pub fn order(&self, g: &FinAbGroup) -> u64 {
        let mut ord = 1u64;
        for (&e, &d) in self.exponents.iter().zip(&g.invariant_factors) {
            if e != 0 {
                let gcd = num_integer::gcd(e, d);
                ord = num_integer::lcm(ord, d / gcd);
            }
        }
        ord
    }
}

/// All |G| characters of G (dual group, same invariant factors).
pub fn characters(g: &FinAbGroup) -> Vec<Character> {
    g.elements()
        .into_iter()
        .map(|e| Character { exponents: e.coords })
        .collect()
}

// ---------------------------------------------------------------------------
// Subgroups, sumsets, Kneser
// ---------------------------------------------------------------------------

/// A subgroup given by its sorted element list, with cached order/index.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Subgroup {
    pub generators: Vec<Element>,
    pub elements: Vec<Element>,
    pub order: u64,
    pub index: u64,
}

impl Subgroup {
    pub fn from_generators(g: &FinAbGroup, generators: &[Element]) -> Subgroup {
        let mut set: BTreeSet<Element> = BTreeSet::new();
        set.insert(g.zero());
        let mut frontier = vec![g.zero()];
        while let Some(x) = frontier.pop() {
            for gen in generators {
                let y = g.add(&x, gen);
                if set.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        let elements: Vec<Element> = set.into_iter().collect();
        let order = elements.len() as u64;
        let index = g.order() / order;
        Subgroup {
            generators: generators.to_vec(),
            elements,
            order,
            index,
        }
    }

    pub fn contains(&self, x: &Element) -> bool {
        self.elements.binary_search(x).is_ok()
    }

    /// Canonical representative of the coset x + H (its minimal element).
    pub fn coset_rep(&self, g: &FinAbGroup, x: &Element) -> Element {
        self.elements
            .iter()
            .map(|h| g.add(x, h))
            .min()
            .expect("subgroup nonempty")
    }
}

/// Sorted, deduplicated sumset {a + b}.
pub fn sumset(g: &FinAbGroup, a: &[Element], b: &[Element]) -> Vec<Element> {
    let mut out: BTreeSet<Element> = BTreeSet::new();
    for x in a {
        for y in b {
            out.insert(g.add(x, y));
        }
    }
    out.into_iter().collect()
}

/// Stabilizer of a set: {g ∈ G : g + S = S}, by direct test over G.
pub fn stabilizer(g: &FinAbGroup, s: &[Element]) -> Subgroup {
    let set: BTreeSet<&Element> = s.iter().collect();
    let mut gens = Vec::new();
    for cand in g.elements() {
        if s.iter().all(|x| set.contains(&g.add(&cand, x))) {
            gens.push(cand);
        }
    }
    // The full stabilizer element list doubles as its own generator set.
    let elements = gens.clone();
    let order = elements.len() as u64;
    Subgroup {
        generators: gens,
        elements,
        order,
        index: g.order() / order,
    }
}

/// Number of H-cosets meeting the set B.
pub fn cosets_meeting(g: &FinAbGroup, h: &Subgroup, b: &[Element]) -> u64 {
    let reps: BTreeSet<Element> = b.iter().map(|x| h.coset_rep(g, x)).collect();
    reps.len() as u64
}

/// Sumset together with the stabilizer of the sumset and the number λ of
/// H-cosets meeting B.
pub fn sumset_stabilizer(
    g: &FinAbGroup,
    a: &[Element],
    b: &[Element],
) -> Result<(Vec<Element>, Subgroup, u64)> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Validation("sumset of empty set".into()));
    }
    let sum = sumset(g, a, b);
    let h = stabilizer(g, &sum);
    let lambda = cosets_meeting(g, &h, b);
    Ok((sum, h, lambda))
}

/// Result of the Kneser bound |B+B| ≥ (2λ−1)|H|.
#[derive(Clone, Debug, Serialize)]
pub struct KneserCheck {
    pub sum_size: u64,
    pub stab_order: u64,
    pub lambda: u64,
    pub bound: u64,
    pub ok: bool,
}

/// Kneser's theorem check for B+B. `ok` must be true on every input — a
/// false value signals an implementation bug, not a mathematical finding.
pub fn kneser_check(g: &FinAbGroup, b: &[Element]) -> Result<KneserCheck> {
    let (sum, h, lambda) = sumset_stabilizer(g, b, b)?;
    let bound = (2 * lambda - 1) * h.order;
    Ok(KneserCheck {
        sum_size: sum.len() as u64,
        stab_order: h.order,
        lambda,
        bound,
        ok: sum.len() as u64 >= bound,
    })
}

/// The pigeonhole predicates of the covering argument.
#[derive(Clone, Debug, Serialize)]
pub struct TripleCover {
    pub a_size: u64,
    pub aa_size: u64,
    pub aaa_size: u64,
    pub stab_order: u64,
    /// λ from Kneser: the number of stabilizer cosets meeting A.
    pub lambda: u64,
    /// The proof's other λ: ⌈|A| / |H|⌉ (both are recorded because the
    /// argument uses both).
    pub lambda_ceil: u64,
    /// y = index of the stabilizer of A·A.
    pub y: u64,
    /// |A|/|G| + (2λ−1)/y > 1.
    pub eq8_holds: bool,
    /// 3|A|/|G| − 1/y > 1.
    pub eq9_holds: bool,
    pub covered: bool,
}

/// Evaluate the covering predicates for a subset A: whenever eq8 holds,
/// A+A+A must be all of G.
pub fn triple_cover_predicates(g: &FinAbGroup, a: &[Element]) -> Result<TripleCover> {
    if a.is_empty() {
        return Err(Error::Validation("empty set A".into()));
    }
    let aa = sumset(g, a, a);
    let aaa = sumset(g, &aa, a);
    let h = stabilizer(g, &aa);
    let lambda = cosets_meeting(g, &h, a);
    let y = h.index;
    let n = g.order();
    // Exact rational comparisons: |A|/|G| + (2λ−1)/y > 1 multiplied out.
    let a_size = a.len() as u64;
    let eq8 = (a_size as u128) * (y as u128) + (2 * lambda as u128 - 1) * (n as u128)
        > (n as u128) * (y as u128);
    let eq9 = 3 * (a_size as u128) * (y as u128) > (n as u128) * (y as u128) + (n as u128);
    let covered = aaa.len() as u64 == n;
    let lambda_ceil = (a_size).div_ceil(h.order);
    Ok(TripleCover {
        a_size,
        aa_size: aa.len() as u64,
        aaa_size: aaa.len() as u64,
        stab_order: h.order,
        lambda,
        lambda_ceil,
        y,
        eq8_holds: eq8,
        eq9_holds: eq9,
        covered,
    })
}
