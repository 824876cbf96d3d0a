//! Exact machinery for the homometric counterexamples.
//!
//! The pair `A, B ⊂ Z/32Z` comes from Grünbaum and Moore's construction of
//! homometric crystals: both are exponent sets of
//!
//! ```text
//! p_A(x) = (1 - x^16)/(1 - x) · (1 - x^3 + x^9) · (1 - x + x^3 - x^4 + x^6)
//! p_B(x) = (1 - x^16)/(1 - x) · (1 - x^3 + x^9) · (1 - x^2 + x^3 - x^5 + x^6)
//! ```
//!
//! They share all 2- and 3-point pattern counts mod 32 but are not related
//! by any map `x ↦ ±x + t`. All counts here are exact integers.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::correlations::{freq_empirical, freq_exact, Pattern};
use crate::error::{param, Error, Result};
use crate::pointsets::{generate, PointSet, Region};
use crate::schemes::{IntervalUnion, QuadInt, ResidueSet, Scheme, Window, SQRT5};

pub const MODULUS: u32 = 32;

/// Exponents of `p_A`.
pub const SET_A: [u32; 16] = [0, 7, 8, 9, 12, 15, 17, 18, 19, 20, 21, 22, 26, 27, 29, 30];
/// Exponents of `p_B`.
pub const SET_B: [u32; 16] = [0, 1, 8, 9, 10, 12, 13, 15, 18, 19, 20, 21, 22, 23, 27, 30];

/// Factors of `p_A` (coefficients, constant term first).
pub const P_A_FACTORS: [&[i64]; 3] = [
    &[1; 16],
    &[1, 0, 0, -1, 0, 0, 0, 0, 0, 1],
    &[1, -1, 0, 1, -1, 0, 1],
];
/// Factors of `p_B`.
pub const P_B_FACTORS: [&[i64]; 3] = [
    &[1; 16],
    &[1, 0, 0, -1, 0, 0, 0, 0, 0, 1],
    &[1, 0, -1, 1, 0, -1, 1],
];

pub(crate) fn poly_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Expands a product of polynomials.
pub fn expand(factors: &[&[i64]]) -> Vec<i64> {
    factors.iter().fold(vec![1], |acc, f| poly_mul(&acc, f))
}

/// Exponent set of a 0/1 polynomial, or `None` if some coefficient is not
/// 0 or 1.
fn exponent_set(poly: &[i64]) -> Option<Vec<u32>> {
    let mut out = Vec::new();
    for (e, &c) in poly.iter().enumerate() {
        match c {
            0 => {}
            1 => out.push(e as u32),
            _ => return None,
        }
    }
    Some(out)
}

/// The homometric pair `(A, B)` mod 32, validated against the expansion of
/// the factored polynomials.
pub fn cyclotomic_pair() -> (ResidueSet, ResidueSet) {
    let a = exponent_set(&expand(&P_A_FACTORS));
    let b = exponent_set(&expand(&P_B_FACTORS));
    assert_eq!(
        a.as_deref(),
        Some(&SET_A[..]),
        "p_A expansion disagrees with A"
    );
    assert_eq!(
        b.as_deref(),
        Some(&SET_B[..]),
        "p_B expansion disagrees with B"
    );
    (
        ResidueSet::new(MODULUS, SET_A.iter().map(|&e| e as i64)).expect("A"),
        ResidueSet::new(MODULUS, SET_B.iter().map(|&e| e as i64)).expect("B"),
    )
}

/// Exact counts of order-`n` patterns in a residue set.
///
/// The entry for the sorted tuple `(r₁, …, r_{n-1})` is the number of `t`
/// with `t, t + r₁, …, t + r_{n-1}` all in the set. Only nonzero counts are
/// stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternTable {
    modulus: u32,
    order: usize,
    set_size: usize,
    counts: BTreeMap<Vec<u32>, u64>,
}

impl PatternTable {
    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn counts(&self) -> &BTreeMap<Vec<u32>, u64> {
        &self.counts
    }

    /// Count for an arbitrary (unsorted, unreduced) difference tuple.
    pub fn count(&self, tuple: &[i64]) -> u64 {
        let mut key: Vec<u32> = tuple
            .iter()
            .map(|r| r.rem_euclid(self.modulus as i64) as u32)
            .collect();
        key.sort_unstable();
        self.counts.get(&key).copied().unwrap_or(0)
    }

    pub fn frequency(&self, tuple: &[i64]) -> f64 {
        self.count(tuple) as f64 / self.modulus as f64
    }

    /// Sum of counts over all ordered tuples; equals `card(S)^order`.
    pub fn ordered_total(&self) -> u128 {
        self.counts
            .iter()
            .map(|(k, &c)| c as u128 * permutations(k))
            .sum()
    }

    pub fn expected_total(&self) -> u128 {
        (self.set_size as u128).pow(self.order as u32)
    }

    /// CSV rows `r1;…;r_{n-1},count,frequency`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("tuple,count,frequency\n");
        for (k, &c) in &self.counts {
            let tuple: Vec<String> = k.iter().map(|r| r.to_string()).collect();
            out.push_str(&format!(
                "{},{},{}\n",
                tuple.join(";"),
                c,
                crate::format::sig15(c as f64 / self.modulus as f64)
            ));
        }
        out
    }
}

/// Number of distinct orderings of a multiset.
fn permutations(k: &[u32]) -> u128 {
    let fact = |n: usize| (1..=n as u128).product::<u128>();
    let mut runs = Vec::new();
    let mut i = 0;
    while i < k.len() {
        let j = k[i..].iter().take_while(|&&x| x == k[i]).count();
        runs.push(j);
        i += j;
    }
    fact(k.len()) / runs.into_iter().map(fact).product::<u128>()
}

pub fn pattern_table(s: &ResidueSet, order: usize) -> Result<PatternTable> {
    if !(2..=4).contains(&order) {
        return param(format!("pattern order must be 2, 3 or 4, got {order}"));
    }
    let n = s.modulus();
    let mut counts = BTreeMap::new();
    let mut tuple = Vec::with_capacity(order - 1);
    fill_tuples(s, n, order - 1, 0, &mut tuple, &mut counts);
    Ok(PatternTable {
        modulus: n,
        order,
        set_size: s.len(),
        counts,
    })
}

fn fill_tuples(
    s: &ResidueSet,
    n: u32,
    remaining: usize,
    start: u32,
    tuple: &mut Vec<u32>,
    counts: &mut BTreeMap<Vec<u32>, u64>,
) {
    if remaining == 0 {
        let c = s
            .elems()
            .iter()
            .filter(|&&t| tuple.iter().all(|&r| s.contains(t as i64 + r as i64)))
            .count() as u64;
        if c > 0 {
            counts.insert(tuple.clone(), c);
        }
        return;
    }
    for r in start..n {
        tuple.push(r);
        fill_tuples(s, n, remaining - 1, r, tuple, counts);
        tuple.pop();
    }
}

/// A tuple on which two pattern tables disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableWitness {
    pub tuple: Vec<u32>,
    pub left: u64,
    pub right: u64,
}

impl fmt::Display for TableWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tuple {:?}: {} vs {}", self.tuple, self.left, self.right)
    }
}

/// `Ok(None)` when the tables agree exactly, otherwise the first
/// (lexicographically smallest) disagreeing tuple.
pub fn tables_equal(t1: &PatternTable, t2: &PatternTable) -> Result<Option<TableWitness>> {
    if t1.modulus != t2.modulus || t1.order != t2.order {
        return param("pattern tables have different modulus or order");
    }
    let keys: std::collections::BTreeSet<&Vec<u32>> =
        t1.counts.keys().chain(t2.counts.keys()).collect();
    Ok(keys.into_iter().find_map(|k| {
        let (l, r) = (
            t1.counts.get(k).copied().unwrap_or(0),
            t2.counts.get(k).copied().unwrap_or(0),
        );
        (l != r).then(|| TableWitness {
            tuple: k.clone(),
            left: l,
            right: r,
        })
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Direct,
    Reversed,
}

/// `x ↦ sign·x + shift` mod N.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RigidMotion {
    pub orientation: Orientation,
    pub shift: u32,
}

impl fmt::Display for RigidMotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.orientation {
            Orientation::Direct => '+',
            Orientation::Reversed => '-',
        };
        write!(f, "({sign},{})", self.shift)
    }
}

/// Searches all `2N` maps `x ↦ ±x + t` for one sending `s` onto `t_set`.
pub fn rigid_equivalent(s: &ResidueSet, t_set: &ResidueSet) -> Result<Option<RigidMotion>> {
    if s.modulus() != t_set.modulus() {
        return param("residue sets have different moduli");
    }
    let n = s.modulus();
    for (orientation, base) in [
        (Orientation::Direct, s.clone()),
        (Orientation::Reversed, s.negate()),
    ] {
        for shift in 0..n {
            if base.translate(shift as i64) == *t_set {
                return Ok(Some(RigidMotion { orientation, shift }));
            }
        }
    }
    Ok(None)
}

/// Absent-site gaps around the circle, the last entry wrapping from the
/// largest element back to the smallest.
pub fn cyclic_absent_site_gaps(s: &ResidueSet) -> Vec<u32> {
    let e = s.elems();
    let mut out: Vec<u32> = e.windows(2).map(|w| w[1] - w[0] - 1).collect();
    if let (Some(&first), Some(&last)) = (e.first(), e.last()) {
        out.push(first + s.modulus() - last - 1);
    }
    out
}

/// `Λ_c(w × S)`: points of the Fibonacci model set `Λ(w)` whose `u`
/// coordinate reduces into `S`.
pub fn thinned_model_set(w: &IntervalUnion, s: &ResidueSet, region: Region) -> Result<PointSet> {
    let scheme = Scheme::combined(s.modulus())?;
    let window = Window::Product(w.clone(), s.clone());
    let thinned = generate(&scheme, &window, region)?;

    let plain = generate(&Scheme::fibonacci(), &Window::Intervals(w.clone()), region)?;
    let filtered: Vec<QuadInt> = plain
        .points()
        .iter()
        .copied()
        .filter(|p| s.contains(p.u))
        .collect();
    if filtered != thinned.points() {
        return Err(Error::Invariant(
            "combined-scheme patch differs from the filtered Fibonacci patch".into(),
        ));
    }
    Ok(thinned)
}

/// Frequencies of one pattern for both residue sets.
#[derive(Clone, Debug)]
pub struct ProductRow {
    pub pattern: Pattern,
    /// `θ_ℝ(W ∩ ⋂(-x'ⱼ + W))`, normalized by `√5`.
    pub interval_factor: f64,
    pub residue_counts: (u64, u64),
    /// Product-formula frequencies for `S1` and `S2`.
    pub exact: (f64, f64),
    /// The same frequencies from the generic window-intersection route.
    pub direct: (f64, f64),
    pub empirical: Option<(f64, f64)>,
}

#[derive(Clone, Debug)]
pub struct ProductReport {
    pub rows: Vec<ProductRow>,
    /// Largest `|exact₁ - exact₂|`.
    pub max_exact_gap: f64,
    /// Largest disagreement between the product formula and the direct route.
    pub max_factorization_error: f64,
    pub empirical_radius: Option<f64>,
}

/// Compares `Λ_c(w × S1)` and `Λ_c(w × S2)` pattern by pattern through the
/// product formula `freq = θ_ℝ(interval part) · card(residue part)/N`, and
/// optionally against counts on generated patches with averaging cube
/// side `empirical_radius`.
pub fn product_correlation_check(
    w: &IntervalUnion,
    s1: &ResidueSet,
    s2: &ResidueSet,
    patterns: &[Pattern],
    empirical_radius: Option<f64>,
) -> Result<ProductReport> {
    if s1.modulus() != s2.modulus() {
        return param("residue sets have different moduli");
    }
    let n = s1.modulus();
    let scheme = Scheme::combined(n)?;
    let w1 = Window::Product(w.clone(), s1.clone());
    let w2 = Window::Product(w.clone(), s2.clone());
    let fib = Scheme::fibonacci();
    let plain = Window::Intervals(w.clone());

    let patches = match empirical_radius {
        Some(r) => {
            let reach = patterns
                .iter()
                .flat_map(|p| p.points().iter().map(|x| x.physical().abs()))
                .fold(0.0, f64::max);
            let region = Region::new(-r / 2.0 - reach - 1.0, r / 2.0 + reach + 1.0)?;
            Some((
                thinned_model_set(w, s1, region)?,
                thinned_model_set(w, s2, region)?,
            ))
        }
        None => None,
    };

    let mut rows = Vec::with_capacity(patterns.len());
    let (mut max_gap, mut max_fact): (f64, f64) = (0.0, 0.0);
    for pat in patterns {
        let interval_factor = freq_exact(&fib, &plain, pat)?;
        let residues: Vec<i64> = pat.points().iter().map(|p| p.u).collect();
        let c1 = residue_pattern_count(s1, &residues);
        let c2 = residue_pattern_count(s2, &residues);
        let exact = (
            interval_factor * c1 as f64 / n as f64,
            interval_factor * c2 as f64 / n as f64,
        );
        let direct = (
            freq_exact(&scheme, &w1, pat)?,
            freq_exact(&scheme, &w2, pat)?,
        );
        max_gap = max_gap.max((exact.0 - exact.1).abs());
        max_fact = max_fact
            .max((exact.0 - direct.0).abs())
            .max((exact.1 - direct.1).abs());
        let empirical = match (&patches, empirical_radius) {
            (Some((p1, p2)), Some(r)) => {
                Some((freq_empirical(p1, pat, r)?, freq_empirical(p2, pat, r)?))
            }
            _ => None,
        };
        rows.push(ProductRow {
            pattern: pat.clone(),
            interval_factor,
            residue_counts: (c1, c2),
            exact,
            direct,
            empirical,
        });
    }
    Ok(ProductReport {
        rows,
        max_exact_gap: max_gap,
        max_factorization_error: max_fact,
        empirical_radius,
    })
}

/// `card(S ∩ ⋂(-rⱼ + S))`.
pub fn residue_pattern_count(s: &ResidueSet, residues: &[i64]) -> u64 {
    s.elems()
        .iter()
        .filter(|&&t| residues.iter().all(|&r| s.contains(t as i64 + r)))
        .count() as u64
}

/// Multiset of exact gaps of a patch, for comparing thinned sets.
pub fn gap_multiset(ps: &PointSet) -> BTreeMap<QuadInt, usize> {
    let mut m = BTreeMap::new();
    for w in ps.points().windows(2) {
        *m.entry(w[1] - w[0]).or_insert(0) += 1;
    }
    m
}

/// Density `θ(W × S) = |W|/√5 · card(S)/N`.
pub fn thinned_density(w: &IntervalUnion, s: &ResidueSet) -> f64 {
    w.length().to_f64() / SQRT5 * s.len() as f64 / s.modulus() as f64
}

/// Distinct gap values of a patch.
pub fn gap_values(ps: &PointSet) -> HashSet<QuadInt> {
    ps.points().windows(2).map(|w| w[1] - w[0]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_count(s: &[u32], n: u32, tuple: &[u32]) -> u64 {
        (0..n)
            .filter(|t| s.contains(t) && tuple.iter().all(|r| s.contains(&((t + r) % n))))
            .count() as u64
    }

    #[test]
    fn pair_is_validated() {
        let (a, b) = cyclotomic_pair();
        assert_eq!(a.len(), 16);
        assert_eq!(b.len(), 16);
        assert_ne!(a, b);
    }

    #[test]
    fn order_two_examples() {
        let (a, b) = cyclotomic_pair();
        let ta = pattern_table(&a, 2).unwrap();
        let tb = pattern_table(&b, 2).unwrap();
        assert_eq!(ta.count(&[1]), 9);
        assert_eq!(tb.count(&[1]), 9);
        assert_eq!(ta.count(&[1]), brute_count(&SET_A, 32, &[1]));
        assert_eq!(ta.count(&[0]), 16);
        assert_eq!(ta.count(&[33]), 9);
    }

    #[test]
    fn tables_match_brute_force() {
        let (a, _) = cyclotomic_pair();
        let t3 = pattern_table(&a, 3).unwrap();
        for r in 0..32 {
            for s in r..32 {
                assert_eq!(
                    t3.count(&[r as i64, s as i64]),
                    brute_count(&SET_A, 32, &[r, s])
                );
            }
        }
    }

    #[test]
    fn homometric_at_orders_two_and_three_only() {
        let (a, b) = cyclotomic_pair();
        for order in [2, 3] {
            let w = tables_equal(
                &pattern_table(&a, order).unwrap(),
                &pattern_table(&b, order).unwrap(),
            );
            assert_eq!(w.unwrap(), None, "order {order}");
        }
        let w = tables_equal(
            &pattern_table(&a, 4).unwrap(),
            &pattern_table(&b, 4).unwrap(),
        )
        .unwrap()
        .expect("order 4 must differ");
        assert_ne!(w.left, w.right);
        let t: Vec<u32> = w.tuple.clone();
        assert_eq!(w.left, brute_count(&SET_A, 32, &t));
        assert_eq!(w.right, brute_count(&SET_B, 32, &t));
    }

    #[test]
    fn rigid_motion_examples() {
        let (a, b) = cyclotomic_pair();
        assert_eq!(
            rigid_equivalent(&a, &a).unwrap(),
            Some(RigidMotion {
                orientation: Orientation::Direct,
                shift: 0
            })
        );
        let refl = a.negate().translate(5);
        assert_eq!(
            rigid_equivalent(&a, &refl).unwrap(),
            Some(RigidMotion {
                orientation: Orientation::Reversed,
                shift: 5
            })
        );
        assert_eq!(rigid_equivalent(&a, &b).unwrap(), None);
    }

    #[test]
    fn cyclic_gaps_match_displayed_tuples() {
        let (a, b) = cyclotomic_pair();
        let ga = cyclic_absent_site_gaps(&a);
        assert_eq!(&ga[..4], &[6, 0, 0, 2]);
        assert_eq!(&ga[ga.len() - 3..], &[1, 0, 1]);
        let gb = cyclic_absent_site_gaps(&b);
        assert_eq!(&gb[..4], &[0, 6, 0, 0]);
        assert_eq!(&gb[gb.len() - 3..], &[3, 2, 1]);
        // gaps plus occupied sites fill the circle
        assert_eq!(ga.iter().sum::<u32>() + 16, 32);
    }

    #[test]
    fn bad_order_rejected() {
        let (a, _) = cyclotomic_pair();
        assert!(pattern_table(&a, 5).is_err());
        assert!(pattern_table(&a, 1).is_err());
    }

    #[test]
    fn thinned_with_full_residues_is_plain() {
        let w = IntervalUnion::single(
            crate::schemes::QuadNum::integer(-1),
            crate::schemes::QuadNum::new(-1, 1, 1).unwrap(),
        )
        .unwrap();
        let region = Region::new(-200.0, 200.0).unwrap();
        let full = ResidueSet::full(32).unwrap();
        let thinned = thinned_model_set(&w, &full, region).unwrap();
        let plain = generate(&Scheme::fibonacci(), &Window::Intervals(w.clone()), region).unwrap();
        assert_eq!(thinned.points(), plain.points());

        let (a, _) = cyclotomic_pair();
        let small = thinned_model_set(&w, &a, Region::new(-5.0, 5.0).unwrap()).unwrap();
        let plain_small = generate(
            &Scheme::fibonacci(),
            &Window::Intervals(w),
            Region::new(-5.0, 5.0).unwrap(),
        )
        .unwrap();
        for p in small.points() {
            assert!(plain_small.contains(*p));
            assert!(a.contains(p.u));
        }
        // 0 has u = 0 ∈ A, -1 has u = 31 ∉ A
        assert!(small.contains(QuadInt::ZERO));
        assert!(!small.contains(QuadInt::new(-1, 0)));
    }

    fn arb_set() -> impl Strategy<Value = ResidueSet> {
        prop::collection::vec(0i64..24, 1..12).prop_map(|v| ResidueSet::new(24, v).unwrap())
    }

    proptest! {
        #[test]
        fn tables_are_translation_invariant(s in arb_set(), t in 0i64..24, order in 2usize..=4) {
            let a = pattern_table(&s, order).unwrap();
            let b = pattern_table(&s.translate(t), order).unwrap();
            prop_assert_eq!(a.counts(), b.counts());
        }

        #[test]
        fn order_two_table_is_reflection_symmetric(s in arb_set()) {
            let a = pattern_table(&s, 2).unwrap();
            let b = pattern_table(&s.negate(), 2).unwrap();
            prop_assert_eq!(a.counts(), b.counts());
        }

        #[test]
        fn sum_rule(s in arb_set(), order in 2usize..=4) {
            let t = pattern_table(&s, order).unwrap();
            prop_assert_eq!(t.ordered_total(), t.expected_total());
            let pairs: u64 = (0..24).map(|r| t.count(&vec![r; order - 1])).sum();
            if order == 2 {
                prop_assert_eq!(pairs as usize, s.len() * s.len());
            }
        }
    }
}
