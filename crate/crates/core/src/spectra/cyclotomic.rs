//! Exact vanishing of character sums over `Z/NZ`.
//!
//! `Σ_{a∈A} ζ^{a·b}` with `ζ = e^{2πi/N}` is zero iff the integer polynomial
//! `Σ x^{(a·b) mod N}` is divisible by the cyclotomic polynomial `Φ_N`.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::error::{param, Result};
use crate::homometry::poly_mul;
use crate::schemes::{IntervalUnion, Real};

/// `Φ_n`, coefficients from the constant term up.
pub fn cyclotomic_polynomial(n: u32) -> Vec<i64> {
    assert!(n >= 1);
    // x^n - 1 = Π_{d | n} Φ_d
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    let mut den = vec![1i64];
    for d in (1..n).filter(|d| n.is_multiple_of(*d)) {
        den = poly_mul(&den, &cyclotomic_polynomial(d));
    }
    let (q, r) = div_rem_monic(&num, &den);
    debug_assert!(r.iter().all(|&c| c == 0));
    q
}

/// Division by a monic polynomial over the integers.
fn div_rem_monic(num: &[i64], den: &[i64]) -> (Vec<i64>, Vec<i64>) {
    let dl = den.len();
    debug_assert_eq!(den.last(), Some(&1));
    let mut rem = num.to_vec();
    if rem.len() < dl {
        return (vec![0], rem);
    }
    let mut quot = vec![0i64; rem.len() - dl + 1];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dl - 1];
        quot[i] = c;
        if c != 0 {
            for (j, &d) in den.iter().enumerate() {
                rem[i + j] -= c * d;
            }
        }
    }
    rem.truncate(dl - 1);
    (quot, rem)
}

/// `Σ_{a∈elems} e^{2πi a·b/N} = 0`, decided exactly.
pub fn vanishes_at_root_of_unity(elems: &[u32], modulus: u32, b: i64) -> bool {
    let n = modulus as i64;
    let mut p = vec![0i64; modulus as usize];
    for &a in elems {
        p[(a as i64 * b).rem_euclid(n) as usize] += 1;
    }
    let (_, r) = div_rem_monic(&p, &cyclotomic_polynomial(modulus));
    r.iter().all(|&c| c == 0)
}

/// Whether `Σ_a conj(χ_a(b)) · 1_{Ω_a}` is the zero function, where the
/// keys `a` of `residue_windows` are residues mod `modulus`.
///
/// The line is cut at every endpoint; on each elementary piece the
/// function equals a character sum over the residues whose window covers
/// the piece, and each such sum is tested exactly.
pub fn zero_condition(
    residue_windows: &BTreeMap<u32, IntervalUnion>,
    modulus: u32,
    b: i64,
) -> Result<bool> {
    if modulus == 0 {
        return param("modulus must be positive");
    }
    if let Some(a) = residue_windows.keys().find(|&&a| a >= modulus) {
        return param(format!("residue {a} is not reduced mod {modulus}"));
    }
    let mut cuts: Vec<Real> = residue_windows
        .values()
        .flat_map(|iu| iu.intervals().iter().flat_map(|iv| [iv.lo, iv.hi]))
        .collect();
    cuts.sort_by(|x, y| x.cmp_tol(*y));
    cuts.dedup_by(|x, y| x.cmp_tol(*y) == Ordering::Equal);
    let mut tested: Vec<Vec<u32>> = Vec::new();
    for piece in cuts.windows(2) {
        // half-open windows are constant on [piece[0], piece[1])
        let active: Vec<u32> = residue_windows
            .iter()
            .filter(|(_, iu)| iu.contains(piece[0]))
            .map(|(&a, _)| a)
            .collect();
        if active.is_empty() || tested.contains(&active) {
            continue;
        }
        if !vanishes_at_root_of_unity(&active, modulus, b) {
            return Ok(false);
        }
        tested.push(active);
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homometry::{SET_A, SET_B};
    use crate::schemes::QuadNum;
    use rustfft::num_complex::Complex64;

    #[test]
    fn known_cyclotomics() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        let mut phi32 = vec![0; 17];
        phi32[0] = 1;
        phi32[16] = 1;
        assert_eq!(cyclotomic_polynomial(32), phi32);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
    }

    /// Floating-point evaluation as an independent oracle.
    #[test]
    fn exact_test_agrees_with_float_sum() {
        for set in [&SET_A[..], &SET_B[..], &[0, 1, 5][..], &[0, 8, 16, 24][..]] {
            for b in 0..32 {
                let s: Complex64 = set
                    .iter()
                    .map(|&a| {
                        Complex64::from_polar(
                            1.0,
                            2.0 * std::f64::consts::PI * (a as f64) * b as f64 / 32.0,
                        )
                    })
                    .sum();
                assert_eq!(
                    vanishes_at_root_of_unity(set, 32, b),
                    s.norm() < 1e-9,
                    "{set:?} {b}"
                );
            }
        }
    }

    fn fib_window() -> IntervalUnion {
        IntervalUnion::single(QuadNum::integer(-1), QuadNum::new(-1, 1, 1).unwrap()).unwrap()
    }

    #[test]
    fn set_a_with_equal_windows() {
        let map: BTreeMap<u32, IntervalUnion> = SET_A.iter().map(|&a| (a, fib_window())).collect();
        for b in 0..32 {
            let expected = b % 2 == 0 && b != 0;
            assert_eq!(zero_condition(&map, 32, b).unwrap(), expected, "b = {b}");
        }
    }

    #[test]
    fn unequal_windows_need_pieces_to_cancel() {
        // {0, 16} cancels at b = 1 only where both windows are present
        let w1 = IntervalUnion::single(0.0, 1.0).unwrap();
        let w2 = IntervalUnion::single(0.0, 2.0).unwrap();
        let same: BTreeMap<u32, IntervalUnion> = [(0, w1.clone()), (16, w1.clone())].into();
        assert!(zero_condition(&same, 32, 1).unwrap());
        let differ: BTreeMap<u32, IntervalUnion> = [(0, w1), (16, w2)].into();
        assert!(!zero_condition(&differ, 32, 1).unwrap());
        assert!(zero_condition(&BTreeMap::new(), 32, 1).unwrap());
    }
}
