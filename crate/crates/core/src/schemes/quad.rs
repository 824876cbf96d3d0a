//! Exact arithmetic in the golden integers `Z[τ]` and the field `Q(τ)`.
//!
//! `τ = (1+√5)/2` and `τ' = (1-√5)/2` is its algebraic conjugate. Lattice
//! points of the Fibonacci scheme are `u + vτ` with integer `u, v`; their
//! internal coordinate is the conjugate `u + vτ'`. Window endpoints written
//! with `tau`, integers and decimals are elements of `Q(τ)` and are kept
//! exact so that membership and measures never depend on rounding.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

pub const TAU: f64 = 1.618_033_988_749_895;
pub const TAU_CONJ: f64 = -0.618_033_988_749_894_9;
pub const SQRT5: f64 = 2.236_067_977_499_79;

/// Comparison tolerance used whenever a floating value takes part.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Components of exact numbers are kept below this bound so that every
/// intermediate square fits in `u128`.
const COMPONENT_BOUND: i128 = 1 << 62;

/// The golden integer `u + vτ`.
///
/// The derived ordering is lexicographic on `(u, v)`; it is used for
/// deterministic output ordering, not for comparing physical positions
/// (see [`QuadInt::cmp_physical`]).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadInt {
    pub u: i64,
    pub v: i64,
}

impl QuadInt {
    pub const ZERO: QuadInt = QuadInt { u: 0, v: 0 };

    pub const fn new(u: i64, v: i64) -> Self {
        QuadInt { u, v }
    }

    /// Physical position `u + vτ`.
    pub fn physical(self) -> f64 {
        QuadNum::from(self).to_f64()
    }

    /// Conjugate (internal) value `u + vτ'`.
    pub fn conj_value(self) -> f64 {
        self.conj().to_f64()
    }

    /// `u + vτ'` rewritten in the basis `{1, τ}`: `(u+v) - vτ`.
    pub fn conj(self) -> QuadNum {
        QuadNum::from(QuadInt::new(self.u + self.v, -self.v))
    }

    /// Exact comparison of physical positions.
    pub fn cmp_physical(self, other: QuadInt) -> Ordering {
        sign_of(
            2 * (self.u as i128 - other.u as i128) + (self.v as i128 - other.v as i128),
            self.v as i128 - other.v as i128,
        )
    }

    pub fn is_zero(self) -> bool {
        self.u == 0 && self.v == 0
    }
}

impl Add for QuadInt {
    type Output = QuadInt;
    fn add(self, rhs: QuadInt) -> QuadInt {
        QuadInt::new(self.u + rhs.u, self.v + rhs.v)
    }
}

impl Sub for QuadInt {
    type Output = QuadInt;
    fn sub(self, rhs: QuadInt) -> QuadInt {
        QuadInt::new(self.u - rhs.u, self.v - rhs.v)
    }
}

impl Neg for QuadInt {
    type Output = QuadInt;
    fn neg(self) -> QuadInt {
        QuadInt::new(-self.u, -self.v)
    }
}

impl From<i64> for QuadInt {
    fn from(n: i64) -> Self {
        QuadInt::new(n, 0)
    }
}

impl fmt::Display for QuadInt {
    /// `u+v*tau`, or `u-v*tau` for negative `v`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.v < 0 {
            write!(f, "{}-{}*tau", self.u, self.v.unsigned_abs())
        } else {
            write!(f, "{}+{}*tau", self.u, self.v)
        }
    }
}

/// Sign of `p + q√5`, computed exactly.
fn sign_of(p: i128, q: i128) -> Ordering {
    match (p.signum(), q.signum()) {
        (0, 0) => Ordering::Equal,
        (a, b) if a >= 0 && b >= 0 => Ordering::Greater,
        (a, b) if a <= 0 && b <= 0 => Ordering::Less,
        _ => {
            let pp = p.unsigned_abs() * p.unsigned_abs();
            let qq = 5 * q.unsigned_abs() * q.unsigned_abs();
            if p > 0 {
                pp.cmp(&qq)
            } else {
                qq.cmp(&pp)
            }
        }
    }
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// An element `(a + bτ)/d` of `Q(τ)` in lowest terms with `d > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadNum {
    a: i64,
    b: i64,
    d: i64,
}

impl QuadNum {
    pub const ZERO: QuadNum = QuadNum { a: 0, b: 0, d: 1 };
    pub const ONE: QuadNum = QuadNum { a: 1, b: 0, d: 1 };
    pub const TAU: QuadNum = QuadNum { a: 0, b: 1, d: 1 };

    /// Reduces `(a + bτ)/d`; `None` when `d == 0` or a component would
    /// leave the supported range.
    pub fn new(a: i128, b: i128, d: i128) -> Option<QuadNum> {
        if d == 0 {
            return None;
        }
        let (mut a, mut b, mut d) = if d < 0 { (-a, -b, -d) } else { (a, b, d) };
        let g = gcd(gcd(a, b), d);
        if g > 1 {
            a /= g;
            b /= g;
            d /= g;
        }
        if a.abs() >= COMPONENT_BOUND || b.abs() >= COMPONENT_BOUND || d >= COMPONENT_BOUND {
            return None;
        }
        Some(QuadNum {
            a: a as i64,
            b: b as i64,
            d: d as i64,
        })
    }

    pub fn integer(n: i64) -> QuadNum {
        QuadNum { a: n, b: 0, d: 1 }
    }

    pub fn ratio(num: i64, den: i64) -> Option<QuadNum> {
        QuadNum::new(num as i128, 0, den as i128)
    }

    pub fn parts(self) -> (i64, i64, i64) {
        (self.a, self.b, self.d)
    }

    pub fn is_zero(self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn signum(self) -> Ordering {
        sign_of(2 * self.a as i128 + self.b as i128, self.b as i128)
    }

    pub fn checked_add(self, rhs: QuadNum) -> Option<QuadNum> {
        let (a1, b1, d1) = (self.a as i128, self.b as i128, self.d as i128);
        let (a2, b2, d2) = (rhs.a as i128, rhs.b as i128, rhs.d as i128);
        QuadNum::new(a1 * d2 + a2 * d1, b1 * d2 + b2 * d1, d1 * d2)
    }

    pub fn checked_sub(self, rhs: QuadNum) -> Option<QuadNum> {
        self.checked_add(-rhs)
    }

    pub fn checked_mul(self, rhs: QuadNum) -> Option<QuadNum> {
        let (a1, b1, d1) = (self.a as i128, self.b as i128, self.d as i128);
        let (a2, b2, d2) = (rhs.a as i128, rhs.b as i128, rhs.d as i128);
        // τ² = τ + 1
        let a = a1.checked_mul(a2)?.checked_add(b1.checked_mul(b2)?)?;
        let b = a1
            .checked_mul(b2)?
            .checked_add(a2.checked_mul(b1)?)?
            .checked_add(b1.checked_mul(b2)?)?;
        QuadNum::new(a, b, d1.checked_mul(d2)?)
    }

    /// Multiplicative inverse via the field norm `a² + ab - b²`.
    pub fn checked_inv(self) -> Option<QuadNum> {
        let (a, b, d) = (self.a as i128, self.b as i128, self.d as i128);
        let norm = a * a + a * b - b * b;
        if norm == 0 {
            return None;
        }
        QuadNum::new(d.checked_mul(a + b)?, d.checked_mul(-b)?, norm)
    }

    pub fn checked_div(self, rhs: QuadNum) -> Option<QuadNum> {
        self.checked_mul(rhs.checked_inv()?)
    }

    /// Nearest double. Cancelling combinations are evaluated through the
    /// conjugate so small values keep full relative precision.
    pub fn to_f64(self) -> f64 {
        let p = 2 * self.a as i128 + self.b as i128;
        let q = self.b as i128;
        let den = 2.0 * self.d as f64;
        if p.signum() * q.signum() < 0 && p.abs() < (1 << 60) && q.abs() < (1 << 60) {
            let norm = (p * p - 5 * q * q) as f64;
            norm / ((p as f64 - q as f64 * SQRT5) * den)
        } else {
            (p as f64 + q as f64 * SQRT5) / den
        }
    }
}

impl Neg for QuadNum {
    type Output = QuadNum;
    fn neg(self) -> QuadNum {
        QuadNum {
            a: -self.a,
            b: -self.b,
            d: self.d,
        }
    }
}

impl From<QuadInt> for QuadNum {
    fn from(p: QuadInt) -> QuadNum {
        QuadNum {
            a: p.u,
            b: p.v,
            d: 1,
        }
    }
}

impl PartialOrd for QuadNum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadNum {
    fn cmp(&self, other: &Self) -> Ordering {
        // (a1 + b1τ)/d1 - (a2 + b2τ)/d2 has the sign of
        // (a1 d2 - a2 d1) + (b1 d2 - b2 d1)τ.
        let (a1, b1, d1) = (self.a as i128, self.b as i128, self.d as i128);
        let (a2, b2, d2) = (other.a as i128, other.b as i128, other.d as i128);
        let a = a1 * d2 - a2 * d1;
        let b = b1 * d2 - b2 * d1;
        match (a.checked_mul(2).and_then(|x| x.checked_add(b)), b) {
            (Some(p), q) if p.abs() < (1 << 63) && q.abs() < COMPONENT_BOUND => sign_of(p, q),
            _ => self
                .to_f64()
                .partial_cmp(&other.to_f64())
                .unwrap_or(Ordering::Equal),
        }
    }
}

impl fmt::Display for QuadNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = match (self.a, self.b) {
            (a, 0) => a.to_string(),
            (0, b) => format!("{b}*tau"),
            (a, b) if b < 0 => format!("{a}-{}*tau", b.unsigned_abs()),
            (a, b) => format!("{a}+{b}*tau"),
        };
        if self.d == 1 {
            if self.a != 0 && self.b != 0 {
                write!(f, "({num})")
            } else {
                write!(f, "{num}")
            }
        } else if self.b == 0 {
            write!(f, "{num}/{}", self.d)
        } else {
            write!(f, "({num})/{}", self.d)
        }
    }
}

/// A real number that is exact in `Q(τ)` where possible and a double
/// otherwise. Mixed comparisons fall back to doubles with
/// [`MEMBERSHIP_TOL`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Real {
    Exact(QuadNum),
    Approx(f64),
}

impl Real {
    pub const ZERO: Real = Real::Exact(QuadNum::ZERO);

    pub fn to_f64(self) -> f64 {
        match self {
            Real::Exact(q) => q.to_f64(),
            Real::Approx(x) => x,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Real::Exact(_))
    }

    pub fn cmp_tol(self, other: Real) -> Ordering {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => a.cmp(&b),
            _ => {
                let diff = self.to_f64() - other.to_f64();
                if diff.abs() <= MEMBERSHIP_TOL {
                    Ordering::Equal
                } else if diff < 0.0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
        }
    }

    pub fn max_tol(self, other: Real) -> Real {
        if self.cmp_tol(other) == Ordering::Less {
            other
        } else {
            self
        }
    }

    pub fn min_tol(self, other: Real) -> Real {
        if self.cmp_tol(other) == Ordering::Greater {
            other
        } else {
            self
        }
    }
}

impl From<QuadNum> for Real {
    fn from(q: QuadNum) -> Real {
        Real::Exact(q)
    }
}

impl From<f64> for Real {
    fn from(x: f64) -> Real {
        Real::Approx(x)
    }
}

impl Add for Real {
    type Output = Real;
    fn add(self, rhs: Real) -> Real {
        match (self, rhs) {
            (Real::Exact(a), Real::Exact(b)) => match a.checked_add(b) {
                Some(s) => Real::Exact(s),
                None => Real::Approx(a.to_f64() + b.to_f64()),
            },
            _ => Real::Approx(self.to_f64() + rhs.to_f64()),
        }
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        match self {
            Real::Exact(q) => Real::Exact(-q),
            Real::Approx(x) => Real::Approx(-x),
        }
    }
}

impl Sub for Real {
    type Output = Real;
    fn sub(self, rhs: Real) -> Real {
        self + (-rhs)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Exact(q) => write!(f, "{q}"),
            Real::Approx(x) => write!(f, "{x:?}"),
        }
    }
}
