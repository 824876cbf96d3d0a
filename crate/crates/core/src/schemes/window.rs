use std::cmp::Ordering;
use std::fmt;

use super::quad::Real;
use crate::error::{param, Result};

/// Half-open interval `[lo, hi)` with `lo < hi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: Real,
    pub hi: Real,
}

impl Interval {
    pub fn new(lo: impl Into<Real>, hi: impl Into<Real>) -> Result<Interval> {
        let (lo, hi) = (lo.into(), hi.into());
        if lo.cmp_tol(hi) != Ordering::Less {
            return param(format!("interval [{lo},{hi}) is empty"));
        }
        Ok(Interval { lo, hi })
    }

    pub fn length(&self) -> Real {
        self.hi - self.lo
    }

    pub fn contains(&self, y: Real) -> bool {
        self.lo.cmp_tol(y) != Ordering::Greater && y.cmp_tol(self.hi) == Ordering::Less
    }
}

/// Finite union of half-open intervals, kept sorted, disjoint and with
/// touching pieces merged. May be empty.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct IntervalUnion {
    intervals: Vec<Interval>,
}

impl IntervalUnion {
    pub fn empty() -> Self {
        IntervalUnion::default()
    }

    pub fn new(intervals: impl IntoIterator<Item = Interval>) -> Self {
        let mut v: Vec<Interval> = intervals.into_iter().collect();
        v.sort_by(|a, b| a.lo.cmp_tol(b.lo));
        let mut out: Vec<Interval> = Vec::with_capacity(v.len());
        for iv in v {
            match out.last_mut() {
                Some(last) if iv.lo.cmp_tol(last.hi) != Ordering::Greater => {
                    last.hi = last.hi.max_tol(iv.hi);
                }
                _ => out.push(iv),
            }
        }
        IntervalUnion { intervals: out }
    }

    pub fn single(lo: impl Into<Real>, hi: impl Into<Real>) -> Result<Self> {
        Ok(IntervalUnion::new([Interval::new(lo, hi)?]))
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Total length (Lebesgue measure).
    pub fn length(&self) -> Real {
        self.intervals
            .iter()
            .fold(Real::ZERO, |acc, iv| acc + iv.length())
    }

    /// Smallest interval containing the union.
    pub fn hull(&self) -> Option<(Real, Real)> {
        Some((self.intervals.first()?.lo, self.intervals.last()?.hi))
    }

    pub fn diameter(&self) -> f64 {
        self.hull()
            .map(|(lo, hi)| (hi - lo).to_f64())
            .unwrap_or(0.0)
    }

    pub fn contains(&self, y: Real) -> bool {
        // intervals are sorted: find the last one starting at or before y
        let idx = self
            .intervals
            .partition_point(|iv| iv.lo.cmp_tol(y) != Ordering::Greater);
        idx > 0 && self.intervals[idx - 1].contains(y)
    }

    pub fn contains_f64(&self, y: f64) -> bool {
        self.contains(Real::Approx(y))
    }

    pub fn translate(&self, t: Real) -> IntervalUnion {
        IntervalUnion::new(self.intervals.iter().map(|iv| Interval {
            lo: iv.lo + t,
            hi: iv.hi + t,
        }))
    }

    /// `{-y : y ∈ self}`, re-expressed as half-open intervals (the
    /// reflection of `[a,b)` is `(-b,-a]`, equal to `[-b,-a)` up to two
    /// points).
    pub fn reflect(&self) -> IntervalUnion {
        IntervalUnion::new(self.intervals.iter().map(|iv| Interval {
            lo: -iv.hi,
            hi: -iv.lo,
        }))
    }

    pub fn intersect(&self, other: &IntervalUnion) -> IntervalUnion {
        let (a, b) = (&self.intervals, &other.intervals);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            let lo = a[i].lo.max_tol(b[j].lo);
            let hi = a[i].hi.min_tol(b[j].hi);
            if lo.cmp_tol(hi) == Ordering::Less {
                out.push(Interval { lo, hi });
            }
            if a[i].hi.cmp_tol(b[j].hi) == Ordering::Less {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalUnion { intervals: out }
    }

    pub fn union(&self, other: &IntervalUnion) -> IntervalUnion {
        IntervalUnion::new(self.intervals.iter().chain(&other.intervals).copied())
    }

    /// Intervals obtained from `self ∩ (self - s₁) ∩ … ∩ (self - sₙ)`.
    pub fn intersect_translates(&self, shifts: &[Real]) -> IntervalUnion {
        shifts
            .iter()
            .fold(self.clone(), |acc, &s| acc.intersect(&self.translate(-s)))
    }
}

impl fmt::Display for IntervalUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "empty");
        }
        for (i, iv) in self.intervals.iter().enumerate() {
            if i > 0 {
                write!(f, "u")?;
            }
            write!(f, "[{},{})", iv.lo, iv.hi)?;
        }
        Ok(())
    }
}

/// A subset of `Z/NZ`, elements reduced and sorted.
///
/// Constructed sets are nonempty; the empty set only arises as the result
/// of an intersection.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ResidueSet {
    modulus: u32,
    elems: Vec<u32>,
}

impl ResidueSet {
    pub fn new(modulus: u32, elems: impl IntoIterator<Item = i64>) -> Result<Self> {
        if modulus == 0 {
            return param("residue modulus must be positive");
        }
        let set = ResidueSet::from_iter_unchecked(modulus, elems);
        if set.elems.is_empty() {
            return param("residue set must be nonempty");
        }
        Ok(set)
    }

    fn from_iter_unchecked(modulus: u32, elems: impl IntoIterator<Item = i64>) -> Self {
        let n = modulus as i64;
        let mut v: Vec<u32> = elems.into_iter().map(|e| e.rem_euclid(n) as u32).collect();
        v.sort_unstable();
        v.dedup();
        ResidueSet { modulus, elems: v }
    }

    /// All of `Z/NZ`.
    pub fn full(modulus: u32) -> Result<Self> {
        ResidueSet::new(modulus, 0..modulus as i64)
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn elems(&self) -> &[u32] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn contains(&self, r: i64) -> bool {
        let r = r.rem_euclid(self.modulus as i64) as u32;
        self.elems.binary_search(&r).is_ok()
    }

    pub fn translate(&self, t: i64) -> ResidueSet {
        ResidueSet::from_iter_unchecked(self.modulus, self.elems.iter().map(|&e| e as i64 + t))
    }

    pub fn negate(&self) -> ResidueSet {
        ResidueSet::from_iter_unchecked(self.modulus, self.elems.iter().map(|&e| -(e as i64)))
    }

    pub fn intersect(&self, other: &ResidueSet) -> Result<ResidueSet> {
        self.same_modulus(other)?;
        Ok(ResidueSet {
            modulus: self.modulus,
            elems: self
                .elems
                .iter()
                .copied()
                .filter(|e| other.elems.binary_search(e).is_ok())
                .collect(),
        })
    }

    pub fn union(&self, other: &ResidueSet) -> Result<ResidueSet> {
        self.same_modulus(other)?;
        Ok(ResidueSet::from_iter_unchecked(
            self.modulus,
            self.elems.iter().chain(&other.elems).map(|&e| e as i64),
        ))
    }

    /// Difference set `S - S`.
    pub fn differences(&self) -> ResidueSet {
        ResidueSet::from_iter_unchecked(
            self.modulus,
            self.elems
                .iter()
                .flat_map(|&a| self.elems.iter().map(move |&b| a as i64 - b as i64)),
        )
    }

    fn same_modulus(&self, other: &ResidueSet) -> Result<()> {
        if self.modulus != other.modulus {
            return param(format!(
                "residue moduli differ: {} vs {}",
                self.modulus, other.modulus
            ));
        }
        Ok(())
    }
}

impl fmt::Display for ResidueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.elems.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}@{}", self.modulus)
    }
}

/// A window in one of the three internal spaces `ℝ`, `Z/NZ`, `ℝ × Z/NZ`.
#[derive(Clone, Debug, PartialEq)]
pub enum Window {
    Intervals(IntervalUnion),
    Residues(ResidueSet),
    Product(IntervalUnion, ResidueSet),
}

impl Window {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Window::Intervals(_) => "interval union",
            Window::Residues(_) => "residue set",
            Window::Product(..) => "product window",
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            Window::Intervals(iu) => iu.is_empty(),
            Window::Residues(rs) => rs.is_empty(),
            Window::Product(iu, rs) => iu.is_empty() || rs.is_empty(),
        }
    }

    pub fn contains(&self, p: &InternalPoint) -> bool {
        match (self, p) {
            (Window::Intervals(iu), InternalPoint::Real(y)) => iu.contains(*y),
            (Window::Residues(rs), InternalPoint::Residue { r, .. }) => rs.contains(*r as i64),
            (Window::Product(iu, rs), InternalPoint::Product { y, r, .. }) => {
                rs.contains(*r as i64) && iu.contains(*y)
            }
            _ => false,
        }
    }

    /// `t + w`.
    pub fn translate(&self, t: &InternalPoint) -> Result<Window> {
        match (self, t) {
            (Window::Intervals(iu), InternalPoint::Real(y)) => {
                Ok(Window::Intervals(iu.translate(*y)))
            }
            (Window::Residues(rs), InternalPoint::Residue { r, n }) if *n == rs.modulus() => {
                Ok(Window::Residues(rs.translate(*r as i64)))
            }
            (Window::Product(iu, rs), InternalPoint::Product { y, r, n }) if *n == rs.modulus() => {
                Ok(Window::Product(iu.translate(*y), rs.translate(*r as i64)))
            }
            _ => param(format!("cannot translate a {} by {t:?}", self.kind_name())),
        }
    }

    pub fn intersect(&self, other: &Window) -> Result<Window> {
        match (self, other) {
            (Window::Intervals(a), Window::Intervals(b)) => Ok(Window::Intervals(a.intersect(b))),
            (Window::Residues(a), Window::Residues(b)) => Ok(Window::Residues(a.intersect(b)?)),
            (Window::Product(ia, ra), Window::Product(ib, rb)) => {
                Ok(Window::Product(ia.intersect(ib), ra.intersect(rb)?))
            }
            _ => param(format!(
                "cannot intersect a {} with a {}",
                self.kind_name(),
                other.kind_name()
            )),
        }
    }

    /// Union; for products only defined when one factor agrees.
    pub fn union(&self, other: &Window) -> Result<Window> {
        match (self, other) {
            (Window::Intervals(a), Window::Intervals(b)) => Ok(Window::Intervals(a.union(b))),
            (Window::Residues(a), Window::Residues(b)) => Ok(Window::Residues(a.union(b)?)),
            (Window::Product(ia, ra), Window::Product(ib, rb)) if ra == rb => {
                Ok(Window::Product(ia.union(ib), ra.clone()))
            }
            (Window::Product(ia, ra), Window::Product(ib, rb)) if ia == ib => {
                Ok(Window::Product(ia.clone(), ra.union(rb)?))
            }
            _ => param(format!(
                "union of a {} and a {} is not a window of this kind",
                self.kind_name(),
                other.kind_name()
            )),
        }
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Window::Intervals(iu) => write!(f, "{iu}"),
            Window::Residues(rs) => write!(f, "{rs}"),
            Window::Product(iu, rs) => write!(f, "{iu}x{rs}"),
        }
    }
}

/// A point of the internal space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InternalPoint {
    Real(Real),
    Residue { r: u32, n: u32 },
    Product { y: Real, r: u32, n: u32 },
}

impl InternalPoint {
    pub fn residue(r: i64, n: u32) -> InternalPoint {
        InternalPoint::Residue {
            r: r.rem_euclid(n as i64) as u32,
            n,
        }
    }

    pub fn product(y: Real, r: i64, n: u32) -> InternalPoint {
        InternalPoint::Product {
            y,
            r: r.rem_euclid(n as i64) as u32,
            n,
        }
    }

    pub fn checked_add(&self, other: &InternalPoint) -> Result<InternalPoint> {
        use InternalPoint::*;
        match (*self, *other) {
            (Real(a), Real(b)) => Ok(Real(a + b)),
            (Residue { r: a, n }, Residue { r: b, n: m }) if n == m => {
                Ok(InternalPoint::residue(a as i64 + b as i64, n))
            }
            (Product { y: a, r, n }, Product { y: b, r: s, n: m }) if n == m => {
                Ok(InternalPoint::product(a + b, r as i64 + s as i64, n))
            }
            _ => param("internal points of different kinds cannot be added"),
        }
    }

    pub fn neg(&self) -> InternalPoint {
        match *self {
            InternalPoint::Real(y) => InternalPoint::Real(-y),
            InternalPoint::Residue { r, n } => InternalPoint::residue(-(r as i64), n),
            InternalPoint::Product { y, r, n } => InternalPoint::product(-y, -(r as i64), n),
        }
    }

    /// Same point, comparing real parts exactly when both are exact.
    pub fn approx_eq(&self, other: &InternalPoint) -> bool {
        use InternalPoint::*;
        match (*self, *other) {
            (Real(a), Real(b)) => a.cmp_tol(b) == Ordering::Equal,
            (Residue { r, n }, Residue { r: s, n: m }) => r == s && n == m,
            (Product { y, r, n }, Product { y: z, r: s, n: m }) => {
                y.cmp_tol(z) == Ordering::Equal && r == s && n == m
            }
            _ => false,
        }
    }
}
