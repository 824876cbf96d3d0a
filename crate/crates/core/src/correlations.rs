//! Pattern frequencies, correlation measures and almost periods.
//!
//! The frequency of `{0, x₁, …, xₙ}` in a regular model set is the measure
//! of `Ω ∩ ⋂(-xⱼ⋆ + Ω)`, independent of the patch; the empirical route
//! counts occurrences in a centered cube of a generated patch.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use rayon::prelude::*;

use crate::error::{param, Error, Result};
use crate::format::sig15;
use crate::pointsets::{generate, lattice_box, symmetric_difference_density, PointSet, Region};
use crate::schemes::{QuadInt, Scheme, SchemeKind, Window};

/// Most difference tuples a single correlation measure may enumerate.
pub const TUPLE_BUDGET: u64 = 20_000_000;

/// The pattern `{0, x₁, …, xₙ}`, stored without zeros and repeats, sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    points: Vec<QuadInt>,
}

impl Pattern {
    pub fn new(points: impl IntoIterator<Item = QuadInt>) -> Pattern {
        let mut points: Vec<QuadInt> = points.into_iter().filter(|p| !p.is_zero()).collect();
        points.sort_unstable();
        points.dedup();
        Pattern { points }
    }

    /// The one-point pattern `{0}`.
    pub fn origin() -> Pattern {
        Pattern::default()
    }

    pub fn points(&self) -> &[QuadInt] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn with(&self, x: QuadInt) -> Pattern {
        Pattern::new(self.points.iter().copied().chain([x]))
    }

    fn physical_span(&self) -> (f64, f64) {
        self.points
            .iter()
            .map(|p| p.physical())
            .fold((0.0, 0.0), |(lo, hi), x| (f64::min(lo, x), f64::max(hi, x)))
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{0")?;
        for p in &self.points {
            write!(f, ", {p}")?;
        }
        write!(f, "}}")
    }
}

/// `θ_H(w ∩ ⋂(-xⱼ⋆ + w))`.
pub fn freq_exact(scheme: &Scheme, w: &Window, pat: &Pattern) -> Result<f64> {
    scheme.check_window(w)?;
    let mut acc = w.clone();
    for &x in pat.points() {
        if acc.is_empty() {
            break;
        }
        let shifted = w.translate(&scheme.star(x)?.neg())?;
        acc = acc.intersect(&shifted)?;
    }
    scheme.measure(&acc)
}

/// `card{y ∈ C_R : y, y + x₁, …, y + xₙ ∈ Λ} / R`, with `C_R` the open cube
/// of side `R` centered at 0.
pub fn freq_empirical(ps: &PointSet, pat: &Pattern, r: f64) -> Result<f64> {
    if !(r.is_finite() && r > 0.0) {
        return param(format!("averaging size must be positive, got {r}"));
    }
    for &x in pat.points() {
        ps.scheme().check_point(x)?;
    }
    if ps.is_empty() {
        return Ok(0.0);
    }
    let (lo, hi) = pat.physical_span();
    let needed = Region::new(-r / 2.0 + lo, r / 2.0 + hi)?;
    if !ps.region().covers(&needed) {
        return param(format!(
            "patch region [{}, {}] does not cover the required [{}, {}]",
            ps.region().lo,
            ps.region().hi,
            needed.lo,
            needed.hi
        ));
    }
    let members: HashSet<QuadInt> = ps.points().iter().copied().collect();
    let count = ps
        .points()
        .par_iter()
        .filter(|y| {
            let py = y.physical();
            -r / 2.0 < py
                && py < r / 2.0
                && pat.points().iter().all(|&x| members.contains(&(**y + x)))
        })
        .count();
    Ok(count as f64 / r)
}

/// The `order`-point correlation of `Λ(w)` restricted to difference tuples
/// whose entries have physical size at most `cutoff`.
///
/// Entries are keyed by ordered `(order-1)`-tuples, repeats and zeros
/// included, so the zero tuple carries the density.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationMeasure {
    scheme: Scheme,
    order: usize,
    cutoff: f64,
    density: f64,
    entries: BTreeMap<Vec<QuadInt>, f64>,
}

impl CorrelationMeasure {
    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn entries(&self) -> &BTreeMap<Vec<QuadInt>, f64> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Recorded frequency, 0 off the support.
    pub fn get(&self, tuple: &[QuadInt]) -> f64 {
        self.entries.get(tuple).copied().unwrap_or(0.0)
    }

    /// Empirical frequencies of every entry on a patch, in entry order.
    pub fn empirical(&self, ps: &PointSet, r: f64) -> Result<Vec<f64>> {
        self.entries
            .keys()
            .map(|k| freq_empirical(ps, &Pattern::new(k.iter().copied()), r))
            .collect()
    }

    fn coordinate(&self, x: QuadInt) -> String {
        match self.scheme.kind() {
            SchemeKind::Periodic(_) => x.u.to_string(),
            _ => x.to_string(),
        }
    }

    pub fn to_csv(&self) -> String {
        self.csv(None)
    }

    /// CSV with an extra `empirical` column aligned with the entries.
    pub fn to_csv_with_empirical(&self, empirical: &[f64]) -> Result<String> {
        if empirical.len() != self.entries.len() {
            return param("empirical column length differs from the entry count");
        }
        Ok(self.csv(Some(empirical)))
    }

    fn csv(&self, empirical: Option<&[f64]>) -> String {
        let mut out = String::new();
        let header: Vec<String> = (1..self.order).map(|i| format!("diff{i}")).collect();
        out.push_str(&header.join(","));
        out.push_str(",frequency");
        if empirical.is_some() {
            out.push_str(",empirical");
        }
        out.push('\n');
        for (i, (k, f)) in self.entries.iter().enumerate() {
            for x in k {
                out.push_str(&self.coordinate(*x));
                out.push(',');
            }
            out.push_str(&sig15(*f));
            if let Some(e) = empirical {
                out.push(',');
                out.push_str(&sig15(e[i]));
            }
            out.push('\n');
        }
        out
    }
}

/// Lattice differences `x` with `|x| ≤ cutoff` and `θ(w ∩ (-x⋆ + w)) > 0`,
/// enumerated exactly from the window hull: such `x` have `x⋆ ∈ w - w`.
pub fn difference_support(scheme: &Scheme, w: &Window, cutoff: f64) -> Result<Vec<QuadInt>> {
    if !(cutoff.is_finite() && cutoff >= 0.0) {
        return param(format!(
            "cutoff must be finite and nonnegative, got {cutoff}"
        ));
    }
    scheme.check_window(w)?;
    let candidates: Vec<QuadInt> = match (scheme.kind(), w) {
        (SchemeKind::Periodic(_), _) => {
            let c = cutoff.floor() as i64;
            (-c..=c).map(QuadInt::from).collect()
        }
        (_, Window::Intervals(iu) | Window::Product(iu, _)) => {
            let d = iu.diameter();
            let estimate = 2.0 * cutoff * (2.0 * d / crate::schemes::SQRT5 + 1.0);
            if estimate > TUPLE_BUDGET as f64 {
                return Err(Error::Resource {
                    what: "difference enumeration",
                    needed: estimate as u64,
                    limit: TUPLE_BUDGET,
                    advice: "lower the cutoff",
                });
            }
            lattice_box(-cutoff, cutoff, -d, d)
                .into_iter()
                .filter(|x| x.physical().abs() <= cutoff + 1e-9)
                .collect()
        }
        _ => unreachable!("window checked against scheme"),
    };
    let mut out = Vec::new();
    for x in candidates {
        if freq_exact(scheme, w, &Pattern::new([x]))? > 0.0 {
            out.push(x);
        }
    }
    out.sort_unstable();
    Ok(out)
}

pub fn correlation_measure(
    scheme: &Scheme,
    w: &Window,
    order: usize,
    cutoff: f64,
) -> Result<CorrelationMeasure> {
    if !(2..=4).contains(&order) {
        return param(format!("correlation order must be 2, 3 or 4, got {order}"));
    }
    let support = difference_support(scheme, w, cutoff)?;
    let n = order - 1;
    let total = (support.len() as u64).saturating_pow(n as u32);
    if total > TUPLE_BUDGET {
        return Err(Error::Resource {
            what: "correlation tuples",
            needed: total,
            limit: TUPLE_BUDGET,
            advice: "lower the cutoff or the order",
        });
    }
    let tuples: Vec<Vec<QuadInt>> = (0..total)
        .map(|mut idx| {
            let mut t = vec![QuadInt::ZERO; n];
            for slot in t.iter_mut().rev() {
                *slot = support[(idx % support.len() as u64) as usize];
                idx /= support.len() as u64;
            }
            t
        })
        .collect();
    let values: Vec<Result<f64>> = tuples
        .par_iter()
        .map(|t| freq_exact(scheme, w, &Pattern::new(t.iter().copied())))
        .collect();
    let mut entries = BTreeMap::new();
    for (t, v) in tuples.into_iter().zip(values) {
        let v = v?;
        if v > 0.0 {
            entries.insert(t, v);
        }
    }
    Ok(CorrelationMeasure {
        scheme: *scheme,
        order,
        cutoff,
        density: scheme.measure(w)?,
        entries,
    })
}

/// First tuple on which two correlation measures disagree.
#[derive(Clone, Debug, PartialEq)]
pub struct Discrepancy {
    pub tuple: Vec<QuadInt>,
    pub left: Option<f64>,
    pub right: Option<f64>,
}

impl fmt::Display for Discrepancy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: Option<f64>| v.map_or("absent".to_string(), sig15);
        let tuple: Vec<String> = self.tuple.iter().map(|x| x.to_string()).collect();
        write!(
            f,
            "({}): {} vs {}",
            tuple.join(", "),
            show(self.left),
            show(self.right)
        )
    }
}

/// `Ok(None)` when supports coincide and values agree within `tol`.
pub fn correlations_equal(
    c1: &CorrelationMeasure,
    c2: &CorrelationMeasure,
    tol: f64,
) -> Result<Option<Discrepancy>> {
    if c1.order != c2.order || c1.cutoff != c2.cutoff {
        return param(format!(
            "cannot compare order {} cutoff {} with order {} cutoff {}",
            c1.order, c1.cutoff, c2.order, c2.cutoff
        ));
    }
    let keys: std::collections::BTreeSet<&Vec<QuadInt>> =
        c1.entries.keys().chain(c2.entries.keys()).collect();
    Ok(keys.into_iter().find_map(|k| {
        let (l, r) = (c1.entries.get(k).copied(), c2.entries.get(k).copied());
        let same = matches!((l, r), (Some(a), Some(b)) if (a - b).abs() <= tol);
        (!same).then(|| Discrepancy {
            tuple: k.clone(),
            left: l,
            right: r,
        })
    }))
}

/// A translation with its estimated symmetric-difference density.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlmostPeriod {
    pub t: QuadInt,
    pub estimate: f64,
}

/// Lattice points with physical value in `(0, r_search]` whose star lies
/// within the window diameter; farther stars give disjoint windows and so
/// symmetric-difference density `2·density`.
pub fn default_almost_period_candidates(
    scheme: &Scheme,
    w: &Window,
    r_search: f64,
) -> Result<Vec<QuadInt>> {
    if !(r_search.is_finite() && r_search > 0.0) {
        return param(format!("search radius must be positive, got {r_search}"));
    }
    scheme.check_window(w)?;
    let mut out: Vec<QuadInt> = match (scheme.kind(), w) {
        (SchemeKind::Periodic(_), _) => (1..=r_search.floor() as i64).map(QuadInt::from).collect(),
        (_, Window::Intervals(iu) | Window::Product(iu, _)) => {
            let d = iu.diameter();
            lattice_box(0.0, r_search, -d, d)
                .into_iter()
                .filter(|x| {
                    let p = x.physical();
                    p > 0.0 && p <= r_search && x.conj_value().abs() < d
                })
                .collect()
        }
        _ => unreachable!("window checked against scheme"),
    };
    out.sort_by(|a, b| a.cmp_physical(*b));
    Ok(out)
}

/// Candidates `t` whose `(t + Λ) △ Λ` has density below `eps` on `[-R, R]`.
pub fn almost_periods(
    scheme: &Scheme,
    w: &Window,
    eps: f64,
    candidates: &[QuadInt],
    r: f64,
) -> Result<Vec<AlmostPeriod>> {
    let density = scheme.measure(w)?;
    if !(eps > 0.0 && eps < 2.0 * density) {
        return param(format!("eps must lie in (0, {}), got {eps}", 2.0 * density));
    }
    if !(r.is_finite() && r > 0.0) {
        return param(format!("radius must be positive, got {r}"));
    }
    let region = Region::new(-r, r)?;
    let base = generate(scheme, w, region)?;
    let estimates: Vec<Result<AlmostPeriod>> = candidates
        .par_iter()
        .map(|&t| {
            let moved = generate(scheme, &w.translate(&scheme.star(t)?)?, region)?;
            Ok(AlmostPeriod {
                t,
                estimate: symmetric_difference_density(&base, &moved)?,
            })
        })
        .collect();
    let mut out = Vec::new();
    for e in estimates {
        let e = e?;
        if e.estimate < eps {
            out.push(e);
        }
    }
    Ok(out)
}
