//! Finite patches of model sets.
//!
//! Patches are produced by exact lattice enumeration: for `Z + Zτ` the
//! physical and internal coordinates `x = u + vτ`, `x' = u + vτ'` satisfy
//! `v = (x - x')/√5`, so a physical region and a window hull bound `v`, and
//! for each `v` both constraints bound `u`. Membership is then decided
//! exactly in `Q(τ)`.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::error::{param, Error, Result};
use crate::schemes::{QuadInt, Scheme, SchemeKind, Window, SQRT5, TAU, TAU_CONJ};

/// Upper bound on the number of points a single patch may hold.
pub const DEFAULT_POINT_BUDGET: u64 = 50_000_000;

/// Closed physical interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Region {
    pub lo: f64,
    pub hi: f64,
}

impl Region {
    pub fn new(lo: f64, hi: f64) -> Result<Region> {
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return param(format!("region [{lo}, {hi}] must satisfy lo < hi"));
        }
        Ok(Region { lo, hi })
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn covers(&self, other: &Region) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}

/// All `u + vτ` whose physical value lies (up to slack) in
/// `[phys_lo, phys_hi]` and whose conjugate lies in `[int_lo, int_hi]`.
/// Callers filter the result exactly.
pub(crate) fn lattice_box(phys_lo: f64, phys_hi: f64, int_lo: f64, int_hi: f64) -> Vec<QuadInt> {
    let v_lo = ((phys_lo - int_hi) / SQRT5).floor() as i64 - 1;
    let v_hi = ((phys_hi - int_lo) / SQRT5).ceil() as i64 + 1;
    (v_lo..=v_hi)
        .into_par_iter()
        .flat_map_iter(|v| {
            let vf = v as f64;
            let u_lo = (phys_lo - vf * TAU).max(int_lo - vf * TAU_CONJ).floor() as i64 - 1;
            let u_hi = (phys_hi - vf * TAU).min(int_hi - vf * TAU_CONJ).ceil() as i64 + 1;
            (u_lo..=u_hi).map(move |u| QuadInt::new(u, v))
        })
        .collect()
}

/// A finite patch of a model set.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    scheme: Scheme,
    window: Window,
    region: Region,
    points: Vec<QuadInt>,
}

impl PointSet {
    /// Validating constructor: points must be strictly increasing, inside
    /// the region, and have their star in the window.
    pub fn new(
        scheme: Scheme,
        window: Window,
        region: Region,
        points: Vec<QuadInt>,
    ) -> Result<Self> {
        scheme.check_window(&window)?;
        for pair in points.windows(2) {
            if pair[0].cmp_physical(pair[1]) != Ordering::Less {
                return Err(Error::Invariant(format!(
                    "points not strictly increasing at {} / {}",
                    pair[0], pair[1]
                )));
            }
        }
        for &p in &points {
            if !window.contains(&scheme.star(p)?) {
                return Err(Error::Invariant(format!(
                    "star of {p} is outside the window"
                )));
            }
            if !region.contains(p.physical()) {
                return Err(Error::Invariant(format!("{p} lies outside the region")));
            }
        }
        Ok(PointSet {
            scheme,
            window,
            region,
            points,
        })
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn region(&self) -> Region {
        self.region
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

    pub fn positions(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.physical()).collect()
    }

    pub fn contains(&self, p: QuadInt) -> bool {
        self.points.binary_search_by(|q| q.cmp_physical(p)).is_ok()
    }

    /// Points per unit length of the generating region.
    pub fn density(&self) -> f64 {
        self.points.len() as f64 / self.region.length()
    }

    /// The same patch cut down to a sub-region.
    pub fn restrict(&self, region: Region) -> Result<PointSet> {
        if !self.region.covers(&region) {
            return param(format!(
                "region [{}, {}] is not inside the patch region [{}, {}]",
                region.lo, region.hi, self.region.lo, self.region.hi
            ));
        }
        Ok(PointSet {
            scheme: self.scheme,
            window: self.window.clone(),
            region,
            points: self
                .points
                .iter()
                .copied()
                .filter(|p| region.contains(p.physical()))
                .collect(),
        })
    }

    /// `t + Λ(Ω) = Λ(t⋆ + Ω)`, with the region moved along.
    pub fn translate(&self, t: QuadInt) -> Result<PointSet> {
        let shift = t.physical();
        Ok(PointSet {
            scheme: self.scheme,
            window: self.window.translate(&self.scheme.star(t)?)?,
            region: Region {
                lo: self.region.lo + shift,
                hi: self.region.hi + shift,
            },
            points: self.points.iter().map(|&p| p + t).collect(),
        })
    }
}

/// Lattice points `x` with `physical(x) ∈ region` and `star(x) ∈ w`.
pub fn generate(scheme: &Scheme, w: &Window, region: Region) -> Result<PointSet> {
    generate_with_budget(scheme, w, region, DEFAULT_POINT_BUDGET)
}

pub fn generate_with_budget(
    scheme: &Scheme,
    w: &Window,
    region: Region,
    budget: u64,
) -> Result<PointSet> {
    scheme.check_window(w)?;
    if w.is_empty() {
        return Ok(PointSet {
            scheme: *scheme,
            window: w.clone(),
            region,
            points: Vec::new(),
        });
    }
    let (hull_lo, hull_hi) = match w {
        Window::Intervals(iu) | Window::Product(iu, _) => {
            let (lo, hi) = iu.hull().expect("nonempty");
            (lo.to_f64(), hi.to_f64())
        }
        Window::Residues(_) => (0.0, 0.0),
    };
    let estimate = match scheme.kind() {
        SchemeKind::Periodic(_) => region.length() + 1.0,
        _ => region.length() * ((hull_hi - hull_lo) / SQRT5 + 1.0),
    };
    if estimate > budget as f64 {
        return Err(Error::Resource {
            what: "point-set generation",
            needed: estimate as u64,
            limit: budget,
            advice: "generate a smaller region or split it into pieces",
        });
    }

    let mut points: Vec<QuadInt> = match scheme.kind() {
        SchemeKind::Periodic(_) => {
            let Window::Residues(rs) = w else {
                unreachable!()
            };
            (region.lo.ceil() as i64..=region.hi.floor() as i64)
                .filter(|&n| rs.contains(n))
                .map(QuadInt::from)
                .collect()
        }
        _ => {
            let mut pts = lattice_box(region.lo, region.hi, hull_lo, hull_hi);
            pts.retain(|&p| {
                region.contains(p.physical())
                    && w.contains(&scheme.star(p).expect("lattice point fits scheme"))
            });
            pts
        }
    };
    points.par_sort_unstable_by(|a, b| a.cmp_physical(*b));
    Ok(PointSet {
        scheme: *scheme,
        window: w.clone(),
        region,
        points,
    })
}

/// Gaps between consecutive points.
#[derive(Clone, Debug, PartialEq)]
pub struct Gaps {
    /// Exact lattice differences.
    pub exact: Vec<QuadInt>,
    pub physical: Vec<f64>,
    /// Periodic schemes only: number of empty integer sites between
    /// consecutive points.
    pub absent_sites: Option<Vec<u64>>,
}

pub fn gap_sequence(ps: &PointSet) -> Result<Gaps> {
    if ps.len() < 2 {
        return param(format!(
            "gap sequence needs at least 2 points, got {}",
            ps.len()
        ));
    }
    let exact: Vec<QuadInt> = ps.points.windows(2).map(|w| w[1] - w[0]).collect();
    let physical = exact.iter().map(|g| g.physical()).collect();
    let absent_sites = matches!(ps.scheme.kind(), SchemeKind::Periodic(_))
        .then(|| exact.iter().map(|g| (g.u - 1) as u64).collect());
    Ok(Gaps {
        exact,
        physical,
        absent_sites,
    })
}

/// `card(p △ q) / length(region)` for two patches on the same region.
pub fn symmetric_difference_density(p: &PointSet, q: &PointSet) -> Result<f64> {
    let (rp, rq) = (p.region, q.region);
    if (rp.lo - rq.lo).abs() > 1e-9 || (rp.hi - rq.hi).abs() > 1e-9 {
        return param(format!(
            "regions differ: [{}, {}] vs [{}, {}]",
            rp.lo, rp.hi, rq.lo, rq.hi
        ));
    }
    let (a, b) = (&p.points, &q.points);
    let (mut i, mut j, mut common) = (0, 0, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp_physical(b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    Ok((a.len() + b.len() - 2 * common) as f64 / rp.length())
}

/// Density of `(t + Λ(w)) △ Λ(w)` on `region`. Both sides are generated
/// exactly, using `t + Λ(w) = Λ(t⋆ + w)`.
pub fn translate_and_compare(
    scheme: &Scheme,
    w: &Window,
    t: QuadInt,
    region: Region,
) -> Result<f64> {
    let base = generate(scheme, w, region)?;
    // t + Λ(w) restricted to region is Λ(t⋆ + w) on region
    let moved_window = w.translate(&scheme.star(t)?)?;
    let moved = generate(scheme, &moved_window, region)?;
    symmetric_difference_density(&base, &moved)
}
