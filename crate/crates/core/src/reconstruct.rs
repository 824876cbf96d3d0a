//! Recovery of a window from its 2- and 3-point deck data.
//!
//! From `Î1 = |f̂|²` and `Î2(k1,k2) = conj f̂(k1)·conj f̂(k2)·f̂(k1+k2)` the
//! quotient `ψ(k1,k2) = Î2/(|f̂(k1)||f̂(k2)||f̂(k1+k2)|)` is known wherever
//! the three moduli are nonzero, and the phase `φ = f̂/|f̂|` solves
//! `φ(k1+k2) = φ(k1)·φ(k2)·ψ(k1,k2)`. Every solution is `φ·χ` for a
//! character `χ`, i.e. the window up to translation. Phases are propagated
//! outward from `φ(0) = 1`, then inverted and thresholded.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{param, Error, Result};
use crate::format::sig15;
use crate::schemes::{IntervalUnion, ResidueSet};
use crate::spectra::{deck_functions_with, sample_indicator, vanishes_at_root_of_unity, DeckGrid};

/// Default `eps_zero` as a fraction of `max |f̂|`.
pub const DEFAULT_EPS_FACTOR: f64 = 1e-4;
/// Default minimum share of `D` whose phase must be recovered.
pub const DEFAULT_MIN_KNOWN: f64 = 0.9;
/// Grid half-length of the self-test, in window diameters.
pub const SELFTEST_SPAN: f64 = 2.5;

const UNCERTAIN: (f64, f64) = (0.35, 0.65);

/// `ψ` on `D⁽²⁾ = {(k1,k2) : k1, k2, k1+k2 ∈ D}` with `D = {|f̂| ≥ eps_zero}`.
#[derive(Clone, Debug)]
pub struct Psi2 {
    m: usize,
    l_half: f64,
    eps_zero: f64,
    abs_f: Vec<f64>,
    /// Row-major; NaN off `D⁽²⁾`.
    values: Vec<Complex64>,
}

impl Psi2 {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn eps_zero(&self) -> f64 {
        self.eps_zero
    }

    pub fn abs_f(&self) -> &[f64] {
        &self.abs_f
    }

    pub fn in_d(&self, k: i64) -> bool {
        self.abs_f[k.rem_euclid(self.m as i64) as usize] >= self.eps_zero
    }

    /// `ψ(k1, k2)` with indices taken mod `M`.
    pub fn get(&self, k1: i64, k2: i64) -> Option<Complex64> {
        let m = self.m as i64;
        let z = self.values[(k1.rem_euclid(m) * m + k2.rem_euclid(m)) as usize];
        (!z.re.is_nan()).then_some(z)
    }

    /// All defined `(k1, k2)` as grid indices.
    pub fn support(&self) -> Vec<(usize, usize)> {
        let m = self.m;
        (0..m * m)
            .filter(|&i| !self.values[i].re.is_nan())
            .map(|i| (i / m, i % m))
            .collect()
    }
}

/// `10⁻⁴ · max |f̂|`.
pub fn default_eps_zero(deck: &DeckGrid) -> f64 {
    DEFAULT_EPS_FACTOR * deck.abs_f().into_iter().fold(0.0, f64::max)
}

pub fn phase_quotient(deck: &DeckGrid, eps_zero: f64) -> Result<Psi2> {
    if !(eps_zero.is_finite() && eps_zero > 0.0) {
        return param(format!("eps_zero must be positive, got {eps_zero}"));
    }
    let m = deck.m();
    let abs_f = deck.abs_f();
    let in_d: Vec<bool> = abs_f.iter().map(|&a| a >= eps_zero).collect();
    if !in_d[0] {
        return Err(Error::Degenerate("zero frequency is below eps_zero".into()));
    }
    if !in_d[1..].iter().any(|&b| b) {
        return Err(Error::Degenerate(
            "no nonzero frequency has |f̂| ≥ eps_zero".into(),
        ));
    }
    let nan = Complex64::new(f64::NAN, f64::NAN);
    let i2_hat = deck.i2_hat();
    let values: Vec<Complex64> = (0..m * m)
        .into_par_iter()
        .map(|i| {
            let (k1, k2) = (i / m, i % m);
            let k3 = (k1 + k2) % m;
            if in_d[k1] && in_d[k2] && in_d[k3] {
                i2_hat[i] / (abs_f[k1] * abs_f[k2] * abs_f[k3])
            } else {
                nan
            }
        })
        .collect();
    Ok(Psi2 {
        m,
        l_half: deck.l_half(),
        eps_zero,
        abs_f,
        values,
    })
}

/// Recovered phases on the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseField {
    m: usize,
    l_half: f64,
    eps_zero: f64,
    phi: Vec<Option<Complex64>>,
    d_size: usize,
    r0: usize,
}

impl PhaseField {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn eps_zero(&self) -> f64 {
        self.eps_zero
    }

    pub fn phi(&self) -> &[Option<Complex64>] {
        &self.phi
    }

    pub fn get(&self, k: i64) -> Option<Complex64> {
        self.phi[k.rem_euclid(self.m as i64) as usize]
    }

    pub fn known_count(&self) -> usize {
        self.phi.iter().filter(|p| p.is_some()).count()
    }

    /// Frequencies without a phase, inside or outside `D`.
    pub fn unknown_count(&self) -> usize {
        self.m - self.known_count()
    }

    pub fn d_size(&self) -> usize {
        self.d_size
    }

    /// Share of `D` with a recovered phase.
    pub fn known_fraction(&self) -> f64 {
        self.known_count() as f64 / self.d_size as f64
    }

    /// Radius of the extinction-free block around 0 used first in searches.
    pub fn r0(&self) -> usize {
        self.r0
    }

    /// `max |φ(k1+k2) − φ(k1)φ(k2)ψ(k1,k2)|` over known triples.
    pub fn max_residual(&self, psi: &Psi2) -> f64 {
        psi.support()
            .into_par_iter()
            .filter_map(|(a, b)| {
                let (pa, pb, ps) = (self.phi[a]?, self.phi[b]?, self.phi[(a + b) % self.m]?);
                let z = psi.values[a * self.m + b];
                Some((ps - pa * pb * z).norm())
            })
            .reduce(|| 0.0, f64::max)
    }
}

/// A candidate relation fixing `φ(c)`.
struct Relation {
    weight: f64,
    value: Complex64,
}

/// Solves `φ(k1+k2) = φ(k1)φ(k2)ψ(k1,k2)` outward from `φ(0) = 1`.
///
/// Frequencies are visited in order of `|k|` on the centered range
/// `(-M/2, M/2]`; each takes the admissible relation with the largest
/// smallest modulus among its three frequencies, searching small partners
/// first. The smallest positive frequency in `D` is seeded with phase 1,
/// which fixes the translation gauge, and a final correction makes the
/// gauge a whole-cell shift so the result stays consistent across the
/// wrap-around of the grid.
pub fn propagate_phase(abs_f: &[f64], psi: &Psi2, eps_zero: f64) -> Result<PhaseField> {
    let m = abs_f.len();
    if m != psi.m {
        return param(format!("|f̂| has {m} entries, ψ has grid {}", psi.m));
    }
    if !(eps_zero > 0.0) {
        return param(format!("eps_zero must be positive, got {eps_zero}"));
    }
    let mi = m as i64;
    let half = mi / 2;
    let idx = |c: i64| c.rem_euclid(mi) as usize;
    let in_range = |c: i64| c > -half && c <= half;
    let in_d = |c: i64| abs_f[idx(c)] >= eps_zero;
    if !in_d(0) {
        return param("the zero frequency must lie in D");
    }
    let d_size = (0..mi).filter(|&c| in_d(c)).count();

    let mut r0 = 0i64;
    while r0 < half && in_d(r0 + 1) && (r0 + 1 == half || in_d(-(r0 + 1))) {
        r0 += 1;
    }

    let mut order: Vec<i64> = (-half + 1..=half).filter(|&c| c != 0).collect();
    order.sort_by_key(|&c| (c.abs(), c));
    let mut by_size = order.clone();
    by_size.retain(|&b| in_d(b));

    let mut phi: Vec<Option<Complex64>> = vec![None; m];
    phi[0] = Some(Complex64::new(1.0, 0.0));
    if let Some(&seed) = order.iter().find(|&&c| c > 0 && in_d(c)) {
        phi[idx(seed)] = Some(Complex64::new(1.0, 0.0));
    }

    let weight = |a: i64, b: i64, c: i64| abs_f[idx(a)].min(abs_f[idx(b)]).min(abs_f[idx(c)]);
    let best_relation =
        |phi: &[Option<Complex64>], c: i64, partners: &mut dyn Iterator<Item = i64>| {
            let mut best: Option<Relation> = None;
            let mut consider = |r: Relation| {
                if best.as_ref().is_none_or(|b| r.weight > b.weight) {
                    best = Some(r);
                }
            };
            for b in partners {
                let Some(pb) = phi[idx(b)] else { continue };
                let a = c - b;
                if in_range(a) {
                    if let (Some(pa), Some(z)) = (phi[idx(a)], psi.get(a, b)) {
                        consider(Relation {
                            weight: weight(a, b, c),
                            value: pa * pb * z,
                        });
                    }
                }
                let s = c + b;
                if in_range(s) {
                    if let (Some(ps), Some(z)) = (phi[idx(s)], psi.get(c, b)) {
                        consider(Relation {
                            weight: weight(c, b, s),
                            value: ps * pb.conj() * z.conj(),
                        });
                    }
                }
            }
            best
        };

    loop {
        let mut progressed = false;
        for &c in &order {
            if phi[idx(c)].is_some() || !in_d(c) {
                continue;
            }
            let near = best_relation(
                &phi,
                c,
                &mut by_size.iter().copied().take_while(|b| b.abs() <= r0),
            );
            let found = near.or_else(|| best_relation(&phi, c, &mut by_size.iter().copied()));
            if let Some(r) = found {
                phi[idx(c)] = Some(r.value / r.value.norm());
                progressed = true;
            }
        }
        if !progressed {
            break;
        }
    }

    // The gauge left by the seed is φ₀(k)·z^k with z^M ≠ 1 in general;
    // relations that wrap around the grid measure z^M.
    let known: Vec<i64> = order
        .iter()
        .copied()
        .filter(|&c| phi[idx(c)].is_some())
        .collect();
    let rho: Complex64 = known
        .par_iter()
        .map(|&a| {
            let mut acc = Complex64::default();
            for &b in &known {
                let s = a + b;
                if in_range(s) {
                    continue;
                }
                let (Some(ps), Some(z)) = (phi[idx(s)], psi.get(a, b)) else {
                    continue;
                };
                let ratio = phi[idx(a)].unwrap() * phi[idx(b)].unwrap() * z * ps.conj();
                let ratio = if s > half { ratio } else { ratio.conj() };
                acc += ratio * weight(a, b, s);
            }
            acc
        })
        .sum();
    if rho.norm() > 0.0 {
        let theta = rho.arg();
        for c in (-half + 1)..=half {
            if let Some(p) = phi[idx(c)].as_mut() {
                *p *= Complex64::from_polar(1.0, -theta * c as f64 / m as f64);
            }
        }
    }

    Ok(PhaseField {
        m,
        l_half: psi.l_half,
        eps_zero,
        phi,
        d_size,
        r0: r0 as usize,
    })
}

/// Thresholded inverse transform of `|f̂|·φ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Reconstruction {
    pub indicator: Vec<u8>,
    pub values: Vec<f64>,
    /// Cells whose value lands in `[0.35, 0.65]`.
    pub uncertain: usize,
}

pub fn reconstruct_window(
    abs_f: &[f64],
    phase: &PhaseField,
    min_known_fraction: f64,
) -> Result<Reconstruction> {
    let m = phase.m;
    if abs_f.len() != m {
        return param(format!(
            "|f̂| has {} entries, phase field has {m}",
            abs_f.len()
        ));
    }
    if !(0.0..=1.0).contains(&min_known_fraction) {
        return param(format!(
            "known fraction must lie in [0, 1], got {min_known_fraction}"
        ));
    }
    let mut spec: Vec<Complex64> = (0..m)
        .map(|k| phase.phi[k].map_or(Complex64::default(), |p| p * abs_f[k]))
        .collect();
    FftPlanner::new().plan_fft_inverse(m).process(&mut spec);
    let h = 2.0 * phase.l_half / m as f64;
    let values: Vec<f64> = spec.iter().map(|z| z.re / (m as f64 * h)).collect();
    let indicator: Vec<u8> = values.iter().map(|&v| u8::from(v >= 0.5)).collect();
    let uncertain = values
        .iter()
        .filter(|&&v| (UNCERTAIN.0..=UNCERTAIN.1).contains(&v))
        .count();
    let frac = phase.known_fraction();
    if frac < min_known_fraction {
        return Err(Error::Reconstruction {
            reason: format!(
                "phase recovered on {:.1}% of D, below the required {:.1}%",
                100.0 * frac,
                100.0 * min_known_fraction
            ),
            partial: indicator,
        });
    }
    Ok(Reconstruction {
        indicator,
        values,
        uncertain,
    })
}

/// Best circular shift `s` with `g[j] ≈ f[j - s]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Alignment {
    pub shift: usize,
    /// `|f △ shifted g| / |f ∪ shifted g|`: the share of occupied cells that
    /// disagree.
    pub mismatch: f64,
    pub differing: usize,
}

pub fn align_up_to_translation(f: &[u8], g: &[u8]) -> Result<Alignment> {
    let m = f.len();
    if g.len() != m || m == 0 {
        return param(format!("grids differ in size: {} vs {}", m, g.len()));
    }
    let (shift, differing, union) = (0..m)
        .into_par_iter()
        .map(|s| {
            let (mut diff, mut union) = (0usize, 0usize);
            for j in 0..m {
                let (a, b) = (f[(j + m - s) % m] != 0, g[j] != 0);
                diff += usize::from(a != b);
                union += usize::from(a || b);
            }
            (s, diff, union)
        })
        .min_by_key(|&(s, diff, _)| (diff, s))
        .expect("nonempty grid");
    Ok(Alignment {
        shift,
        mismatch: if union == 0 {
            0.0
        } else {
            differing as f64 / union as f64
        },
        differing,
    })
}

/// Circular reflection `j ↦ -j`.
pub fn reflect_grid(f: &[u8]) -> Vec<u8> {
    let m = f.len();
    (0..m).map(|j| f[(m - j) % m]).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReconstructionOptions {
    /// `None` uses `10⁻⁴ · max |f̂|`.
    pub eps_zero: Option<f64>,
    pub min_known_fraction: f64,
    pub allow_large: bool,
}

impl Default for ReconstructionOptions {
    fn default() -> Self {
        ReconstructionOptions {
            eps_zero: None,
            min_known_fraction: DEFAULT_MIN_KNOWN,
            allow_large: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReconstructionReport {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "L_half")]
    pub l_half: f64,
    pub eps_zero: f64,
    pub unknown_count: usize,
    pub shift: Option<usize>,
    pub mismatch: Option<f64>,
    pub uncertain_cells: usize,
    #[serde(skip)]
    pub recovered: Vec<u8>,
    #[serde(skip)]
    pub values: Vec<f64>,
}

impl ReconstructionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// Rows `cell,x,value,indicator` with `x` the cell center.
    pub fn recovered_csv(&self) -> String {
        let h = 2.0 * self.l_half / self.m as f64;
        let mut out = String::from("cell,x,value,indicator\n");
        for (j, (&v, &b)) in self.values.iter().zip(&self.recovered).enumerate() {
            let x = -self.l_half + (j as f64 + 0.5) * h;
            out.push_str(&format!("{j},{},{},{b}\n", sig15(x), sig15(v)));
        }
        out
    }
}

/// Deck data → ψ → φ → indicator, never touching the true phase.
pub fn reconstruct_from_deck(
    deck: &DeckGrid,
    opts: &ReconstructionOptions,
) -> Result<(Reconstruction, PhaseField)> {
    let eps = opts.eps_zero.unwrap_or_else(|| default_eps_zero(deck));
    let psi = phase_quotient(deck, eps)?;
    let abs_f = deck.abs_f();
    let phase = propagate_phase(&abs_f, &psi, eps)?;
    let rec = reconstruct_window(&abs_f, &phase, opts.min_known_fraction)?;
    Ok((rec, phase))
}

pub fn report_from_deck(
    deck: &DeckGrid,
    opts: &ReconstructionOptions,
) -> Result<ReconstructionReport> {
    let (rec, phase) = reconstruct_from_deck(deck, opts)?;
    Ok(ReconstructionReport {
        m: deck.m(),
        l_half: deck.l_half(),
        eps_zero: phase.eps_zero(),
        unknown_count: phase.unknown_count(),
        shift: None,
        mismatch: None,
        uncertain_cells: rec.uncertain,
        recovered: rec.indicator,
        values: rec.values,
    })
}

/// Grid half-length used by [`self_test`].
pub fn selftest_l_half(w: &IntervalUnion) -> Result<f64> {
    let d = w.diameter();
    if !(d > 0.0) {
        return param("window must be a nonempty interval union");
    }
    Ok(SELFTEST_SPAN * d)
}

/// Samples `w`, computes its deck data, forgets `w`, reconstructs and
/// aligns the result with the original samples.
pub fn self_test(
    w: &IntervalUnion,
    m: usize,
    opts: &ReconstructionOptions,
) -> Result<ReconstructionReport> {
    let l_half = selftest_l_half(w)?;
    let f = sample_indicator(w, m, l_half);
    let deck = deck_functions_with(&f, m, l_half, opts.allow_large)?;
    let truth: Vec<u8> = f.iter().map(|&v| v as u8).collect();
    // the deck carries f for validation only; reconstruct from tables
    let mut report = report_from_deck(&deck, opts)?;
    let al = align_up_to_translation(&truth, &report.recovered)?;
    report.shift = Some(al.shift);
    report.mismatch = Some(al.mismatch);
    Ok(report)
}

/// Deck tables of a residue set over `Z/NZ` under counting measure.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidueDeck {
    pub modulus: u32,
    /// `#{t ∈ S : t - w ∈ S}`.
    pub i1: Vec<u64>,
    /// `#{t ∈ S : t - w1, t - w2 ∈ S}`, row-major.
    pub i2: Vec<u64>,
    pub i1_hat: Vec<Complex64>,
    pub i2_hat: Vec<Complex64>,
}

pub fn residue_deck(s: &ResidueSet) -> ResidueDeck {
    let n = s.modulus() as usize;
    let e = s.elems();
    let mut i1 = vec![0u64; n];
    let mut i2 = vec![0u64; n * n];
    for &t in e {
        for &a in e {
            i1[(t as usize + n - a as usize) % n] += 1;
            for &b in e {
                i2[(t as usize + n - a as usize) % n * n + (t as usize + n - b as usize) % n] += 1;
            }
        }
    }
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let mut i1_hat: Vec<Complex64> = i1.iter().map(|&c| Complex64::new(c as f64, 0.0)).collect();
    fft.process(&mut i1_hat);
    let mut i2_hat: Vec<Complex64> = i2.iter().map(|&c| Complex64::new(c as f64, 0.0)).collect();
    fft.process(&mut i2_hat);
    let mut col = vec![Complex64::default(); n];
    for c in 0..n {
        for r in 0..n {
            col[r] = i2_hat[r * n + c];
        }
        fft.process(&mut col);
        for r in 0..n {
            i2_hat[r * n + c] = col[r];
        }
    }
    ResidueDeck {
        modulus: s.modulus(),
        i1,
        i2,
        i1_hat,
        i2_hat,
    }
}

/// Characters `b` at which `1̂_S` vanishes exactly.
pub fn residue_extinctions(s: &ResidueSet) -> Vec<u32> {
    (0..s.modulus())
        .filter(|&b| vanishes_at_root_of_unity(s.elems(), s.modulus(), b as i64))
        .collect()
}
