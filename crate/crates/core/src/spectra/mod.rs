//! Dual lattices, window Fourier transforms and pure-point diffraction.
//!
//! Under the pairing `exp(2πi(k·x + k⋆·x⋆))` the Fibonacci lattice has dual
//! `(1/√5)(Z + Zτ)`: the label `(m, n)` gives `k = (m + nτ)/√5` and
//! `k⋆ = -(m + nτ')/√5`. The Bragg intensity at `k` is
//! `|1̂_Ω(-k⋆)|²` with `1̂_Ω(χ) = ∫_Ω conj χ dθ_H`.

mod cyclotomic;
mod deck;

pub use cyclotomic::{cyclotomic_polynomial, vanishes_at_root_of_unity, zero_condition};
pub use deck::{deck_functions, deck_functions_with, sample_indicator, DeckGrid, MAX_DEFAULT_GRID};

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;
pub use rustfft::num_complex::Complex64;

use crate::error::{param, Error, Result};
use crate::format::sig15;
use crate::pointsets::{lattice_box, PointSet};
use crate::schemes::{IntervalUnion, QuadInt, Scheme, SchemeKind, Window, SQRT5, TAU, TAU_CONJ};

/// A point of the dual module `L°`, stored by integer labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DualPoint {
    /// `k = (m + nτ)/√5`.
    Fibonacci { m: i64, n: i64 },
    /// `k = b/N`, paired with the character `r ↦ e^{-2πi b r/N}`.
    Periodic { b: i64, modulus: u32 },
    /// `k = (m + nτ)/√5 + τ'b/(N√5)`.
    Combined {
        m: i64,
        n: i64,
        b: i64,
        modulus: u32,
    },
}

/// A frequency on the internal space: the argument of `1̂_Ω`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InternalDual {
    Real(f64),
    /// Character `r ↦ e^{2πi c r/N}`.
    Residue {
        c: i64,
        modulus: u32,
    },
    Product {
        kappa: f64,
        c: i64,
        modulus: u32,
    },
}

impl InternalDual {
    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> InternalDual {
        match self {
            InternalDual::Real(k) => InternalDual::Real(-k),
            InternalDual::Residue { c, modulus } => InternalDual::Residue { c: -c, modulus },
            InternalDual::Product { kappa, c, modulus } => InternalDual::Product {
                kappa: -kappa,
                c: -c,
                modulus,
            },
        }
    }

    pub fn is_zero(self) -> bool {
        let zero_c = |c: i64, n: u32| c.rem_euclid(n as i64) == 0;
        match self {
            InternalDual::Real(k) => k == 0.0,
            InternalDual::Residue { c, modulus } => zero_c(c, modulus),
            InternalDual::Product { kappa, c, modulus } => kappa == 0.0 && zero_c(c, modulus),
        }
    }
}

impl DualPoint {
    pub fn zero(scheme: &Scheme) -> DualPoint {
        match scheme.kind() {
            SchemeKind::Fibonacci => DualPoint::Fibonacci { m: 0, n: 0 },
            SchemeKind::Periodic(modulus) => DualPoint::Periodic { b: 0, modulus },
            SchemeKind::Combined(modulus) => DualPoint::Combined {
                m: 0,
                n: 0,
                b: 0,
                modulus,
            },
        }
    }

    /// Physical frequency `k`.
    pub fn k(self) -> f64 {
        match self {
            DualPoint::Fibonacci { m, n } => (m as f64 + n as f64 * TAU) / SQRT5,
            DualPoint::Periodic { b, modulus } => b as f64 / modulus as f64,
            DualPoint::Combined { m, n, b, modulus } => {
                (m as f64 + n as f64 * TAU) / SQRT5 + TAU_CONJ * b as f64 / (modulus as f64 * SQRT5)
            }
        }
    }

    /// Internal frequency `k⋆`.
    pub fn star(self) -> InternalDual {
        match self {
            DualPoint::Fibonacci { m, n } => {
                InternalDual::Real(-(m as f64 + n as f64 * TAU_CONJ) / SQRT5)
            }
            DualPoint::Periodic { b, modulus } => InternalDual::Residue { c: -b, modulus },
            DualPoint::Combined { m, n, b, modulus } => InternalDual::Product {
                kappa: -(m as f64 + n as f64 * TAU_CONJ) / SQRT5
                    - TAU * b as f64 / (modulus as f64 * SQRT5),
                c: b,
                modulus,
            },
        }
    }

    /// `k·x + k⋆·x⋆`; an integer for every lattice point `x`.
    pub fn pairing(self, x: QuadInt) -> f64 {
        let phys = self.k() * x.physical();
        match self.star() {
            InternalDual::Real(kappa) => phys + kappa * x.conj_value(),
            InternalDual::Residue { c, modulus } => phys + (c * x.u) as f64 / modulus as f64,
            InternalDual::Product { kappa, c, modulus } => {
                phys + kappa * x.conj_value() + (c * x.u) as f64 / modulus as f64
            }
        }
    }

    fn label(self) -> String {
        match self {
            DualPoint::Fibonacci { m, n } => format!("{m},{n}"),
            DualPoint::Periodic { b, .. } => b.to_string(),
            DualPoint::Combined { m, n, b, .. } => format!("{m},{n},{b}"),
        }
    }
}

/// Generators of `L°` together with the scheme.
#[derive(Clone, Debug, PartialEq)]
pub struct DualBasis {
    pub scheme: Scheme,
    pub basis: Vec<DualPoint>,
}

pub fn dual_lattice(scheme: &Scheme) -> DualBasis {
    let basis = match scheme.kind() {
        SchemeKind::Fibonacci => vec![
            DualPoint::Fibonacci { m: 1, n: 0 },
            DualPoint::Fibonacci { m: 0, n: 1 },
        ],
        SchemeKind::Periodic(modulus) => vec![DualPoint::Periodic { b: 1, modulus }],
        SchemeKind::Combined(modulus) => vec![
            DualPoint::Combined {
                m: 1,
                n: 0,
                b: 0,
                modulus,
            },
            DualPoint::Combined {
                m: 0,
                n: 1,
                b: 0,
                modulus,
            },
            DualPoint::Combined {
                m: 0,
                n: 0,
                b: 1,
                modulus,
            },
        ],
    };
    DualBasis {
        scheme: *scheme,
        basis,
    }
}

fn cis(turns: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * turns)
}

/// `∫_w e^{-2πiκy} dy / c`.
fn interval_ft(iu: &IntervalUnion, kappa: f64, c: f64) -> Complex64 {
    iu.intervals()
        .iter()
        .map(|iv| {
            let (a, b) = (iv.lo.to_f64(), iv.hi.to_f64());
            let len = iv.length().to_f64();
            let x = PI * kappa * len;
            let sinc = if x == 0.0 {
                len
            } else {
                x.sin() / (PI * kappa)
            };
            cis(-kappa * (a + b) / 2.0) * sinc
        })
        .sum::<Complex64>()
        / c
}

/// `Σ_{a∈S} e^{-2πi a c/N} / N`, with exact reduction of `a·c mod N`.
/// Near-zero sums are settled by the exact cyclotomic test, so extinctions
/// come out as exact zeros rather than rounding noise.
fn residue_ft(elems: &[u32], c: i64, n: u32) -> Complex64 {
    let sum = elems
        .iter()
        .map(|&a| {
            let e = (-(a as i128) * c as i128).rem_euclid(n as i128);
            cis(e as f64 / n as f64)
        })
        .sum::<Complex64>();
    if sum.norm() < 1e-9 && vanishes_at_root_of_unity(elems, n, -c) {
        return Complex64::default();
    }
    sum / n as f64
}

/// `1̂_w(χ) = ∫_w conj χ dθ_H`.
pub fn window_ft(scheme: &Scheme, w: &Window, kstar: InternalDual) -> Result<Complex64> {
    scheme.check_window(w)?;
    let c = scheme.interval_normalization();
    match (w, kstar) {
        (Window::Intervals(iu), InternalDual::Real(kappa)) => Ok(interval_ft(iu, kappa, c)),
        (Window::Residues(rs), InternalDual::Residue { c: ch, modulus })
            if modulus == rs.modulus() =>
        {
            Ok(residue_ft(rs.elems(), ch, modulus))
        }
        (
            Window::Product(iu, rs),
            InternalDual::Product {
                kappa,
                c: ch,
                modulus,
            },
        ) if modulus == rs.modulus() => {
            Ok(interval_ft(iu, kappa, c) * residue_ft(rs.elems(), ch, modulus))
        }
        _ => param(format!(
            "frequency {kstar:?} does not fit a {}",
            w.kind_name()
        )),
    }
}

/// `|1̂_w(-k⋆)|²`.
pub fn intensity(scheme: &Scheme, w: &Window, k: DualPoint) -> Result<f64> {
    Ok(window_ft(scheme, w, k.star().neg())?.norm_sqr())
}

/// A Bragg peak.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Peak {
    pub dual: DualPoint,
    pub k: f64,
    pub intensity: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub scheme: Scheme,
    pub window: String,
    pub peaks: Vec<Peak>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiffractionOptions {
    pub kmax: f64,
    /// Peaks below this intensity count as extinct. Must be positive for
    /// schemes with a real internal space, where it bounds the enumeration.
    pub floor: f64,
    /// Keep extinct peaks (only meaningful for finite enumerations).
    pub include_zeros: bool,
}

impl DiffractionOptions {
    pub fn new(kmax: f64) -> Self {
        DiffractionOptions {
            kmax,
            floor: 1e-6,
            include_zeros: false,
        }
    }
}

/// Peaks with `|k| ≤ kmax`, ordered by `|k|`, then `k`, then label.
pub fn diffraction(scheme: &Scheme, w: &Window, opts: DiffractionOptions) -> Result<Spectrum> {
    scheme.check_window(w)?;
    if !(opts.kmax.is_finite() && opts.kmax >= 0.0) {
        return param(format!(
            "kmax must be finite and nonnegative, got {}",
            opts.kmax
        ));
    }
    if !(opts.floor >= 0.0 && opts.floor.is_finite()) {
        return param(format!(
            "intensity floor must be nonnegative, got {}",
            opts.floor
        ));
    }
    let candidates: Vec<DualPoint> = match (scheme.kind(), w) {
        (SchemeKind::Periodic(modulus), _) => {
            let bmax = (opts.kmax * modulus as f64 + 1e-9).floor() as i64;
            (-bmax..=bmax)
                .map(|b| DualPoint::Periodic { b, modulus })
                .collect()
        }
        (kind, Window::Intervals(iu) | Window::Product(iu, _)) => {
            if opts.floor <= 0.0 {
                return param(
                    "an intensity floor > 0 is needed to bound the Fibonacci dual module",
                );
            }
            // |1̂(κ)| ≤ pieces/(π|κ|√5) bounds the internal frequencies worth visiting
            let pieces = iu.intervals().len().max(1) as f64;
            let kappa_max = pieces / (PI * SQRT5 * opts.floor.sqrt());
            let estimate = 2.0 * opts.kmax * 2.0 * kappa_max;
            if estimate > 5e7 {
                return Err(Error::Resource {
                    what: "dual-module enumeration",
                    needed: estimate as u64,
                    limit: 50_000_000,
                    advice: "raise the intensity floor or lower kmax",
                });
            }
            let (p, q) = (SQRT5 * opts.kmax, SQRT5 * kappa_max);
            match kind {
                SchemeKind::Fibonacci => lattice_box(-p, p, -q, q)
                    .into_iter()
                    .map(|x| DualPoint::Fibonacci { m: x.u, n: x.v })
                    .collect(),
                SchemeKind::Combined(modulus) => (0..modulus as i64)
                    .flat_map(|b| {
                        lattice_box(-p - 1.0, p + 1.0, -q - TAU, q + TAU)
                            .into_iter()
                            .map(move |x| DualPoint::Combined {
                                m: x.u,
                                n: x.v,
                                b,
                                modulus,
                            })
                    })
                    .collect(),
                SchemeKind::Periodic(_) => unreachable!(),
            }
        }
        _ => unreachable!("window checked against scheme"),
    };
    let kmax = opts.kmax;
    let mut peaks: Vec<Peak> = candidates
        .into_par_iter()
        .filter(|d| d.k().abs() <= kmax + 1e-12)
        .map(|d| {
            intensity(scheme, w, d).map(|i| Peak {
                dual: d,
                k: d.k(),
                intensity: i,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    peaks.retain(|p| opts.include_zeros || p.intensity >= opts.floor);
    sort_peaks(&mut peaks);
    Ok(Spectrum {
        scheme: *scheme,
        window: w.to_string(),
        peaks,
    })
}

fn sort_peaks(peaks: &mut [Peak]) {
    peaks.sort_by(|a, b| {
        a.k.abs()
            .total_cmp(&b.k.abs())
            .then(a.k.total_cmp(&b.k))
            .then(a.dual.cmp(&b.dual))
    });
}

/// Periodic schemes: every `b = 0, …, N`, zeros included, in order of `b`.
pub fn full_period(scheme: &Scheme, w: &Window) -> Result<Spectrum> {
    let SchemeKind::Periodic(modulus) = scheme.kind() else {
        return param("a full-period spectrum needs a periodic scheme");
    };
    scheme.check_window(w)?;
    let peaks = (0..=modulus as i64)
        .map(|b| {
            let dual = DualPoint::Periodic { b, modulus };
            intensity(scheme, w, dual).map(|i| Peak {
                dual,
                k: dual.k(),
                intensity: i,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Spectrum {
        scheme: *scheme,
        window: w.to_string(),
        peaks,
    })
}

/// `|Σ_{x∈Λ∩[0,R)} e^{-2πikx}|² / R²` on a patch.
pub fn empirical_intensity(ps: &PointSet, k: DualPoint, r: f64) -> Result<f64> {
    if !(r > 0.0 && ps.region().lo <= 0.0 && ps.region().hi >= r - 1.0) {
        return param(format!("patch region does not cover [0, {r})"));
    }
    let sum: Complex64 = ps
        .points()
        .iter()
        .filter(|x| (0.0..r).contains(&x.physical()))
        .map(|x| match k {
            // exact phase reduction for integer positions
            DualPoint::Periodic { b, modulus } => cis(-((b as i128 * x.u as i128)
                .rem_euclid(modulus as i128)
                as f64)
                / modulus as f64),
            _ => cis(-k.k() * x.physical()),
        })
        .sum();
    Ok(sum.norm_sqr() / (r * r))
}

impl Spectrum {
    pub fn intensity_at(&self, dual: DualPoint) -> Option<f64> {
        self.peaks
            .iter()
            .find(|p| p.dual == dual)
            .map(|p| p.intensity)
    }

    pub fn to_csv(&self) -> String {
        let header = match self.scheme.kind() {
            SchemeKind::Fibonacci => "m,n,k,intensity",
            SchemeKind::Periodic(_) => "b,k,intensity",
            SchemeKind::Combined(_) => "m,n,b,k,intensity",
        };
        let mut out = format!("{header}\n");
        for p in &self.peaks {
            let _ = writeln!(
                out,
                "{},{},{}",
                p.dual.label(),
                sig15(p.k),
                sig15(p.intensity)
            );
        }
        out
    }

    /// Stick plot: one vertical line per peak, height proportional to the
    /// intensity. Periodic spectra get ticks at every `b/N`, labelled every
    /// fourth.
    pub fn to_svg(&self) -> String {
        let (w, h, margin) = (800.0, 320.0, 50.0);
        let (plot_w, plot_h) = (w - 2.0 * margin, h - 2.0 * margin);
        let (k_lo, k_hi) =
            match self
                .peaks
                .iter()
                .map(|p| p.k)
                .fold(None, |acc: Option<(f64, f64)>, k| {
                    Some(acc.map_or((k, k), |(lo, hi)| (lo.min(k), hi.max(k))))
                }) {
                Some((lo, hi)) if hi > lo => (lo, hi),
                Some((lo, _)) => (lo - 1.0, lo + 1.0),
                None => (0.0, 1.0),
            };
        let i_max = self
            .peaks
            .iter()
            .map(|p| p.intensity)
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        let x_of = |k: f64| margin + (k - k_lo) / (k_hi - k_lo) * plot_w;
        let base = margin + plot_h;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="20" font-family="sans-serif" font-size="14" text-anchor="middle">{} {}</text>"#,
            w / 2.0,
            self.scheme,
            xml_escape(&self.window)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{margin}" y1="{base}" x2="{}" y2="{base}" stroke="black"/>"#,
            margin + plot_w
        );
        if let SchemeKind::Periodic(n) = self.scheme.kind() {
            let b_lo = (k_lo * n as f64).round() as i64;
            let b_hi = (k_hi * n as f64).round() as i64;
            for b in b_lo..=b_hi {
                let x = x_of(b as f64 / n as f64);
                let len = if b % 4 == 0 { 8.0 } else { 4.0 };
                let _ = writeln!(
                    s,
                    r#"<line x1="{x:.2}" y1="{base}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
                    base + len
                );
                if b % 4 == 0 {
                    let label = if b == 0 {
                        "0".to_string()
                    } else {
                        format!("{b}/{n}")
                    };
                    let _ = writeln!(
                        s,
                        r#"<text x="{x:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{label}</text>"#,
                        base + 22.0
                    );
                }
            }
        } else {
            let step = nice_step((k_hi - k_lo) / 8.0);
            let mut t = (k_lo / step).ceil() * step;
            while t <= k_hi + 1e-12 {
                let x = x_of(t);
                let _ = writeln!(
                    s,
                    r#"<line x1="{x:.2}" y1="{base}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
                    base + 6.0,
                    base + 22.0,
                    sig15((t / step).round() * step)
                );
                t += step;
            }
        }
        for p in &self.peaks {
            let x = x_of(p.k);
            let y = base - p.intensity / i_max * plot_h;
            let _ = writeln!(
                s,
                r#"<line x1="{x:.2}" y1="{base}" x2="{x:.2}" y2="{y:.2}" stroke="navy" stroke-width="2"/>"#
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn nice_step(raw: f64) -> f64 {
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|f| f * mag)
        .find(|&s| s >= raw)
        .unwrap_or(10.0 * mag)
}

pub(crate) fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Sample frequencies where `|1̂_w| < eps`.
#[derive(Clone, Debug, PartialEq)]
pub struct Extinctions {
    pub points: Vec<InternalDual>,
    /// Whether the zero frequency came out extinct; impossible for a window
    /// of positive measure, so `true` signals a numerical fault.
    pub contains_zero: bool,
}

pub fn extinction_set(
    scheme: &Scheme,
    w: &Window,
    sample: &[InternalDual],
    eps: f64,
) -> Result<Extinctions> {
    if !(eps > 0.0) {
        return param(format!("eps must be positive, got {eps}"));
    }
    let measure = scheme.measure(w)?;
    if measure <= 0.0 {
        return Err(Error::Degenerate("window has zero measure".into()));
    }
    let mut points = Vec::new();
    let mut contains_zero = false;
    for &k in sample {
        if window_ft(scheme, w, k)?.norm() < eps {
            contains_zero |= k.is_zero();
            points.push(k);
        }
    }
    Ok(Extinctions {
        points,
        contains_zero,
    })
}

/// Suggested extinction threshold `10⁻⁶ · θ(w)`.
pub fn default_extinction_eps(scheme: &Scheme, w: &Window) -> Result<f64> {
    Ok(1e-6 * scheme.measure(w)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointsets::{generate, Region};
    use proptest::prelude::*;

    fn periodic(lit: &str) -> (Scheme, Window) {
        let s = Scheme::periodic(32).unwrap();
        let w = s.parse_window(lit).unwrap();
        (s, w)
    }

    #[test]
    fn pairing_is_integral() {
        for scheme in [
            Scheme::fibonacci(),
            Scheme::periodic(32).unwrap(),
            Scheme::combined(32).unwrap(),
        ] {
            let basis = dual_lattice(&scheme).basis;
            let lattice: Vec<QuadInt> = match scheme.kind() {
                SchemeKind::Periodic(_) => {
                    vec![QuadInt::new(1, 0), QuadInt::new(32, 0), QuadInt::new(-7, 0)]
                }
                _ => vec![QuadInt::new(1, 0), QuadInt::new(0, 1), QuadInt::new(5, -3)],
            };
            for d in basis.iter().chain([&DualPoint::zero(&scheme)]) {
                for &x in &lattice {
                    let p = d.pairing(x);
                    assert!((p - p.round()).abs() < 1e-9, "{scheme} {d:?} {x}: {p}");
                }
            }
        }
    }

    #[test]
    fn window_ft_examples() {
        let s = Scheme::fibonacci();
        let w = s.parse_window("fib").unwrap();
        let z = window_ft(&s, &w, InternalDual::Real(0.0)).unwrap();
        assert!((z.re - TAU / SQRT5).abs() < 1e-15 && z.im == 0.0);

        let (p, a) = periodic("{A}");
        let at = |c| window_ft(&p, &a, InternalDual::Residue { c, modulus: 32 }).unwrap();
        assert!(at(16).norm() < 1e-15);
        assert!((at(0).re - 0.5).abs() < 1e-15);
    }

    /// Numerical quadrature oracle for interval transforms.
    #[test]
    fn interval_ft_matches_quadrature() {
        let s = Scheme::fibonacci();
        let w = s.parse_window("[0,0.4)u[0.6,1.1)").unwrap();
        let Window::Intervals(iu) = &w else { panic!() };
        for kappa in [0.3, -1.7, 2.2] {
            let steps = 200_000;
            let (a, b) = (0.0, 1.1);
            let h = (b - a) / steps as f64;
            let mut q = Complex64::new(0.0, 0.0);
            for i in 0..steps {
                let y = a + (i as f64 + 0.5) * h;
                if iu.contains_f64(y) {
                    q += cis(-kappa * y) * h;
                }
            }
            q /= SQRT5;
            let got = window_ft(&s, &w, InternalDual::Real(kappa)).unwrap();
            assert!((got - q).norm() < 1e-6, "{kappa}: {got} vs {q}");
        }
    }

    #[test]
    fn periodic_fig1_spectrum() {
        let (s, a) = periodic("{A}");
        let (_, b) = periodic("{B}");
        let sa = full_period(&s, &a).unwrap();
        let sb = full_period(&s, &b).unwrap();
        assert_eq!(sa.peaks.len(), 33);
        for (pa, pb) in sa.peaks.iter().zip(&sb.peaks) {
            let DualPoint::Periodic { b: idx, .. } = pa.dual else {
                panic!()
            };
            if idx % 2 == 0 && idx % 32 != 0 {
                assert!(pa.intensity < 1e-12);
            } else {
                assert!(pa.intensity > 1e-6);
            }
            assert!((pa.intensity - pb.intensity).abs() < 1e-12);
        }
        assert!((sa.peaks[0].intensity - 0.25).abs() < 1e-15);
        assert!((sa.peaks[32].intensity - 0.25).abs() < 1e-12);
        let svg = sa.to_svg();
        assert!(svg.contains("16/32") && svg.starts_with("<svg"));
    }

    #[test]
    fn fibonacci_spectrum() {
        let s = Scheme::fibonacci();
        let w = s.parse_window("fib").unwrap();
        let sp = diffraction(&s, &w, DiffractionOptions::new(2.0)).unwrap();
        let d = TAU / SQRT5;
        assert_eq!(sp.peaks[0].dual, DualPoint::Fibonacci { m: 0, n: 0 });
        assert!((sp.peaks[0].intensity - d * d).abs() < 1e-12);
        assert!(sp
            .peaks
            .iter()
            .all(|p| p.k.abs() <= 2.0 && p.intensity >= 1e-6));
        let zero = diffraction(&s, &w, DiffractionOptions::new(0.0)).unwrap();
        assert_eq!(zero.peaks.len(), 1);
        let csv = sp.to_csv();
        assert!(
            csv.starts_with("m,n,k,intensity\n0,0,0,0.523606797749979"),
            "{}",
            &csv[..80]
        );
        // peak list matches a brute-force scan of labels
        let mut brute = 0;
        for m in -400..=400 {
            for n in -200..=200 {
                let dp = DualPoint::Fibonacci { m, n };
                if dp.k().abs() <= 2.0 && intensity(&s, &w, dp).unwrap() >= 1e-6 {
                    brute += 1;
                }
            }
        }
        assert_eq!(brute, sp.peaks.len());
    }

    #[test]
    fn combined_zero_peak_is_density_squared() {
        let s = Scheme::combined(32).unwrap();
        let w = s.parse_window("fib x {A}").unwrap();
        let sp = diffraction(
            &s,
            &w,
            DiffractionOptions {
                kmax: 0.5,
                floor: 1e-4,
                include_zeros: false,
            },
        )
        .unwrap();
        let d = s.measure(&w).unwrap();
        assert!((sp.peaks[0].intensity - d * d).abs() < 1e-12);
    }

    #[test]
    fn periodic_intensity_matches_patch_sums() {
        let (s, a) = periodic("{A}");
        let r = 32_000.0;
        let ps = generate(&s, &a, Region::new(0.0, r).unwrap()).unwrap();
        for b in 0..32 {
            let d = DualPoint::Periodic { b, modulus: 32 };
            let e = empirical_intensity(&ps, d, r).unwrap();
            assert!((e - intensity(&s, &a, d).unwrap()).abs() < 1e-6);
        }
    }

    #[test]
    fn extinction_examples() {
        let s = Scheme::fibonacci();
        let w = s.parse_window("[0,1)").unwrap();
        let sample: Vec<InternalDual> = (-4..=4).map(|k| InternalDual::Real(k as f64)).collect();
        let e = extinction_set(&s, &w, &sample, 1e-12).unwrap();
        assert_eq!(e.points.len(), 8);
        assert!(!e.contains_zero);
        let half: Vec<InternalDual> = (0..4).map(|k| InternalDual::Real(k as f64 + 0.5)).collect();
        assert!(extinction_set(&s, &w, &half, 1e-300)
            .unwrap()
            .points
            .is_empty());

        let (p, a) = periodic("{A}");
        let sample: Vec<InternalDual> = (0..32)
            .map(|c| InternalDual::Residue { c, modulus: 32 })
            .collect();
        let e = extinction_set(&p, &a, &sample, 1e-12).unwrap();
        let evens: Vec<InternalDual> = (1..16)
            .map(|c| InternalDual::Residue {
                c: 2 * c,
                modulus: 32,
            })
            .collect();
        assert_eq!(e.points, evens);

        let empty = s.parse_window("empty").unwrap();
        assert!(extinction_set(&s, &empty, &sample[..0], 1e-6).is_err());
    }

    proptest! {
        #[test]
        fn zero_intensity_is_density_squared(lo in -2.0f64..0.0, len in 0.1f64..3.0) {
            let s = Scheme::fibonacci();
            let w = Window::Intervals(IntervalUnion::single(lo, lo + len).unwrap());
            let i0 = intensity(&s, &w, DualPoint::zero(&s)).unwrap();
            let d = s.measure(&w).unwrap();
            prop_assert!((i0 - d * d).abs() < 1e-10);
        }

        #[test]
        fn intensity_is_translation_invariant(t in -3.0f64..3.0, m in -20i64..20, n in -20i64..20) {
            let s = Scheme::fibonacci();
            let w = s.parse_window("[0,0.4)u[0.6,1.1)").unwrap();
            let moved = w.translate(&crate::schemes::InternalPoint::Real(t.into())).unwrap();
            let d = DualPoint::Fibonacci { m, n };
            let (i0, i1) = (intensity(&s, &w, d).unwrap(), intensity(&s, &moved, d).unwrap());
            prop_assert!((i0 - i1).abs() < 1e-10);
        }

        #[test]
        fn residue_intensity_translation_exact(t in 0i64..32, b in 0i64..32) {
            let (s, a) = periodic("{A}");
            let Window::Residues(rs) = &a else { unreachable!() };
            let moved = Window::Residues(rs.translate(t));
            let d = DualPoint::Periodic { b, modulus: 32 };
            let (i0, i1) = (intensity(&s, &a, d).unwrap(), intensity(&s, &moved, d).unwrap());
            prop_assert!((i0 - i1).abs() < 1e-14);
        }
    }
}
