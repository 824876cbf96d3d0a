//! Deck functions of a window on a periodized grid.
//!
//! The internal line is replaced by a circle of circumference `2·L_half`
//! cut into `M` cells of width `h`. With `f` the sampled indicator,
//!
//! ```text
//! I1[w]      = h Σ_t f[t] f[t-w]
//! I2[w1, w2] = h Σ_t f[t] f[t-w1] f[t-w2]
//! f̂ = h·DFT(f),  Î1 = h·DFT(I1),  Î2 = h²·DFT₂(I2)
//! ```
//!
//! and the identities `Î1 = |f̂|²`, `Î2(k1,k2) = conj f̂(k1)·conj f̂(k2)·f̂(k1+k2)`
//! hold exactly up to rounding.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{param, Error, Result};
use crate::schemes::IntervalUnion;

/// Largest grid accepted without the explicit large-grid flag.
pub const MAX_DEFAULT_GRID: usize = 512;

const FACTORIZATION_TOL: f64 = 1e-8;
const NONNEGATIVE_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct DeckGrid {
    m: usize,
    l_half: f64,
    f: Option<Vec<f64>>,
    f_hat: Option<Vec<Complex64>>,
    i1: Vec<f64>,
    i2: Vec<f64>,
    i1_hat: Vec<Complex64>,
    i2_hat: Vec<Complex64>,
}

/// Cell-center samples of `w` on `[-L_half, L_half)`, wrapping around the
/// circle.
pub fn sample_indicator(w: &IntervalUnion, m: usize, l_half: f64) -> Vec<f64> {
    let h = 2.0 * l_half / m as f64;
    (0..m)
        .map(|j| {
            let x = -l_half + (j as f64 + 0.5) * h;
            let hit = [x, x - 2.0 * l_half, x + 2.0 * l_half]
                .into_iter()
                .any(|y| w.contains_f64(y));
            if hit {
                1.0
            } else {
                0.0
            }
        })
        .collect()
}

pub fn deck_functions(f: &[f64], m: usize, l_half: f64) -> Result<DeckGrid> {
    deck_functions_with(f, m, l_half, false)
}

/// As [`deck_functions`], optionally lifting the grid-size cap.
pub fn deck_functions_with(
    f: &[f64],
    m: usize,
    l_half: f64,
    allow_large: bool,
) -> Result<DeckGrid> {
    check_grid(m, l_half, allow_large)?;
    if f.len() != m {
        return param(format!("indicator has {} cells, grid has {m}", f.len()));
    }
    if let Some(v) = f.iter().find(|&&v| v != 0.0 && v != 1.0) {
        return param(format!("indicator values must be 0 or 1, found {v}"));
    }
    let nz: Vec<usize> = (0..m).filter(|&j| f[j] == 1.0).collect();
    if nz.is_empty() {
        return Err(Error::Degenerate(
            "window indicator is zero on the whole grid".into(),
        ));
    }
    let span = circular_span(&nz, m);
    if 4 * span >= m {
        return param(format!(
            "window support spans {span} of {m} cells; it must stay below M/4 \
             (diameter < L_half/2) to avoid wrap-around"
        ));
    }

    let h = 2.0 * l_half / m as f64;
    let mut c1 = vec![0u64; m];
    let mut c2 = vec![0u64; m * m];
    for &t in &nz {
        for &s in &nz {
            c1[(t + m - s) % m] += 1;
        }
        for &s1 in &nz {
            let row = (t + m - s1) % m * m;
            for &s2 in &nz {
                c2[row + (t + m - s2) % m] += 1;
            }
        }
    }
    let i1: Vec<f64> = c1.iter().map(|&c| c as f64 * h).collect();
    let i2: Vec<f64> = c2.iter().map(|&c| c as f64 * h).collect();

    let mut planner = FftPlanner::new();
    let mut f_hat: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    planner.plan_fft_forward(m).process(&mut f_hat);
    f_hat.iter_mut().for_each(|z| *z *= h);

    let mut deck = DeckGrid::assemble(m, l_half, i1, i2, &mut planner);
    deck.f = Some(f.to_vec());
    deck.f_hat = Some(f_hat);
    deck.verify()?;
    Ok(deck)
}

fn check_grid(m: usize, l_half: f64, allow_large: bool) -> Result<()> {
    if m < 4 || !m.is_multiple_of(2) {
        return param(format!("grid size must be even and at least 4, got {m}"));
    }
    if m > MAX_DEFAULT_GRID && !allow_large {
        return Err(Error::Resource {
            what: "deck grid",
            needed: (m * m) as u64,
            limit: (MAX_DEFAULT_GRID * MAX_DEFAULT_GRID) as u64,
            advice: "pass the large-grid flag to allow it",
        });
    }
    if !(l_half.is_finite() && l_half > 0.0) {
        return param(format!("L_half must be positive, got {l_half}"));
    }
    Ok(())
}

/// Distance in cells between the first and last occupied cell, measured
/// the short way around the circle.
fn circular_span(nz: &[usize], m: usize) -> usize {
    let mut max_gap = nz[0] + m - nz[nz.len() - 1];
    for w in nz.windows(2) {
        max_gap = max_gap.max(w[1] - w[0]);
    }
    m - max_gap
}

fn fft2(data: &mut [Complex64], m: usize, planner: &mut FftPlanner<f64>) {
    let fft = planner.plan_fft_forward(m);
    fft.process(data);
    let mut col = vec![Complex64::default(); m];
    for c in 0..m {
        for r in 0..m {
            col[r] = data[r * m + c];
        }
        fft.process(&mut col);
        for r in 0..m {
            data[r * m + c] = col[r];
        }
    }
}

impl DeckGrid {
    fn assemble(
        m: usize,
        l_half: f64,
        i1: Vec<f64>,
        i2: Vec<f64>,
        planner: &mut FftPlanner<f64>,
    ) -> DeckGrid {
        let h = 2.0 * l_half / m as f64;
        let mut i1_hat: Vec<Complex64> = i1.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        planner.plan_fft_forward(m).process(&mut i1_hat);
        i1_hat.iter_mut().for_each(|z| *z *= h);
        let mut i2_hat: Vec<Complex64> = i2.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft2(&mut i2_hat, m, planner);
        i2_hat.iter_mut().for_each(|z| *z *= h * h);
        DeckGrid {
            m,
            l_half,
            f: None,
            f_hat: None,
            i1,
            i2,
            i1_hat,
            i2_hat,
        }
    }

    /// Deck data given directly as tables (no indicator); `i2` is row-major.
    pub fn from_tables(
        m: usize,
        l_half: f64,
        i1: Vec<f64>,
        i2: Vec<f64>,
        allow_large: bool,
    ) -> Result<DeckGrid> {
        check_grid(m, l_half, allow_large)?;
        if i1.len() != m || i2.len() != m * m {
            return param(format!(
                "deck tables have {} and {} entries; expected {m} and {}",
                i1.len(),
                i2.len(),
                m * m
            ));
        }
        if i1.iter().chain(&i2).any(|v| !v.is_finite()) {
            return param("deck tables contain non-finite values");
        }
        let deck = DeckGrid::assemble(m, l_half, i1, i2, &mut FftPlanner::new());
        deck.verify()?;
        Ok(deck)
    }

    fn verify(&self) -> Result<()> {
        let m = self.m;
        let scale = self.i1.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for w in 0..m {
            if (self.i1[w] - self.i1[(m - w) % m]).abs() > 1e-12 * scale {
                return Err(Error::Invariant(format!(
                    "I1 is not symmetric at offset {w}"
                )));
            }
        }
        let hat_scale = self.i1_hat.iter().fold(0.0f64, |a, z| a.max(z.norm()));
        for (k, z) in self.i1_hat.iter().enumerate() {
            if z.re < -NONNEGATIVE_TOL || z.im.abs() > 1e-9 * hat_scale.max(1.0) {
                return Err(Error::Invariant(format!(
                    "transform of I1 is not a nonnegative real at frequency {k}: {z}"
                )));
            }
        }
        if let Some(fh) = &self.f_hat {
            let r = self.factorization_residual(fh);
            if r >= FACTORIZATION_TOL {
                return Err(Error::Invariant(format!(
                    "triple-product factorization residual {r:e} exceeds {FACTORIZATION_TOL:e}"
                )));
            }
        }
        Ok(())
    }

    /// `max |Î2 − conj f̂·conj f̂·f̂| / max|f̂|³`.
    pub fn factorization_residual(&self, f_hat: &[Complex64]) -> f64 {
        let m = self.m;
        let fmax = f_hat.iter().fold(0.0f64, |a, z| a.max(z.norm()));
        let mut worst = 0.0f64;
        for k1 in 0..m {
            for k2 in 0..m {
                let pred = f_hat[k1].conj() * f_hat[k2].conj() * f_hat[(k1 + k2) % m];
                worst = worst.max((self.i2_hat[k1 * m + k2] - pred).norm());
            }
        }
        worst / fmax.powi(3)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn l_half(&self) -> f64 {
        self.l_half
    }

    /// Cell width `2·L_half/M`.
    pub fn cell(&self) -> f64 {
        2.0 * self.l_half / self.m as f64
    }

    pub fn f(&self) -> Option<&[f64]> {
        self.f.as_deref()
    }

    pub fn f_hat(&self) -> Option<&[Complex64]> {
        self.f_hat.as_deref()
    }

    pub fn i1(&self) -> &[f64] {
        &self.i1
    }

    /// Row-major `M × M`.
    pub fn i2(&self) -> &[f64] {
        &self.i2
    }

    pub fn i2_at(&self, w1: i64, w2: i64) -> f64 {
        let m = self.m as i64;
        self.i2[(w1.rem_euclid(m) * m + w2.rem_euclid(m)) as usize]
    }

    pub fn i1_hat(&self) -> &[Complex64] {
        &self.i1_hat
    }

    pub fn i2_hat(&self) -> &[Complex64] {
        &self.i2_hat
    }

    pub fn i2_hat_at(&self, k1: i64, k2: i64) -> Complex64 {
        let m = self.m as i64;
        self.i2_hat[(k1.rem_euclid(m) * m + k2.rem_euclid(m)) as usize]
    }

    /// `|f̂| = sqrt(Î1)`, computed from the deck data alone.
    pub fn abs_f(&self) -> Vec<f64> {
        self.i1_hat.iter().map(|z| z.re.max(0.0).sqrt()).collect()
    }
}
