//! The three cut-and-project schemes on the line and their windows.
//!
//! * Fibonacci: lattice `L = Z + Zτ`, star map `u + vτ ↦ u + vτ'`,
//!   internal measure `θ = Lebesgue / √5`.
//! * Periodic(N): lattice `Z`, star map `x ↦ x mod N`, `θ(S) = card(S)/N`.
//! * Combined(N): lattice `Z + Zτ`, star map `u + vτ ↦ (u + vτ', u mod N)`,
//!   `θ = (Lebesgue/√5) ⊗ (counting/N)`.
//!
//! With these normalizations the density of `Λ(Ω)` equals `θ(Ω)`.

mod literal;
mod quad;
mod window;

use std::fmt;
use std::str::FromStr;

pub use literal::{parse_real, parse_window};
pub use quad::{QuadInt, QuadNum, Real, MEMBERSHIP_TOL, SQRT5, TAU, TAU_CONJ};
pub use window::{InternalPoint, Interval, IntervalUnion, ResidueSet, Window};

use crate::error::{param, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchemeFamily {
    Fibonacci,
    Periodic,
    Combined,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    Fibonacci,
    Periodic(u32),
    Combined(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Scheme {
    kind: SchemeKind,
}

impl Scheme {
    /// Builds a scheme; `modulus` must be given (and ≥ 2) exactly for the
    /// periodic and combined families.
    pub fn new(family: SchemeFamily, modulus: Option<u32>) -> Result<Scheme> {
        let kind = match (family, modulus) {
            (SchemeFamily::Fibonacci, None) => SchemeKind::Fibonacci,
            (SchemeFamily::Fibonacci, Some(_)) => {
                return param("the Fibonacci scheme takes no modulus")
            }
            (_, None) => return param(format!("{family:?} scheme needs a modulus N")),
            (_, Some(n)) if n < 2 => return param(format!("modulus must be at least 2, got {n}")),
            (SchemeFamily::Periodic, Some(n)) => SchemeKind::Periodic(n),
            (SchemeFamily::Combined, Some(n)) => SchemeKind::Combined(n),
        };
        Ok(Scheme { kind })
    }

    pub fn fibonacci() -> Scheme {
        Scheme {
            kind: SchemeKind::Fibonacci,
        }
    }

    pub fn periodic(n: u32) -> Result<Scheme> {
        Scheme::new(SchemeFamily::Periodic, Some(n))
    }

    pub fn combined(n: u32) -> Result<Scheme> {
        Scheme::new(SchemeFamily::Combined, Some(n))
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn modulus(&self) -> Option<u32> {
        match self.kind {
            SchemeKind::Fibonacci => None,
            SchemeKind::Periodic(n) | SchemeKind::Combined(n) => Some(n),
        }
    }

    /// Whether lattice points carry a `τ` component.
    pub fn has_real_internal(&self) -> bool {
        !matches!(self.kind, SchemeKind::Periodic(_))
    }

    /// Normalization constant `c` with `θ_H = reference measure / c`.
    pub fn normalization(&self) -> f64 {
        match self.kind {
            SchemeKind::Fibonacci => SQRT5,
            SchemeKind::Periodic(n) => n as f64,
            SchemeKind::Combined(n) => SQRT5 * n as f64,
        }
    }

    /// Scale applied to Lebesgue length of the real internal factor.
    pub fn interval_normalization(&self) -> f64 {
        match self.kind {
            SchemeKind::Periodic(_) => 1.0,
            _ => SQRT5,
        }
    }

    /// The star map `L → H`.
    pub fn star(&self, p: QuadInt) -> Result<InternalPoint> {
        match self.kind {
            SchemeKind::Fibonacci => Ok(InternalPoint::Real(Real::Exact(p.conj()))),
            SchemeKind::Periodic(n) => {
                if p.v != 0 {
                    return param(format!(
                        "the periodic scheme has lattice Z; {p} has a tau component"
                    ));
                }
                Ok(InternalPoint::residue(p.u, n))
            }
            SchemeKind::Combined(n) => Ok(InternalPoint::product(Real::Exact(p.conj()), p.u, n)),
        }
    }

    /// Rejects windows that do not live in this scheme's internal space.
    pub fn check_window(&self, w: &Window) -> Result<()> {
        let ok = match (self.kind, w) {
            (SchemeKind::Fibonacci, Window::Intervals(_)) => true,
            (SchemeKind::Periodic(n), Window::Residues(rs)) => rs.modulus() == n,
            (SchemeKind::Combined(n), Window::Product(_, rs)) => rs.modulus() == n,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            param(format!(
                "window of kind `{}` does not fit the {self} scheme",
                w.kind_name()
            ))
        }
    }

    pub fn check_point(&self, p: QuadInt) -> Result<()> {
        self.star(p).map(|_| ())
    }

    /// `θ_H(w)` under this scheme's normalization.
    pub fn measure(&self, w: &Window) -> Result<f64> {
        self.check_window(w)?;
        Ok(match w {
            Window::Intervals(iu) => iu.length().to_f64() / SQRT5,
            Window::Residues(rs) => rs.len() as f64 / rs.modulus() as f64,
            Window::Product(iu, rs) => {
                (iu.length().to_f64() / SQRT5) * (rs.len() as f64 / rs.modulus() as f64)
            }
        })
    }

    /// Parses a window literal, defaulting residue moduli to this scheme's.
    pub fn parse_window(&self, literal: &str) -> Result<Window> {
        let w = parse_window(literal, self.modulus())?;
        self.check_window(&w)?;
        Ok(w)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SchemeKind::Fibonacci => write!(f, "fibonacci"),
            SchemeKind::Periodic(n) => write!(f, "periodic:{n}"),
            SchemeKind::Combined(n) => write!(f, "combined:{n}"),
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    /// `fibonacci`, `periodic:N` or `combined:N`.
    fn from_str(s: &str) -> Result<Scheme> {
        let (name, modulus) = match s.trim().split_once(':') {
            Some((name, n)) => {
                let n = n
                    .trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parameter(format!("bad modulus in scheme `{s}`")))?;
                (name.trim(), Some(n))
            }
            None => (s.trim(), None),
        };
        let family = match name {
            "fibonacci" | "fib" => SchemeFamily::Fibonacci,
            "periodic" => SchemeFamily::Periodic,
            "combined" => SchemeFamily::Combined,
            _ => return param(format!("unknown scheme `{s}`")),
        };
        Scheme::new(family, modulus)
    }
}

/// `w + t`, the window translated by an internal point.
pub fn window_translate(w: &Window, t: &InternalPoint) -> Result<Window> {
    w.translate(t)
}

pub fn window_intersect(w1: &Window, w2: &Window) -> Result<Window> {
    w1.intersect(w2)
}
