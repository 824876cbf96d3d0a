//! Window literal grammar.
//!
//! ```text
//! window    := intervals [ 'x' residues ] | residues
//! intervals := 'empty' | 'fib' | interval { ('u' | '∪') interval }
//! interval  := '[' expr ',' expr ')'
//! residues  := '{' ( 'A' | 'B' | int { ',' int } ) '}' [ '@' int ]
//! expr      := term { ('+' | '-') term }
//! term      := unary { ('*' | '/') unary }
//! unary     := '-' unary | primary
//! primary   := decimal | 'tau' | 'sqrt5' | '(' expr ')'
//! ```
//!
//! Every numeric expression is evaluated exactly in `Q(τ)`. `fib` is the
//! Fibonacci window `[-1,1/tau)`; `{A}` and `{B}` are the two homometric
//! residue sets mod 32 (see [`crate::homometry::cyclotomic_pair`]).

use super::quad::{QuadNum, Real};
use super::window::{Interval, IntervalUnion, ResidueSet, Window};
use crate::error::{Error, Result};
use crate::homometry::{SET_A, SET_B};

pub fn parse_window(literal: &str, default_modulus: Option<u32>) -> Result<Window> {
    let mut p = Parser {
        src: literal,
        pos: 0,
        default_modulus,
    };
    let w = p.window()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("trailing characters"));
    }
    Ok(w)
}

/// Parses a single exact number such as `1/tau` or `-0.382`.
pub fn parse_real(literal: &str) -> Result<Real> {
    let mut p = Parser {
        src: literal,
        pos: 0,
        default_modulus: None,
    };
    let q = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("trailing characters"));
    }
    Ok(Real::Exact(q))
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    default_modulus: Option<u32>,
}

impl<'a> Parser<'a> {
    fn err(&self, reason: &str) -> Error {
        Error::Literal {
            literal: self.src.to_string(),
            reason: format!("{reason} at offset {}", self.pos),
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{token}`")))
        }
    }

    fn window(&mut self) -> Result<Window> {
        if self.peek() == Some('{') {
            return Ok(Window::Residues(self.residues()?));
        }
        let iu = self.intervals()?;
        if self.eat("x") || self.eat("×") {
            let rs = self.residues()?;
            return Ok(Window::Product(iu, rs));
        }
        Ok(Window::Intervals(iu))
    }

    fn intervals(&mut self) -> Result<IntervalUnion> {
        if self.eat("empty") || self.eat("∅") {
            return Ok(IntervalUnion::empty());
        }
        if self.eat("fib") {
            let inv_tau = QuadNum::new(-1, 1, 1).expect("1/tau");
            return IntervalUnion::single(QuadNum::integer(-1), inv_tau);
        }
        let mut pieces = vec![self.interval()?];
        while self.eat("u") || self.eat("U") || self.eat("∪") {
            pieces.push(self.interval()?);
        }
        Ok(IntervalUnion::new(pieces))
    }

    fn interval(&mut self) -> Result<Interval> {
        self.expect("[")?;
        let lo = self.expr()?;
        self.expect(",")?;
        let hi = self.expr()?;
        self.expect(")")?;
        Interval::new(lo, hi).map_err(|e| self.err(&e.to_string()))
    }

    fn residues(&mut self) -> Result<ResidueSet> {
        self.expect("{")?;
        let mut alias_modulus = None;
        let elems: Vec<i64> = if self.eat("A") {
            alias_modulus = Some(32);
            SET_A.iter().map(|&e| e as i64).collect()
        } else if self.eat("B") {
            alias_modulus = Some(32);
            SET_B.iter().map(|&e| e as i64).collect()
        } else {
            let mut v = vec![self.integer()?];
            while self.eat(",") {
                v.push(self.integer()?);
            }
            v
        };
        self.expect("}")?;
        let modulus = if self.eat("@") {
            let n = self.integer()?;
            if n < 1 || n > u32::MAX as i64 {
                return Err(self.err("modulus out of range"));
            }
            n as u32
        } else {
            alias_modulus
                .or(self.default_modulus)
                .ok_or_else(|| self.err("residue set needs a modulus `@N`"))?
        };
        if let Some(m) = alias_modulus {
            if m != modulus {
                return Err(self.err("aliases A and B are residue sets mod 32"));
            }
        }
        ResidueSet::new(modulus, elems).map_err(|e| self.err(&e.to_string()))
    }

    fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let rest = self.rest();
        let len = rest
            .char_indices()
            .take_while(|&(i, c)| c.is_ascii_digit() || (i == 0 && c == '-'))
            .count();
        let n = rest[..len]
            .parse::<i64>()
            .map_err(|_| self.err("expected an integer"))?;
        self.pos += len;
        Ok(n)
    }

    fn expr(&mut self) -> Result<QuadNum> {
        let mut acc = self.term()?;
        loop {
            if self.eat("+") {
                let t = self.term()?;
                acc = acc.checked_add(t).ok_or_else(|| self.err("overflow"))?;
            } else if self.eat("-") {
                let t = self.term()?;
                acc = acc.checked_sub(t).ok_or_else(|| self.err("overflow"))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<QuadNum> {
        let mut acc = self.unary()?;
        loop {
            if self.eat("*") {
                let t = self.unary()?;
                acc = acc.checked_mul(t).ok_or_else(|| self.err("overflow"))?;
            } else if self.eat("/") {
                let t = self.unary()?;
                acc = acc
                    .checked_div(t)
                    .ok_or_else(|| self.err("division by zero or overflow"))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<QuadNum> {
        if self.eat("-") {
            return Ok(-self.unary()?);
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<QuadNum> {
        if self.eat("(") {
            let e = self.expr()?;
            self.expect(")")?;
            return Ok(e);
        }
        if self.eat("tau") || self.eat("τ") {
            return Ok(QuadNum::TAU);
        }
        if self.eat("sqrt5") {
            // √5 = 2τ - 1
            return Ok(QuadNum::new(-1, 2, 1).expect("sqrt5"));
        }
        self.decimal()
    }

    fn decimal(&mut self) -> Result<QuadNum> {
        self.skip_ws();
        let rest = self.rest();
        let len = rest
            .chars()
            .take_while(|c| c.is_ascii_digit() || *c == '.')
            .count();
        let text = &rest[..len];
        if text.is_empty() || text.matches('.').count() > 1 || text == "." {
            return Err(self.err("expected a number, `tau` or `(`"));
        }
        let (int_part, frac_part) = text.split_once('.').unwrap_or((text, ""));
        let digits = format!("{int_part}{frac_part}");
        let num: i128 = digits.parse().map_err(|_| self.err("number too long"))?;
        let den = 10i128
            .checked_pow(frac_part.len() as u32)
            .ok_or_else(|| self.err("number too long"))?;
        self.pos += len;
        QuadNum::new(num, 0, den).ok_or_else(|| self.err("number too long"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::quad::TAU;

    #[test]
    fn parses_fig2_window() {
        let w = parse_window("[-1,1/tau)", None).unwrap();
        assert_eq!(w, parse_window("fib", None).unwrap());
        let Window::Intervals(iu) = w else { panic!() };
        assert!((iu.length().to_f64() - TAU).abs() < 1e-15);
    }

    #[test]
    fn parses_union_and_decimals() {
        let w = parse_window("[0,1)u[1.5,2.25)", None).unwrap();
        let Window::Intervals(iu) = w else { panic!() };
        assert_eq!(iu.intervals().len(), 2);
        assert_eq!(iu.length(), Real::Exact(QuadNum::ratio(7, 4).unwrap()));
    }

    #[test]
    fn parses_residues_and_products() {
        let w = parse_window("{0,7,8}@32", None).unwrap();
        assert_eq!(w.to_string(), "{0,7,8}@32");
        let a = parse_window("{A}", None).unwrap();
        let Window::Residues(rs) = a else { panic!() };
        assert_eq!(rs.len(), 16);
        let p = parse_window("fib x {B}", None).unwrap();
        assert!(matches!(p, Window::Product(..)));
        let d = parse_window("{1,2}", Some(5)).unwrap();
        assert_eq!(d.to_string(), "{1,2}@5");
    }

    #[test]
    fn rejects_malformed() {
        for bad in [
            "[0,1", "[1,0)", "{1,2}", "[0,1)u", "(0,1)", "{A}@31", "[0,1/0)", "{}@4",
        ] {
            assert!(parse_window(bad, None).is_err(), "{bad}");
        }
    }

    #[test]
    fn display_round_trips() {
        for lit in [
            "[-1,1/tau)",
            "[0,1)u[1.5,2.25)",
            "[-0.382,2*tau-2)x{A}",
            "empty",
            "{3,1}@7",
        ] {
            let w = parse_window(lit, None).unwrap();
            let again = parse_window(&w.to_string(), None).unwrap();
            assert_eq!(w, again, "{lit} -> {w}");
        }
    }

    #[test]
    fn expression_arithmetic() {
        let x = parse_real("sqrt5*sqrt5").unwrap();
        assert_eq!(x, Real::Exact(QuadNum::integer(5)));
        let y = parse_real("(1+sqrt5)/2 - tau").unwrap();
        assert_eq!(y, Real::ZERO);
    }
}
