//! File formats: point-set listings, deck tables, dot-row plots.
//!
//! A point-set file is
//!
//! ```text
//! # <free comment lines>
//! #scheme=fibonacci;window=[-1,(-1+1*tau));region=-2,2
//! -1 0
//! 0 0
//! 0 1
//! ```
//!
//! with one `u v` pair per line (`n` alone for periodic schemes), in
//! increasing physical order. Writing then reading then writing is
//! byte-identical.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pointsets::{PointSet, Region};
use crate::schemes::{QuadInt, Scheme, SchemeKind};
use crate::spectra::DeckGrid;

fn format_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Format(msg.into()))
}

pub fn write_pointset(ps: &PointSet, comment: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(c) = comment {
        for line in c.lines() {
            let _ = writeln!(out, "# {line}");
        }
    }
    let r = ps.region();
    let _ = writeln!(
        out,
        "#scheme={};window={};region={},{}",
        ps.scheme(),
        ps.window(),
        r.lo,
        r.hi
    );
    let periodic = matches!(ps.scheme().kind(), SchemeKind::Periodic(_));
    for p in ps.points() {
        if periodic {
            let _ = writeln!(out, "{}", p.u);
        } else {
            let _ = writeln!(out, "{} {}", p.u, p.v);
        }
    }
    out
}

pub fn read_pointset(text: &str) -> Result<PointSet> {
    let mut header = None;
    let mut points = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if let Some(h) = line.strip_prefix("#scheme=") {
            if header.is_some() {
                return format_err(format!("line {}: second header", lineno + 1));
            }
            header = Some(parse_header(h)?);
            continue;
        }
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((scheme, _, _)) = &header else {
            return format_err(format!("line {}: point before the header", lineno + 1));
        };
        let nums: Vec<i64> = line
            .split_whitespace()
            .map(|t| t.parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Format(format!("line {}: expected integers", lineno + 1)))?;
        let p = match (scheme.kind(), nums.as_slice()) {
            (SchemeKind::Periodic(_), [n]) => QuadInt::new(*n, 0),
            (SchemeKind::Periodic(_), _) => {
                return format_err(format!("line {}: expected one integer", lineno + 1))
            }
            (_, [u, v]) => QuadInt::new(*u, *v),
            _ => return format_err(format!("line {}: expected `u v`", lineno + 1)),
        };
        points.push(p);
    }
    let Some((scheme, window, region)) = header else {
        return format_err("missing `#scheme=…;window=…;region=…` header");
    };
    PointSet::new(scheme, window, region, points)
}

fn parse_header(h: &str) -> Result<(Scheme, crate::schemes::Window, Region)> {
    let mut parts = h.split(';');
    let scheme: Scheme = parts.next().unwrap_or_default().parse()?;
    let window = parts
        .next()
        .and_then(|p| p.strip_prefix("window="))
        .ok_or_else(|| Error::Format("header lacks `window=`".into()))?;
    let window = scheme.parse_window(window)?;
    let region = parts
        .next()
        .and_then(|p| p.strip_prefix("region="))
        .and_then(|p| p.split_once(','))
        .and_then(|(a, b)| Some((a.trim().parse::<f64>().ok()?, b.trim().parse::<f64>().ok()?)))
        .ok_or_else(|| Error::Format("header lacks `region=lo,hi`".into()))?;
    if parts.next().is_some() {
        return format_err("unexpected fields after the region");
    }
    Ok((scheme, window, Region::new(region.0, region.1)?))
}

/// JSON deck tables: `{"M": .., "L_half": .., "I1": [..], "I2": [[..], ..]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeckFile {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "L_half")]
    pub l_half: f64,
    #[serde(rename = "I1")]
    pub i1: Vec<f64>,
    #[serde(rename = "I2")]
    pub i2: Vec<Vec<f64>>,
}

impl DeckFile {
    pub fn from_deck(deck: &DeckGrid) -> DeckFile {
        DeckFile {
            m: deck.m(),
            l_half: deck.l_half(),
            i1: deck.i1().to_vec(),
            i2: deck.i2().chunks(deck.m()).map(|r| r.to_vec()).collect(),
        }
    }

    pub fn into_deck(self, allow_large: bool) -> Result<DeckGrid> {
        if self.i2.iter().any(|r| r.len() != self.m) {
            return format_err(format!("every I2 row must have {} entries", self.m));
        }
        let i2 = self.i2.into_iter().flatten().collect();
        DeckGrid::from_tables(self.m, self.l_half, self.i1, i2, allow_large)
    }
}

pub fn write_deck(deck: &DeckGrid) -> String {
    serde_json::to_string(&DeckFile::from_deck(deck)).expect("deck serializes") + "\n"
}

pub fn read_deck(text: &str, allow_large: bool) -> Result<DeckGrid> {
    let file: DeckFile =
        serde_json::from_str(text).map_err(|e| Error::Format(format!("deck file: {e}")))?;
    file.into_deck(allow_large)
}

/// Rows of dots, one row per labelled point set, on a shared axis.
pub fn dot_rows_svg(rows: &[(String, &PointSet)], lo: f64, hi: f64) -> String {
    let (w, margin_l, margin_r, row_h) = (900.0, 170.0, 20.0, 40.0);
    let h = row_h * (rows.len() as f64 + 1.0);
    let x_of = |x: f64| margin_l + (x - lo) / (hi - lo) * (w - margin_l - margin_r);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if lo <= 0.0 && 0.0 <= hi {
        let x0 = x_of(0.0);
        let _ = writeln!(
            s,
            r#"<line x1="{x0:.2}" y1="{:.1}" x2="{x0:.2}" y2="{:.1}" stroke="black" stroke-width="1.5"/>"#,
            row_h * 0.5,
            h - row_h * 0.5
        );
    }
    for (i, (label, ps)) in rows.iter().enumerate() {
        let y = row_h * (i as f64 + 1.0);
        let _ = writeln!(
            s,
            r#"<text x="8" y="{:.1}" font-family="sans-serif" font-size="13">{}</text>"#,
            y + 4.0,
            crate::spectra::xml_escape(label)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{margin_l}" y1="{y}" x2="{}" y2="{y}" stroke="lightgray"/>"#,
            w - margin_r
        );
        for p in ps.points() {
            let x = p.physical();
            if (lo..=hi).contains(&x) {
                let _ = writeln!(
                    s,
                    r#"<circle cx="{:.2}" cy="{y}" r="3.5" fill="black"/>"#,
                    x_of(x)
                );
            }
        }
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointsets::generate;
    use crate::spectra::{deck_functions, sample_indicator};

    #[test]
    fn pointset_round_trip() {
        for (scheme, lit, lo, hi) in [
            ("fibonacci", "[-1,1/tau)", -20.0, 20.5),
            ("periodic:32", "{A}", 0.0, 31.0),
            ("combined:32", "fib x {B}", -7.25, 30.0),
            ("fibonacci", "empty", -1.0, 1.0),
        ] {
            let s: Scheme = scheme.parse().unwrap();
            let w = s.parse_window(lit).unwrap();
            let ps = generate(&s, &w, Region::new(lo, hi).unwrap()).unwrap();
            let text = write_pointset(&ps, Some("test"));
            let back = read_pointset(&text).unwrap();
            assert_eq!(back, ps);
            assert_eq!(write_pointset(&back, Some("test")), text);
        }
    }

    #[test]
    fn fig2_fragment_file() {
        let s = Scheme::fibonacci();
        let ps = generate(
            &s,
            &s.parse_window("fib").unwrap(),
            Region::new(-2.0, 2.0).unwrap(),
        )
        .unwrap();
        assert_eq!(
            write_pointset(&ps, None),
            "#scheme=fibonacci;window=[-1,(-1+1*tau));region=-2,2\n-1 0\n0 0\n0 1\n"
        );
    }

    #[test]
    fn rejects_bad_files() {
        assert!(read_pointset("1 2\n").is_err());
        assert!(read_pointset("#scheme=fibonacci;window=fib;region=-2,2\n3 0\n").is_err());
        assert!(read_pointset("#scheme=fibonacci;window=fib;region=-2,2\nx\n").is_err());
        assert!(read_pointset("#scheme=periodic:32;window={A};region=0,31\n7 1\n").is_err());
    }

    #[test]
    fn deck_round_trip() {
        let f = sample_indicator(
            &crate::schemes::IntervalUnion::single(0.0, 1.0).unwrap(),
            32,
            4.0,
        );
        let d = deck_functions(&f, 32, 4.0).unwrap();
        let e = read_deck(&write_deck(&d), false).unwrap();
        assert_eq!(d.i1(), e.i1());
        assert_eq!(d.i2(), e.i2());
        assert!(read_deck("{}", false).is_err());
    }
}
