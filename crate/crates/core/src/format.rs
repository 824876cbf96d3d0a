//! Deterministic number formatting for tables.

/// Decimal with 15 significant digits, trailing zeros trimmed.
pub fn sig15(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let s = format!("{:.14e}", x);
    let (mantissa, exp) = s.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if (-5..15).contains(&exp) {
        let decimals = (14 - exp).max(0) as usize;
        trim(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim(mantissa.to_string()), exp)
    }
}

fn trim(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats() {
        assert_eq!(sig15(0.0), "0");
        assert_eq!(sig15(0.25), "0.25");
        assert_eq!(sig15(1.0 / 5f64.sqrt()), "0.447213595499958");
        assert_eq!(sig15(-2.0), "-2");
        assert_eq!(sig15(1.5e-20), "1.5e-20");
        assert_eq!(sig15(123456.0), "123456");
    }

    #[test]
    fn round_trips_to_15_digits() {
        for x in [std::f64::consts::PI, 1e-7 / 3.0, 12345.678901234567] {
            let y: f64 = sig15(x).parse().unwrap();
            assert!(((x - y) / x).abs() < 1e-14);
        }
    }
}
