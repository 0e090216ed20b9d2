//! CSV number formatting: 17 significant digits, '.' separator.

/// Positional for moderate exponents, scientific otherwise.
pub fn number(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{x:.16e}");
    let exponent: i32 = sci.rsplit_once('e').and_then(|(_, e)| e.parse().ok()).unwrap_or(0);
    if (-20..=20).contains(&exponent) {
        format!("{:.*}", (16 - exponent).max(0) as usize, x)
    } else {
        sci
    }
}

pub fn row(fields: &[String]) -> String {
    let mut line = fields.join(",");
    line.push('\n');
    line
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_seventeen_digits() {
        assert_eq!(number(0.1), "0.10000000000000001");
        assert_eq!(number(1.0), "1.0000000000000000");
        assert_eq!(number(-2.5e-3), "-0.0025000000000000001");
        assert_eq!(number(123.0), "123.00000000000000");
        assert!(number(1e-30).ends_with("e-30"));
        assert_eq!(number(0.0), "0");
    }

    #[test]
    fn round_trips() {
        for x in [std::f64::consts::PI, 1.0 / 3.0, -7.25e-19, 6.02e23, 0.999_999_999_999_999_9] {
            assert_eq!(number(x).parse::<f64>().unwrap(), x);
        }
    }
}
