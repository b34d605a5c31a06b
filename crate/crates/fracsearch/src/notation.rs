//! Last-digit uncertainty notation: 0.5647(6) means 0.5647 +/- 0.0006.

/// Formats a value with its uncertainty in last-digit notation. The error is
/// rounded to one significant digit and the value to the matching place.
pub fn format_last_digit(value: f64, err: f64) -> String {
    if !(err > 0.0) || !err.is_finite() || !value.is_finite() {
        return format!("{value}");
    }
    let mut place = err.log10().floor() as i32;
    let mut digit = (err / 10f64.powi(place)).round() as u64;
    if digit >= 10 {
        digit = 1;
        place += 1;
    }
    if place >= 0 {
        let scale = 10f64.powi(place);
        let rounded = (value / scale).round() * scale;
        format!("{:.0}({:.0})", rounded, digit as f64 * scale)
    } else {
        let decimals = (-place) as usize;
        format!("{:.*}({})", decimals, value, digit)
    }
}

/// Parses "0.5647(6)" into (0.5647, 0.0006). Plain numbers parse with zero
/// uncertainty.
pub fn parse_last_digit(text: &str) -> Option<(f64, f64)> {
    let text = text.trim();
    match text.split_once('(') {
        None => text.parse().ok().map(|v| (v, 0.0)),
        Some((value_str, rest)) => {
            let digits = rest.strip_suffix(')')?;
            let value: f64 = value_str.parse().ok()?;
            let err_digits: u64 = digits.parse().ok()?;
            let decimals = value_str
                .split_once('.')
                .map(|(_, frac)| frac.len())
                .unwrap_or(0);
            // the digits occupy the trailing decimal places of the value
            Some((value, err_digits as f64 / 10f64.powi(decimals as i32)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_paper_style_values() {
        assert_eq!(format_last_digit(0.5647, 0.0006), "0.5647(6)");
        assert_eq!(format_last_digit(0.154, 0.002), "0.154(2)");
        assert_eq!(format_last_digit(1.742, 0.008), "1.742(8)");
        assert_eq!(format_last_digit(84.7, 0.9), "84.7(9)");
        assert_eq!(format_last_digit(3.79, 0.04), "3.79(4)");
    }

    #[test]
    fn formats_errors_at_or_above_one() {
        assert_eq!(format_last_digit(123.4, 4.0), "123(4)");
        assert_eq!(format_last_digit(123.4, 40.0), "120(40)");
    }

    #[test]
    fn zero_error_prints_plain() {
        assert_eq!(format_last_digit(0.5, 0.0), "0.5");
    }

    #[test]
    fn rounds_error_to_one_digit() {
        // 0.00097 rounds up to 0.001
        assert_eq!(format_last_digit(0.6417, 0.00097), "0.642(1)");
    }

    #[test]
    fn parses_notation() {
        assert_eq!(parse_last_digit("0.5647(6)"), Some((0.5647, 0.0006)));
        assert_eq!(parse_last_digit("84.7(9)"), Some((84.7, 0.9)));
        assert_eq!(parse_last_digit("1.742"), Some((1.742, 0.0)));
        let (v, e) = parse_last_digit("0.238(12)").unwrap();
        assert_eq!(v, 0.238);
        assert!((e - 0.012).abs() < 1e-12);
        assert_eq!(parse_last_digit("junk"), None);
    }

    #[test]
    fn format_parse_round_trip() {
        let (v, e) = parse_last_digit(&format_last_digit(0.63479, 0.008)).unwrap();
        assert!((v - 0.635).abs() < 1e-12);
        assert!((e - 0.008).abs() < 1e-12);
    }
}
