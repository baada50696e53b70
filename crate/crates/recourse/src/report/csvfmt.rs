//! Deterministic text formatting for the CSV outputs.
//!
//! Floats are printed with Rust's shortest round-trip representation, so
//! re-parsing a CSV reproduces the in-memory values exactly and repeated runs
//! are byte-identical.

use crate::policy::Probability;

/// Shortest representation that parses back to the identical f64.
pub fn fmt_f64(value: f64) -> String {
    debug_assert!(value.is_finite(), "CSV values must be finite");
    // Normalize -0.0 so byte output does not depend on the sign of zero.
    let value = if value == 0.0 { 0.0 } else { value };
    format!("{value}")
}

/// Parse a probability-per-line file. The first column of each line is the
/// value; a leading `probability` header row is allowed; blank lines are
/// skipped. Errors name the offending 1-based row.
pub fn parse_probability_file(text: &str) -> Result<Vec<Probability>, String> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let row = idx + 1;
        let field = line.split(',').next().unwrap_or("").trim();
        if field.is_empty() {
            continue;
        }
        if row == 1 && field.eq_ignore_ascii_case("probability") {
            continue;
        }
        let value: f64 = field
            .parse()
            .map_err(|_| format!("row {row}: {field:?} is not a number"))?;
        let p = Probability::new(value)
            .map_err(|_| format!("row {row}: probability {value} outside [0, 1]"))?;
        out.push(p);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn formats_are_plain() {
        assert_eq!(fmt_f64(0.0), "0");
        assert_eq!(fmt_f64(-0.0), "0");
        assert_eq!(fmt_f64(1.0), "1");
        assert_eq!(fmt_f64(0.5), "0.5");
        assert_eq!(fmt_f64(2.0 / 7.0), "0.2857142857142857");
    }

    #[test]
    fn probability_file_with_header() {
        let parsed = parse_probability_file("probability\n0.25\n0.75\n").unwrap();
        assert_eq!(parsed.len(), 2);
        assert_eq!(parsed[0].value(), 0.25);
    }

    #[test]
    fn probability_file_errors_name_the_row() {
        let err = parse_probability_file("0.5\n1.5\n").unwrap_err();
        assert!(err.contains("row 2"), "{err}");
        let err = parse_probability_file("0.5\nabc\n").unwrap_err();
        assert!(err.contains("row 2"), "{err}");
    }

    #[test]
    fn empty_file_is_empty() {
        assert!(parse_probability_file("").unwrap().is_empty());
        assert!(parse_probability_file("probability\n").unwrap().is_empty());
    }

    proptest! {
        #[test]
        fn formatted_floats_round_trip_exactly(bits in any::<u32>(), scale in -6..6i32) {
            let value = f64::from(bits) * 10f64.powi(scale);
            let back: f64 = fmt_f64(value).parse().unwrap();
            prop_assert_eq!(back, value);
        }
    }
}
