//! Fixed number formatting for result files.

/// Rounds to six significant digits and prints the shortest decimal that
/// reads back as the rounded value.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{v:.5e}").parse().expect("formatted float parses");
    let s = format!("{rounded}");
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "nan".into(), fmt_f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_digits() {
        assert_eq!(fmt_f64(0.123456789), "0.123457");
        assert_eq!(fmt_f64(1.0), "1");
        assert_eq!(fmt_f64(2.0 / 3.0), "0.666667");
        assert_eq!(fmt_f64(1234567.0), "1234570");
        assert_eq!(fmt_f64(-0.0), "0");
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
        assert_eq!(fmt_opt(None), "nan");
        assert_eq!(fmt_f64(0.0146484375), "0.0146484");
    }
}
