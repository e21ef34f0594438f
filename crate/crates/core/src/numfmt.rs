//! Locale-independent fixed-significant-digit formatting shared by the term
//! renderer and the CSV exporter.

/// Format `v` with `sig` significant digits in plain decimal notation.
///
/// Zero is printed as if its leading digit sat in the ones place
/// (`0.00000000` for `sig = 9`). Trailing zeros are kept.
pub(crate) fn format_significant(v: f64, sig: u32) -> String {
    if v == 0.0 {
        return format!("{:.*}", sig as usize - 1, 0.0);
    }
    let a = v.abs();
    let mut mag = a.log10().floor() as i32;
    // log10 rounding can misplace the leading digit near powers of ten
    if a >= 10f64.powi(mag + 1) {
        mag += 1;
    } else if a < 10f64.powi(mag) {
        mag -= 1;
    }
    let decimals = (sig as i32 - 1 - mag).max(0) as usize;
    format!("{:.*}", decimals, v)
}

/// Format with `sig` significant digits, then strip trailing zeros and any
/// dangling decimal point (`-1.00000000000` becomes `-1`).
pub(crate) fn format_significant_trimmed(v: f64, sig: u32) -> String {
    let s = format_significant(v, sig);
    if !s.contains('.') {
        return s;
    }
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}
