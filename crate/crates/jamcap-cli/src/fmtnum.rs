//! Number formatting for every file and console the workbench emits:
//! six significant digits, trailing zeros trimmed, scientific notation only
//! when fixed-point would misrepresent the magnitude.  Formatting is pure
//! string work, so identical inputs always render identically — the
//! determinism contracts on CSV and SVG output reduce to this function.

/// Render with six significant digits.
pub fn g6(x: f64) -> String {
    format_sig(x, 6)
}

/// Render with `sig` significant digits, trimming trailing zeros; switches
/// to scientific notation below 1e-4 or at 10^sig and above.
pub fn format_sig(x: f64, sig: usize) -> String {
    debug_assert!(sig >= 1);
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if exp < -4 || exp >= sig as i32 {
        let s = format!("{:.*e}", sig - 1, x);
        let (mantissa, exponent) = s.split_once('e').expect("exponential format");
        format!("{}e{exponent}", trim_fraction(mantissa))
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
