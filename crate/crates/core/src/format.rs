/// Shortest decimal string that parses back to exactly `v`.
///
/// Plain positional notation for moderate magnitudes, exponent notation
/// outside `[1e-5, 1e16)`. Locale independent.
pub fn fmt_real(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}
