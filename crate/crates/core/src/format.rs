//! Fixed float formatting for reproducible text output.

/// 17 significant digits in scientific notation.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        // Collapse -0 so outputs do not depend on the sign of zero.
        return "0.0000000000000000e0".to_string();
    }
    format!("{v:.16e}")
}
