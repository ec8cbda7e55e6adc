//! Text formatting shared by CSV emitters.

/// Formats a float with 17 significant digits so that parsing the text
/// recovers the exact bit pattern.
pub fn f64_csv(x: f64) -> String {
    format!("{x:.16e}")
}
