//! Number formatting shared by every command.

/// Scores, masses, areas and ratios: six decimal places.
pub fn fixed6(x: f64) -> String {
    format!("{x:.6}")
}

/// Coefficients and slopes: nine significant digits, positional notation.
pub fn sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let scientific = format!("{x:.8e}");
    let exponent: i32 = scientific
        .split_once('e')
        .and_then(|(_, e)| e.parse().ok())
        .expect("scientific notation has an exponent");
    let decimals = (8 - exponent).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn optional_ratio(x: Option<f64>) -> String {
    x.map_or_else(|| "undefined".to_string(), fixed6)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(sig9(1.0 / (3.0 * std::f64::consts::PI)), "0.106103295");
        assert_eq!(sig9(1.0 / (3.0 * std::f64::consts::PI * 61.0)), "0.00173939829");
        assert_eq!(sig9(-(0.1f64.ln()) / 2000.0), "0.00115129255");
        assert_eq!(sig9(123456.0), "123456.000");
        assert_eq!(sig9(9.9999999999e-3), "0.0100000000");
        assert_eq!(sig9(1.5e12), "1500000000000");
        assert_eq!(sig9(0.0), "0");
    }

    #[test]
    fn six_decimals() {
        assert_eq!(fixed6(0.9), "0.900000");
        assert_eq!(optional_ratio(None), "undefined");
        assert_eq!(optional_ratio(Some(1.0)), "1.000000");
    }
}
