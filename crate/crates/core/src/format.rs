//! Stable number formatting for CSV and terminal output.

/// Ten significant digits; scientific notation below `1e-4`. Zero renders
/// as `0`.
pub fn probability(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    if x.abs() < 1e-4 {
        return format!("{x:.9e}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (9 - magnitude).max(0) as usize;
    let fixed = format!("{x:.decimals$}");
    // Rounding can carry into a new leading digit (0.09999999999 -> 0.1000000000).
    let significant = fixed
        .chars()
        .filter(|c| c.is_ascii_digit())
        .skip_while(|&c| c == '0')
        .count();
    if significant > 10 && decimals > 0 {
        format!("{x:.prec$}", prec = decimals - 1)
    } else {
        fixed
    }
}
