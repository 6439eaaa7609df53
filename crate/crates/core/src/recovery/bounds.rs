//! Closed-form error bounds for the finite-difference estimators.

/// `‖â − a‖₁ ≤ 2c₁h / (g'(0) − c₁h)` for the cube algorithm; `None` when the
/// denominator is not positive.
pub fn ridge_direction_bound(h: f64, c1: f64, slope: f64) -> Option<f64> {
    let den = slope - c1 * h;
    (den > 0.0).then(|| 2.0 * c1 * h / den)
}

/// Sharper version carrying the factor `‖a‖₂²`, which is much smaller than
/// one for spread-out directions.
pub fn ridge_direction_bound_sharp(h: f64, c1: f64, slope: f64, a_l2_sq: f64) -> Option<f64> {
    let den = slope - c1 * h * a_l2_sq;
    (den > 0.0).then(|| 2.0 * c1 * h * a_l2_sq / den)
}

/// `‖f − f̂‖∞ ≤ 2c₀‖â − a‖` for ridge models.
pub fn ridge_sup_bound(c0: f64, direction_error: f64) -> f64 {
    2.0 * c0 * direction_error
}

/// Half-width `h + h²/4` of the window around `t = 1` touched by the
/// symmetric radial differences.
pub fn radial_local_window(h: f64) -> f64 {
    h + h * h / 4.0
}

/// `‖â − a‖₂ ≤ 2c₁δ / (g'(1) − c₁δ)` with `δ = h + h²/4`.
pub fn radial_direction_bound(h: f64, c1: f64, slope: f64) -> Option<f64> {
    let delta = radial_local_window(h);
    let den = slope - c1 * delta;
    (den > 0.0).then(|| 2.0 * c1 * delta / den)
}

/// `‖f − f̂‖∞ ≤ c₀(2ε + ε²)` for radial models with direction error `ε`.
pub fn radial_sup_bound(c0: f64, eps: f64) -> f64 {
    c0 * (2.0 * eps + eps * eps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_vanish_without_curvature() {
        assert_eq!(ridge_direction_bound(0.3, 0.0, 1.0), Some(0.0));
        assert_eq!(radial_direction_bound(0.3, 0.0, 1.0), Some(0.0));
    }

    #[test]
    fn bounds_require_positive_denominator() {
        assert_eq!(ridge_direction_bound(1.0, 2.0, 1.0), None);
        assert!(radial_direction_bound(0.01, 2.0, 1.0).unwrap() > 0.0);
    }

    #[test]
    fn sharp_bound_is_tighter() {
        let a = ridge_direction_bound(0.1, 0.77, 1.0).unwrap();
        let b = ridge_direction_bound_sharp(0.1, 0.77, 1.0, 0.02).unwrap();
        assert!(b < a);
    }

    #[test]
    fn radial_window() {
        assert!((radial_local_window(0.2) - 0.21).abs() < 1e-15);
        assert!((radial_sup_bound(1.0, 0.1) - 0.21).abs() < 1e-15);
    }
}
