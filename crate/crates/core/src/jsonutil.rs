//! Helpers for machine-readable output. All numeric output is rounded to
//! 12 significant digits.

use num_complex::Complex64;
use serde_json::{json, Value};

/// Rounds to 12 significant digits.
pub(crate) fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.11e}", x).parse().unwrap_or(x)
}

pub(crate) fn complex_json(z: Complex64) -> Value {
    json!([sig12(z.re), sig12(z.im)])
}

pub(crate) fn poly_json(p: &crate::poly::ComplexPoly) -> Value {
    Value::Array(p.coeffs().iter().map(|&c| complex_json(c)).collect())
}
