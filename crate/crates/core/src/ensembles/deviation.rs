//! Deviation bounds P(λ_max ≥ 2 + t) ≤ C n N b_n e^{C n² b_n − c n √t}.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationCurve {
    pub t: Vec<f64>,
    pub bound: Vec<f64>,
    /// Stretched exponent of y at the band scale that the bound proves.
    pub proved_exponent: f64,
    /// Exponent believed to be optimal.
    pub conjectured_exponent: f64,
}

/// (3α−1)/(4α−2) and (3α−1)/(2α).
pub fn deviation_exponents(alpha: f64) -> (f64, f64) {
    ((3.0 * alpha - 1.0) / (4.0 * alpha - 2.0), (3.0 * alpha - 1.0) / (2.0 * alpha))
}

/// t = W^{−2α/(3α−1)} y.
pub fn band_scale(width: f64, alpha: f64) -> f64 {
    width.powf(-2.0 * alpha / (3.0 * alpha - 1.0))
}

pub fn deviation_bound(n: usize, size: usize, b_n: f64, t: f64, c_big: f64, c_small: f64) -> f64 {
    let nf = n as f64;
    c_big * nf * size as f64 * b_n * (c_big * nf * nf * b_n - c_small * nf * t.sqrt()).exp()
}

pub fn deviation_bound_curve(
    n: usize,
    size: usize,
    b_n: f64,
    t: &[f64],
    c_big: f64,
    c_small: f64,
    alpha: f64,
) -> Result<DeviationCurve> {
    if t.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::invalid("deviation grid must be positive"));
    }
    if n == 0 || !(b_n > 0.0) {
        return Err(Error::invalid("need n ≥ 1 and b_n > 0"));
    }
    let (proved_exponent, conjectured_exponent) = deviation_exponents(alpha);
    Ok(DeviationCurve {
        t: t.to_vec(),
        bound: t.iter().map(|&v| deviation_bound(n, size, b_n, v, c_big, c_small)).collect(),
        proved_exponent,
        conjectured_exponent,
    })
}

/// Pointwise infimum over the step count of the bound, given b_1..b_n.
pub fn optimized_bound(b: &[f64], size: usize, t: f64, c_big: f64, c_small: f64) -> f64 {
    b.iter()
        .enumerate()
        .map(|(i, &bn)| deviation_bound(i + 1, size, bn, t, c_big, c_small))
        .fold(f64::INFINITY, f64::min)
}
