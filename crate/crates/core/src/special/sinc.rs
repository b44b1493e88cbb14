//! The sinc-type test functions (sin(t√(−x))/(t√(−x)))^m.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Orders used by the sinc transform; other even orders are accepted but flagged.
pub const STANDARD_SINC_ORDERS: [u32; 3] = [4, 8, 10];

pub fn is_standard_sinc_order(m: u32) -> bool {
    STANDARD_SINC_ORDERS.contains(&m)
}

/// sin(√(−u))/√(−u), continued analytically to sinh(√u)/√u for u > 0.
pub fn sinc_sqrt<T: Real>(u: T) -> T {
    if u.abs() < T::of(0.5) {
        // Σ u^k / (2k+1)!
        let mut term = T::one();
        let mut sum = T::one();
        for k in 1..30 {
            term = term * u / T::of(((2 * k) * (2 * k + 1)) as f64);
            sum = sum + term;
            if term.abs() <= T::epsilon() * sum.abs() * T::of(0.01) {
                break;
            }
        }
        sum
    } else if u < T::zero() {
        let y = (-u).sqrt();
        y.sin() / y
    } else {
        let y = u.sqrt();
        y.sinh() / y
    }
}

/// (sin(t√(−x))/(t√(−x)))^m for even m ≥ 4.
pub fn sinc_test_function<T: Real>(m: u32, t: T, x: T) -> Result<T> {
    if m < 4 || m % 2 == 1 {
        return Err(Error::invalid(format!("sinc order m = {m} must be even and ≥ 4")));
    }
    if !(t > T::zero()) {
        return Err(Error::invalid("sinc scale t must be positive"));
    }
    Ok(sinc_sqrt(t * t * x).powi(m as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn examples() {
        assert_eq!(sinc_test_function::<f64>(4, 1.0, 0.0).unwrap(), 1.0);
        assert!(sinc_test_function::<f64>(4, 1.0, -PI * PI).unwrap().abs() < 1e-30);
        assert_relative_eq!(
            sinc_test_function::<f64>(4, 1.0, 1.0).unwrap(),
            1.0f64.sinh().powi(4),
            max_relative = 1e-14
        );
        assert!((sinc_test_function::<f64>(4, 1.0, 1.0).unwrap() - 1.9074).abs() < 1e-4);
        assert!(sinc_test_function::<f64>(3, 1.0, 1.0).is_err());
        assert!(sinc_test_function::<f64>(6, 1.0, 1.0).is_ok());
        assert!(!is_standard_sinc_order(6));
    }

    #[test]
    fn continuous_at_zero() {
        // slope at 0 is m t²/6
        let slope = 8.0 * 1.69 / 6.0;
        let l = sinc_test_function::<f64>(8, 1.3, -1e-8).unwrap();
        let r = sinc_test_function::<f64>(8, 1.3, 1e-8).unwrap();
        assert!((r - l - 2e-8 * slope).abs() < 1e-14);
        // series and closed form agree at the switch point
        let u = 0.5f64;
        let closed = u.sqrt().sinh() / u.sqrt();
        assert_relative_eq!(sinc_sqrt(0.499_999_999f64), closed, max_relative = 1e-9);
        let neg = (0.5f64).sqrt().sin() / 0.5f64.sqrt();
        assert_relative_eq!(sinc_sqrt(-0.499_999_999f64), neg, max_relative = 1e-9);
    }

    #[test]
    fn single_precision() {
        let v: f32 = sinc_test_function(4, 1.0f32, 1.0f32).unwrap();
        assert!((v - 1.9074).abs() < 1e-3);
    }
}
