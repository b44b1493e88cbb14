//! Limit profiles 𝒫_m, 𝒬_m of Chebyshev linearization coefficients.

use crate::error::{Error, Result};
use crate::scalar::Field;

fn binomial<T: Field>(n: u32, k: u32) -> T {
    let mut r = T::one();
    for i in 0..k {
        r = r * T::int((n - i) as i64) / T::int((i + 1) as i64);
    }
    r
}

fn positive_power<T: Field>(x: T, p: u32) -> T {
    if x > T::zero() {
        let mut r = T::one();
        for _ in 0..p {
            r = r * x.clone();
        }
        r
    } else {
        T::zero()
    }
}

/// (𝒫_m(ξ), 𝒬_m(ξ)) with 𝒬_m = ξ 𝒫_m, evaluated exactly in `T`.
pub fn limit_coeff<T: Field>(m: u32, xi: T) -> Result<(T, T)> {
    if m < 2 {
        return Err(Error::invalid(format!("limit profile order m = {m} must be ≥ 2")));
    }
    if xi < T::zero() {
        return Err(Error::invalid("ξ must be nonnegative"));
    }
    let mut sum = T::zero();
    for j in 0..=m {
        let arg = T::int(m as i64 - 2 * j as i64) - xi.clone();
        let term = binomial::<T>(m, j) * positive_power(arg, m - 2);
        sum = if j % 2 == 0 { sum + term } else { sum - term };
    }
    let mut norm = T::one();
    for _ in 0..m - 1 {
        norm = norm * T::int(2);
    }
    for i in 2..=(m as i64 - 2) {
        norm = norm * T::int(i);
    }
    let p = sum / norm;
    let q = xi * p.clone();
    Ok((p, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use num_traits::{One, ToPrimitive, Zero};

    fn r(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    #[test]
    fn order_two_is_half() {
        let (p, q) = limit_coeff(2, r(1, 1)).unwrap();
        assert_eq!(p, r(1, 2));
        assert_eq!(q, r(1, 2));
        let (p, _) = limit_coeff(2, 0.37f64).unwrap();
        assert_eq!(p, 0.5);
    }

    #[test]
    fn vanishes_beyond_m() {
        for m in [2u32, 4, 8, 10] {
            let (p, q) = limit_coeff(m, Rational::from_integer((m as i64).into())).unwrap();
            assert!(p.is_zero() && q.is_zero());
            let (_, q) = limit_coeff(m, r(3 * m as i64, 2)).unwrap();
            assert!(q.is_zero());
        }
    }

    #[test]
    fn q_integrates_to_one() {
        // ∫_0^m 𝒬_m(ξ) dξ = 1, checked by a fine midpoint rule
        for m in [4u32, 8, 10] {
            let n = 20000;
            let h = m as f64 / n as f64;
            let s: f64 = (0..n).map(|i| limit_coeff(m, (i as f64 + 0.5) * h).unwrap().1 * h).sum();
            assert!((s - 1.0).abs() < 1e-6, "m={m}: {s}");
        }
        let one = Rational::one();
        assert!(limit_coeff(4, one).unwrap().0.to_f64().unwrap() > 0.0);
    }
}
