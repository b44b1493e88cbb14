//! Modified Bessel functions and the periodic Skellam kernel.

use crate::error::{Error, Result};

/// I_ν(x) by the ascending series, for integer ν ≥ 0 and x ≥ 0.
pub fn bessel_i(nu: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0 { 1.0 } else { 0.0 };
    }
    let half = 0.5 * x;
    // first term (x/2)^ν / ν!
    let mut term = (nu as f64 * half.ln() - super::gamma::ln_gamma(nu as f64 + 1.0)).exp();
    if term == 0.0 {
        return 0.0;
    }
    let q = half * half;
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * (k + nu as f64));
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

/// e^{-x} I_ν(x), the one-dimensional Skellam weight.
fn skellam_1d(nu: u64, x: f64) -> f64 {
    if nu > u32::MAX as u64 {
        return 0.0;
    }
    let nu = nu as u32;
    if x == 0.0 {
        return if nu == 0 { 1.0 } else { 0.0 };
    }
    let half = 0.5 * x;
    let lead = nu as f64 * half.ln() - super::gamma::ln_gamma(nu as f64 + 1.0) - x;
    if lead < -745.0 {
        return 0.0;
    }
    let q = half * half;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * (k + nu as f64));
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    lead.exp() * sum
}

/// Torus side for the Skellam kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Finite(u64),
    Infinite,
}

/// Periodic Skellam transition probability Π_j Σ_n e^{-2τ/d} I_{|k_j + n D|}(2τ/d).
pub fn skellam_kernel(d: usize, side: Side, k: &[i64], tau: f64) -> Result<f64> {
    if d == 0 || k.len() != d {
        return Err(Error::invalid("displacement length must equal the dimension d ≥ 1"));
    }
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::invalid(format!("τ = {tau} must be nonnegative")));
    }
    let x = 2.0 * tau / d as f64;
    let mut prod = 1.0;
    for &kj in k {
        let v = match side {
            Side::Infinite => skellam_1d(kj.unsigned_abs(), x),
            Side::Finite(dside) => {
                if dside < 2 {
                    return Err(Error::invalid("torus side must be ≥ 2"));
                }
                let dside = dside as i64;
                let r = kj.rem_euclid(dside);
                let mut s = skellam_1d(r as u64, x);
                let mut n = 1i64;
                loop {
                    let a = skellam_1d((r + n * dside).unsigned_abs(), x);
                    let b = skellam_1d((r - n * dside).unsigned_abs(), x);
                    s += a + b;
                    if a + b <= 1e-15 * s {
                        break;
                    }
                    n += 1;
                }
                s
            }
        };
        prod *= v;
    }
    Ok(prod)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn bessel_values() {
        assert_relative_eq!(bessel_i(0, 1.0), 1.266_065_877_752_008_4, max_relative = 1e-14);
        assert_relative_eq!(bessel_i(2, 2.0), 0.688_948_447_698_738_2, max_relative = 1e-14);
        // I_{ν-1}(x) − I_{ν+1}(x) = (2ν/x) I_ν(x)
        let x = 20.0;
        let lhs = bessel_i(4, x) - bessel_i(6, x);
        assert_relative_eq!(lhs, 0.5 * bessel_i(5, x), max_relative = 1e-13);
    }

    #[test]
    fn skellam_examples() {
        assert_eq!(skellam_kernel(1, Side::Finite(5), &[0], 0.0).unwrap(), 1.0);
        let v = skellam_kernel(1, Side::Finite(101), &[2], 1.0).unwrap();
        assert_relative_eq!(v, (-2.0f64).exp() * 0.688_948_447_698_738_2, max_relative = 1e-12);
        assert!((v - 0.0932).abs() < 1e-4);
    }

    #[test]
    fn normalized_on_torus() {
        for &tau in &[0.1, 1.0, 10.0] {
            for &side in &[3u64, 8, 101] {
                let s: f64 = (0..side as i64).map(|k| skellam_kernel(1, Side::Finite(side), &[k], tau).unwrap()).sum();
                assert!((s - 1.0).abs() < 1e-12, "τ={tau} D={side}: {s}");
            }
        }
        let s: f64 = (0..4)
            .flat_map(|a| (0..4).map(move |b| [a, b]))
            .map(|k| skellam_kernel(2, Side::Finite(4), &k, 1.5).unwrap())
            .sum();
        assert!((s - 1.0).abs() < 1e-12);
    }
}
