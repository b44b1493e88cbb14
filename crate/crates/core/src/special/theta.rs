//! Periodized stable densities θ_α(x, τ) = Σ_k f_α(x + k, τ).

use super::stable::{standard_density, tail_coefficients, StableLaw};
use crate::error::{Error, Result};
use crate::zeta::hurwitz_zeta;
use std::f64::consts::PI;

/// Crossover between the spatial and the frequency series.
pub const THETA_CROSSOVER: f64 = 0.5;

/// Which series evaluates θ_α.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaRoute {
    Auto,
    Spatial,
    Frequency,
}

fn check(tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("time parameter τ = {tau} must be positive")))
    }
}

fn wrap(x: f64) -> f64 {
    x - x.round()
}

impl StableLaw {
    /// θ_α(x, τ) on the one-dimensional torus.
    pub fn theta(&self, x: f64, tau: f64) -> Result<f64> {
        self.theta_route(x, tau, ThetaRoute::Auto)
    }

    pub fn theta_route(&self, x: f64, tau: f64, route: ThetaRoute) -> Result<f64> {
        check(tau)?;
        let x = wrap(x);
        let spatial = match route {
            ThetaRoute::Auto => tau < THETA_CROSSOVER,
            ThetaRoute::Spatial => true,
            ThetaRoute::Frequency => false,
        };
        Ok(if spatial { self.theta_spatial(x, tau) } else { self.theta_frequency(x, tau) })
    }

    /// θ_α on the d-dimensional torus. For d ≥ 2 the frequency series is used
    /// unless α = 2, where the Gaussian factorizes.
    pub fn theta_nd(&self, x: &[f64], tau: f64) -> Result<f64> {
        check(tau)?;
        match x.len() {
            0 => Err(Error::invalid("empty torus point")),
            1 => self.theta(x[0], tau),
            _ if self.alpha == 2.0 => x.iter().map(|&xi| self.theta(xi, tau)).product(),
            d => Ok(self.theta_frequency_nd(x, tau, d)),
        }
    }

    fn theta_frequency(&self, x: f64, tau: f64) -> f64 {
        let mut sum = 1.0;
        let mut m = 1u64;
        loop {
            let w = (-self.c * tau * (2.0 * PI * m as f64).powf(self.alpha)).exp();
            sum += 2.0 * w * (2.0 * PI * m as f64 * x).cos();
            if 2.0 * w < 1e-17 * sum.abs() || w < 1e-300 {
                break;
            }
            m += 1;
        }
        sum
    }

    fn theta_frequency_nd(&self, x: &[f64], tau: f64, d: usize) -> f64 {
        let radius = ((40.0 / (self.c * tau)).powf(1.0 / self.alpha) / (2.0 * PI)).ceil() as i64 + 1;
        let side = (2 * radius + 1) as usize;
        let total = side.pow(d as u32);
        let mut sum = 0.0;
        let mut m = vec![0i64; d];
        for idx in 0..total {
            let mut r = idx;
            for mj in m.iter_mut() {
                *mj = (r % side) as i64 - radius;
                r /= side;
            }
            let norm = m.iter().map(|&v| (v * v) as f64).sum::<f64>().sqrt();
            let w = (-self.c * tau * (2.0 * PI * norm).powf(self.alpha)).exp();
            if w == 0.0 {
                continue;
            }
            let phase: f64 = m.iter().zip(x).map(|(&mj, &xj)| mj as f64 * xj).sum();
            sum += w * (2.0 * PI * phase).cos();
        }
        sum
    }

    fn theta_spatial(&self, x: f64, tau: f64) -> f64 {
        let s = self.spread(tau);
        let a = self.alpha;
        let f = |y: f64| standard_density(a, y / s) / s;
        if a == 2.0 {
            let mut sum = f(x);
            let mut k = 1.0;
            loop {
                let t = f(x + k) + f(x - k);
                sum += t;
                if t < 1e-17 * sum || t == 0.0 {
                    break;
                }
                k += 1.0;
            }
            return sum;
        }
        // direct terms out to where the large-argument expansion holds, then
        // the expansion summed in closed form by Hurwitz zeta
        let zstart = if a < 1.0 { 4.0 } else { 12.0 };
        let kmax = ((zstart * s).ceil() + 1.0).max(2.0);
        let k_last = kmax as i64;
        let mut sum = f(x);
        for k in 1..=k_last {
            sum += f(x + k as f64) + f(x - k as f64);
        }
        let coeffs = tail_coefficients(a, self.c * tau, 200);
        let q1 = k_last as f64 + 1.0 + x;
        let q2 = k_last as f64 + 1.0 - x;
        let mut tail = 0.0;
        let mut small = 0;
        for (j, aj) in coeffs.iter().enumerate() {
            let sj = a * (j + 1) as f64 + 1.0;
            let term = aj * (hurwitz_zeta(sj, q1) + hurwitz_zeta(sj, q2));
            tail += term;
            // sin(παj/2) vanishes at some j, so wait for two negligible terms
            if term.abs() < 1e-18 * sum.abs() {
                small += 1;
                if small == 2 {
                    break;
                }
            } else {
                small = 0;
            }
        }
        sum + tail
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn periodic_in_x() {
        for &a in &[1.0, 1.5, 2.0] {
            let law = StableLaw::standard(a).unwrap();
            for &tau in &[0.1, 2.0] {
                let v = law.theta(0.2, tau).unwrap();
                assert_relative_eq!(v, law.theta(1.2, tau).unwrap(), max_relative = 1e-13);
                assert_relative_eq!(v, law.theta(-0.8, tau).unwrap(), max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn large_tau_is_flat() {
        let law = StableLaw::standard(2.0).unwrap();
        assert!((law.theta(0.3, 10.0).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn small_tau_gaussian_peak() {
        let law = StableLaw::standard(2.0).unwrap();
        let v = law.theta(0.0, 0.01).unwrap();
        assert_relative_eq!(v, 3.989_422_804_014_327, max_relative = 1e-12);
    }

    #[test]
    fn cauchy_closed_form() {
        // Σ_k τ/(π(τ²+(x+k)²)) = sinh(2πτ)/(cosh(2πτ) − cos(2πx))
        let law = StableLaw::standard(1.0).unwrap();
        for &tau in &[0.05, 0.3, 2.0] {
            for &x in &[0.0, 0.17, 0.5] {
                let exact = (2.0 * PI * tau).sinh() / ((2.0 * PI * tau).cosh() - (2.0 * PI * x).cos());
                for route in [ThetaRoute::Spatial, ThetaRoute::Frequency] {
                    let v = law.theta_route(x, tau, route).unwrap();
                    assert_relative_eq!(v, exact, max_relative = 1e-12);
                }
            }
        }
    }

    #[test]
    fn integrates_to_one_over_torus() {
        let law = StableLaw::standard(1.5).unwrap();
        let n = 400;
        let s: f64 = (0..n).map(|i| law.theta(i as f64 / n as f64 - 0.5, 0.2).unwrap()).sum::<f64>() / n as f64;
        assert_relative_eq!(s, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn nd_gaussian_factorizes_and_matches_frequency() {
        let law = StableLaw::standard(2.0).unwrap();
        let p = law.theta_nd(&[0.1, 0.3], 0.7).unwrap();
        let f = law.theta_frequency_nd(&[0.1, 0.3], 0.7, 2);
        assert_relative_eq!(p, f, max_relative = 1e-12);
    }
}
