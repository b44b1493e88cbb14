//! Symmetric α-stable densities with characteristic function e^{-c|t|^α}.

use super::gamma::ln_gamma;
use crate::error::{Error, Result};
use crate::quad;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// Symmetric stable law with characteristic function exp(-c|t|^α).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct StableLaw {
    pub alpha: f64,
    pub c: f64,
}

impl StableLaw {
    pub fn new(alpha: f64, c: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::invalid(format!("stability index {alpha} outside (0, 2]")));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::invalid(format!("scale constant {c} must be positive")));
        }
        Ok(Self { alpha, c })
    }

    /// Default constants: c = σ²/2 with σ = 1 for α = 2, c = 1 otherwise.
    pub fn standard(alpha: f64) -> Result<Self> {
        Self::new(alpha, default_c(alpha))
    }

    /// Law of `scale · Z` with `Z` standard.
    pub fn with_scale(alpha: f64, scale: f64) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::invalid("scale must be positive"));
        }
        Self::new(alpha, default_c(alpha) * scale.powf(alpha))
    }

    pub fn char_fn(&self, t: f64) -> f64 {
        (-self.c * t.abs().powf(self.alpha)).exp()
    }

    /// Spatial scale of the law at time `tau`: (c τ)^{1/α}.
    pub fn spread(&self, tau: f64) -> f64 {
        (self.c * tau).powf(1.0 / self.alpha)
    }

    /// One-dimensional density f_α(x, τ).
    pub fn density(&self, x: f64, tau: f64) -> Result<f64> {
        check_tau(tau)?;
        let s = self.spread(tau);
        Ok(standard_density(self.alpha, x / s) / s)
    }

    /// Density in d dimensions of the radial law exp(-c τ |t|^α).
    pub fn density_nd(&self, x: &[f64], tau: f64) -> Result<f64> {
        check_tau(tau)?;
        let d = x.len();
        if d == 1 {
            return self.density(x[0], tau);
        }
        let s = self.spread(tau);
        let r2: f64 = x.iter().map(|v| (v / s) * (v / s)).sum();
        let dd = d as f64;
        let g = if self.alpha == 2.0 {
            (-r2 / 4.0).exp() / (4.0 * PI).powf(dd / 2.0)
        } else if self.alpha == 1.0 {
            (ln_gamma((dd + 1.0) / 2.0) - (dd + 1.0) / 2.0 * PI.ln()).exp() / (1.0 + r2).powf((dd + 1.0) / 2.0)
        } else {
            return Err(Error::Unsupported(format!("stable density with α = {} in dimension {d}", self.alpha)));
        };
        Ok(g / s.powi(d as i32))
    }
}

impl StableLaw {
    /// Draw from f_α(·, τ) by the Chambers–Mallows–Stuck construction.
    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R, tau: f64) -> f64 {
        let v = PI * (rng.random::<f64>() - 0.5);
        let e: f64 = -(1.0 - rng.random::<f64>()).ln();
        let a = self.alpha;
        let z = (a * v).sin() / v.cos().powf(1.0 / a) * (((1.0 - a) * v).cos() / e).powf((1.0 - a) / a);
        z * self.spread(tau)
    }
}

pub(crate) fn default_c(alpha: f64) -> f64 {
    if alpha == 2.0 {
        0.5
    } else {
        1.0
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("time parameter τ = {tau} must be positive")))
    }
}

/// Point beyond which the large-argument expansion is used.
fn asymptotic_start(alpha: f64) -> f64 {
    if alpha < 1.0 {
        4.0
    } else {
        12.0
    }
}

/// Large-|z| expansion of the standard density; `None` if it fails to converge.
pub(crate) fn tail_coefficients(alpha: f64, scale_pow: f64, max_terms: usize) -> Vec<f64> {
    // a_j with f(y) ~ Σ_j a_j y^{-(αj+1)}; scale_pow = (cτ)
    let mut out = Vec::with_capacity(max_terms);
    let mut sp = 1.0;
    let mut lfact = 0.0;
    for j in 1..=max_terms {
        let jf = j as f64;
        lfact += jf.ln();
        sp *= scale_pow;
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        let mag = (ln_gamma(alpha * jf + 1.0) - lfact).exp();
        out.push(sign * mag * (PI * alpha * jf / 2.0).sin() * sp / PI);
    }
    out
}

fn asymptotic_density(alpha: f64, z: f64) -> Option<f64> {
    let z = z.abs();
    let lz = z.ln();
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    let mut lfact = 0.0;
    for j in 1..400 {
        let jf = j as f64;
        lfact += jf.ln();
        let lmag = ln_gamma(alpha * jf + 1.0) - lfact - (alpha * jf + 1.0) * lz;
        let mag = lmag.exp();
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        let term = sign * mag * (PI * alpha * jf / 2.0).sin() / PI;
        sum += term;
        if mag < 1e-17 * sum.abs() {
            return Some(sum);
        }
        if mag > prev && alpha > 1.0 {
            return None;
        }
        prev = mag;
    }
    None
}

/// (1/π) ∫_0^∞ cos(z t) e^{-t^α} dt, split at the oscillation scale.
pub(crate) fn inversion_density(alpha: f64, z: f64) -> f64 {
    let z = z.abs();
    let upper = 39.5f64.powf(1.0 / alpha);
    let mut breaks = Vec::new();
    if z > 0.0 {
        let step = PI / z;
        let mut b = step;
        while b < upper {
            breaks.push(b);
            b += step;
        }
    }
    if alpha < 1.0 {
        // resolve the cusp at the origin
        let mut b = 1e-6;
        while b < 1.0 {
            breaks.push(b);
            b *= 10.0;
        }
        breaks.sort_by(f64::total_cmp);
    }
    let q = quad::integrate_with_breaks(|t| (z * t).cos() * (-t.powf(alpha)).exp(), 0.0, upper, &breaks, 1e-16, 1e-15);
    q.value / PI
}

/// Piecewise Chebyshev interpolant of the standard density on [0, z_max].
///
/// For α < 1 the density is not analytic at the origin, so the first panel
/// is split dyadically toward 0.
struct ChebTable {
    edges: Vec<f64>,
    coeffs: Vec<Vec<f64>>,
}

const CHEB_DEG: usize = 28;

impl ChebTable {
    fn build(alpha: f64) -> Self {
        let zmax = asymptotic_start(alpha);
        let h = 0.25;
        let mut edges = vec![0.0];
        if alpha < 1.0 {
            edges.extend((1..=14).rev().map(|k| h / f64::powi(2.0, k)));
        }
        let pieces = (zmax / h).ceil() as usize;
        edges.extend((1..=pieces).map(|p| p as f64 * h));
        let n = CHEB_DEG + 1;
        let coeffs = edges
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                let vals: Vec<f64> = (0..n)
                    .map(|k| {
                        let x = (PI * (k as f64 + 0.5) / n as f64).cos();
                        inversion_density(alpha, a + 0.5 * (b - a) * (x + 1.0))
                    })
                    .collect();
                (0..n)
                    .map(|j| {
                        let s: f64 =
                            (0..n).map(|k| vals[k] * (PI * j as f64 * (k as f64 + 0.5) / n as f64).cos()).sum();
                        s * 2.0 / n as f64
                    })
                    .collect()
            })
            .collect();
        Self { edges, coeffs }
    }

    fn eval(&self, z: f64) -> Option<f64> {
        if z >= *self.edges.last()? {
            return None;
        }
        let p = self.edges.partition_point(|&e| e <= z) - 1;
        let c = &self.coeffs[p];
        let (a, b) = (self.edges[p], self.edges[p + 1]);
        let x = 2.0 * (z - a) / (b - a) - 1.0;
        let (mut b1, mut b2) = (0.0, 0.0);
        for &cj in c.iter().skip(1).rev() {
            let b0 = 2.0 * x * b1 - b2 + cj;
            b2 = b1;
            b1 = b0;
        }
        Some(x * b1 - b2 + 0.5 * c[0])
    }
}

fn table(alpha: f64) -> Arc<ChebTable> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<ChebTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&alpha.to_bits()) {
        return t.clone();
    }
    let t = Arc::new(ChebTable::build(alpha));
    cache.lock().unwrap().insert(alpha.to_bits(), t.clone());
    t
}

/// Density of the law with characteristic function e^{-|t|^α}.
pub fn standard_density(alpha: f64, z: f64) -> f64 {
    let z = z.abs();
    if alpha == 2.0 {
        return (-z * z / 4.0).exp() / (2.0 * PI.sqrt());
    }
    if alpha == 1.0 {
        return 1.0 / (PI * (1.0 + z * z));
    }
    if z >= asymptotic_start(alpha) {
        if let Some(v) = asymptotic_density(alpha, z) {
            return v;
        }
        return inversion_density(alpha, z);
    }
    table(alpha).eval(z).unwrap_or_else(|| inversion_density(alpha, z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn closed_forms_at_origin() {
        let g = StableLaw::standard(2.0).unwrap();
        assert_relative_eq!(g.density(0.0, 1.0).unwrap(), 0.398_942_280_401_432_7, epsilon = 1e-15);
        let c = StableLaw::standard(1.0).unwrap();
        assert_relative_eq!(c.density(0.0, 1.0).unwrap(), 1.0 / PI, epsilon = 1e-15);
    }

    #[test]
    fn general_alpha_origin_value() {
        // f(0) = Γ(1 + 1/α)/π for e^{-|t|^α}
        for &a in &[0.5, 0.8, 1.3, 1.5, 1.9] {
            let exact = ln_gamma(1.0 + 1.0 / a).exp() / PI;
            assert_relative_eq!(standard_density(a, 0.0), exact, max_relative = 1e-12);
        }
    }

    #[test]
    fn table_matches_direct_inversion() {
        for &a in &[0.5, 0.7, 1.5, 1.95] {
            for i in 0..40 {
                let z = 0.29 * i as f64;
                let t = standard_density(a, z);
                let d = inversion_density(a, z);
                assert!((t - d).abs() < 1e-13, "α={a} z={z}: {t} vs {d}");
            }
        }
    }

    #[test]
    fn asymptotic_joins_inversion() {
        for &a in &[0.6, 1.5, 1.8] {
            let z = asymptotic_start(a) + 0.5;
            let s = asymptotic_density(a, z).unwrap();
            let d = inversion_density(a, z);
            assert!((s - d).abs() < 1e-14, "α={a}: {s} vs {d}");
        }
    }

    #[test]
    fn alpha_one_and_half_normalized() {
        let law = StableLaw::standard(1.5).unwrap();
        let q = quad::integrate_with_breaks(
            |x| law.density(x, 1.0).unwrap(),
            -200.0,
            200.0,
            &[-12.0, -4.0, 0.0, 4.0, 12.0],
            1e-12,
            1e-12,
        );
        // mass beyond ±200 from the tail expansion
        let tail: f64 = tail_coefficients(1.5, 1.0, 8)
            .iter()
            .enumerate()
            .map(|(j, a)| {
                let e = 1.5 * (j + 1) as f64;
                2.0 * a * 200f64.powf(-e) / e
            })
            .sum();
        assert!((q.value + tail - 1.0).abs() < 1e-10, "{} + {tail}", q.value);
    }

    #[test]
    fn scaling_relation() {
        let law = StableLaw::new(1.5, 1.0).unwrap();
        let tau: f64 = 3.0;
        let x = 0.7;
        let lhs = law.density(x, tau).unwrap();
        let rhs = tau.powf(-1.0 / 1.5) * law.density(tau.powf(-1.0 / 1.5) * x, 1.0).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-13);
    }

    #[test]
    fn multivariate_closed_forms() {
        let g = StableLaw::standard(2.0).unwrap();
        let v = g.density_nd(&[0.3, -0.4], 1.0).unwrap();
        let p = g.density(0.3, 1.0).unwrap() * g.density(-0.4, 1.0).unwrap();
        assert_relative_eq!(v, p, max_relative = 1e-14);
        assert!(StableLaw::standard(1.5).unwrap().density_nd(&[0.0, 0.0], 1.0).is_err());
        assert!(g.density(0.0, 0.0).is_err());
    }

    #[test]
    fn sampler_matches_density() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for alpha in [1.0, 1.5, 2.0] {
            let law = StableLaw::standard(alpha).unwrap();
            let tau = 0.7;
            let n = 200_000;
            let hits = (0..n).filter(|_| law.sample(&mut rng, tau).abs() < 0.5).count() as f64 / n as f64;
            let want = crate::quad::integrate(|x| law.density(x, tau).unwrap(), -0.5, 0.5, 1e-12, 1e-10).value;
            assert!(
                (hits - want).abs() < 4.0 * (want * (1.0 - want) / n as f64).sqrt() + 1e-3,
                "{alpha}: {hits} vs {want}"
            );
        }
    }
}
