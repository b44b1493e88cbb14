//! Edge observables, edge scales and distances to reference laws.

use super::sample::SampledMatrix;
use crate::error::{Error, Result};
use crate::special::ReferenceLaw;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeObservables {
    pub lambda_max: f64,
    pub rescaled: f64,
    pub ipr: f64,
}

/// Σ|ψ_i|⁴ from squared moduli of a unit vector.
pub fn ipr(abs2: &[f64]) -> f64 {
    abs2.iter().map(|p| p * p).sum()
}

pub fn edge_observables(x: &SampledMatrix, s_n: f64) -> Result<EdgeObservables> {
    if !(s_n > 0.0) {
        return Err(Error::invalid("edge scale must be positive"));
    }
    x.check_hermitian(1e-12)?;
    let (lambda_max, amp) = x.top_eigenpair()?;
    Ok(EdgeObservables { lambda_max, rescaled: (lambda_max - 2.0) / s_n, ipr: ipr(&amp) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeRegime {
    Supercritical,
    Critical,
    Subcritical,
}

/// Edge fluctuation scale with the regime it was chosen from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeScale {
    pub regime: EdgeRegime,
    pub s_n: f64,
    /// γ_N = W^{3α/(3α−1)}/N.
    pub gamma_n: f64,
    /// Bandwidth at which the regimes meet, N^{1−1/(3α)}.
    pub threshold: f64,
}

/// N^{−2/3} when W exceeds N^{1−1/(3α)}, W^{−2α/(3α−1)} otherwise.
pub fn edge_scale(n: usize, width: f64, alpha: f64) -> EdgeScale {
    let nf = n as f64;
    let threshold = nf.powf(1.0 - 1.0 / (3.0 * alpha));
    let gamma_n = width.powf(3.0 * alpha / (3.0 * alpha - 1.0)) / nf;
    let (regime, s_n) = if width > threshold {
        (EdgeRegime::Supercritical, nf.powf(-2.0 / 3.0))
    } else {
        let r = if width == threshold { EdgeRegime::Critical } else { EdgeRegime::Subcritical };
        (r, width.powf(-2.0 * alpha / (3.0 * alpha - 1.0)))
    };
    EdgeScale { regime, s_n, gamma_n, threshold }
}

fn sorted(samples: &[f64]) -> Vec<f64> {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// sup |F_n − F|, checking both sides of every jump of F_n.
pub fn ks_distance_cdf(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::invalid("KS distance needs at least 2 samples"));
    }
    let v = sorted(samples);
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < v.len() {
        let mut j = i;
        while j + 1 < v.len() && v[j + 1] == v[i] {
            j += 1;
        }
        let left = cdf(v[i].next_down());
        let f = cdf(v[i]);
        d = d.max((left - i as f64 / n).abs()).max(((j + 1) as f64 / n - f).abs());
        i = j + 1;
    }
    Ok(d)
}

pub fn mean_sd(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let m = samples.iter().sum::<f64>() / n;
    let v = samples.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, v.sqrt())
}

/// Affinely standardizes the samples (mean 0, variance 1).
pub fn standardize(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.len() < 2 {
        return Err(Error::invalid("standardization needs at least 2 samples"));
    }
    let (m, s) = mean_sd(samples);
    if !(s > 0.0) {
        return Err(Error::invalid("degenerate samples: zero variance"));
    }
    Ok(samples.iter().map(|x| (x - m) / s).collect())
}

/// KS distance to a reference law; with `normalize` both sides are standardized.
pub fn ks_distance(samples: &[f64], law: ReferenceLaw, normalize: bool) -> Result<f64> {
    if normalize {
        ks_distance_cdf(&standardize(samples)?, |z| law.standardized_cdf(z))
    } else {
        ks_distance_cdf(samples, |x| law.cdf(x).p)
    }
}

/// Two-sample sup distance between empirical CDFs.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("two-sample KS needs nonempty samples"));
    }
    let (a, b) = (sorted(a), sorted(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}
