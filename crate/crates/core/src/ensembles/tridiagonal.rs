//! Tridiagonal β-Hermite model: same eigenvalue law as the dense Gaussian
//! ensembles with unit off-diagonal variance.

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

/// Diagonal and squared off-diagonal of one tridiagonal sample of size n.
pub fn sample_tridiagonal<R: Rng + ?Sized>(n: usize, beta: f64, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
    let diag: Vec<f64> = (0..n)
        .map(|_| {
            let z: f64 = rng.sample(StandardNormal);
            z * (2.0 / beta).sqrt()
        })
        .collect();
    let off2: Vec<f64> = (1..n)
        .map(|i| {
            let k = beta * (n - i) as f64;
            ChiSquared::new(k).unwrap().sample(rng) / beta
        })
        .collect();
    (diag, off2)
}

/// Number of eigenvalues strictly below `x`.
pub fn sturm_count(diag: &[f64], off2: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = diag[0] - x;
    if d < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        let prev = if d == 0.0 { f64::MIN_POSITIVE } else { d };
        d = diag[i] - x - off2[i - 1] / prev;
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Largest eigenvalue by bisection on the Sturm count.
pub fn top_eigenvalue(diag: &[f64], off2: &[f64], tol: f64) -> f64 {
    let n = diag.len();
    // Gershgorin upper bound
    let mut hi = f64::MIN;
    let mut lo = f64::MAX;
    for i in 0..n {
        let r = if i > 0 { off2[i - 1].sqrt() } else { 0.0 } + if i + 1 < n { off2[i].sqrt() } else { 0.0 };
        hi = hi.max(diag[i] + r);
        lo = lo.min(diag[i] - r);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if sturm_count(diag, off2, mid) == n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}
