//! Regenerates the Tracy–Widom reference tables in `data/`.
//!
//! Top eigenvalues of 10^5 Gaussian orthogonal / unitary matrices of size 4000
//! (sampled through the equivalent tridiagonal model), rescaled to
//! N^{2/3}(λ/√N − 2), tabulated as an empirical CDF on a fixed grid.
//!
//!     cargo run --release --example tw_tables -- crates/core/data

use irmlab::ensembles::tridiagonal::{sample_tridiagonal, top_eigenvalue};
use irmlab::rng::trial_rng;
use rayon::prelude::*;
use std::io::Write;

const N: usize = 4000;
const SAMPLES: u64 = 100_000;
const SEED: u64 = 20_240_601;

fn main() {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "crates/core/data".into());
    let nf = N as f64;
    for (beta, name) in [(1.0, "tw1"), (2.0, "tw2")] {
        let mut xs: Vec<f64> = (0..SAMPLES)
            .into_par_iter()
            .map(|i| {
                let mut rng = trial_rng(SEED, beta as u64, i);
                let (d, o) = sample_tridiagonal(N, beta, &mut rng);
                let top = top_eigenvalue(&d, &o, 1e-7);
                nf.powf(2.0 / 3.0) * (top / nf.sqrt() - 2.0)
            })
            .collect();
        xs.sort_by(f64::total_cmp);
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        eprintln!("{name}: mean {mean:.4} sd {:.4} min {:.3} max {:.3}", var.sqrt(), xs[0], xs[xs.len() - 1]);
        let path = format!("{dir}/{name}.csv");
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "x,cdf").unwrap();
        let mut j = 0;
        for k in 0..=300 {
            let x = -9.0 + 0.05 * k as f64;
            while j < xs.len() && xs[j] <= x {
                j += 1;
            }
            writeln!(f, "{x:.2},{:.6}", j as f64 / xs.len() as f64).unwrap();
        }
    }
}
