//! Drawing X = Σ∘W + A.

use super::spec::{EnsembleSpec, EntryLaw};
use crate::chain::build_variance_profile;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, trial_rng};
use faer::{c64, Mat, Side};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use sha2::{Digest, Sha256};

/// Seed stream used for matrix entries.
pub const MATRIX_STREAM: u64 = 1;

/// A sampled real-symmetric or complex-Hermitian matrix.
#[derive(Debug, Clone)]
pub enum SampledMatrix {
    Real(Mat<f64>),
    Complex(Mat<c64>),
}

impl SampledMatrix {
    pub fn dim(&self) -> usize {
        match self {
            SampledMatrix::Real(m) => m.nrows(),
            SampledMatrix::Complex(m) => m.nrows(),
        }
    }

    pub fn abs2(&self, i: usize, j: usize) -> f64 {
        match self {
            SampledMatrix::Real(m) => m[(i, j)] * m[(i, j)],
            SampledMatrix::Complex(m) => m[(i, j)].norm_sqr(),
        }
    }

    /// max |X − X*| over entries.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim();
        let mut d: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let e = match self {
                    SampledMatrix::Real(m) => (m[(i, j)] - m[(j, i)]).abs(),
                    SampledMatrix::Complex(m) => (m[(i, j)] - m[(j, i)].conj()).norm(),
                };
                d = d.max(e);
            }
        }
        d
    }

    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        let n = self.dim();
        for j in 0..n {
            for i in 0..n {
                match self {
                    SampledMatrix::Real(m) => h.update(m[(i, j)].to_le_bytes()),
                    SampledMatrix::Complex(m) => {
                        h.update(m[(i, j)].re.to_le_bytes());
                        h.update(m[(i, j)].im.to_le_bytes());
                    }
                }
            }
        }
        hex::encode(&h.finalize()[..8])
    }

    pub fn check_hermitian(&self, tol: f64) -> Result<()> {
        let d = self.hermitian_defect();
        if d > tol {
            return Err(Error::invalid(format!("matrix not symmetric/Hermitian: defect {d:e}")));
        }
        Ok(())
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let vals = match self {
            SampledMatrix::Real(m) => m.self_adjoint_eigenvalues(Side::Lower),
            SampledMatrix::Complex(m) => m.self_adjoint_eigenvalues(Side::Lower),
        };
        vals.map_err(|e| Error::Eigen(format!("{e:?} for matrix {}", self.digest())))
    }

    /// Largest eigenvalue with the squared moduli |ψ_i|² of its unit eigenvector.
    pub fn top_eigenpair(&self) -> Result<(f64, Vec<f64>)> {
        let n = self.dim();
        let fail = |e: faer::linalg::evd::EvdError| Error::Eigen(format!("{e:?} for matrix {}", self.digest()));
        match self {
            SampledMatrix::Real(m) => {
                let e = m.self_adjoint_eigen(Side::Lower).map_err(fail)?;
                let lam = e.S().column_vector()[n - 1];
                let u = e.U();
                Ok((lam, (0..n).map(|i| u[(i, n - 1)] * u[(i, n - 1)]).collect()))
            }
            SampledMatrix::Complex(m) => {
                let e = m.self_adjoint_eigen(Side::Lower).map_err(fail)?;
                let lam = e.S().column_vector()[n - 1].re;
                let u = e.U();
                Ok((lam, (0..n).map(|i| u[(i, n - 1)].norm_sqr()).collect()))
            }
        }
    }
}

/// An ensemble with its profile table prepared for repeated sampling.
#[derive(Debug, Clone)]
pub struct Ensemble {
    pub spec: EnsembleSpec,
    /// σ_ij, row-major.
    sigma: Vec<f64>,
    /// Nonzero entries of A.
    spike: Vec<(usize, usize, f64)>,
}

fn draw<R: Rng + ?Sized>(law: EntryLaw, rng: &mut R) -> f64 {
    match law {
        EntryLaw::Gaussian => StandardNormal.sample(rng),
        EntryLaw::Rademacher => {
            if rng.random::<bool>() {
                1.0
            } else {
                -1.0
            }
        }
        EntryLaw::SymmetricUniform => 3f64.sqrt() * (2.0 * rng.random::<f64>() - 1.0),
    }
}

impl Ensemble {
    pub fn new(spec: &EnsembleSpec) -> Result<Self> {
        spec.validate()?;
        let chain = build_variance_profile(&spec.profile)?;
        let n = chain.states;
        let sigma = chain.dense_table().into_iter().map(f64::sqrt).collect();
        let spike = match &spec.spike {
            None => Vec::new(),
            Some(s) => {
                let a = s.to_matrix(n)?;
                (0..n * n).filter(|&k| a[k] != 0.0).map(|k| (k / n, k % n, a[k])).collect()
            }
        };
        Ok(Self { spec: spec.clone(), sigma, spike })
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    /// σ²_ij.
    pub fn variance(&self, i: usize, j: usize) -> f64 {
        let s = self.sigma[i * self.dim() + j];
        s * s
    }

    pub fn trial_seed(&self, trial: u64) -> u64 {
        derive_seed(self.spec.seed, MATRIX_STREAM, trial)
    }

    pub fn sample(&self, trial: u64) -> SampledMatrix {
        self.sample_seeded(self.spec.seed, trial)
    }

    /// Entries are drawn row by row over the upper triangle from the trial's
    /// substream of `master`.
    pub fn sample_seeded(&self, master: u64, trial: u64) -> SampledMatrix {
        let n = self.dim();
        let law = self.spec.entry_law;
        let mut rng = trial_rng(master, MATRIX_STREAM, trial);
        let sq2 = 2f64.sqrt();
        if self.spec.beta == 1 {
            let mut m = Mat::<f64>::zeros(n, n);
            for i in 0..n {
                m[(i, i)] = self.sigma[i * n + i] * sq2 * draw(law, &mut rng);
                for j in i + 1..n {
                    let v = self.sigma[i * n + j] * draw(law, &mut rng);
                    m[(i, j)] = v;
                    m[(j, i)] = v;
                }
            }
            for &(i, j, a) in &self.spike {
                m[(i, j)] += a;
            }
            SampledMatrix::Real(m)
        } else {
            let mut m = Mat::<c64>::zeros(n, n);
            for i in 0..n {
                m[(i, i)] = c64::new(self.sigma[i * n + i] * draw(law, &mut rng), 0.0);
                for j in i + 1..n {
                    let s = self.sigma[i * n + j] / sq2;
                    let v = c64::new(s * draw(law, &mut rng), s * draw(law, &mut rng));
                    m[(i, j)] = v;
                    m[(j, i)] = v.conj();
                }
            }
            for &(i, j, a) in &self.spike {
                m[(i, j)] += c64::new(a, 0.0);
            }
            SampledMatrix::Complex(m)
        }
    }
}

/// One draw of the ensemble for a given trial index.
pub fn sample_matrix(spec: &EnsembleSpec, trial: u64) -> Result<SampledMatrix> {
    Ok(Ensemble::new(spec)?.sample(trial))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::ProfileSpec;
    use crate::spike::SpikeOperator;

    #[test]
    fn exactly_hermitian() {
        for beta in [1, 2] {
            let spec = EnsembleSpec::new(beta, ProfileSpec::alpha_stable(2.0, 32, 4).unwrap(), 3).unwrap();
            let x = sample_matrix(&spec, 0).unwrap();
            assert_eq!(x.hermitian_defect(), 0.0);
        }
    }

    #[test]
    fn spike_rank_two() {
        let spec = EnsembleSpec::new(1, ProfileSpec::flat(16).unwrap(), 1)
            .unwrap()
            .with_spike(SpikeOperator::diagonal(vec![3.0, -2.0], vec![2, 9]).unwrap())
            .unwrap();
        let a = spec.spike.as_ref().unwrap().to_matrix(16).unwrap();
        let m = Mat::<f64>::from_fn(16, 16, |i, j| a[i * 16 + j]);
        let s = m.singular_values().unwrap();
        assert_eq!(s.iter().filter(|&&v| v > 1e-10).count(), 2);
    }

    #[test]
    fn deterministic_per_trial() {
        let spec = EnsembleSpec::new(2, ProfileSpec::flat(8).unwrap(), 11).unwrap();
        let e = Ensemble::new(&spec).unwrap();
        assert_eq!(e.sample(4).digest(), e.sample(4).digest());
        assert_ne!(e.sample(4).digest(), e.sample(5).digest());
    }
}
