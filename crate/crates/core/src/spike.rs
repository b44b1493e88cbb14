//! Finite-rank deformations supported on a few sites.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// How the nonzero eigenvalues of the reduced matrix are given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SpikeStrengths {
    /// Eigenvalues a_i directly.
    Eigenvalues(Vec<f64>),
    /// Critical parameters τ_i with a_i = 1 + τ_i W^{−α/(3α−1)}.
    Critical { tau: Vec<f64>, width: f64, alpha: f64 },
}

/// Where the deformation sits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SpikePositions {
    Sites(Vec<usize>),
    /// Points of [0, 1), mapped to ⌊zN⌋.
    Rescaled(Vec<f64>),
}

/// A = Σ_{ij} Ã_{ij} E_{m_i m_j} with reduced matrix Ã = Σ_i a_i v_i v_iᵀ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpikeOperator {
    pub strengths: SpikeStrengths,
    /// Eigenvectors v_i of the reduced matrix (one per strength); identity if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vectors: Option<Vec<Vec<f64>>>,
    pub positions: SpikePositions,
}

impl SpikeOperator {
    pub fn diagonal(eigenvalues: Vec<f64>, sites: Vec<usize>) -> Result<Self> {
        let s = Self {
            strengths: SpikeStrengths::Eigenvalues(eigenvalues),
            vectors: None,
            positions: SpikePositions::Sites(sites),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn rank(&self) -> usize {
        match &self.strengths {
            SpikeStrengths::Eigenvalues(a) => a.len(),
            SpikeStrengths::Critical { tau, .. } => tau.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.rank();
        if r == 0 {
            return Err(Error::invalid("spike needs at least one strength"));
        }
        let npos = match &self.positions {
            SpikePositions::Sites(s) => s.len(),
            SpikePositions::Rescaled(z) => {
                if z.iter().any(|z| !(0.0..1.0).contains(z)) {
                    return Err(Error::invalid("rescaled spike positions must lie in [0, 1)"));
                }
                z.len()
            }
        };
        if npos != r {
            return Err(Error::invalid(format!("{npos} spike positions for rank {r}")));
        }
        if let SpikeStrengths::Critical { width, alpha, .. } = &self.strengths {
            if !(*width > 0.0 && *alpha > 0.0) {
                return Err(Error::invalid("critical spikes need positive width and α"));
            }
        }
        if let Some(v) = &self.vectors {
            if v.len() != r || v.iter().any(|c| c.len() != r) {
                return Err(Error::invalid(format!("spike eigenvectors must be {r} vectors of length {r}")));
            }
            for i in 0..r {
                for j in 0..r {
                    let dot: f64 = v[i].iter().zip(&v[j]).map(|(a, b)| a * b).sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    if (dot - want).abs() > 1e-12 {
                        return Err(Error::invalid(format!("spike eigenvectors {i}, {j} not orthonormal (dot {dot})")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        match &self.strengths {
            SpikeStrengths::Eigenvalues(a) => a.clone(),
            SpikeStrengths::Critical { tau, width, alpha } => {
                let shift = width.powf(-alpha / (3.0 * alpha - 1.0));
                tau.iter().map(|t| 1.0 + t * shift).collect()
            }
        }
    }

    /// Largest |a_i|, the operator norm of A.
    pub fn norm(&self) -> f64 {
        self.eigenvalues().iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    pub fn vector(&self, i: usize) -> Vec<f64> {
        match &self.vectors {
            Some(v) => v[i].clone(),
            None => (0..self.rank()).map(|k| if k == i { 1.0 } else { 0.0 }).collect(),
        }
    }

    /// Site indices m_i on a state space of size `n`.
    pub fn sites(&self, n: usize) -> Result<Vec<usize>> {
        let s: Vec<usize> = match &self.positions {
            SpikePositions::Sites(s) => s.clone(),
            SpikePositions::Rescaled(z) => z.iter().map(|z| (z * n as f64).floor() as usize).collect(),
        };
        if let Some(&m) = s.iter().find(|&&m| m >= n) {
            return Err(Error::invalid(format!("spike site {m} outside 0..{n}")));
        }
        let mut sorted = s.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != s.len() {
            return Err(Error::invalid("spike sites must be distinct"));
        }
        Ok(s)
    }

    /// Rescaled positions z_i for a state space of size `n`.
    pub fn rescaled(&self, n: usize) -> Vec<f64> {
        match &self.positions {
            SpikePositions::Sites(s) => s.iter().map(|&m| m as f64 / n as f64).collect(),
            SpikePositions::Rescaled(z) => z.clone(),
        }
    }

    /// Σ_i g(i) v_i v_iᵀ as a row-major r×r table.
    fn spectral_sum(&self, g: impl Fn(usize) -> f64) -> Vec<f64> {
        let r = self.rank();
        let mut out = vec![0.0; r * r];
        for i in 0..r {
            let v = self.vector(i);
            let w = g(i);
            for a in 0..r {
                for b in 0..r {
                    out[a * r + b] += w * v[a] * v[b];
                }
            }
        }
        out
    }

    /// Reduced matrix Ã^k, row-major r×r.
    pub fn reduced_power(&self, k: u32) -> Vec<f64> {
        let a = self.eigenvalues();
        self.spectral_sum(|i| a[i].powi(k as i32))
    }

    /// 𝔄(t) = Σ_i e^{τ_i t} v_i v_iᵀ; needs critical strengths.
    pub fn frak_a(&self, t: f64) -> Result<Vec<f64>> {
        let SpikeStrengths::Critical { tau, .. } = &self.strengths else {
            return Err(Error::invalid("𝔄(t) needs critical spike parameters τ_i"));
        };
        Ok(self.spectral_sum(|i| (tau[i] * t).exp()))
    }

    /// Dense N×N deformation matrix, row-major.
    pub fn to_matrix(&self, n: usize) -> Result<Vec<f64>> {
        let sites = self.sites(n)?;
        let r = self.rank();
        let red = self.reduced_power(1);
        let mut out = vec![0.0; n * n];
        for a in 0..r {
            for b in 0..r {
                out[sites[a] * n + sites[b]] = red[a * r + b];
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_strengths_and_power() {
        let s = SpikeOperator {
            strengths: SpikeStrengths::Critical { tau: vec![2.0, -1.0], width: 64.0, alpha: 2.0 },
            vectors: Some(vec![vec![0.6, 0.8], vec![0.8, -0.6]]),
            positions: SpikePositions::Rescaled(vec![0.25, 0.5]),
        };
        s.validate().unwrap();
        let a = s.eigenvalues();
        assert!((a[0] - (1.0 + 2.0 * 64f64.powf(-0.4))).abs() < 1e-15);
        assert_eq!(s.sites(100).unwrap(), vec![25, 50]);
        let p2 = s.reduced_power(2);
        let p1 = s.reduced_power(1);
        let sq: f64 = (0..2).map(|k| p1[k] * p1[k * 2]).sum();
        assert!((p2[0] - sq).abs() < 1e-14);
        let f0 = s.frak_a(0.0).unwrap();
        assert!((f0[0] - 1.0).abs() < 1e-15 && f0[1].abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_vectors_and_sites() {
        let mut s = SpikeOperator::diagonal(vec![1.0, 1.0], vec![3, 3]).unwrap();
        assert!(s.sites(8).is_err());
        s.vectors = Some(vec![vec![1.0, 0.1], vec![0.0, 1.0]]);
        assert!(s.validate().is_err());
        assert!(SpikeOperator::diagonal(vec![1.0], vec![0, 1]).is_err());
    }
}
