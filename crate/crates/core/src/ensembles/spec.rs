//! Ensemble descriptions.

use crate::chain::ProfileSpec;
use crate::error::{Error, Result};
use crate::spike::SpikeOperator;
use serde::{Deserialize, Serialize};

/// Distribution of the normalized entries W_ij before scaling to (A1) variances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryLaw {
    #[default]
    Gaussian,
    Rademacher,
    SymmetricUniform,
}

impl EntryLaw {
    /// E|W|^{2k} of an off-diagonal entry.
    pub fn abs_moment(&self, beta: u8, k: u32) -> f64 {
        let real = |j: u32| -> f64 {
            match self {
                EntryLaw::Gaussian => (1..=j).map(|i| (2 * i - 1) as f64).product(),
                EntryLaw::Rademacher => 1.0,
                EntryLaw::SymmetricUniform => 3f64.powi(j as i32) / (2 * j + 1) as f64,
            }
        };
        if beta == 1 {
            return real(k);
        }
        // |W|² = (a² + b²)/2 with a, b independent copies of the real law
        let mut s = 0.0;
        let mut binom = 1.0;
        for j in 0..=k {
            s += binom * real(j) * real(k - j);
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
        s / 2f64.powi(k as i32)
    }

    /// Smallest θ ≥ 1 with E|W|^{2k} ≤ θ^{k−1}(2k−1)!! for 2 ≤ k ≤ 30.
    pub fn moment_constant(&self, beta: u8) -> f64 {
        (2..=30u32)
            .map(|k| {
                let dfact: f64 = (1..=k).map(|i| (2 * i - 1) as f64).product();
                (self.abs_moment(beta, k) / dfact).powf(1.0 / (k - 1) as f64)
            })
            .fold(1.0, f64::max)
    }
}

/// Full matrix model X = Σ∘W + A.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    pub beta: u8,
    #[serde(default)]
    pub entry_law: EntryLaw,
    pub profile: ProfileSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spike: Option<SpikeOperator>,
    /// Matrix size; must match the profile's state count when given.
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub size: Option<usize>,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn new(beta: u8, profile: ProfileSpec, seed: u64) -> Result<Self> {
        let s = Self { beta, entry_law: EntryLaw::Gaussian, profile, spike: None, size: None, seed };
        s.validate()?;
        Ok(s)
    }

    pub fn with_law(mut self, law: EntryLaw) -> Self {
        self.entry_law = law;
        self
    }

    pub fn with_spike(mut self, spike: SpikeOperator) -> Result<Self> {
        self.spike = Some(spike);
        self.validate()?;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.profile.states()
    }

    pub fn validate(&self) -> Result<()> {
        if self.beta != 1 && self.beta != 2 {
            return Err(Error::invalid(format!("β = {} must be 1 or 2", self.beta)));
        }
        self.profile.validate()?;
        let n = self.dim();
        if let Some(size) = self.size {
            if size != n {
                return Err(Error::StateMismatch(size, n));
            }
        }
        if let Some(sp) = &self.spike {
            sp.validate()?;
            sp.sites(n)?;
        }
        Ok(())
    }

    /// θ of the entry law.
    pub fn theta(&self) -> f64 {
        self.entry_law.moment_constant(self.beta)
    }

    pub fn digest(&self) -> String {
        crate::output::digest_of(self)
    }
}
