//! Strict JSON experiment configuration.

use crate::chain::ProfileSpec;
use crate::comparison::Thresholds;
use crate::diagrams::Regime;
use crate::ensembles::{EnsembleSpec, EntryLaw};
use crate::error::{Error, Result};
use crate::spike::SpikeOperator;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

/// Default cost budget in units of N³·trials.
pub const DEFAULT_BUDGET: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    EdgeSim,
    Compare,
    Lclt,
    Diagram,
    Wegner,
    Hankel,
    Sweep,
}

impl Kind {
    pub fn name(&self) -> &'static str {
        match self {
            Kind::EdgeSim => "edge-sim",
            Kind::Compare => "compare",
            Kind::Lclt => "lclt",
            Kind::Diagram => "diagram",
            Kind::Wegner => "wegner",
            Kind::Hankel => "hankel",
            Kind::Sweep => "sweep",
        }
    }
}

fn one_u8() -> u8 {
    1
}

fn one() -> usize {
    1
}

/// Ensemble without its seed; the master seed is supplied by the config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleBlock {
    #[serde(default = "one_u8")]
    pub beta: u8,
    #[serde(default)]
    pub entry_law: EntryLaw,
    pub profile: ProfileSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spike: Option<SpikeOperator>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub size: Option<usize>,
}

impl EnsembleBlock {
    pub fn spec(&self, seed: u64) -> Result<EnsembleSpec> {
        let s = EnsembleSpec {
            beta: self.beta,
            entry_law: self.entry_law,
            profile: self.profile.clone(),
            spike: self.spike.clone(),
            size: self.size,
            seed,
        };
        s.validate()?;
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSimParams {
    pub ensemble: EnsembleBlock,
    pub trials: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentBlock {
    pub orders: Vec<u32>,
    pub trials: u64,
    #[serde(default = "one_u8")]
    pub beta: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareParams {
    pub short: ProfileSpec,
    pub long: ProfileSpec,
    pub n: usize,
    #[serde(default)]
    pub entry_law: EntryLaw,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spike: Option<SpikeOperator>,
    /// Optional Monte Carlo check of one mixed moment on both ensembles.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moments: Option<MomentBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LcltParams {
    pub profile: ProfileSpec,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitBlock {
    pub regime: Regime,
    pub t: Vec<f64>,
    #[serde(default = "two")]
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    pub samples: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

fn two() -> f64 {
    2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramParams {
    /// Built-in catalog name, or `file` with a diagram JSON path.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalog: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orders: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spike: Option<SpikeOperator>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<LimitBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WegnerParams {
    /// Block torus side D.
    pub side: usize,
    #[serde(default = "one")]
    pub d: usize,
    pub lambda: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HankelParams {
    pub profile: ProfileSpec,
    pub n: usize,
    #[serde(default)]
    pub start: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    /// Bandwidths W substituted into the profile.
    pub widths: Vec<usize>,
    /// Rank-one spike strengths a; empty for an unspiked sweep.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub spike_strengths: Vec<f64>,
    /// Rescaled spike position in [0, 1).
    #[serde(default = "half")]
    pub spike_position: f64,
}

fn half() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepParams {
    pub ensemble: EnsembleBlock,
    pub trials: u64,
    pub grid: SweepGrid,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    EdgeSim(EdgeSimParams),
    Compare(CompareParams),
    Lclt(LcltParams),
    Diagram(DiagramParams),
    Wegner(WegnerParams),
    Hankel(HankelParams),
    Sweep(SweepParams),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    kind: Kind,
    seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    out: Option<String>,
    #[serde(default)]
    thresholds: Thresholds,
    #[serde(default = "default_budget")]
    budget: f64,
    params: serde_json::Value,
}

fn default_budget() -> f64 {
    DEFAULT_BUDGET
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub out: Option<String>,
    pub thresholds: Thresholds,
    /// Cost budget in units of N³·trials.
    pub budget: f64,
    pub params: Params,
}

fn typed<T: DeserializeOwned>(v: &serde_json::Value) -> Result<T> {
    serde_path_to_error::deserialize(v.clone())
        .map_err(|e| Error::Config { path: format!("params.{}", e.path()), message: e.inner().to_string() })
}

impl ExperimentConfig {
    pub fn kind(&self) -> Kind {
        match &self.params {
            Params::EdgeSim(_) => Kind::EdgeSim,
            Params::Compare(_) => Kind::Compare,
            Params::Lclt(_) => Kind::Lclt,
            Params::Diagram(_) => Kind::Diagram,
            Params::Wegner(_) => Kind::Wegner,
            Params::Hankel(_) => Kind::Hankel,
            Params::Sweep(_) => Kind::Sweep,
        }
    }

    fn raw(&self) -> RawConfig {
        let params = match &self.params {
            Params::EdgeSim(p) => serde_json::to_value(p),
            Params::Compare(p) => serde_json::to_value(p),
            Params::Lclt(p) => serde_json::to_value(p),
            Params::Diagram(p) => serde_json::to_value(p),
            Params::Wegner(p) => serde_json::to_value(p),
            Params::Hankel(p) => serde_json::to_value(p),
            Params::Sweep(p) => serde_json::to_value(p),
        }
        .expect("parameters serialize");
        RawConfig {
            kind: self.kind(),
            seed: self.seed,
            out: self.out.clone(),
            thresholds: self.thresholds,
            budget: self.budget,
            params,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.raw()).expect("config serializes")
    }

    /// Digest of the canonical form without the output directory, so moving
    /// the outputs does not change it.
    pub fn digest(&self) -> String {
        let mut raw = self.raw();
        raw.out = None;
        crate::output::digest_of(&raw)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.budget > 0.0) {
            return Err(Error::invalid("budget must be positive"));
        }
        match &self.params {
            Params::EdgeSim(p) => {
                p.ensemble.spec(self.seed)?;
                if p.trials == 0 {
                    return Err(Error::invalid("trials must be ≥ 1"));
                }
            }
            Params::Compare(p) => {
                p.short.validate()?;
                p.long.validate()?;
                if p.n == 0 {
                    return Err(Error::invalid("n must be ≥ 1"));
                }
            }
            Params::Lclt(p) => p.profile.validate()?,
            Params::Hankel(p) => p.profile.validate()?,
            Params::Diagram(p) => {
                if p.catalog.is_some() == p.file.is_some() {
                    return Err(Error::Config {
                        path: "params".into(),
                        message: "give exactly one of `catalog` or `file`".into(),
                    });
                }
                if p.profile.is_some() != p.orders.is_some() {
                    return Err(Error::Config {
                        path: "params".into(),
                        message: "`profile` and `orders` go together".into(),
                    });
                }
            }
            Params::Wegner(p) => {
                if p.side < 2 || p.d == 0 || !(0.0..1.0).contains(&p.lambda) {
                    return Err(Error::invalid("wegner needs side ≥ 2, d ≥ 1 and λ in [0, 1)"));
                }
            }
            Params::Sweep(p) => {
                p.ensemble.spec(self.seed)?;
                if p.grid.widths.is_empty() || p.trials == 0 {
                    return Err(Error::invalid("sweep needs widths and trials ≥ 1"));
                }
                if !(0.0..1.0).contains(&p.grid.spike_position) {
                    return Err(Error::invalid("spike position must lie in [0, 1)"));
                }
            }
        }
        Ok(())
    }
}

/// Parses and validates a config; unknown keys anywhere are errors.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let message = e.inner().to_string();
        Error::Config { path: if path == "." { message_field(&message).unwrap_or(path) } else { path }, message }
    })?;
    let params = match raw.kind {
        Kind::EdgeSim => Params::EdgeSim(typed(&raw.params)?),
        Kind::Compare => Params::Compare(typed(&raw.params)?),
        Kind::Lclt => Params::Lclt(typed(&raw.params)?),
        Kind::Diagram => Params::Diagram(typed(&raw.params)?),
        Kind::Wegner => Params::Wegner(typed(&raw.params)?),
        Kind::Hankel => Params::Hankel(typed(&raw.params)?),
        Kind::Sweep => Params::Sweep(typed(&raw.params)?),
    };
    let cfg = ExperimentConfig { seed: raw.seed, out: raw.out, thresholds: raw.thresholds, budget: raw.budget, params };
    cfg.validate()?;
    Ok(cfg)
}

/// Pulls the field name out of serde's "missing field `x`" message.
fn message_field(message: &str) -> Option<String> {
    let rest = message.strip_prefix("missing field `")?;
    Some(rest.split('`').next()?.to_string())
}
