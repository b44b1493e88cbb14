//! Declarative variance profiles.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphaStableParams {
    pub alpha: f64,
    #[serde(default = "one")]
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerLawParams {
    /// Tail exponent T: f(x) = (1 + |x/s|²)^{-T/2}.
    pub tail: f64,
    /// Scale s; defaults to unit variance in d = 1 when T > 3, else 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncatedGaussianParams {
    pub sigma: f64,
    /// Support radius in units of sigma.
    #[serde(default = "four")]
    pub cutoff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TabulatedParams {
    /// Grid spacing; `values[i]` is f at radius i·step, linear in between, 0 beyond.
    pub step: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HankelParams {
    pub base: Box<BaseKind>,
    pub center: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WegnerParams {
    #[serde(rename = "D")]
    pub side: usize,
    #[serde(rename = "M")]
    pub block: usize,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterpolatedParams {
    pub base: Box<BaseKind>,
    pub lambda: f64,
}

/// A profile kind nested inside Hankel/Interpolated: `{kind, params}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawKind", into = "RawKind")]
pub struct BaseKind(pub ProfileKind);

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind {
    Flat,
    AlphaStable(AlphaStableParams),
    PowerLawTail(PowerLawParams),
    TruncatedGaussian(TruncatedGaussianParams),
    Tabulated(TabulatedParams),
    Hankel(HankelParams),
    WegnerBlock(WegnerParams),
    Interpolated(InterpolatedParams),
}

fn one() -> f64 {
    1.0
}
fn four() -> f64 {
    4.0
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawKind {
    kind: String,
    #[serde(default)]
    params: Value,
}

fn parse_params<T: serde::de::DeserializeOwned>(kind: &str, v: Value) -> Result<T> {
    let v = if v.is_null() { Value::Object(Default::default()) } else { v };
    serde_path_to_error::deserialize(v)
        .map_err(|e| Error::Config { path: format!("params.{}", e.path()), message: format!("{kind}: {}", e.inner()) })
}

impl ProfileKind {
    fn from_raw(kind: &str, params: Value) -> Result<Self> {
        Ok(match kind {
            "Flat" => {
                let _: Empty = parse_params(kind, params)?;
                ProfileKind::Flat
            }
            "AlphaStable" => ProfileKind::AlphaStable(parse_params(kind, params)?),
            "PowerLawTail" => ProfileKind::PowerLawTail(parse_params(kind, params)?),
            "TruncatedGaussian" => ProfileKind::TruncatedGaussian(parse_params(kind, params)?),
            "Tabulated" => ProfileKind::Tabulated(parse_params(kind, params)?),
            "Hankel" => ProfileKind::Hankel(parse_params(kind, params)?),
            "WegnerBlock" => ProfileKind::WegnerBlock(parse_params(kind, params)?),
            "Interpolated" => ProfileKind::Interpolated(parse_params(kind, params)?),
            other => {
                return Err(Error::Config { path: "kind".into(), message: format!("unknown profile kind `{other}`") })
            }
        })
    }

    fn to_raw(&self) -> (String, Value) {
        let v = |x: serde_json::Result<Value>| x.expect("profile params serialize");
        match self {
            ProfileKind::Flat => ("Flat".into(), Value::Object(Default::default())),
            ProfileKind::AlphaStable(p) => ("AlphaStable".into(), v(serde_json::to_value(p))),
            ProfileKind::PowerLawTail(p) => ("PowerLawTail".into(), v(serde_json::to_value(p))),
            ProfileKind::TruncatedGaussian(p) => ("TruncatedGaussian".into(), v(serde_json::to_value(p))),
            ProfileKind::Tabulated(p) => ("Tabulated".into(), v(serde_json::to_value(p))),
            ProfileKind::Hankel(p) => ("Hankel".into(), v(serde_json::to_value(p))),
            ProfileKind::WegnerBlock(p) => ("WegnerBlock".into(), v(serde_json::to_value(p))),
            ProfileKind::Interpolated(p) => ("Interpolated".into(), v(serde_json::to_value(p))),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Empty {}

impl TryFrom<RawKind> for BaseKind {
    type Error = Error;
    fn try_from(r: RawKind) -> Result<Self> {
        Ok(BaseKind(ProfileKind::from_raw(&r.kind, r.params)?))
    }
}

impl From<BaseKind> for RawKind {
    fn from(b: BaseKind) -> Self {
        let (kind, params) = b.0.to_raw();
        RawKind { kind, params }
    }
}

/// Variance profile with its torus geometry. JSON keys: `{kind, params, d, L, W}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile", into = "RawProfile")]
pub struct ProfileSpec {
    pub kind: ProfileKind,
    pub d: usize,
    pub side: usize,
    pub width: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    kind: String,
    #[serde(default)]
    params: Value,
    d: usize,
    #[serde(rename = "L")]
    side: usize,
    #[serde(rename = "W")]
    width: usize,
}

impl TryFrom<RawProfile> for ProfileSpec {
    type Error = Error;
    fn try_from(r: RawProfile) -> Result<Self> {
        let spec =
            ProfileSpec { kind: ProfileKind::from_raw(&r.kind, r.params)?, d: r.d, side: r.side, width: r.width };
        spec.validate()?;
        Ok(spec)
    }
}

impl From<ProfileSpec> for RawProfile {
    fn from(p: ProfileSpec) -> Self {
        let (kind, params) = p.kind.to_raw();
        RawProfile { kind, params, d: p.d, side: p.side, width: p.width }
    }
}

impl ProfileSpec {
    pub fn new(kind: ProfileKind, d: usize, side: usize, width: usize) -> Result<Self> {
        let s = Self { kind, d, side, width };
        s.validate()?;
        Ok(s)
    }

    /// One-dimensional α-stable band profile.
    pub fn alpha_stable(alpha: f64, side: usize, width: usize) -> Result<Self> {
        Self::new(ProfileKind::AlphaStable(AlphaStableParams { alpha, scale: 1.0 }), 1, side, width)
    }

    pub fn flat(side: usize) -> Result<Self> {
        Self::new(ProfileKind::Flat, 1, side, (side / 2).max(1))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut de = serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(&mut de)
            .map_err(|e| Error::Config { path: e.path().to_string(), message: e.inner().to_string() })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("profile serializes")
    }

    /// Stability index of the step law: α for stable profiles, min(T − 1, 2) for
    /// power-law tails with T < 3, and 2 for finite-variance steps.
    pub fn stability_index(&self) -> f64 {
        fn of(kind: &ProfileKind) -> f64 {
            match kind {
                ProfileKind::AlphaStable(p) => p.alpha,
                ProfileKind::PowerLawTail(p) if p.tail < 3.0 => p.tail - 1.0,
                ProfileKind::Hankel(h) => of(&h.base.0),
                ProfileKind::Interpolated(i) => of(&i.base.0),
                _ => 2.0,
            }
        }
        of(&self.kind)
    }

    /// Whether every state couples to every other at comparable strength.
    pub fn is_mean_field(&self) -> bool {
        matches!(self.kind, ProfileKind::Flat)
    }

    /// Number of states.
    pub fn states(&self) -> usize {
        match &self.kind {
            ProfileKind::WegnerBlock(w) => w.block * w.side.pow(self.d as u32),
            _ => self.side.pow(self.d as u32),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::invalid("dimension d must be ≥ 1"));
        }
        if let ProfileKind::WegnerBlock(w) = &self.kind {
            if w.side < 2 {
                return Err(Error::invalid("Wegner side D must be ≥ 2"));
            }
            if w.block < 1 {
                return Err(Error::invalid("Wegner block size M must be ≥ 1"));
            }
            if !(0.0..1.0).contains(&w.lambda) {
                return Err(Error::invalid(format!("Wegner coupling λ = {} outside [0, 1)", w.lambda)));
            }
            return Ok(());
        }
        if self.side < 2 {
            return Err(Error::invalid("torus side L must be ≥ 2"));
        }
        if self.width < 1 || 2 * self.width > self.side {
            return Err(Error::invalid(format!(
                "bandwidth W = {} must lie in [1, L/2] with L = {}",
                self.width, self.side
            )));
        }
        validate_kind(&self.kind, self.d, self.side)
    }
}

fn validate_kind(kind: &ProfileKind, d: usize, side: usize) -> Result<()> {
    match kind {
        ProfileKind::Flat => Ok(()),
        ProfileKind::AlphaStable(p) => {
            if !(p.alpha > 0.0 && p.alpha <= 2.0) {
                return Err(Error::invalid(format!("α = {} outside (0, 2]", p.alpha)));
            }
            if !(p.scale > 0.0) {
                return Err(Error::invalid("α-stable scale must be positive"));
            }
            Ok(())
        }
        ProfileKind::PowerLawTail(p) => {
            if !(p.tail > d as f64) {
                return Err(Error::invalid(format!("tail exponent T = {} must exceed d = {d}", p.tail)));
            }
            if let Some(s) = p.scale {
                if !(s > 0.0) {
                    return Err(Error::invalid("power-law scale must be positive"));
                }
            }
            Ok(())
        }
        ProfileKind::TruncatedGaussian(p) => {
            if !(p.sigma > 0.0 && p.cutoff > 0.0) {
                return Err(Error::invalid("truncated Gaussian needs σ > 0 and cutoff > 0"));
            }
            Ok(())
        }
        ProfileKind::Tabulated(p) => {
            if !(p.step > 0.0) || p.values.is_empty() {
                return Err(Error::invalid("tabulated profile needs step > 0 and at least one value"));
            }
            if let Some(v) = p.values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                return Err(Error::invalid(format!("tabulated profile has invalid value {v}")));
            }
            if p.values.iter().all(|&v| v == 0.0) {
                return Err(Error::invalid("tabulated profile is identically zero"));
            }
            Ok(())
        }
        ProfileKind::Hankel(h) => {
            if h.center.len() != d || h.center.iter().any(|&c| c >= side) {
                return Err(Error::invalid("Hankel center must be a torus point of dimension d"));
            }
            match &h.base.0 {
                ProfileKind::Hankel(_) | ProfileKind::WegnerBlock(_) | ProfileKind::Interpolated(_) => {
                    Err(Error::invalid("Hankel base must be a translation-invariant band profile"))
                }
                k => validate_kind(k, d, side),
            }
        }
        ProfileKind::WegnerBlock(_) => Err(Error::invalid("Wegner profile cannot be nested")),
        ProfileKind::Interpolated(p) => {
            if !(0.0..=1.0).contains(&p.lambda) {
                return Err(Error::invalid(format!("interpolation weight λ = {} outside [0, 1]", p.lambda)));
            }
            match &p.base.0 {
                ProfileKind::WegnerBlock(_) | ProfileKind::Interpolated(_) => {
                    Err(Error::invalid("interpolation base must be a band or Hankel profile"))
                }
                k => validate_kind(k, d, side),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_roundtrip() {
        let text = r#"{"kind":"Hankel","params":{"base":{"kind":"AlphaStable","params":{"alpha":2.0}},"center":[10]},"d":1,"L":64,"W":4}"#;
        let spec = ProfileSpec::from_json(text).unwrap();
        assert!(matches!(spec.kind, ProfileKind::Hankel(_)));
        let back = ProfileSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(spec, back);
    }

    #[test]
    fn rejects_bad_input() {
        let wide = r#"{"kind":"Flat","d":1,"L":8,"W":5}"#;
        assert!(ProfileSpec::from_json(wide).is_err());
        let unknown = r#"{"kind":"AlphaStable","params":{"alpha":2.0,"beta":1},"d":1,"L":8,"W":2}"#;
        let err = ProfileSpec::from_json(unknown).unwrap_err().to_string();
        assert!(err.contains("beta"), "{err}");
        let neg = r#"{"kind":"Tabulated","params":{"step":1.0,"values":[1.0,-0.5]},"d":1,"L":8,"W":2}"#;
        assert!(ProfileSpec::from_json(neg).is_err());
        let lam = r#"{"kind":"WegnerBlock","params":{"D":4,"M":2,"lambda":1.0},"d":1,"L":4,"W":1}"#;
        assert!(ProfileSpec::from_json(lam).is_err());
        let extra = r#"{"kind":"Flat","d":1,"L":8,"W":2,"N":8}"#;
        assert!(ProfileSpec::from_json(extra).is_err());
    }

    #[test]
    fn wegner_state_count() {
        let w = ProfileSpec::new(ProfileKind::WegnerBlock(WegnerParams { side: 4, block: 3, lambda: 0.5 }), 2, 4, 1)
            .unwrap();
        assert_eq!(w.states(), 48);
    }
}
