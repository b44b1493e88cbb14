//! Persisted Monte Carlo edge samples.

use super::edge::{edge_scale, ipr, EdgeRegime};
use super::sample::Ensemble;
use super::spec::EnsembleSpec;
use crate::error::{Error, Result};
use crate::output::{csv_header_comment, write_atomic};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub trial: u64,
    pub seed: u64,
    pub lambda_max: f64,
    pub rescaled: f64,
    pub ipr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeMeta {
    pub digest: String,
    pub spec: EnsembleSpec,
    pub trials: u64,
    pub s_n: f64,
    pub gamma_n: f64,
    pub regime: EdgeRegime,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSampleSet {
    pub meta: EdgeMeta,
    pub records: Vec<EdgeRecord>,
    /// |ψ_i|² of the top eigenvector from trial 0, kept for localization plots.
    pub profile: Option<Vec<f64>>,
}

const CSV_COLUMNS: &str = "trial,seed,lambda_max,rescaled,ipr";

impl EdgeSampleSet {
    pub fn rescaled(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.rescaled).collect()
    }

    pub fn lambda_max(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.lambda_max).collect()
    }

    pub fn mean_ipr(&self) -> f64 {
        self.records.iter().map(|r| r.ipr).sum::<f64>() / self.records.len() as f64
    }

    pub fn check(&self) -> Result<()> {
        if self.records.len() as u64 != self.meta.trials {
            return Err(Error::invalid(format!("{} records for {} trials", self.records.len(), self.meta.trials)));
        }
        for r in &self.records {
            let want = (r.lambda_max - 2.0) / self.meta.s_n;
            if (r.rescaled - want).abs() > 1e-9 * want.abs().max(1.0) {
                return Err(Error::invalid(format!("trial {} rescaling inconsistent with s_N", r.trial)));
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut s = csv_header_comment(&self.meta.digest, self.meta.spec.seed);
        s.push_str(CSV_COLUMNS);
        s.push('\n');
        for r in &self.records {
            s.push_str(&format!("{},{},{},{},{}\n", r.trial, r.seed, r.lambda_max, r.rescaled, r.ipr));
        }
        s
    }

    fn paths(dir: &Path, stem: &str) -> (PathBuf, PathBuf, PathBuf) {
        (dir.join(format!("{stem}.csv")), dir.join(format!("{stem}.json")), dir.join(format!("{stem}.profile.csv")))
    }

    /// Writes `stem.csv`, the `stem.json` metadata sidecar and, when present,
    /// the eigenvector profile.
    pub fn save(&self, dir: &Path, stem: &str) -> Result<()> {
        let (csv, json, prof) = Self::paths(dir, stem);
        if let Some(p) = &self.profile {
            let mut s = csv_header_comment(&self.meta.digest, self.meta.spec.seed);
            s.push_str("coordinate,amplitude_sq\n");
            for (i, v) in p.iter().enumerate() {
                s.push_str(&format!("{i},{v}\n"));
            }
            write_atomic(&prof, s.as_bytes())?;
        }
        write_atomic(&csv, self.to_csv().as_bytes())?;
        write_atomic(&json, serde_json::to_string_pretty(&self.meta)?.as_bytes())?;
        Ok(())
    }

    pub fn load(dir: &Path, stem: &str) -> Result<Self> {
        let (csv, json, prof) = Self::paths(dir, stem);
        let meta: EdgeMeta = serde_json::from_str(&std::fs::read_to_string(&json)?)?;
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(&csv)?;
        let records = rdr.deserialize().collect::<std::result::Result<Vec<EdgeRecord>, _>>()?;
        let profile = if prof.exists() {
            let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(&prof)?;
            let rows = r.deserialize().collect::<std::result::Result<Vec<(usize, f64)>, _>>()?;
            Some(rows.into_iter().map(|(_, v)| v).collect())
        } else {
            None
        };
        let set = Self { meta, records, profile };
        set.check()?;
        Ok(set)
    }
}

/// Runs `trials` independent draws; results do not depend on the thread count.
pub fn simulate_edge(spec: &EnsembleSpec, trials: u64) -> Result<EdgeSampleSet> {
    if trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    let ens = Ensemble::new(spec)?;
    let alpha = spec.profile.stability_index();
    let n = spec.dim();
    let width = if spec.profile.is_mean_field() { n as f64 } else { spec.profile.width as f64 };
    let scale = edge_scale(n, width, alpha);
    let out: Vec<(EdgeRecord, Option<Vec<f64>>)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let x = ens.sample(t);
            let (lam, amp) = x.top_eigenpair()?;
            let obs = edge_observables_from(lam, &amp, scale.s_n);
            let rec = EdgeRecord { trial: t, seed: ens.trial_seed(t), lambda_max: obs.0, rescaled: obs.1, ipr: obs.2 };
            Ok((rec, (t == 0).then_some(amp)))
        })
        .collect::<Result<_>>()?;
    let mut profile = None;
    let mut records = Vec::with_capacity(out.len());
    for (r, p) in out {
        if p.is_some() {
            profile = p;
        }
        records.push(r);
    }
    let meta = EdgeMeta {
        digest: spec.digest(),
        spec: spec.clone(),
        trials,
        s_n: scale.s_n,
        gamma_n: scale.gamma_n,
        regime: scale.regime,
        alpha,
    };
    Ok(EdgeSampleSet { meta, records, profile })
}

fn edge_observables_from(lam: f64, amp: &[f64], s_n: f64) -> (f64, f64, f64) {
    (lam, (lam - 2.0) / s_n, ipr(amp))
}
