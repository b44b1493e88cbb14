//! Parameter sweeps over bandwidth and spike strength.

use super::config::{ExperimentConfig, Params, SweepParams};
use super::run::{check_budget, edge_cost, edge_set_cached, out_dir, write_csv};
use crate::ensembles::{ks_distance, EdgeSampleSet, EnsembleSpec};
use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::special::ReferenceLaw;
use crate::spike::{SpikeOperator, SpikePositions, SpikeStrengths};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

const SWEEP_STREAM: u64 = 31;

/// γ_N within this factor of 1 counts as the critical row of the phase table.
pub const CRITICAL_BAND: f64 = 2.0;

pub const SUMMARY_COLUMNS: &str = "point,W,a,regime,N,trials,digest,mean_rescaled,mean_ipr,ks_gumbel,ks_tw1";
pub const PHASE_COLUMNS: &str = "regime,signal,predicted,points,mean_rescaled,mean_ipr,ks_gumbel,ks_tw1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseRegime {
    Subcritical,
    Critical,
    Supercritical,
}

impl PhaseRegime {
    /// Row of the phase table from γ_N = W^{3α/(3α−1)}/N.
    pub fn of_gamma(gamma_n: f64) -> Self {
        if gamma_n < 1.0 / CRITICAL_BAND {
            PhaseRegime::Subcritical
        } else if gamma_n > CRITICAL_BAND {
            PhaseRegime::Supercritical
        } else {
            PhaseRegime::Critical
        }
    }

    fn name(&self) -> &'static str {
        match self {
            PhaseRegime::Subcritical => "subcritical",
            PhaseRegime::Critical => "critical",
            PhaseRegime::Supercritical => "supercritical",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Signal {
    Weak,
    Intermediate,
    Strong,
}

impl Signal {
    pub fn of(a: f64) -> Self {
        if (a - 1.0).abs() <= 1e-12 {
            Signal::Intermediate
        } else if a < 1.0 {
            Signal::Weak
        } else {
            Signal::Strong
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Signal::Weak => "a<1",
            Signal::Intermediate => "a=1",
            Signal::Strong => "a>1",
        }
    }
}

/// Expected edge statistics in each cell of the phase diagram.
pub fn predicted_phase(regime: PhaseRegime, signal: Signal) -> &'static str {
    match (regime, signal) {
        (_, Signal::Strong) => "outliers",
        (PhaseRegime::Subcritical, _) => "poisson",
        (PhaseRegime::Critical, Signal::Weak) => "transition",
        (PhaseRegime::Critical, Signal::Intermediate) => "tricritical",
        (PhaseRegime::Supercritical, Signal::Weak) => "airy",
        (PhaseRegime::Supercritical, Signal::Intermediate) => "bbp",
    }
}

/// One row of the sweep summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub point: usize,
    #[serde(rename = "W")]
    pub width: usize,
    pub a: Option<f64>,
    pub regime: PhaseRegime,
    #[serde(rename = "N")]
    pub size: usize,
    pub trials: u64,
    pub digest: String,
    pub mean_rescaled: f64,
    pub mean_ipr: f64,
    pub ks_gumbel: f64,
    pub ks_tw1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
    pub files: Vec<PathBuf>,
    pub computed: usize,
    pub reused: usize,
}

/// Grid in row-major order: widths outer, spike strengths inner.
pub fn sweep_specs(p: &SweepParams, seed: u64) -> Result<Vec<(usize, Option<f64>, EnsembleSpec)>> {
    let strengths: Vec<Option<f64>> = if p.grid.spike_strengths.is_empty() {
        vec![None]
    } else {
        p.grid.spike_strengths.iter().map(|&a| Some(a)).collect()
    };
    let mut out = Vec::new();
    for &w in &p.grid.widths {
        for &a in &strengths {
            let idx = out.len() as u64;
            let mut block = p.ensemble.clone();
            block.profile.width = w;
            if let Some(a) = a {
                block.spike = Some(SpikeOperator {
                    strengths: SpikeStrengths::Eigenvalues(vec![a]),
                    vectors: None,
                    positions: SpikePositions::Rescaled(vec![p.grid.spike_position]),
                });
            }
            out.push((w, a, block.spec(derive_seed(seed, SWEEP_STREAM, idx))?));
        }
    }
    Ok(out)
}

fn point_of(idx: usize, width: usize, a: Option<f64>, set: &EdgeSampleSet) -> Result<SweepPoint> {
    let r = set.rescaled();
    Ok(SweepPoint {
        point: idx,
        width,
        a,
        regime: PhaseRegime::of_gamma(set.meta.gamma_n),
        size: set.meta.spec.dim(),
        trials: set.meta.trials,
        digest: set.meta.digest.clone(),
        mean_rescaled: r.iter().sum::<f64>() / r.len() as f64,
        mean_ipr: set.mean_ipr(),
        ks_gumbel: ks_distance(&r, ReferenceLaw::Gumbel, true)?,
        ks_tw1: ks_distance(&r, ReferenceLaw::Tw1, true)?,
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn summary_rows(points: &[SweepPoint]) -> Vec<String> {
    points
        .iter()
        .map(|p| {
            format!(
                "{},{},{},{},{},{},{},{},{},{},{}",
                p.point,
                p.width,
                fmt_opt(p.a),
                p.regime.name(),
                p.size,
                p.trials,
                p.digest,
                p.mean_rescaled,
                p.mean_ipr,
                p.ks_gumbel,
                p.ks_tw1
            )
        })
        .collect()
}

/// 3×3 table of regime × signal with cell means; empty cells keep blank statistics.
pub fn phase_table_rows(points: &[SweepPoint]) -> Vec<String> {
    let mut rows = Vec::with_capacity(9);
    for regime in [PhaseRegime::Subcritical, PhaseRegime::Critical, PhaseRegime::Supercritical] {
        for signal in [Signal::Weak, Signal::Intermediate, Signal::Strong] {
            let cell: Vec<&SweepPoint> =
                points.iter().filter(|p| p.regime == regime && p.a.map(Signal::of) == Some(signal)).collect();
            let mean = |f: fn(&SweepPoint) -> f64| {
                (!cell.is_empty()).then(|| cell.iter().map(|p| f(p)).sum::<f64>() / cell.len() as f64)
            };
            rows.push(format!(
                "{},{},{},{},{},{},{},{}",
                regime.name(),
                signal.name(),
                predicted_phase(regime, signal),
                cell.len(),
                fmt_opt(mean(|p| p.mean_rescaled)),
                fmt_opt(mean(|p| p.mean_ipr)),
                fmt_opt(mean(|p| p.ks_gumbel)),
                fmt_opt(mean(|p| p.ks_tw1)),
            ));
        }
    }
    rows
}

pub(crate) fn summary_path(dir: &Path, digest: &str) -> PathBuf {
    dir.join(format!("sweep-{digest}.csv"))
}

pub(crate) fn phase_path(dir: &Path, digest: &str) -> PathBuf {
    dir.join(format!("sweep-{digest}.phase-table.csv"))
}

pub(crate) fn write_phase_table(dir: &Path, digest: &str, seed: u64, points: &[SweepPoint]) -> Result<PathBuf> {
    let path = phase_path(dir, digest);
    write_csv(&path, digest, seed, PHASE_COLUMNS, &phase_table_rows(points))?;
    Ok(path)
}

/// Reads a sweep summary back, skipping the digest comment.
pub fn load_summary(path: &Path) -> Result<Vec<SweepPoint>> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path)?;
    Ok(rdr.deserialize().collect::<std::result::Result<Vec<SweepPoint>, _>>()?)
}

/// Runs every grid point (in parallel), reusing artifacts whose digest matches,
/// and writes the summary plus the phase table for spiked sweeps.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    let Params::Sweep(p) = &cfg.params else {
        return Err(Error::invalid("run_sweep needs a sweep config"));
    };
    cfg.validate()?;
    let specs = sweep_specs(p, cfg.seed)?;
    let cost: f64 = specs.iter().map(|(_, _, s)| edge_cost(s.dim(), p.trials)).sum();
    check_budget(cost, cfg.budget)?;
    let dir = out_dir(cfg);
    let done: Vec<(SweepPoint, bool)> = specs
        .par_iter()
        .enumerate()
        .map(|(i, (w, a, spec))| {
            let stem = format!("edge-{}", spec.digest());
            let (set, reused) = edge_set_cached(spec, p.trials, &dir, &stem)?;
            Ok((point_of(i, *w, *a, &set)?, reused))
        })
        .collect::<Result<_>>()?;
    let reused = done.iter().filter(|d| d.1).count();
    let points: Vec<SweepPoint> = done.into_iter().map(|d| d.0).collect();
    let digest = cfg.digest();
    let mut files: Vec<PathBuf> = points
        .iter()
        .flat_map(|pt| [dir.join(format!("edge-{}.csv", pt.digest)), dir.join(format!("edge-{}.json", pt.digest))])
        .collect();
    let summary = summary_path(&dir, &digest);
    write_csv(&summary, &digest, cfg.seed, SUMMARY_COLUMNS, &summary_rows(&points))?;
    files.push(summary);
    if !p.grid.spike_strengths.is_empty() {
        files.push(write_phase_table(&dir, &digest, cfg.seed, &points)?);
    }
    let computed = points.len() - reused;
    Ok(SweepResult { points, files, computed, reused })
}
