//! Single-experiment runners.

use super::config::{
    CompareParams, DiagramParams, EdgeSimParams, ExperimentConfig, HankelParams, Kind, LcltParams, Params, WegnerParams,
};
use super::sweep::run_sweep;
use crate::chain::{build_variance_profile, hankel_step, wegner_block_kernel};
use crate::chebyshev::{mixed_chebyshev_moment, MomentRequest};
use crate::comparison::{comparison_report, lclt_residual};
use crate::diagrams::{
    catalog_diagram, diagram_function, diagram_upper_bound, limiting_diagram_function, upper_bound_b, Diagram,
    LimitRequest,
};
use crate::ensembles::{ks_distance, simulate_edge, EdgeSampleSet, Ensemble, EnsembleSpec, EntryLaw};
use crate::error::{Error, Result};
use crate::output::{csv_header_comment, write_atomic};
use crate::rng::derive_seed;
use crate::special::{skellam_kernel, ReferenceLaw, Side};
use serde::Serialize;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

/// Output directory used when the config gives none.
pub const DEFAULT_OUT: &str = "out";

const COMPARE_STREAM: u64 = 21;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub kind: Kind,
    pub digest: String,
    pub seed: u64,
    pub files: Vec<PathBuf>,
    pub summary: Value,
}

pub(crate) fn out_dir(cfg: &ExperimentConfig) -> PathBuf {
    PathBuf::from(cfg.out.as_deref().unwrap_or(DEFAULT_OUT))
}

/// Fails before any work when `cost` exceeds the budget.
pub fn check_budget(cost: f64, budget: f64) -> Result<()> {
    if cost > budget {
        return Err(Error::Budget { cost, budget });
    }
    Ok(())
}

/// JSON sidecar carrying the digest and master seed next to the payload.
pub(crate) fn write_json(path: &Path, digest: &str, seed: u64, payload: &Value) -> Result<()> {
    let doc = json!({ "digest": digest, "seed": seed, "result": payload });
    write_atomic(path, serde_json::to_string_pretty(&doc)?.as_bytes())
}

pub(crate) fn write_csv(path: &Path, digest: &str, seed: u64, columns: &str, rows: &[String]) -> Result<()> {
    let mut s = csv_header_comment(digest, seed);
    s.push_str(columns);
    s.push('\n');
    for r in rows {
        s.push_str(r);
        s.push('\n');
    }
    write_atomic(path, s.as_bytes())
}

/// Edge statistics of a sample set: means and standardized KS distances.
pub fn edge_summary(set: &EdgeSampleSet) -> Result<Value> {
    let r = set.rescaled();
    let mean = r.iter().sum::<f64>() / r.len() as f64;
    Ok(json!({
        "N": set.meta.spec.dim(),
        "trials": set.meta.trials,
        "regime": set.meta.regime,
        "s_n": set.meta.s_n,
        "mean_rescaled": mean,
        "mean_ipr": set.mean_ipr(),
        "ks_gumbel": ks_distance(&r, ReferenceLaw::Gumbel, true)?,
        "ks_tw1": ks_distance(&r, ReferenceLaw::Tw1, true)?,
    }))
}

/// Cost in the N³·trials units used by every budget.
pub fn edge_cost(n: usize, trials: u64) -> f64 {
    (n as f64).powi(3) * trials as f64
}

/// Loads `stem` from `dir` when its metadata digest matches, else simulates and saves.
pub(crate) fn edge_set_cached(
    spec: &EnsembleSpec,
    trials: u64,
    dir: &Path,
    stem: &str,
) -> Result<(EdgeSampleSet, bool)> {
    let digest = spec.digest();
    if dir.join(format!("{stem}.json")).exists() {
        if let Ok(set) = EdgeSampleSet::load(dir, stem) {
            if set.meta.digest == digest && set.meta.trials == trials {
                return Ok((set, true));
            }
        }
    }
    let set = simulate_edge(spec, trials)?;
    set.save(dir, stem)?;
    Ok((set, false))
}

fn run_edge_sim(cfg: &ExperimentConfig, p: &EdgeSimParams, dir: &Path) -> Result<(Vec<PathBuf>, Value)> {
    let spec = p.ensemble.spec(cfg.seed)?;
    check_budget(edge_cost(spec.dim(), p.trials), cfg.budget)?;
    let stem = format!("edge-{}", spec.digest());
    let (set, reused) = edge_set_cached(&spec, p.trials, dir, &stem)?;
    let mut summary = edge_summary(&set)?;
    summary["reused"] = json!(reused);
    summary["stem"] = json!(stem);
    let mut files = vec![dir.join(format!("{stem}.csv")), dir.join(format!("{stem}.json"))];
    if set.profile.is_some() {
        files.push(dir.join(format!("{stem}.profile.csv")));
    }
    Ok((files, summary))
}

fn theta_of(law: EntryLaw, beta: u8) -> Option<f64> {
    (law != EntryLaw::Gaussian).then(|| law.moment_constant(beta))
}

fn run_compare(cfg: &ExperimentConfig, p: &CompareParams, dir: &Path, digest: &str) -> Result<(Vec<PathBuf>, Value)> {
    let size = p.short.states();
    if let Some(m) = &p.moments {
        check_budget(2.0 * edge_cost(size, m.trials), cfg.budget)?;
    }
    let a = build_variance_profile(&p.short)?;
    let b = build_variance_profile(&p.long)?;
    if a.states != b.states {
        return Err(Error::StateMismatch(a.states, b.states));
    }
    let beta = p.moments.as_ref().map_or(1, |m| m.beta);
    let report = comparison_report(&a, &b, p.n, theta_of(p.entry_law, beta), p.spike.as_ref(), cfg.thresholds)?;
    let csv = dir.join(format!("compare-{digest}.csv"));
    write_atomic(&csv, report.to_csv(digest, cfg.seed).as_bytes())?;
    let mut summary = json!({ "report": report, "all_pass": report.all_pass() });
    if let Some(m) = &p.moments {
        let mut est = Vec::new();
        for (i, prof) in [&p.short, &p.long].into_iter().enumerate() {
            let spec = EnsembleSpec {
                beta: m.beta,
                entry_law: p.entry_law,
                profile: prof.clone(),
                spike: p.spike.clone(),
                size: None,
                seed: derive_seed(cfg.seed, COMPARE_STREAM, i as u64),
            };
            let ens = Ensemble::new(&spec)?;
            let req = MomentRequest { orders: m.orders.clone(), trials: m.trials, seed: spec.seed };
            est.push(mixed_chebyshev_moment(&ens, &req)?);
        }
        let diff = (est[0].estimate - est[1].estimate).abs();
        let combined = est[0].stderr.hypot(est[1].stderr);
        summary["moments"] = json!({
            "short": est[0],
            "long": est[1],
            "difference": diff,
            "combined_stderr": combined,
            "within_3_stderr": est[0].agrees_with(&est[1], 3.0),
        });
    }
    let js = dir.join(format!("compare-{digest}.json"));
    write_json(&js, digest, cfg.seed, &summary)?;
    Ok((vec![csv, js], summary))
}

fn run_lclt(cfg: &ExperimentConfig, p: &LcltParams, dir: &Path, digest: &str) -> Result<(Vec<PathBuf>, Value)> {
    let chain = build_variance_profile(&p.profile)?;
    let r = lclt_residual(&chain, p.profile.stability_index(), p.n)?;
    let csv = dir.join(format!("lclt-{digest}.csv"));
    write_csv(
        &csv,
        digest,
        cfg.seed,
        "n,residual,predicted_scale",
        &[format!("{},{},{}", p.n, r.residual, r.predicted_scale)],
    )?;
    Ok((vec![csv], json!(r)))
}

fn load_diagram(p: &DiagramParams) -> Result<Diagram> {
    match (&p.catalog, &p.file) {
        (Some(name), _) => catalog_diagram(name),
        (None, Some(path)) => Diagram::from_json(&std::fs::read_to_string(path)?),
        (None, None) => Err(Error::Missing("diagram source".into())),
    }
}

fn run_diagram(cfg: &ExperimentConfig, p: &DiagramParams, dir: &Path, digest: &str) -> Result<(Vec<PathBuf>, Value)> {
    let g = load_diagram(p)?;
    let report = g.validate();
    let mut summary = json!({ "validation": report });
    if report.valid {
        if let (Some(prof), Some(orders)) = (&p.profile, &p.orders) {
            let chain = build_variance_profile(prof)?;
            let n: usize = orders.iter().sum();
            let f = diagram_function(&g, &chain, p.spike.as_ref(), orders)?;
            let b = upper_bound_b(&chain, n.max(1))?;
            let (a, r) = p.spike.as_ref().map_or((0.0, 0), |s| (s.norm(), s.rank()));
            let bound = diagram_upper_bound(&g, chain.states, b, n, a, r)?;
            summary["exact"] =
                json!({ "orders": orders, "value": f, "b_n": b, "bound": bound, "within_bound": f <= bound });
        }
        if let Some(l) = &p.limit {
            let req = LimitRequest {
                regime: l.regime,
                t: l.t.clone(),
                alpha: l.alpha,
                tau: l.tau,
                samples: l.samples,
                seed: cfg.seed,
                tolerance: l.tolerance,
            };
            summary["limit"] = json!(limiting_diagram_function(&g, &req, p.spike.as_ref())?);
        }
    }
    let js = dir.join(format!("diagram-{digest}.json"));
    write_json(&js, digest, cfg.seed, &summary)?;
    Ok((vec![js], summary))
}

/// Coordinates of a flat index, last axis fastest.
fn coords(mut idx: usize, side: usize, d: usize) -> Vec<i64> {
    let mut c = vec![0; d];
    for a in (0..d).rev() {
        c[a] = (idx % side) as i64;
        idx /= side;
    }
    c
}

/// Block-walk kernel against the Skellam kernel at matched time τ = nλ/2.
pub fn wegner_vs_skellam(p: &WegnerParams) -> Result<(f64, f64, Vec<(usize, f64, f64)>)> {
    let pn = wegner_block_kernel(p.side, p.d, p.lambda, p.n)?;
    let tau = p.n as f64 * p.lambda / 2.0;
    let mut rows = Vec::with_capacity(pn.len());
    let mut sup: f64 = 0.0;
    for (k, &v) in pn.iter().enumerate() {
        let s = skellam_kernel(p.d, Side::Finite(p.side as u64), &coords(k, p.side, p.d), tau)?;
        sup = sup.max((v - s).abs());
        rows.push((k, v, s));
    }
    Ok((sup, tau, rows))
}

fn run_wegner(cfg: &ExperimentConfig, p: &WegnerParams, dir: &Path, digest: &str) -> Result<(Vec<PathBuf>, Value)> {
    let (sup, tau, rows) = wegner_vs_skellam(p)?;
    let csv = dir.join(format!("wegner-{digest}.csv"));
    let lines: Vec<String> = rows.iter().map(|(k, a, b)| format!("{k},{a},{b}")).collect();
    write_csv(&csv, digest, cfg.seed, "k,block_kernel,skellam", &lines)?;
    Ok((vec![csv], json!({ "tau": tau, "sup_error": sup })))
}

fn run_hankel(cfg: &ExperimentConfig, p: &HankelParams, dir: &Path, digest: &str) -> Result<(Vec<PathBuf>, Value)> {
    let chain = build_variance_profile(&p.profile)?;
    let step = hankel_step(&chain, p.n, p.start)?;
    let csv = dir.join(format!("hankel-{digest}.csv"));
    let lines: Vec<String> = step.distribution.iter().enumerate().map(|(x, v)| format!("{x},{v}")).collect();
    write_csv(&csv, digest, cfg.seed, "state,probability", &lines)?;
    let argmax = step.distribution.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| i).unwrap_or(0);
    Ok((vec![csv], json!({ "center": step.center, "argmax": argmax, "n": p.n })))
}

/// Validates, checks the budget, runs and writes every artifact under the output directory.
pub fn run(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.validate()?;
    let dir = out_dir(cfg);
    let digest = cfg.digest();
    let (files, summary) = match &cfg.params {
        Params::EdgeSim(p) => run_edge_sim(cfg, p, &dir)?,
        Params::Compare(p) => run_compare(cfg, p, &dir, &digest)?,
        Params::Lclt(p) => run_lclt(cfg, p, &dir, &digest)?,
        Params::Diagram(p) => run_diagram(cfg, p, &dir, &digest)?,
        Params::Wegner(p) => run_wegner(cfg, p, &dir, &digest)?,
        Params::Hankel(p) => run_hankel(cfg, p, &dir, &digest)?,
        Params::Sweep(_) => {
            let s = run_sweep(cfg)?;
            let summary = json!({ "points": s.points.len(), "computed": s.computed, "reused": s.reused });
            (s.files, summary)
        }
    };
    Ok(RunReport { kind: cfg.kind(), digest, seed: cfg.seed, files, summary })
}
