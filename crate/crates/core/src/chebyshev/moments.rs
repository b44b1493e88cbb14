//! Monte Carlo Chebyshev moments, their cumulants and sinc statistics.

use super::trace::{chebyshev_u, trace_from_powers, trace_powers};
use crate::ensembles::Ensemble;
use crate::error::{Error, Result};
use crate::output::csv_header_comment;
use crate::special::sinc_test_function;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentRequest {
    pub orders: Vec<u32>,
    pub trials: u64,
    pub seed: u64,
}

impl MomentRequest {
    pub fn validate(&self) -> Result<()> {
        if self.orders.is_empty() || self.orders.contains(&0) {
            return Err(Error::invalid("moment orders must be positive integers"));
        }
        if self.trials < 1 {
            return Err(Error::invalid("need at least one trial"));
        }
        Ok(())
    }

    /// Parity of Σ n_j; odd totals have vanishing moments by symmetry.
    pub fn total_is_even(&self) -> bool {
        self.orders.iter().sum::<u32>() % 2 == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub estimate: f64,
    pub stderr: f64,
    pub trials: u64,
}

impl Estimate {
    pub fn from_samples(v: &[f64]) -> Self {
        let n = v.len() as f64;
        let m = v.iter().sum::<f64>() / n;
        let var = if v.len() > 1 { v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0) } else { 0.0 };
        Estimate { estimate: m, stderr: (var / n).sqrt(), trials: v.len() as u64 }
    }

    /// Whether two independent estimates agree within `k` combined standard errors.
    pub fn agrees_with(&self, other: &Estimate, k: f64) -> bool {
        (self.estimate - other.estimate).abs() <= k * self.stderr.hypot(other.stderr)
    }
}

/// Per-trial Tr U_{n_j}(X/2) for every requested order.
fn per_trial_traces(ens: &Ensemble, orders: &[u32], trials: u64, seed: u64) -> Vec<Vec<f64>> {
    let kmax = *orders.iter().max().expect("nonempty orders");
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let x = ens.sample_seeded(seed, t);
            let pows = trace_powers(&x, kmax);
            orders.iter().map(|&n| trace_from_powers(&pows, n)).collect()
        })
        .collect()
}

/// E[Π_j Tr U_{n_j}(X/2)] with its standard error.
pub fn mixed_chebyshev_moment(ens: &Ensemble, req: &MomentRequest) -> Result<Estimate> {
    req.validate()?;
    let traces = per_trial_traces(ens, &req.orders, req.trials, req.seed);
    let prods: Vec<f64> = traces.iter().map(|t| t.iter().product()).collect();
    Ok(Estimate::from_samples(&prods))
}

/// Subsets of [s] are bit masks; bit j stands for order n_{j+1}.
pub type Subset = u32;

/// Moment estimates over every nonempty subset of the orders, from shared trials.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    pub orders: Vec<u32>,
    pub seed: u64,
    pub entries: BTreeMap<Subset, Estimate>,
}

pub fn moment_table(ens: &Ensemble, req: &MomentRequest) -> Result<MomentTable> {
    req.validate()?;
    let s = req.orders.len();
    if s > 16 {
        return Err(Error::invalid("at most 16 orders in a moment table"));
    }
    let traces = per_trial_traces(ens, &req.orders, req.trials, req.seed);
    let mut entries = BTreeMap::new();
    for mask in 1..(1u32 << s) {
        let v: Vec<f64> =
            traces.iter().map(|t| (0..s).filter(|j| mask >> j & 1 == 1).map(|j| t[j]).product()).collect();
        entries.insert(mask, Estimate::from_samples(&v));
    }
    Ok(MomentTable { orders: req.orders.clone(), seed: req.seed, entries })
}

fn subset_label(mask: Subset) -> String {
    (0..32).filter(|j| mask >> j & 1 == 1).map(|j| (j + 1).to_string()).collect::<Vec<_>>().join(";")
}

impl MomentTable {
    pub fn values(&self) -> BTreeMap<Subset, f64> {
        self.entries.iter().map(|(&k, e)| (k, e.estimate)).collect()
    }

    /// Columns `subset,orders,estimate,stderr,trials,seed`.
    pub fn to_csv(&self, digest: &str) -> String {
        let mut out = csv_header_comment(digest, self.seed);
        out.push_str("subset,orders,estimate,stderr,trials,seed\n");
        for (&mask, e) in &self.entries {
            let orders: Vec<String> =
                (0..self.orders.len()).filter(|j| mask >> j & 1 == 1).map(|j| self.orders[j].to_string()).collect();
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                subset_label(mask),
                orders.join(";"),
                e.estimate,
                e.stderr,
                e.trials,
                self.seed
            ));
        }
        out
    }
}

/// κ(S) = m(S) − Σ_{T ⊊ S, min S ∈ T} κ(T)·m(S∖T), which is the partition
/// recursion grouped by the block containing the smallest element.
pub fn cumulants_from_moments(moments: &BTreeMap<Subset, f64>) -> Result<BTreeMap<Subset, f64>> {
    let full = moments.keys().fold(0, |a, &k| a | k);
    let mut kappa = BTreeMap::new();
    let mut masks: Vec<Subset> = (1..=full).filter(|m| m & !full == 0).collect();
    masks.sort_by_key(|m| m.count_ones());
    for s in masks {
        let ms =
            *moments.get(&s).ok_or_else(|| Error::Missing(format!("moment for subset {{{}}}", subset_label(s))))?;
        let low = s & s.wrapping_neg();
        let rest = s ^ low;
        let mut acc = ms;
        // proper subsets T of S containing `low`: T = low | u, u ⊊ rest
        let mut u = rest;
        loop {
            u = (u.wrapping_sub(1)) & rest;
            let t = low | u;
            if t != s {
                let comp = s ^ t;
                let mc = *moments
                    .get(&comp)
                    .ok_or_else(|| Error::Missing(format!("moment for subset {{{}}}", subset_label(comp))))?;
                acc -= kappa[&t] * mc;
            }
            if u == 0 {
                break;
            }
        }
        kappa.insert(s, acc);
    }
    Ok(kappa)
}

/// Sum over set partitions of Π κ(block); inverse of the cumulant map.
pub fn moments_from_cumulants(kappa: &BTreeMap<Subset, f64>) -> BTreeMap<Subset, f64> {
    fn partitions_sum(s: Subset, kappa: &BTreeMap<Subset, f64>) -> f64 {
        if s == 0 {
            return 1.0;
        }
        let low = s & s.wrapping_neg();
        let rest = s ^ low;
        let mut total = 0.0;
        let mut u = rest;
        loop {
            let block = low | u;
            total += kappa.get(&block).copied().unwrap_or(0.0) * partitions_sum(s ^ block, kappa);
            if u == 0 {
                break;
            }
            u = (u - 1) & rest;
        }
        total
    }
    kappa.keys().map(|&s| (s, partitions_sum(s, kappa))).collect()
}

/// Average over trials of Σ_λ sinc_m(t, (λ−2)/s_N).
pub fn sinc_statistic(eigenvalues: &[Vec<f64>], m: u32, t: f64, s_n: f64) -> Result<Estimate> {
    if !(s_n > 0.0) {
        return Err(Error::invalid("edge scale s_N must be positive"));
    }
    if eigenvalues.is_empty() {
        return Err(Error::invalid("no eigenvalue samples"));
    }
    let per: Vec<f64> = eigenvalues
        .iter()
        .map(|ev| ev.iter().map(|&l| sinc_test_function(m, t, (l - 2.0) / s_n)).sum::<Result<f64>>())
        .collect::<Result<_>>()?;
    Ok(Estimate::from_samples(&per))
}

/// Chebyshev order matched to a sinc scale: ⌊t·s_N^{−1/2}⌋.
pub fn matched_order(t: f64, s_n: f64) -> u32 {
    (t / s_n.sqrt()).floor() as u32
}

/// E Tr ((U_n(X/2)/(n+1))^m), the Chebyshev counterpart of the sinc statistic.
pub fn chebyshev_power_moment(ens: &Ensemble, n: u32, m: u32, trials: u64, seed: u64) -> Result<Estimate> {
    let per: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let ev = ens.sample_seeded(seed, t).eigenvalues()?;
            Ok(ev.iter().map(|&l| (chebyshev_u(n, 0.5 * l) / (n + 1) as f64).powi(m as i32)).sum())
        })
        .collect::<Result<_>>()?;
    Ok(Estimate::from_samples(&per))
}

/// Per-trial spectra.
pub fn sample_spectra(ens: &Ensemble, trials: u64, seed: u64) -> Result<Vec<Vec<f64>>> {
    (0..trials).into_par_iter().map(|t| ens.sample_seeded(seed, t).eigenvalues()).collect()
}
