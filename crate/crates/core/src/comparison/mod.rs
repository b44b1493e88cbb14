//! Short-to-long comparison diagnostics for pairs of chains and local-limit
//! residuals.

use crate::chain::{PowerTable, ProfileKind, TorusChain};
use crate::error::{Error, Result};
use crate::output::csv_header_comment;
use crate::special::StableLaw;
use crate::spike::SpikeOperator;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Per-step differences and the running upper bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// b_i = max_{x,y} Σ_{j≤i} p_j ∨ p̃_j.
    pub b: Vec<f64>,
    /// ε_i = max_x Σ_y |p_i − p̃_i|.
    pub eps: Vec<f64>,
    /// δ_i = max_{x,y} |p_i − p̃_i|.
    pub delta: Vec<f64>,
}

impl Diagnostics {
    pub fn cum_eps(&self) -> Vec<f64> {
        running_sum(&self.eps)
    }

    pub fn cum_delta(&self) -> Vec<f64> {
        running_sum(&self.delta)
    }
}

fn running_sum(v: &[f64]) -> Vec<f64> {
    v.iter()
        .scan(0.0, |acc, &x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

fn check_pair(a: &TorusChain, b: &TorusChain, n: usize) -> Result<()> {
    if a.states != b.states {
        return Err(Error::StateMismatch(a.states, b.states));
    }
    if n == 0 {
        return Err(Error::invalid("horizon n must be ≥ 1"));
    }
    Ok(())
}

/// Exact b, ε, δ for steps 1..=n.
pub fn diagnostics(a: &TorusChain, b: &TorusChain, n: usize) -> Result<Diagnostics> {
    check_pair(a, b, n)?;
    let (ta, tb) = (PowerTable::build(a, n)?, PowerTable::build(b, n)?);
    let size = a.states;
    if let (Some(ra), Some(rb)) = (ta.invariant_rows(), tb.invariant_rows()) {
        // both translation invariant: the maxima over x are attained at x = 0
        let mut acc = vec![0.0; size];
        let mut out = Diagnostics { b: vec![], eps: vec![], delta: vec![] };
        for i in 1..=n {
            let (mut e, mut d, mut bmax) = (0.0, 0.0f64, 0.0f64);
            for y in 0..size {
                let diff = (ra[i][y] - rb[i][y]).abs();
                e += diff;
                d = d.max(diff);
                acc[y] += ra[i][y].max(rb[i][y]);
                bmax = bmax.max(acc[y]);
            }
            out.b.push(bmax);
            out.eps.push(e);
            out.delta.push(d);
        }
        return Ok(out);
    }
    // per source state x: running sums over steps, then maxima over x
    let per_x: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)> = (0..size)
        .into_par_iter()
        .map(|x| {
            let mut acc = vec![0.0; size];
            let (mut bs, mut es, mut ds) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
            for i in 1..=n {
                let (mut e, mut d, mut bmax) = (0.0, 0.0f64, 0.0f64);
                for (y, slot) in acc.iter_mut().enumerate() {
                    let (p, q) = (ta.get(i, x, y), tb.get(i, x, y));
                    e += (p - q).abs();
                    d = d.max((p - q).abs());
                    *slot += p.max(q);
                    bmax = bmax.max(*slot);
                }
                bs.push(bmax);
                es.push(e);
                ds.push(d);
            }
            (bs, es, ds)
        })
        .collect();
    let fold = |sel: &dyn Fn(&(Vec<f64>, Vec<f64>, Vec<f64>)) -> &Vec<f64>| -> Vec<f64> {
        (0..n).map(|i| per_x.iter().map(|t| sel(t)[i]).fold(0.0, f64::max)).collect()
    };
    Ok(Diagnostics { b: fold(&|t| &t.0), eps: fold(&|t| &t.1), delta: fold(&|t| &t.2) })
}

pub fn avg_upper_bound_b(a: &TorusChain, b: &TorusChain, n: usize) -> Result<Vec<f64>> {
    Ok(diagnostics(a, b, n)?.b)
}

/// ε, δ and their running sums 𝓔, Δ.
pub fn l1_linf_differences(
    a: &TorusChain,
    b: &TorusChain,
    n: usize,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>)> {
    let d = diagnostics(a, b, n)?;
    let (ce, cd) = (d.cum_eps(), d.cum_delta());
    Ok((d.eps, d.delta, ce, cd))
}

/// Cutoffs that turn the asymptotic hypotheses into finite verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    pub eps_ratio: f64,
    pub delta_ratio: f64,
    pub n2b: f64,
    pub non_gaussian: f64,
    /// C in ‖A‖ ≤ 1 + C/n.
    pub spike_constant: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { eps_ratio: 0.1, delta_ratio: 0.1, n2b: 2.0, non_gaussian: 0.1, spike_constant: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

impl Verdict {
    fn of(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(&self) -> bool {
        *self != Verdict::Fail
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdicts {
    pub eps_ratio: Verdict,
    pub delta_ratio: Verdict,
    pub n2b: Verdict,
    pub spike_norm: Verdict,
    pub non_gaussian: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub n: usize,
    pub states: usize,
    pub b: Vec<f64>,
    pub eps: Vec<f64>,
    pub delta: Vec<f64>,
    pub cum_eps: f64,
    pub cum_delta: f64,
    pub eps_ratio: f64,
    pub delta_ratio: f64,
    pub n2b: f64,
    pub spike_norm: Option<f64>,
    /// θ of the entry law; absent for Gaussian entries.
    pub theta: Option<f64>,
    pub max_sigma2: f64,
    pub non_gaussian: Option<f64>,
    pub thresholds: Thresholds,
    pub verdicts: Verdicts,
}

impl ComparisonReport {
    pub fn all_pass(&self) -> bool {
        let v = &self.verdicts;
        [v.eps_ratio, v.delta_ratio, v.n2b, v.spike_norm, v.non_gaussian].iter().all(Verdict::passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per step: `step,b,epsilon,delta`.
    pub fn to_csv(&self, digest: &str, seed: u64) -> String {
        let mut s = csv_header_comment(digest, seed);
        s.push_str("step,b,epsilon,delta\n");
        for i in 0..self.n {
            s.push_str(&format!("{},{},{},{}\n", i + 1, self.b[i], self.eps[i], self.delta[i]));
        }
        s
    }
}

/// All diagnostics with verdicts; `theta` is `None` for Gaussian entries.
pub fn comparison_report(
    a: &TorusChain,
    b: &TorusChain,
    n: usize,
    theta: Option<f64>,
    spikes: Option<&SpikeOperator>,
    thresholds: Thresholds,
) -> Result<ComparisonReport> {
    let d = diagnostics(a, b, n)?;
    let nf = n as f64;
    let cum_eps = d.eps.iter().sum::<f64>();
    let cum_delta = d.delta.iter().sum::<f64>();
    let bn = d.b[n - 1];
    let eps_ratio = cum_eps / nf;
    let delta_ratio = cum_delta / bn;
    let n2b = nf * nf * bn;
    let max_sigma2 = a.max_entry().max(b.max_entry());
    let non_gaussian = theta.map(|t| t * nf * nf * max_sigma2);
    let spike_norm = spikes.map(SpikeOperator::norm);
    let t = thresholds;
    let verdicts = Verdicts {
        eps_ratio: Verdict::of(eps_ratio <= t.eps_ratio),
        delta_ratio: Verdict::of(delta_ratio <= t.delta_ratio),
        n2b: Verdict::of(n2b <= t.n2b),
        spike_norm: spike_norm.map_or(Verdict::NotApplicable, |s| Verdict::of(s <= 1.0 + t.spike_constant / nf)),
        non_gaussian: non_gaussian.map_or(Verdict::NotApplicable, |v| Verdict::of(v <= t.non_gaussian)),
    };
    Ok(ComparisonReport {
        n,
        states: a.states,
        b: d.b,
        eps: d.eps,
        delta: d.delta,
        cum_eps,
        cum_delta,
        eps_ratio,
        delta_ratio,
        n2b,
        spike_norm,
        theta,
        max_sigma2,
        non_gaussian,
        thresholds,
        verdicts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LcltResidual {
    pub residual: f64,
    /// n e^{−W^α}: the decay form of the error term with unit constants.
    pub predicted_scale: f64,
}

/// sup_x |p_n(0,x) − θ_α(x/L, n(W/L)^α)/N| for a one-dimensional band chain.
pub fn lclt_residual(chain: &TorusChain, alpha: f64, n: usize) -> Result<LcltResidual> {
    if !chain.is_translation_invariant() {
        return Err(Error::invalid("local limit residual needs a translation-invariant chain"));
    }
    let spec = chain.spec.as_ref().ok_or_else(|| Error::invalid("chain carries no profile geometry"))?;
    if spec.d != 1 {
        return Err(Error::Unsupported("local limit residual in dimension d ≥ 2".into()));
    }
    let scale = match &spec.kind {
        ProfileKind::AlphaStable(p) => p.scale,
        _ => 1.0,
    };
    let law = StableLaw::with_scale(alpha, scale)?;
    let (l, w) = (spec.side as f64, spec.width as f64);
    let pn = crate::chain::n_step_fft(chain, n)?;
    let tau = n as f64 * (w / l).powf(alpha);
    let mut res: f64 = 0.0;
    for (x, &p) in pn.iter().enumerate() {
        let th = law.theta(x as f64 / l, tau)? / l;
        res = res.max((p - th).abs());
    }
    Ok(LcltResidual { residual: res, predicted_scale: n as f64 * (-w.powf(alpha)).exp() })
}
