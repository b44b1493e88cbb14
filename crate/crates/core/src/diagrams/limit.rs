//! Limiting diagram functions in the supercritical, subcritical, critical and
//! deformed (tricritical) regimes.

use super::graph::{Diagram, Layout};
use super::volume::{predicted_lattice_constant, volume_auto};
use crate::error::{Error, Result};
use crate::rng::trial_rng;
use crate::special::StableLaw;
use crate::spike::SpikeOperator;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

const LIMIT_STREAM: u64 = 12;
const CHUNK: u64 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Super,
    Sub,
    Crit,
    Deformed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitRequest {
    pub regime: Regime,
    /// Face arguments t_i > 0.
    pub t: Vec<f64>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Time scale τ = γ^α of the critical and deformed kernels.
    #[serde(default)]
    pub tau: Option<f64>,
    pub samples: u64,
    pub seed: u64,
    /// Recommend resampling when the standard error exceeds this.
    #[serde(default)]
    pub tolerance: Option<f64>,
}

fn default_alpha() -> f64 {
    2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: u64,
    /// Lattice constant used (even-parity class).
    pub c_gamma: f64,
    pub resample_recommended: bool,
}

impl LimitEstimate {
    fn scaled(self, k: f64) -> Self {
        LimitEstimate { value: self.value * k, stderr: self.stderr * k.abs(), ..self }
    }
}

/// Spanning forest over interior edges, rooted at boundary vertices where a
/// component has one.
struct Forest {
    /// (parent, child, edge) in BFS order.
    tree: Vec<(usize, usize, usize)>,
    /// root of each vertex
    root: Vec<usize>,
    roots: Vec<usize>,
    /// interior edges not in the forest
    closing: Vec<usize>,
}

fn forest(lay: &Layout) -> Forest {
    let nv = lay.vertices;
    let mut adj = vec![Vec::new(); nv];
    for (e, &(u, v)) in lay.ends.iter().enumerate() {
        if !lay.boundary_edge[e] && u != v {
            adj[u].push((v, e));
            adj[v].push((u, e));
        }
    }
    let mut root = vec![usize::MAX; nv];
    let mut tree = Vec::new();
    let mut roots = Vec::new();
    let mut in_tree = vec![false; lay.ends.len()];
    let starts: Vec<usize> = (0..nv).filter(|&v| lay.boundary_vertex[v]).chain(0..nv).collect();
    for s in starts {
        if root[s] != usize::MAX {
            continue;
        }
        root[s] = s;
        roots.push(s);
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(a) = queue.pop_front() {
            for &(b, e) in &adj[a] {
                // boundary vertices are pinned by the spike positions, never reached through the tree
                if root[b] == usize::MAX && !lay.boundary_vertex[b] {
                    root[b] = s;
                    in_tree[e] = true;
                    tree.push((a, b, e));
                    queue.push_back(b);
                }
            }
        }
    }
    let closing = (0..lay.ends.len()).filter(|&e| !lay.boundary_edge[e] && !in_tree[e]).collect();
    Forest { tree, root, roots, closing }
}

/// Power-transform exponent that tames the α_e^{−1/α} singularity of the kernels.
fn power_exponent(alpha: f64) -> f64 {
    if alpha > 1.0 {
        (alpha / (alpha - 1.0)).clamp(2.0, 8.0)
    } else {
        8.0
    }
}

#[derive(Clone, Copy)]
enum Space {
    Line,
    Torus { tau: f64 },
}

/// Monte Carlo for ∫∫ Π kernels over positions and the constraint polytope
/// (without the C_Γ/Πt prefactor). Returns mean and stderr.
fn mc_integral(
    lay: &Layout,
    t: &[f64],
    law: StableLaw,
    space: Space,
    spike: Option<(&SpikeOperator, Vec<f64>)>,
    samples: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    let ne = lay.ends.len();
    let bounds: Vec<f64> = (0..ne)
        .map(|e| {
            lay.c
                .iter()
                .zip(t)
                .filter(|(row, _)| row[e] > 0)
                .map(|(row, &tj)| tj / row[e] as f64)
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let p = power_exponent(law.alpha);
    let fr = forest(lay);
    let bverts: Vec<usize> = (0..lay.vertices).filter(|&v| lay.boundary_vertex[v]).collect();
    let rank = spike.as_ref().map_or(0, |s| s.0.rank());
    let assignments = rank.pow(bverts.len() as u32);
    let kernel = |x: f64, time: f64| -> f64 {
        match space {
            Space::Line => law.density(x, time).unwrap_or(0.0),
            Space::Torus { tau } => law.theta(x, time * tau).unwrap_or(0.0),
        }
    };
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = trial_rng(seed, LIMIT_STREAM, k);
            let m = CHUNK.min(samples - k * CHUNK);
            let (mut s1, mut s2) = (0.0, 0.0);
            let mut a = vec![0.0; ne];
            let mut offset = vec![0.0; lay.vertices];
            let mut pos = vec![0.0; lay.vertices];
            for _ in 0..m {
                let mut jac = 1.0;
                for e in 0..ne {
                    let u: f64 = 1.0 - rng.random::<f64>();
                    a[e] = bounds[e] * u.powf(p);
                    jac *= bounds[e] * p * u.powf(p - 1.0);
                }
                let inside = lay
                    .c
                    .iter()
                    .zip(t)
                    .all(|(row, &tj)| row.iter().zip(&a).map(|(&c, x)| c as f64 * x).sum::<f64>() <= tj);
                // positions always drawn so the stream does not depend on acceptance
                for &r in &fr.roots {
                    offset[r] = match space {
                        Space::Line => 0.0,
                        Space::Torus { .. } => rng.random::<f64>(),
                    };
                }
                for &(par, ch, e) in &fr.tree {
                    let time = match space {
                        Space::Line => a[e],
                        Space::Torus { tau } => a[e] * tau,
                    };
                    let step = if time > 0.0 { law.sample(&mut rng, time) } else { 0.0 };
                    offset[ch] = offset[par] + step;
                }
                let mut value = 0.0;
                if inside {
                    if bverts.is_empty() {
                        value = fr
                            .closing
                            .iter()
                            .map(|&e| {
                                let (u, v) = lay.ends[e];
                                kernel(offset[u] - offset[v], a[e])
                            })
                            .product::<f64>();
                    } else if let Some((sp, z)) = &spike {
                        let frak: Vec<Vec<f64>> = (0..ne)
                            .map(|e| if lay.boundary_edge[e] { sp.frak_a(a[e]).unwrap_or_default() } else { vec![] })
                            .collect();
                        let mut sigma = vec![0usize; lay.vertices];
                        for code in 0..assignments {
                            let mut c = code;
                            for &b in &bverts {
                                sigma[b] = c % rank;
                                c /= rank;
                            }
                            // boundary roots sit at their selected spike position
                            for v in 0..lay.vertices {
                                let r = fr.root[v];
                                let base = if lay.boundary_vertex[r] { z[sigma[r]] - offset[r] } else { 0.0 };
                                pos[v] = offset[v] + base;
                            }
                            let mut w = 1.0;
                            for e in 0..ne {
                                let (u, v) = lay.ends[e];
                                if lay.boundary_edge[e] {
                                    w *= frak[e][sigma[u] * rank + sigma[v]];
                                } else if fr.closing.contains(&e) {
                                    w *= kernel(pos[u] - pos[v], a[e]);
                                }
                            }
                            value += w;
                        }
                    }
                    value *= jac;
                }
                s1 += value;
                s2 += value * value;
            }
            (s1, s2)
        })
        .collect();
    let (s1, s2) = parts.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    let n = samples as f64;
    let mean = s1 / n;
    let var = (s2 / n - mean * mean).max(0.0);
    Ok((mean, (var / n).sqrt()))
}

/// 𝓕_Γ in the requested regime. Monte Carlo in the Sub, Crit and Deformed
/// regimes; Super is exact whenever the constraint volume is.
pub fn limiting_diagram_function(
    g: &Diagram,
    req: &LimitRequest,
    spikes: Option<&SpikeOperator>,
) -> Result<LimitEstimate> {
    let report = g.ensure_valid()?;
    let lay = g.layout()?;
    let s = lay.c.len();
    if req.t.len() != s {
        return Err(Error::invalid(format!("{} arguments given for {s} faces", req.t.len())));
    }
    if req.t.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(Error::invalid("limit arguments t_i must be positive"));
    }
    if req.samples == 0 {
        return Err(Error::invalid("samples must be ≥ 1"));
    }
    let c_gamma = predicted_lattice_constant(g, &vec![0; s])?;
    let prefactor = c_gamma / req.t.iter().product::<f64>();
    if report.has_boundary && req.regime != Regime::Deformed {
        return Err(Error::invalid("boundary diagrams only have a deformed limit"));
    }
    let finish = |mean: f64, se: f64| {
        let est = LimitEstimate {
            value: prefactor * mean,
            stderr: prefactor * se,
            samples: req.samples,
            c_gamma,
            resample_recommended: false,
        };
        let flag = req.tolerance.is_some_and(|tol| est.stderr > tol);
        LimitEstimate { resample_recommended: flag, ..est }
    };
    match req.regime {
        Regime::Super => {
            let v = volume_auto(g, &req.t, req.samples, req.seed)?;
            Ok(finish(v.value, v.stderr))
        }
        Regime::Sub | Regime::Crit | Regime::Deformed => {
            if !(req.alpha > 1.0 && req.alpha <= 2.0) {
                return Err(Error::invalid(format!("this regime needs 1 < α ≤ 2, got {}", req.alpha)));
            }
            let law = StableLaw::standard(req.alpha)?;
            let space = match req.regime {
                Regime::Sub => Space::Line,
                _ => {
                    let tau = req.tau.ok_or_else(|| Error::invalid("critical regimes need τ = γ^α"))?;
                    if !(tau > 0.0 && tau.is_finite()) {
                        return Err(Error::invalid("τ must be positive"));
                    }
                    Space::Torus { tau }
                }
            };
            let spike = if req.regime == Regime::Deformed {
                let sp = spikes.ok_or_else(|| Error::invalid("deformed regime needs a spike operator"))?;
                sp.validate()?;
                sp.frak_a(0.0)?;
                if lay.boundary_edge.iter().all(|b| !b) {
                    return Err(Error::invalid("deformed regime needs a diagram with boundary edges"));
                }
                let crate::spike::SpikePositions::Rescaled(z) = &sp.positions else {
                    return Err(Error::invalid("deformed regime needs rescaled spike positions z_i"));
                };
                Some((sp, z.clone()))
            } else {
                None
            };
            let (m, se) = mc_integral(&lay, &req.t, law, space, spike, req.samples, req.seed)?;
            Ok(finish(m, se))
        }
    }
}

/// γ^{|E|−|V|} 𝓕^{Crit}(γ^{−1/3} t; γ^α), which tends to 𝓕^{Super}(t) as γ → ∞.
pub fn crossover_to_super(
    g: &Diagram,
    t: &[f64],
    alpha: f64,
    gamma: f64,
    samples: u64,
    seed: u64,
) -> Result<LimitEstimate> {
    let shrink = gamma.powf(-1.0 / 3.0);
    let req = LimitRequest {
        regime: Regime::Crit,
        t: t.iter().map(|x| x * shrink).collect(),
        alpha,
        tau: Some(gamma.powf(alpha)),
        samples,
        seed,
        tolerance: None,
    };
    let est = limiting_diagram_function(g, &req, None)?;
    Ok(est.scaled(gamma.powi(g.ell() as i32)))
}

/// γ^{|E|−|V|+1} 𝓕^{Crit}(t; γ^α), which tends to 𝓕^{Sub}(t) as γ → 0.
pub fn crossover_to_sub(
    g: &Diagram,
    t: &[f64],
    alpha: f64,
    gamma: f64,
    samples: u64,
    seed: u64,
) -> Result<LimitEstimate> {
    let req = LimitRequest {
        regime: Regime::Crit,
        t: t.to_vec(),
        alpha,
        tau: Some(gamma.powf(alpha)),
        samples,
        seed,
        tolerance: None,
    };
    let est = limiting_diagram_function(g, &req, None)?;
    Ok(est.scaled(gamma.powi(g.ell() as i32 + 1)))
}
