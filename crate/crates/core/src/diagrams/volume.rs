//! Constraint polytopes {α_e ≥ 0 : Σ_e c_j(e) α_e ≤ t_j} and the lattice
//! constant C_Γ.

use super::exact::count_weights;
use super::graph::Diagram;
use crate::error::{Error, Result};
use crate::quad::gauss_legendre;
use crate::rng::trial_rng;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest edge count handled by the exact volume.
pub const EXACT_EDGE_LIMIT: usize = 4;
const VOLUME_STREAM: u64 = 11;
const CHUNK: u64 = 1 << 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VolumeMethod {
    Exact,
    Montecarlo { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Volume {
    pub value: f64,
    /// Zero for the exact method.
    pub stderr: f64,
}

/// Face × edge coefficients as per-edge columns.
fn columns(c: &[Vec<u32>]) -> Vec<Vec<f64>> {
    let edges = c.first().map_or(0, |r| r.len());
    (0..edges).map(|e| c.iter().map(|row| row[e] as f64).collect()).collect()
}

fn det(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut d = 1.0;
    for k in 0..n {
        let p = (k..n).max_by(|&a, &b| m[a][k].abs().total_cmp(&m[b][k].abs())).unwrap();
        if m[p][k] == 0.0 {
            return 0.0;
        }
        if p != k {
            m.swap(p, k);
            d = -d;
        }
        d *= m[k][k];
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            for j in k..n {
                m[i][j] -= f * m[k][j];
            }
        }
    }
    d
}

/// Normals of all hyperplanes spanned by s−1 of the given vectors.
fn wall_normals(vectors: &[Vec<f64>], s: usize) -> Vec<Vec<f64>> {
    if s < 2 {
        return vec![];
    }
    let mut out = Vec::new();
    let mut pick = (0..s - 1).collect::<Vec<usize>>();
    if vectors.len() < s - 1 {
        return out;
    }
    loop {
        // generalized cross product via cofactors
        let normal: Vec<f64> = (0..s)
            .map(|i| {
                let minor: Vec<Vec<f64>> =
                    pick.iter().map(|&r| (0..s).filter(|&k| k != i).map(|k| vectors[r][k]).collect()).collect();
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                sign * det(minor)
            })
            .collect();
        if normal.iter().any(|x| x.abs() > 1e-12) {
            out.push(normal);
        }
        // next combination
        let mut k = s - 1;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if pick[k] < vectors.len() - (s - 1 - k) {
                pick[k] += 1;
                for j in k + 1..s - 1 {
                    pick[j] = pick[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Volume of {α ≥ 0 : Σ_e cols[e] α_e ≤ budget}, integrating edge by edge with
/// Gauss–Legendre on the pieces where the inner volume is polynomial.
fn exact_volume(cols: &[Vec<f64>], budget: &[f64]) -> f64 {
    if budget.iter().any(|&b| b < 0.0) {
        return 0.0;
    }
    let Some((first, rest)) = cols.split_first() else { return 1.0 };
    let upper = first.iter().zip(budget).filter(|(c, _)| **c > 0.0).map(|(c, b)| b / c).fold(f64::INFINITY, f64::min);
    if !(upper > 0.0) || !upper.is_finite() {
        return 0.0;
    }
    if rest.is_empty() {
        return upper;
    }
    let s = budget.len();
    // chamber walls of the remaining columns together with the slack directions
    let mut gens: Vec<Vec<f64>> = rest.to_vec();
    gens.extend((0..s).map(|j| (0..s).map(|k| if k == j { 1.0 } else { 0.0 }).collect()));
    let mut breaks = vec![0.0, upper];
    for nrm in wall_normals(&gens, s) {
        let nb: f64 = nrm.iter().zip(budget).map(|(a, b)| a * b).sum();
        let nc: f64 = nrm.iter().zip(first).map(|(a, b)| a * b).sum();
        if nc.abs() > 1e-14 {
            let x = nb / nc;
            if x > 0.0 && x < upper {
                breaks.push(x);
            }
        }
    }
    for (c, b) in first.iter().zip(budget) {
        if *c > 0.0 && b / c < upper {
            breaks.push(b / c);
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * upper);
    let (xs, ws) = gauss_legendre(rest.len() + 1);
    let mut total = 0.0;
    let mut inner = vec![0.0; s];
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        for (x, wt) in xs.iter().zip(&ws) {
            let a = mid + half * x;
            for j in 0..s {
                inner[j] = (budget[j] - first[j] * a).max(0.0);
            }
            total += half * wt * exact_volume(rest, &inner);
        }
    }
    total
}

fn mc_volume(cols: &[Vec<f64>], budget: &[f64], samples: u64, seed: u64) -> Volume {
    let boxes: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().zip(budget).filter(|(c, _)| **c > 0.0).map(|(c, b)| b / c).fold(f64::INFINITY, f64::min))
        .collect();
    let box_vol: f64 = boxes.iter().product();
    let chunks = samples.div_ceil(CHUNK);
    let hits: Vec<u64> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = trial_rng(seed, VOLUME_STREAM, k);
            let m = CHUNK.min(samples - k * CHUNK);
            let mut a = vec![0.0; cols.len()];
            let mut hit = 0u64;
            for _ in 0..m {
                for (slot, b) in a.iter_mut().zip(&boxes) {
                    *slot = b * rng.random::<f64>();
                }
                if (0..budget.len()).all(|j| cols.iter().zip(&a).map(|(c, x)| c[j] * x).sum::<f64>() <= budget[j]) {
                    hit += 1;
                }
            }
            hit
        })
        .collect();
    let p = hits.iter().sum::<u64>() as f64 / samples as f64;
    Volume { value: p * box_vol, stderr: box_vol * (p * (1.0 - p) / samples as f64).sqrt() }
}

/// Vol{α_e ≥ 0 : Σ_e c_i(e) α_e ≤ t_i}.
pub fn constraint_volume(g: &Diagram, t: &[f64], method: VolumeMethod) -> Result<Volume> {
    let lay = g.layout()?;
    if t.len() != lay.c.len() {
        return Err(Error::invalid(format!("{} face budgets given for {} faces", t.len(), lay.c.len())));
    }
    if t.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::invalid("face budgets must be finite and non-negative"));
    }
    let cols = columns(&lay.c);
    match method {
        VolumeMethod::Exact => {
            if cols.len() > EXACT_EDGE_LIMIT {
                return Err(Error::invalid(format!(
                    "exact volume handles at most {EXACT_EDGE_LIMIT} edges, diagram has {}",
                    cols.len()
                )));
            }
            Ok(Volume { value: exact_volume(&cols, t), stderr: 0.0 })
        }
        VolumeMethod::Montecarlo { samples, seed } => {
            if samples == 0 {
                return Err(Error::invalid("Monte Carlo volume needs samples ≥ 1"));
            }
            if cols.is_empty() {
                return Ok(Volume { value: 1.0, stderr: 0.0 });
            }
            if t.iter().any(|&x| x == 0.0) {
                return Ok(Volume { value: 0.0, stderr: 0.0 });
            }
            Ok(mc_volume(&cols, t, samples, seed))
        }
    }
}

/// Exact when the edge count allows, Monte Carlo otherwise.
pub fn volume_auto(g: &Diagram, t: &[f64], samples: u64, seed: u64) -> Result<Volume> {
    if g.edges.len() <= EXACT_EDGE_LIMIT {
        constraint_volume(g, t, VolumeMethod::Exact)
    } else {
        constraint_volume(g, t, VolumeMethod::Montecarlo { samples, seed })
    }
}

fn gf2_rank(rows: &[Vec<u32>]) -> (usize, Vec<Vec<u8>>) {
    let mut m: Vec<Vec<u8>> = rows.iter().map(|r| r.iter().map(|&x| (x % 2) as u8).collect()).collect();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| m[i][col] == 1) else { continue };
        m.swap(rank, p);
        for i in 0..m.len() {
            if i != rank && m[i][col] == 1 {
                for k in 0..cols {
                    m[i][k] ^= m[rank][k];
                }
            }
        }
        rank += 1;
    }
    (rank, m)
}

/// Density of the parity lattice: 2^{−rank} of the face × edge multiplicity
/// matrix over GF(2), or 0 when the order parities are inconsistent.
pub fn predicted_lattice_constant(g: &Diagram, parities: &[usize]) -> Result<f64> {
    let lay = g.layout()?;
    if parities.len() != lay.c.len() {
        return Err(Error::invalid("one parity per face required"));
    }
    // augment with the parity column and compare ranks
    let (r, _) = gf2_rank(&lay.c);
    let aug: Vec<Vec<u32>> =
        lay.c.iter().zip(parities).map(|(row, &p)| row.iter().copied().chain([p as u32 % 2]).collect()).collect();
    let (ra, _) = gf2_rank(&aug);
    Ok(if ra > r { 0.0 } else { 0.5f64.powi(r as i32) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeConstant {
    /// Face orders along the subsequence n_j = base_j + 2k.
    pub orders: Vec<Vec<usize>>,
    pub counts: Vec<u64>,
    pub volumes: Vec<f64>,
    pub ratios: Vec<f64>,
    /// max − min of the ratios over the last quarter of the sequence.
    pub drift: f64,
    /// Two-point 1/n extrapolation from the last two ratios.
    pub extrapolated: f64,
    pub predicted: f64,
    pub subsequence: String,
}

/// Count/volume ratios along the parity class of `base`, up to total order n_max.
pub fn lattice_constant_c(g: &Diagram, base: &[usize], n_max: usize, cap: f64) -> Result<LatticeConstant> {
    let lay = g.layout()?;
    if base.len() != lay.c.len() {
        return Err(Error::invalid("one base order per face required"));
    }
    let mut out = LatticeConstant {
        orders: vec![],
        counts: vec![],
        volumes: vec![],
        ratios: vec![],
        drift: 0.0,
        extrapolated: f64::NAN,
        predicted: predicted_lattice_constant(g, base)?,
        subsequence: format!("n_j = {base:?}_j + 2k, total ≤ {n_max}"),
    };
    let mut spent = 0.0;
    for k in 0.. {
        let orders: Vec<usize> = base.iter().map(|&b| b + 2 * k).collect();
        if orders.iter().sum::<usize>() > n_max {
            break;
        }
        let count = count_weights(&lay.c, &orders);
        spent += count as f64;
        if spent > cap {
            return Err(Error::Cap { cost: spent, cap });
        }
        let t: Vec<f64> = orders.iter().map(|&n| n as f64).collect();
        let vol = volume_auto(g, &t, 1 << 20, k as u64)?.value;
        out.ratios.push(if vol > 0.0 {
            count as f64 / vol
        } else if count == 0 {
            0.0
        } else {
            f64::INFINITY
        });
        out.orders.push(orders);
        out.counts.push(count);
        out.volumes.push(vol);
    }
    let m = out.ratios.len();
    if m > 0 {
        let q = &out.ratios[m - m.div_ceil(4)..];
        out.drift =
            q.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - q.iter().cloned().fold(f64::INFINITY, f64::min);
        out.extrapolated = out.ratios[m - 1];
    }
    if m > 1 {
        let n1: f64 = out.orders[m - 2].iter().sum::<usize>() as f64;
        let n2: f64 = out.orders[m - 1].iter().sum::<usize>() as f64;
        out.extrapolated = (n2 * out.ratios[m - 1] - n1 * out.ratios[m - 2]) / (n2 - n1);
    }
    Ok(out)
}

/// Convenience: equal orders n on every face.
pub fn equal_orders(g: &Diagram, n: usize) -> Vec<usize> {
    vec![n; g.faces.len().max(1)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::graph::{catalog, catalog_diagram};
    use proptest::prelude::*;

    #[test]
    fn self_loop_volume_and_constant() {
        let g = catalog_diagram("self_loop").unwrap();
        let v = constraint_volume(&g, &[2.0], VolumeMethod::Exact).unwrap();
        assert!((v.value - 1.0).abs() < 1e-14);
        let c = lattice_constant_c(&g, &[2], 40, 1e7).unwrap();
        for (o, (&k, &vol)) in c.orders.iter().zip(c.counts.iter().zip(&c.volumes)) {
            assert_eq!(k as usize, o[0] / 2);
            assert!((vol - o[0] as f64 / 2.0).abs() < 1e-12);
        }
        assert!(c.ratios.iter().all(|r| (r - 1.0).abs() < 1e-12));
        assert_eq!(c.predicted, 1.0);
        let odd = lattice_constant_c(&g, &[1], 21, 1e7).unwrap();
        assert!(odd.counts.iter().all(|&k| k == 0));
        assert_eq!(odd.predicted, 0.0);
    }

    #[test]
    fn zero_budget_is_empty() {
        for (name, g) in catalog() {
            if g.edges.is_empty() {
                continue;
            }
            let t = vec![0.0; g.faces.len()];
            let v = volume_auto(&g, &t, 1000, 1).unwrap();
            assert_eq!(v.value, 0.0, "{name}");
        }
    }

    #[test]
    fn simplex_volume_closed_form() {
        // one face, all multiplicities 2: t^E / (E! 2^E)
        let g = catalog_diagram("theta").unwrap();
        let v = constraint_volume(&g, &[3.0], VolumeMethod::Exact).unwrap().value;
        let want = 3.0f64.powi(4) / (24.0 * 16.0);
        assert!((v - want).abs() < 1e-13 * want);
    }

    #[test]
    fn two_face_volume_matches_monte_carlo() {
        let g = catalog_diagram("two_face_bridge").unwrap();
        // two edges in both faces: min(t1, t2)² / 2
        let v = constraint_volume(&g, &[2.0, 3.0], VolumeMethod::Exact).unwrap().value;
        assert!((v - 2.0).abs() < 1e-13);
        let mc = constraint_volume(&g, &[2.0, 3.0], VolumeMethod::Montecarlo { samples: 400_000, seed: 3 }).unwrap();
        assert!((mc.value - v).abs() < 5.0 * mc.stderr);
    }

    #[test]
    fn lattice_constants_approach_parity_prediction() {
        for name in ["theta", "two_face_bridge"] {
            let g = catalog_diagram(name).unwrap();
            let base = vec![2; g.faces.len()];
            let c = lattice_constant_c(&g, &base, 120, 1e8).unwrap();
            assert!((c.extrapolated - c.predicted).abs() < 0.05 * c.predicted, "{name}: {c:?}");
        }
    }

    fn small_diagram() -> impl Strategy<Value = Diagram> {
        // random face multiplicities on a fixed two-vertex skeleton with up to four parallel edges
        (2usize..=4, prop::collection::vec(any::<bool>(), 4)).prop_map(|(edges, split)| {
            use crate::diagrams::graph::{Edge, Face, FaceEdge, Vertex};
            let vertices =
                vec![Vertex { id: 0, marked: true, boundary: false }, Vertex { id: 1, marked: true, boundary: false }];
            let es: Vec<Edge> = (0..edges).map(|k| Edge { id: k, u: 0, v: 1, boundary: false }).collect();
            let mut f0 = vec![];
            let mut f1 = vec![];
            for k in 0..edges {
                if split[k] {
                    f0.push(FaceEdge { id: k, multiplicity: 1 });
                    f1.push(FaceEdge { id: k, multiplicity: 1 });
                } else {
                    f0.push(FaceEdge { id: k, multiplicity: 2 });
                }
            }
            if f1.is_empty() {
                f0[0].multiplicity = 1;
                f1.push(FaceEdge { id: 0, multiplicity: 1 });
            }
            Diagram {
                vertices,
                edges: es,
                faces: vec![Face { marked_vertex: 0, edges: f0 }, Face { marked_vertex: 1, edges: f1 }],
            }
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn volume_is_homogeneous(g in small_diagram(), t0 in 0.2f64..3.0, t1 in 0.2f64..3.0, c in 2u32..=3) {
            let v = constraint_volume(&g, &[t0, t1], VolumeMethod::Exact).unwrap().value;
            let cf = c as f64;
            let w = constraint_volume(&g, &[cf * t0, cf * t1], VolumeMethod::Exact).unwrap().value;
            let want = cf.powi(g.edges.len() as i32) * v;
            prop_assert!((w - want).abs() <= 1e-10 * want.max(1e-300));
        }
    }
}
