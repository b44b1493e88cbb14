//! Exact diagram functions F_Γ at small scale and their closed-form bounds.

use super::graph::{Diagram, Layout};
use crate::chain::{PowerTable, TorusChain};
use crate::error::{Error, Result};
use crate::spike::SpikeOperator;
use rayon::prelude::*;

/// Default cap on elementary multiply-adds of one exact evaluation.
pub const DEFAULT_CAP: f64 = 1e9;

/// Calls `visit` with every weight vector (w_e ≥ 1) for which each face slack
/// n_j − Σ_e c_j(e) w_e is a non-negative even number.
pub(crate) fn for_each_weight(c: &[Vec<u32>], orders: &[usize], mut visit: impl FnMut(&[u32])) {
    let edges = c.first().map_or(0, |r| r.len());
    // minimal usage of the edges after position e, per face
    let mut tail = vec![vec![0i64; c.len()]; edges + 1];
    for e in (0..edges).rev() {
        for j in 0..c.len() {
            tail[e][j] = tail[e + 1][j] + c[j][e] as i64;
        }
    }
    let mut rem: Vec<i64> = orders.iter().map(|&n| n as i64).collect();
    if rem.iter().zip(&tail[0]).any(|(r, t)| r < t) {
        return;
    }
    let mut w = vec![0u32; edges];
    fn rec(e: usize, c: &[Vec<u32>], tail: &[Vec<i64>], rem: &mut [i64], w: &mut [u32], visit: &mut dyn FnMut(&[u32])) {
        if e == w.len() {
            if rem.iter().all(|r| r % 2 == 0) {
                visit(w);
            }
            return;
        }
        let mut k = 1u32;
        loop {
            let ok = (0..c.len()).all(|j| rem[j] - (c[j][e] * k) as i64 >= tail[e + 1][j]);
            if !ok {
                break;
            }
            for j in 0..c.len() {
                rem[j] -= (c[j][e] * k) as i64;
            }
            w[e] = k;
            rec(e + 1, c, tail, rem, w, visit);
            for j in 0..c.len() {
                rem[j] += (c[j][e] * k) as i64;
            }
            k += 1;
        }
    }
    if edges == 0 {
        if rem.iter().all(|r| r % 2 == 0) {
            visit(&w);
        }
        return;
    }
    rec(0, c, &tail, &mut rem, &mut w, &mut visit);
}

/// Number of admissible (t_j, w_e) for the given orders.
pub(crate) fn count_weights(c: &[Vec<u32>], orders: &[usize]) -> u64 {
    let mut k = 0u64;
    for_each_weight(c, orders, |_| k += 1);
    k
}

#[derive(Debug, Clone)]
struct Factor {
    vars: Vec<usize>,
    dims: Vec<usize>,
    data: Vec<f64>,
}

impl Factor {
    fn scalar(x: f64) -> Self {
        Factor { vars: vec![], dims: vec![], data: vec![x] }
    }
}

/// Greedy min-size variable elimination order and its cost per contraction.
fn elimination_plan(scopes: &[Vec<usize>], dom: &[usize]) -> (Vec<usize>, f64) {
    let mut live: Vec<Vec<usize>> = scopes.to_vec();
    let mut left: Vec<usize> = (0..dom.len()).collect();
    let (mut order, mut cost) = (Vec::new(), 0.0);
    while !left.is_empty() {
        let union_of = |v: usize, live: &[Vec<usize>]| {
            let mut u: Vec<usize> = live.iter().filter(|s| s.contains(&v)).flatten().copied().collect();
            u.push(v);
            u.sort_unstable();
            u.dedup();
            u
        };
        let (pos, v) = left
            .iter()
            .copied()
            .enumerate()
            .min_by_key(|&(_, v)| union_of(v, &live).iter().map(|&x| dom[x]).product::<usize>())
            .unwrap();
        let u = union_of(v, &live);
        let touching = live.iter().filter(|s| s.contains(&v)).count();
        cost += u.iter().map(|&x| dom[x] as f64).product::<f64>() * (touching + 1) as f64;
        live.retain(|s| !s.contains(&v));
        live.push(u.into_iter().filter(|&x| x != v).collect());
        order.push(v);
        left.remove(pos);
    }
    (order, cost)
}

fn eliminate(factors: &mut Vec<Factor>, v: usize, dom_v: usize) {
    let (hit, keep): (Vec<Factor>, Vec<Factor>) = factors.drain(..).partition(|f| f.vars.contains(&v));
    *factors = keep;
    if hit.is_empty() {
        factors.push(Factor::scalar(dom_v as f64));
        return;
    }
    let mut uv: Vec<(usize, usize)> =
        hit.iter().flat_map(|f| f.vars.iter().copied().zip(f.dims.iter().copied())).collect();
    uv.sort_unstable();
    uv.dedup();
    let out_vars: Vec<(usize, usize)> = uv.iter().copied().filter(|&(x, _)| x != v).collect();
    let strides = |vars: &[usize], dims: &[usize]| -> Vec<usize> {
        // row-major stride of each union variable inside the given layout, 0 if absent
        uv.iter()
            .map(|&(x, _)| match vars.iter().position(|&y| y == x) {
                Some(k) => dims[k + 1..].iter().product(),
                None => 0,
            })
            .collect()
    };
    let fstr: Vec<Vec<usize>> = hit.iter().map(|f| strides(&f.vars, &f.dims)).collect();
    let ov: Vec<usize> = out_vars.iter().map(|p| p.0).collect();
    let od: Vec<usize> = out_vars.iter().map(|p| p.1).collect();
    let ostr = strides(&ov, &od);
    let mut out = vec![0.0; od.iter().product()];
    let mut ctr = vec![0usize; uv.len()];
    let total: usize = uv.iter().map(|p| p.1).product();
    for _ in 0..total {
        let mut prod = 1.0;
        for (f, st) in hit.iter().zip(&fstr) {
            let idx: usize = ctr.iter().zip(st).map(|(a, b)| a * b).sum();
            prod *= f.data[idx];
        }
        let oi: usize = ctr.iter().zip(&ostr).map(|(a, b)| a * b).sum();
        out[oi] += prod;
        for k in (0..ctr.len()).rev() {
            ctr[k] += 1;
            if ctr[k] < uv[k].1 {
                break;
            }
            ctr[k] = 0;
        }
    }
    factors.push(Factor { vars: ov, dims: od, data: out });
}

/// Dense tables p_w as row-major N×N matrices, w = 0..=n.
pub fn dense_step_tables(chain: &TorusChain, n: usize) -> Result<Vec<Vec<f64>>> {
    let table = PowerTable::build(chain, n)?;
    let size = chain.states;
    Ok((0..=n)
        .map(|w| {
            let mut m = vec![0.0; size * size];
            for x in 0..size {
                for y in 0..size {
                    m[x * size + y] = table.get(w, x, y);
                }
            }
            m
        })
        .collect())
}

/// b_n = max_{x,y} Σ_{i=1}^n p_i(x, y).
pub fn upper_bound_b(chain: &TorusChain, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("b_n needs n ≥ 1"));
    }
    let tables = dense_step_tables(chain, n)?;
    let size = chain.states;
    let mut best = 0.0f64;
    for k in 0..size * size {
        best = best.max((1..=n).map(|i| tables[i][k]).sum::<f64>());
    }
    Ok(best)
}

/// Exact evaluation with an explicit cost cap.
pub fn diagram_function_capped(
    g: &Diagram,
    chain: &TorusChain,
    spikes: Option<&SpikeOperator>,
    orders: &[usize],
    cap: f64,
) -> Result<f64> {
    let lay: Layout = g.layout()?;
    if orders.len() != lay.c.len() {
        return Err(Error::invalid(format!("{} orders given for {} faces", orders.len(), lay.c.len())));
    }
    let size = chain.states;
    let boundary = lay.boundary_edge.iter().any(|&b| b);
    let sites = match (boundary, spikes) {
        (true, None) => return Err(Error::invalid("diagram has boundary edges but no spike operator was given")),
        (true, Some(s)) => {
            s.validate()?;
            s.sites(size)?
        }
        _ => vec![],
    };
    let rank = sites.len();
    // vertex domains: boundary vertices range over spike sites only, since A vanishes elsewhere
    let states: Vec<Vec<usize>> =
        (0..lay.vertices).map(|v| if lay.boundary_vertex[v] { sites.clone() } else { (0..size).collect() }).collect();
    let dom: Vec<usize> = states.iter().map(|s| s.len()).collect();
    let scopes: Vec<Vec<usize>> = lay
        .ends
        .iter()
        .map(|&(u, v)| {
            if u == v {
                vec![u]
            } else if u < v {
                vec![u, v]
            } else {
                vec![v, u]
            }
        })
        .collect();
    let (order, per) = elimination_plan(&scopes, &dom);
    let solutions = count_weights(&lay.c, orders) as f64;
    let cost = solutions * per;
    if cost > cap {
        return Err(Error::Cap { cost, cap });
    }
    let n_max = orders.iter().sum::<usize>().max(1);
    let tables = dense_step_tables(chain, n_max)?;
    let spike_pows: Vec<Vec<f64>> = match spikes {
        Some(s) if boundary => (0..=n_max).map(|w| s.reduced_power(w as u32)).collect(),
        _ => vec![],
    };
    let mut sols = Vec::new();
    for_each_weight(&lay.c, orders, |w| sols.push(w.to_vec()));
    let terms: Vec<f64> = sols
        .par_iter()
        .map(|w| {
            let mut factors: Vec<Factor> = lay
                .ends
                .iter()
                .enumerate()
                .map(|(e, &(u, v))| {
                    let we = w[e] as usize;
                    let value = |i: usize, j: usize| {
                        if lay.boundary_edge[e] {
                            spike_pows[we][i * rank + j]
                        } else {
                            tables[we][states[u][i] * size + states[v][j]]
                        }
                    };
                    if u == v {
                        Factor { vars: vec![u], dims: vec![dom[u]], data: (0..dom[u]).map(|i| value(i, i)).collect() }
                    } else {
                        let (a, b) = if u < v { (u, v) } else { (v, u) };
                        let mut data = vec![0.0; dom[a] * dom[b]];
                        for i in 0..dom[a] {
                            for j in 0..dom[b] {
                                data[i * dom[b] + j] = if u < v { value(i, j) } else { value(j, i) };
                            }
                        }
                        Factor { vars: vec![a, b], dims: vec![dom[a], dom[b]], data }
                    }
                })
                .collect();
            for &v in &order {
                eliminate(&mut factors, v, dom[v]);
            }
            factors.iter().map(|f| f.data[0]).product::<f64>()
        })
        .collect();
    Ok(terms.iter().sum())
}

/// F_Γ({n_j}) by exhaustive summation over weights with exact contraction over
/// vertex labels. Cost is capped at [`DEFAULT_CAP`] multiply-adds.
pub fn diagram_function(
    g: &Diagram,
    chain: &TorusChain,
    spikes: Option<&SpikeOperator>,
    orders: &[usize],
) -> Result<f64> {
    diagram_function_capped(g, chain, spikes, orders, DEFAULT_CAP)
}

/// Literal double sum over labelings η and weights; the reference the contraction
/// is checked against. Only for tiny cases.
pub fn diagram_function_brute(
    g: &Diagram,
    chain: &TorusChain,
    spikes: Option<&SpikeOperator>,
    orders: &[usize],
) -> Result<f64> {
    let lay = g.layout()?;
    let size = chain.states;
    let n_max = orders.iter().sum::<usize>().max(1);
    let tables = dense_step_tables(chain, n_max)?;
    let a = match spikes {
        Some(s) => Some(s.to_matrix(size)?),
        None if lay.boundary_edge.iter().any(|&b| b) => return Err(Error::invalid("spike operator required")),
        None => None,
    };
    // dense A^w
    let apow: Vec<Vec<f64>> = match &a {
        Some(a) => {
            let mut out =
                vec![(0..size * size).map(|k| if k / size == k % size { 1.0 } else { 0.0 }).collect::<Vec<f64>>()];
            for w in 1..=n_max {
                let prev = &out[w - 1];
                let mut next = vec![0.0; size * size];
                for i in 0..size {
                    for k in 0..size {
                        let p = prev[i * size + k];
                        if p != 0.0 {
                            for j in 0..size {
                                next[i * size + j] += p * a[k * size + j];
                            }
                        }
                    }
                }
                out.push(next);
            }
            out
        }
        None => vec![],
    };
    let mut sols = Vec::new();
    for_each_weight(&lay.c, orders, |w| sols.push(w.to_vec()));
    let labelings = size.pow(lay.vertices as u32);
    let mut total = 0.0;
    for code in 0..labelings {
        let mut eta = vec![0usize; lay.vertices];
        let mut k = code;
        for slot in eta.iter_mut() {
            *slot = k % size;
            k /= size;
        }
        for w in &sols {
            let mut prod = 1.0;
            for (e, &(u, v)) in lay.ends.iter().enumerate() {
                let idx = eta[u] * size + eta[v];
                prod *= if lay.boundary_edge[e] { apow[w[e] as usize][idx] } else { tables[w[e] as usize][idx] };
            }
            total += prod;
        }
    }
    Ok(total)
}

/// Closed-form G_Γ: N b^{|E|−|V|+1} n^{|V|−1}/(|V|−1)! without boundary,
/// (1+aⁿ) r^{|V_b|} b^{|E_int|−|V_int|} n^{|V|}/|V|! with boundary.
pub fn diagram_upper_bound(g: &Diagram, states: usize, b_n: f64, n: usize, a: f64, r: usize) -> Result<f64> {
    if !(b_n > 0.0) {
        return Err(Error::invalid("b_n must be positive"));
    }
    let nf = n as f64;
    let fact = |k: usize| (1..=k).map(|i| i as f64).product::<f64>();
    let v = g.vertices.len();
    if !g.has_boundary() {
        let ex = g.edges.len() as i32 - v as i32 + 1;
        Ok(states as f64 * b_n.powi(ex) * nf.powi(v as i32 - 1) / fact(v - 1))
    } else {
        let vb = g.boundary_vertex_count();
        let ex = g.interior_edge_count() as i32 - (v - vb) as i32;
        Ok((1.0 + a.powi(n as i32)) * (r as f64).powi(vb as i32) * b_n.powi(ex) * nf.powi(v as i32) / fact(v))
    }
}

/// Splits a total order n over s faces as evenly as possible (earlier faces get the remainder).
pub fn split_orders(n: usize, s: usize) -> Vec<usize> {
    (0..s).map(|j| n / s + usize::from(j < n % s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{build_variance_profile, ProfileSpec};
    use crate::diagrams::graph::{catalog, catalog_diagram};

    fn flat(n: usize) -> TorusChain {
        build_variance_profile(&ProfileSpec::flat(n).unwrap()).unwrap()
    }

    #[test]
    fn single_vertex_parity() {
        let g = catalog_diagram("single_vertex").unwrap();
        let c = flat(10);
        assert_eq!(diagram_function(&g, &c, None, &[6]).unwrap(), 10.0);
        assert_eq!(diagram_function(&g, &c, None, &[7]).unwrap(), 0.0);
    }

    #[test]
    fn self_loop_flat() {
        let g = catalog_diagram("self_loop").unwrap();
        let c = flat(12);
        let f = diagram_function(&g, &c, None, &[8]).unwrap();
        assert!((f - 4.0).abs() < 1e-12, "{f}");
        for n in (4..=32).step_by(2) {
            let f = diagram_function(&g, &c, None, &[n]).unwrap();
            assert!((f - n as f64 / 2.0).abs() < 1e-10);
            let b = upper_bound_b(&c, n).unwrap();
            assert!((b - n as f64 / 12.0).abs() < 1e-12);
            let bound = diagram_upper_bound(&g, 12, b, n, 0.0, 0).unwrap();
            assert!((bound - n as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn contraction_matches_literal_sum() {
        let band = build_variance_profile(&ProfileSpec::alpha_stable(2.0, 5, 2).unwrap()).unwrap();
        for (name, g) in catalog() {
            let s = g.faces.len();
            for n in [4usize, 5, 6, 7] {
                let orders = split_orders(n + s, s);
                let a = diagram_function(&g, &band, None, &orders).unwrap();
                let b = diagram_function_brute(&g, &band, None, &orders).unwrap();
                assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{name} {orders:?}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn boundary_loop_uses_spike_powers() {
        let mut g = catalog_diagram("self_loop").unwrap();
        g.edges[0].boundary = true;
        g.vertices[0].boundary = true;
        let c = flat(6);
        let spike = SpikeOperator::diagonal(vec![0.5, -0.8], vec![1, 4]).unwrap();
        // Σ_{w=1}^{n/2} Σ_i a_i^w
        let n = 8;
        let want: f64 = (1..=n / 2).map(|w| 0.5f64.powi(w) + (-0.8f64).powi(w)).sum();
        let f = diagram_function(&g, &c, Some(&spike), &[n as usize]).unwrap();
        assert!((f - want).abs() < 1e-12);
        let brute = diagram_function_brute(&g, &c, Some(&spike), &[n as usize]).unwrap();
        assert!((f - brute).abs() < 1e-12);
        assert!(diagram_function(&g, &c, None, &[8]).is_err());
        let bound = diagram_upper_bound(&g, 6, 1.0, 8, 1.0, 1).unwrap();
        // prefactor (1 + 1)·1, b⁰, n¹/1!
        assert_eq!(bound, 2.0 * 8.0);
    }

    #[test]
    fn cap_reports_cost() {
        let g = catalog_diagram("theta").unwrap();
        let c = flat(40);
        match diagram_function_capped(&g, &c, None, &[20], 10.0) {
            Err(Error::Cap { cost, cap }) => assert!(cost > cap),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn no_boundary_bound_at_one_vertex_one_edge() {
        let g = catalog_diagram("self_loop").unwrap();
        assert_eq!(diagram_upper_bound(&g, 50, 0.3, 9, 0.0, 0).unwrap(), 50.0 * 0.3);
    }
}
