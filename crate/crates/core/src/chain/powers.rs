//! n-step transition probabilities.

use super::fft::{clamp_normalize, fft_nd, power_from_spectrum, spectrum};
use super::kernel::{combine, coords_of, lazy_walk_row, ChainStructure, TorusChain};
use crate::error::{Error, Result};
use rustfft::num_complex::Complex64;
use std::f64::consts::PI;

/// Default state-count cap for dense powering.
pub const DENSE_CAP: usize = 4096;

fn point_mass(n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[0] = 1.0;
    v
}

/// p_n(0, ·) by powering the DFT of the first row.
pub fn n_step_fft(chain: &TorusChain, n: usize) -> Result<Vec<f64>> {
    Ok(n_step_fft_all(chain, n)?.pop().expect("at least one power"))
}

/// p_i(0, ·) for i = 0..=n.
pub fn n_step_fft_all(chain: &TorusChain, n: usize) -> Result<Vec<Vec<f64>>> {
    match &chain.structure {
        ChainStructure::TranslationInvariant { shape, row } => {
            if row.iter().all(|&p| p == row[0]) {
                // uniform kernel is idempotent; skip the transform to keep entries exact
                let mut out = vec![point_mass(chain.states)];
                out.extend((1..=n).map(|_| row.clone()));
                return Ok(out);
            }
            let spec = spectrum(row, shape);
            let mut out = vec![point_mass(chain.states)];
            out.extend((1..=n).map(|i| power_from_spectrum(&spec, shape, i)));
            Ok(out)
        }
        ChainStructure::Block { shape, reduced, block } => {
            let spec = spectrum(reduced, shape);
            let mut out = vec![point_mass(chain.states)];
            for i in 1..=n {
                let red = power_from_spectrum(&spec, shape, i);
                out.push(expand_block(&red, *block));
            }
            Ok(out)
        }
        _ => Err(Error::invalid("DFT powering needs a translation-invariant or block kernel")),
    }
}

fn expand_block(reduced: &[f64], block: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(reduced.len() * block);
    for &r in reduced {
        v.extend(std::iter::repeat_n(r / block as f64, block));
    }
    v
}

/// Row `x` of Pⁿ by repeated dense vector–matrix products.
pub fn n_step_power(chain: &TorusChain, n: usize, x: usize) -> Result<Vec<f64>> {
    n_step_power_capped(chain, n, x, DENSE_CAP)
}

pub fn n_step_power_capped(chain: &TorusChain, n: usize, x: usize, cap: usize) -> Result<Vec<f64>> {
    let ns = chain.states;
    if ns > cap {
        return Err(Error::Cap { cost: (ns as f64).powi(2) * n as f64, cap: (cap as f64).powi(2) * n as f64 });
    }
    if x >= ns {
        return Err(Error::invalid(format!("state {x} out of range")));
    }
    let table = chain.dense_table();
    let mut v = vec![0.0; ns];
    v[x] = 1.0;
    for _ in 0..n {
        let mut next = vec![0.0; ns];
        for (i, &vi) in v.iter().enumerate() {
            if vi != 0.0 {
                let row = &table[i * ns..(i + 1) * ns];
                for (o, &p) in next.iter_mut().zip(row) {
                    *o += vi * p;
                }
            }
        }
        v = next;
    }
    Ok(v)
}

/// Full Pⁿ as a row-major table, by dense products.
pub fn dense_power(chain: &TorusChain, n: usize) -> Result<Vec<f64>> {
    let ns = chain.states;
    if ns > DENSE_CAP {
        return Err(Error::Cap { cost: (ns as f64).powi(3) * n as f64, cap: (DENSE_CAP as f64).powi(3) * n as f64 });
    }
    let p = faer::Mat::<f64>::from_fn(ns, ns, |i, j| chain.entry(i, j));
    let mut acc = faer::Mat::<f64>::identity(ns, ns);
    for _ in 0..n {
        acc = &acc * &p;
    }
    Ok((0..ns * ns).map(|k| acc[(k / ns, k % ns)]).collect())
}

/// Distribution after `n` steps of the alternating walk from `x`, with the
/// predicted concentration center.
#[derive(Debug, Clone)]
pub struct HankelStep {
    pub distribution: Vec<f64>,
    pub center: Vec<usize>,
}

/// p_n(x, ·) for a reflective kernel via new(k) = q̂(k) e^{−2πik·x₀/L} old(−k).
pub fn hankel_step(chain: &TorusChain, n: usize, x: usize) -> Result<HankelStep> {
    let ChainStructure::Reflective { shape, row, center } = &chain.structure else {
        return Err(Error::invalid("hankel_step needs a reflective (Hankel) kernel"));
    };
    let total = chain.states;
    if x >= total {
        return Err(Error::invalid(format!("state {x} out of range")));
    }
    let q = spectrum(row, shape);
    let phase: Vec<Complex64> = (0..total)
        .map(|k| {
            let kc = coords_of(k, shape);
            let dot: f64 = kc.iter().zip(center).zip(shape).map(|((&a, &c), &l)| (a * c) as f64 / l as f64).sum();
            Complex64::from_polar(1.0, -2.0 * PI * dot)
        })
        .collect();
    let mut cur = vec![Complex64::new(0.0, 0.0); total];
    cur[x] = Complex64::new(1.0, 0.0);
    fft_nd(&mut cur, shape, false);
    for _ in 0..n {
        let next: Vec<Complex64> = (0..total)
            .map(|k| {
                let mk = combine(0, k, -1, &vec![0; shape.len()], shape);
                q[k] * phase[k] * cur[mk]
            })
            .collect();
        cur = next;
    }
    fft_nd(&mut cur, shape, true);
    let distribution = clamp_normalize(cur.iter().map(|z| z.re).collect());
    let xc = coords_of(x, shape);
    let predicted =
        if n % 2 == 0 { xc } else { xc.iter().zip(center).zip(shape).map(|((&a, &c), &l)| (c + l - a) % l).collect() };
    Ok(HankelStep { distribution, center: predicted })
}

/// n-step kernel of the lazy walk on the block torus (Z/D)^d.
pub fn wegner_block_kernel(side: usize, d: usize, lambda: f64, n: usize) -> Result<Vec<f64>> {
    if side < 2 || d == 0 {
        return Err(Error::invalid("need D ≥ 2 and d ≥ 1"));
    }
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::invalid(format!("coupling λ = {lambda} outside [0, 1)")));
    }
    let shape = vec![side; d];
    let row = lazy_walk_row(side, d, lambda);
    if n == 0 {
        return Ok(point_mass(row.len()));
    }
    Ok(power_from_spectrum(&spectrum(&row, &shape), &shape, n))
}

/// All powers p_0..p_n of a kernel, stored in the cheapest exact form.
#[derive(Debug, Clone)]
pub enum PowerTable {
    /// p_i(x, y) = rows[i][y − x].
    Invariant {
        shape: Vec<usize>,
        rows: Vec<Vec<f64>>,
    },
    /// p_i(x, y) = rows[i][y − x] for even i and rows[i][x + y − center] for odd i.
    Alternating {
        shape: Vec<usize>,
        rows: Vec<Vec<f64>>,
        center: Vec<usize>,
    },
    /// p_i(x, y) = reduced[i][block(y) − block(x)] / M for i ≥ 1.
    Block {
        shape: Vec<usize>,
        reduced: Vec<Vec<f64>>,
        block: usize,
    },
    Dense {
        states: usize,
        mats: Vec<Vec<f64>>,
    },
}

impl PowerTable {
    pub fn build(chain: &TorusChain, n: usize) -> Result<Self> {
        Ok(match &chain.structure {
            ChainStructure::TranslationInvariant { shape, .. } => {
                PowerTable::Invariant { shape: shape.clone(), rows: n_step_fft_all(chain, n)? }
            }
            ChainStructure::Reflective { shape, row, center } => {
                // odd powers are Hankel with row q^{*i}, even powers Toeplitz with row q^{*i}
                let spec = spectrum(row, shape);
                let mut rows = vec![point_mass(chain.states)];
                rows.extend((1..=n).map(|i| power_from_spectrum(&spec, shape, i)));
                PowerTable::Alternating { shape: shape.clone(), rows, center: center.clone() }
            }
            ChainStructure::Block { shape, reduced, block } => {
                let spec = spectrum(reduced, shape);
                let mut red = vec![point_mass(reduced.len())];
                red.extend((1..=n).map(|i| power_from_spectrum(&spec, shape, i)));
                PowerTable::Block { shape: shape.clone(), reduced: red, block: *block }
            }
            ChainStructure::Dense { .. } => {
                let ns = chain.states;
                if ns > DENSE_CAP {
                    return Err(Error::Cap { cost: ns as f64, cap: DENSE_CAP as f64 });
                }
                let p = faer::Mat::<f64>::from_fn(ns, ns, |i, j| chain.entry(i, j));
                let mut acc = faer::Mat::<f64>::identity(ns, ns);
                let mut mats = Vec::with_capacity(n + 1);
                for i in 0..=n {
                    if i > 0 {
                        acc = &acc * &p;
                    }
                    mats.push((0..ns * ns).map(|k| acc[(k / ns, k % ns)]).collect());
                }
                PowerTable::Dense { states: ns, mats }
            }
        })
    }

    pub fn states(&self) -> usize {
        match self {
            PowerTable::Invariant { rows, .. } | PowerTable::Alternating { rows, .. } => rows[0].len(),
            PowerTable::Block { reduced, block, .. } => reduced[0].len() * block,
            PowerTable::Dense { states, .. } => *states,
        }
    }

    pub fn horizon(&self) -> usize {
        match self {
            PowerTable::Invariant { rows, .. } | PowerTable::Alternating { rows, .. } => rows.len() - 1,
            PowerTable::Block { reduced, .. } => reduced.len() - 1,
            PowerTable::Dense { mats, .. } => mats.len() - 1,
        }
    }

    pub fn get(&self, i: usize, x: usize, y: usize) -> f64 {
        match self {
            PowerTable::Invariant { shape, rows } => rows[i][combine(y, x, -1, &vec![0; shape.len()], shape)],
            PowerTable::Alternating { shape, rows, center } => {
                if i % 2 == 0 {
                    rows[i][combine(y, x, -1, &vec![0; shape.len()], shape)]
                } else {
                    let off: Vec<i64> = center.iter().map(|&c| -(c as i64)).collect();
                    rows[i][combine(x, y, 1, &off, shape)]
                }
            }
            PowerTable::Block { shape, reduced, block } => {
                if i == 0 {
                    return if x == y { 1.0 } else { 0.0 };
                }
                reduced[i][combine(y / block, x / block, -1, &vec![0; shape.len()], shape)] / *block as f64
            }
            PowerTable::Dense { states, mats } => mats[i][x * states + y],
        }
    }

    /// Row x of p_i as a vector.
    pub fn row(&self, i: usize, x: usize) -> Vec<f64> {
        (0..self.states()).map(|y| self.get(i, x, y)).collect()
    }

    /// First-row table when the powers are translation invariant.
    pub fn invariant_rows(&self) -> Option<&[Vec<f64>]> {
        match self {
            PowerTable::Invariant { rows, .. } => Some(rows),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::kernel::build_variance_profile;
    use crate::chain::profile::*;

    fn stable(alpha: f64, l: usize, w: usize) -> TorusChain {
        build_variance_profile(&ProfileSpec::alpha_stable(alpha, l, w).unwrap()).unwrap()
    }

    #[test]
    fn flat_idempotent_and_zero_power() {
        let c = build_variance_profile(&ProfileSpec::flat(8).unwrap()).unwrap();
        for v in n_step_fft(&c, 3).unwrap() {
            assert!((v - 0.125).abs() < 1e-15);
        }
        let p0 = n_step_fft(&stable(2.0, 16, 2), 0).unwrap();
        assert_eq!(p0[0], 1.0);
        assert!(p0[1..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn fft_matches_dense_oracle() {
        let c = stable(2.0, 32, 4);
        let a = n_step_fft(&c, 8).unwrap();
        let b = n_step_power(&c, 8, 0).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn dense_power_symmetric() {
        let c = stable(1.5, 16, 3);
        let p = dense_power(&c, 5).unwrap();
        for x in 0..16 {
            let s: f64 = p[x * 16..(x + 1) * 16].iter().sum();
            assert!((s - 1.0).abs() < 1e-10);
            for y in 0..16 {
                assert!((p[x * 16 + y] - p[y * 16 + x]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn cap_is_reported() {
        let c = build_variance_profile(&ProfileSpec::flat(64).unwrap()).unwrap();
        match n_step_power_capped(&c, 2, 0, 32) {
            Err(Error::Cap { cost, .. }) => assert!(cost > 0.0),
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn wegner_examples() {
        let p = wegner_block_kernel(8, 1, 0.0, 17).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-15 && p[1..].iter().all(|v| v.abs() < 1e-15));
        let p = wegner_block_kernel(8, 1, 0.3, 1).unwrap();
        assert!((p[0] - 0.7).abs() < 1e-15 && (p[1] - 0.15).abs() < 1e-15 && (p[7] - 0.15).abs() < 1e-15);
        let s: f64 = wegner_block_kernel(5, 2, 0.4, 9).unwrap().iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wegner_microstates_uniform() {
        let spec = ProfileSpec::new(ProfileKind::WegnerBlock(WegnerParams { side: 4, block: 3, lambda: 0.4 }), 1, 4, 1)
            .unwrap();
        let c = build_variance_profile(&spec).unwrap();
        let red = wegner_block_kernel(4, 1, 0.4, 6).unwrap();
        for x in 0..12 {
            let row = n_step_power(&c, 6, x).unwrap();
            for y in 0..12 {
                let b = ((y / 3) + 4 - (x / 3)) % 4;
                assert!((row[y] - red[b] / 3.0).abs() < 1e-12);
            }
        }
    }

    fn hankel(x0: usize, l: usize, w: usize) -> TorusChain {
        let base = BaseKind(ProfileKind::AlphaStable(AlphaStableParams { alpha: 2.0, scale: 1.0 }));
        let spec =
            ProfileSpec::new(ProfileKind::Hankel(HankelParams { base: Box::new(base), center: vec![x0] }), 1, l, w)
                .unwrap();
        build_variance_profile(&spec).unwrap()
    }

    #[test]
    fn hankel_single_step_and_center() {
        let c = hankel(0, 16, 2);
        let ChainStructure::Reflective { row, .. } = &c.structure else { panic!() };
        let s = hankel_step(&c, 1, 5).unwrap();
        for y in 0..16 {
            assert!((s.distribution[y] - row[(5 + y) % 16]).abs() < 1e-14);
        }
        let c = hankel(10, 64, 4);
        let s = hankel_step(&c, 7, 3).unwrap();
        let argmax = (0..64).max_by(|&a, &b| s.distribution[a].total_cmp(&s.distribution[b])).unwrap();
        assert_eq!(argmax, 7);
        assert_eq!(s.center, vec![7]);
    }

    #[test]
    fn hankel_even_steps_are_a_walk() {
        let c = hankel(10, 64, 4);
        let s = hankel_step(&c, 8, 3).unwrap();
        let dense = n_step_power(&c, 8, 3).unwrap();
        // increments ξ_{2j} − ξ_{2j−1}: kernel q*q, four steps
        let ChainStructure::Reflective { row, .. } = &c.structure else { panic!() };
        let qq: Vec<f64> = (0..64).map(|j| (0..64).map(|k| row[k] * row[(j + 64 - k) % 64]).sum()).collect();
        let walk = TorusChain::from_row(vec![64], qq).unwrap();
        let w4 = n_step_power(&walk, 4, 3).unwrap();
        for y in 0..64 {
            assert!((s.distribution[y] - dense[y]).abs() < 1e-10);
            assert!((s.distribution[y] - w4[y]).abs() < 1e-10);
        }
    }

    #[test]
    fn power_table_matches_dense_for_every_structure() {
        let base = BaseKind(ProfileKind::AlphaStable(AlphaStableParams { alpha: 2.0, scale: 1.0 }));
        let specs = vec![
            ProfileSpec::alpha_stable(1.5, 12, 3).unwrap(),
            ProfileSpec::new(
                ProfileKind::Hankel(HankelParams { base: Box::new(base.clone()), center: vec![5] }),
                1,
                12,
                2,
            )
            .unwrap(),
            ProfileSpec::new(ProfileKind::WegnerBlock(WegnerParams { side: 4, block: 3, lambda: 0.3 }), 1, 4, 1)
                .unwrap(),
        ];
        for spec in specs {
            let c = build_variance_profile(&spec).unwrap();
            let t = PowerTable::build(&c, 5).unwrap();
            let dense =
                PowerTable::Dense { states: c.states, mats: (0..=5).map(|i| dense_power(&c, i).unwrap()).collect() };
            for i in 0..=5 {
                for x in 0..c.states {
                    for y in 0..c.states {
                        assert!((t.get(i, x, y) - dense.get(i, x, y)).abs() < 1e-12, "{spec:?} i={i}");
                    }
                }
            }
        }
    }
}
