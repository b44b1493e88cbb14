//! Transition kernels built from variance profiles.

use super::profile::{BaseKind, ProfileKind, ProfileSpec};
use crate::error::{Error, Result};
use crate::special::StableLaw;
use crate::zeta::hurwitz_zeta;

/// Storage layout of a kernel.
#[derive(Debug, Clone, PartialEq)]
pub enum ChainStructure {
    /// p(x, y) = row[y − x] on the torus with the given side lengths.
    TranslationInvariant { shape: Vec<usize>, row: Vec<f64> },
    /// p(x, y) = row[x + y − center].
    Reflective { shape: Vec<usize>, row: Vec<f64>, center: Vec<usize> },
    /// p(x, y) = reduced[block(y) − block(x)] / M, blocks laid out on a torus.
    Block { shape: Vec<usize>, reduced: Vec<f64>, block: usize },
    /// Full row-major table.
    Dense { table: Vec<f64> },
}

/// Symmetric Markov kernel on a finite state space.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusChain {
    pub states: usize,
    pub structure: ChainStructure,
    pub spec: Option<ProfileSpec>,
}

pub(crate) fn index_of(coords: &[usize], shape: &[usize]) -> usize {
    coords.iter().zip(shape).fold(0, |acc, (&c, &l)| acc * l + c)
}

pub(crate) fn coords_of(mut idx: usize, shape: &[usize]) -> Vec<usize> {
    let mut c = vec![0; shape.len()];
    for a in (0..shape.len()).rev() {
        c[a] = idx % shape[a];
        idx /= shape[a];
    }
    c
}

/// Index of (a + sign·b + offset) mod shape, coordinatewise.
pub(crate) fn combine(a: usize, b: usize, sign: i64, offset: &[i64], shape: &[usize]) -> usize {
    let ca = coords_of(a, shape);
    let cb = coords_of(b, shape);
    let mut idx = 0usize;
    for k in 0..shape.len() {
        let l = shape[k] as i64;
        let v = (ca[k] as i64 + sign * cb[k] as i64 + offset[k]).rem_euclid(l);
        idx = idx * shape[k] + v as usize;
    }
    idx
}

fn negate(idx: usize, shape: &[usize]) -> usize {
    let c = coords_of(idx, shape);
    let n: Vec<usize> = c.iter().zip(shape).map(|(&v, &l)| (l - v) % l).collect();
    index_of(&n, shape)
}

/// Make row[j] = row[−j] exactly, then normalize to unit sum.
fn symmetrize_normalize(mut row: Vec<f64>, shape: &[usize]) -> Vec<f64> {
    for j in 0..row.len() {
        let m = negate(j, shape);
        if m > j {
            let avg = 0.5 * (row[j] + row[m]);
            row[j] = avg;
            row[m] = avg;
        }
    }
    let s: f64 = row.iter().sum();
    row.iter().map(|v| v / s).collect()
}

/// Radial profile f(r) used by the sampled kinds.
fn radial_value(kind: &ProfileKind, d: usize, r: f64) -> f64 {
    match kind {
        ProfileKind::Flat => 1.0,
        ProfileKind::PowerLawTail(p) => {
            let s = power_law_scale(p.tail, p.scale);
            (1.0 + (r / s).powi(2)).powf(-p.tail / 2.0)
        }
        ProfileKind::TruncatedGaussian(p) => {
            if r <= p.cutoff * p.sigma {
                (-(r * r) / (2.0 * p.sigma * p.sigma)).exp()
            } else {
                0.0
            }
        }
        ProfileKind::Tabulated(p) => {
            let u = r / p.step;
            let i = u.floor() as usize;
            if i + 1 < p.values.len() {
                let w = u - i as f64;
                p.values[i] * (1.0 - w) + p.values[i + 1] * w
            } else if i + 1 == p.values.len() && u == i as f64 {
                p.values[i]
            } else {
                0.0
            }
        }
        _ => unreachable!("radial_value on non-sampled kind (d = {d})"),
    }
}

pub(crate) fn power_law_scale(tail: f64, scale: Option<f64>) -> f64 {
    scale.unwrap_or(if tail > 3.0 { (tail - 3.0).sqrt() } else { 1.0 })
}

/// Σ_k f((j + kL)/W) for a sampled kind in one dimension.
fn periodized_1d(kind: &ProfileKind, j: i64, side: usize, width: usize) -> f64 {
    let l = side as f64;
    let w = width as f64;
    let f = |y: f64| radial_value(kind, 1, y.abs() / w);
    let mut sum = f(j as f64);
    let cap: i64 = 100_000;
    let mut k = 1i64;
    while k <= cap {
        let t = f(j as f64 + k as f64 * l) + f(j as f64 - k as f64 * l);
        sum += t;
        if t <= 1e-15 * sum {
            break;
        }
        k += 1;
    }
    if let (ProfileKind::PowerLawTail(p), true) = (kind, k > cap) {
        // remaining shells from the expansion (1+u)^{-T/2} = Σ binom(−T/2, i) u^i, u = (s/y)²
        let s = power_law_scale(p.tail, p.scale) * w;
        let mut coef = 1.0;
        let q = (k as f64) + 1.0;
        for i in 0..12 {
            let e = p.tail + 2.0 * i as f64;
            let scale = (s / l).powf(e);
            let z = hurwitz_zeta(e, q + j as f64 / l) + hurwitz_zeta(e, q - j as f64 / l);
            sum += coef * scale * z;
            coef *= (-p.tail / 2.0 - i as f64) / (i as f64 + 1.0);
        }
    }
    sum
}

/// Σ_{k∈Z^d} f(|j + kL|/W) with shells in max-norm.
fn periodized_nd(kind: &ProfileKind, j: &[i64], side: usize, width: usize) -> f64 {
    let d = j.len();
    if d == 1 {
        return periodized_1d(kind, j[0], side, width);
    }
    let l = side as i64;
    let w = width as f64;
    let eval = |k: &[i64]| {
        let r2: f64 = j.iter().zip(k).map(|(&a, &b)| ((a + b * l) as f64).powi(2)).sum();
        radial_value(kind, d, r2.sqrt() / w)
    };
    let mut sum = eval(&vec![0; d]);
    for radius in 1..=64i64 {
        let side_len = (2 * radius + 1) as usize;
        let mut shell = 0.0;
        let mut k = vec![0i64; d];
        for idx in 0..side_len.pow(d as u32) {
            let mut r = idx;
            for kk in k.iter_mut() {
                *kk = (r % side_len) as i64 - radius;
                r /= side_len;
            }
            if k.iter().any(|v| v.abs() == radius) {
                shell += eval(&k);
            }
        }
        sum += shell;
        if shell <= 1e-15 * sum {
            break;
        }
    }
    sum
}

fn band_row(kind: &ProfileKind, d: usize, side: usize, width: usize) -> Result<Vec<f64>> {
    let shape = vec![side; d];
    let n = side.pow(d as u32);
    let row: Vec<f64> = match kind {
        ProfileKind::Flat => vec![1.0; n],
        ProfileKind::AlphaStable(p) => {
            let law = StableLaw::standard(p.alpha)?;
            let tau = (p.scale * width as f64 / side as f64).powf(p.alpha);
            (0..n)
                .map(|j| {
                    let c = coords_of(j, &shape);
                    let x: Vec<f64> = c.iter().map(|&v| v as f64 / side as f64).collect();
                    law.theta_nd(&x, tau)
                })
                .collect::<Result<_>>()?
        }
        ProfileKind::PowerLawTail(_) | ProfileKind::TruncatedGaussian(_) | ProfileKind::Tabulated(_) => (0..n)
            .map(|j| {
                let c: Vec<i64> = coords_of(j, &shape).iter().map(|&v| v as i64).collect();
                periodized_nd(kind, &c, side, width)
            })
            .collect(),
        _ => return Err(Error::invalid("not a band profile")),
    };
    if row.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("profile produced non-finite values"));
    }
    // negative round-off from the frequency series is clipped
    let row = row.into_iter().map(|v| v.max(0.0)).collect();
    Ok(symmetrize_normalize(row, &shape))
}

fn base_structure(base: &BaseKind, d: usize, side: usize, width: usize) -> Result<ChainStructure> {
    let spec = ProfileSpec { kind: base.0.clone(), d, side, width };
    Ok(build_variance_profile(&spec)?.structure)
}

/// Kernel realizing the variance profile of `spec`.
pub fn build_variance_profile(spec: &ProfileSpec) -> Result<TorusChain> {
    spec.validate()?;
    let d = spec.d;
    let shape = vec![spec.side; d];
    let structure = match &spec.kind {
        ProfileKind::Hankel(h) => {
            let row = band_row(&h.base.0, d, spec.side, spec.width)?;
            ChainStructure::Reflective { shape, row, center: h.center.clone() }
        }
        ProfileKind::WegnerBlock(w) => ChainStructure::Block {
            shape: vec![w.side; d],
            reduced: lazy_walk_row(w.side, d, w.lambda),
            block: w.block,
        },
        ProfileKind::Interpolated(p) => {
            let base = base_structure(&p.base, d, spec.side, spec.width)?;
            let n = spec.states();
            let lam = p.lambda;
            match base {
                ChainStructure::TranslationInvariant { shape, row } => {
                    let row = row.iter().map(|&v| lam / n as f64 + (1.0 - lam) * v).collect();
                    ChainStructure::TranslationInvariant { shape, row }
                }
                other => {
                    let base = TorusChain { states: n, structure: other, spec: None };
                    let mut table = base.dense_table();
                    for v in table.iter_mut() {
                        *v = lam / n as f64 + (1.0 - lam) * *v;
                    }
                    ChainStructure::Dense { table }
                }
            }
        }
        kind => ChainStructure::TranslationInvariant { row: band_row(kind, d, spec.side, spec.width)?, shape },
    };
    Ok(TorusChain { states: spec.states(), structure, spec: Some(spec.clone()) })
}

/// First row of the lazy nearest-neighbour walk on (Z/D)^d.
pub(crate) fn lazy_walk_row(side: usize, d: usize, lambda: f64) -> Vec<f64> {
    let shape = vec![side; d];
    let mut row = vec![0.0; side.pow(d as u32)];
    row[0] += 1.0 - lambda;
    for axis in 0..d {
        for step in [1usize, side - 1] {
            let mut c = vec![0; d];
            c[axis] = step;
            row[index_of(&c, &shape)] += lambda / (2 * d) as f64;
        }
    }
    row
}

impl TorusChain {
    /// Dense kernel from an explicit table (validated).
    pub fn from_dense(states: usize, table: Vec<f64>) -> Result<Self> {
        if table.len() != states * states {
            return Err(Error::invalid("dense table has wrong size"));
        }
        let c = Self { states, structure: ChainStructure::Dense { table }, spec: None };
        c.check()?;
        Ok(c)
    }

    /// Translation-invariant kernel from a first row (symmetrized and normalized).
    pub fn from_row(shape: Vec<usize>, row: Vec<f64>) -> Result<Self> {
        let n: usize = shape.iter().product();
        if row.len() != n || row.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::invalid("row must be nonnegative with one entry per state"));
        }
        let row = symmetrize_normalize(row, &shape);
        Ok(Self { states: n, structure: ChainStructure::TranslationInvariant { shape, row }, spec: None })
    }

    pub fn entry(&self, x: usize, y: usize) -> f64 {
        match &self.structure {
            ChainStructure::TranslationInvariant { shape, row } => row[combine(y, x, -1, &vec![0; shape.len()], shape)],
            ChainStructure::Reflective { shape, row, center } => {
                let off: Vec<i64> = center.iter().map(|&c| -(c as i64)).collect();
                row[combine(x, y, 1, &off, shape)]
            }
            ChainStructure::Block { shape, reduced, block } => {
                let (a, b) = (x / block, y / block);
                reduced[combine(b, a, -1, &vec![0; shape.len()], shape)] / *block as f64
            }
            ChainStructure::Dense { table } => table[x * self.states + y],
        }
    }

    pub fn row(&self, x: usize) -> Vec<f64> {
        (0..self.states).map(|y| self.entry(x, y)).collect()
    }

    pub fn dense_table(&self) -> Vec<f64> {
        if let ChainStructure::Dense { table } = &self.structure {
            return table.clone();
        }
        let n = self.states;
        let mut t = Vec::with_capacity(n * n);
        for x in 0..n {
            t.extend(self.row(x));
        }
        t
    }

    pub fn is_translation_invariant(&self) -> bool {
        matches!(self.structure, ChainStructure::TranslationInvariant { .. })
    }

    /// Checks the Markov invariants: unit row sums, symmetry, nonnegativity.
    pub fn check(&self) -> Result<()> {
        let n = self.states;
        for x in 0..n {
            let row = self.row(x);
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > 1e-12 {
                return Err(Error::invalid(format!("row {x} sums to {s}")));
            }
            for (y, &v) in row.iter().enumerate() {
                if !(v >= 0.0) {
                    return Err(Error::invalid(format!("entry ({x},{y}) = {v} is negative")));
                }
                if y > x && v != self.entry(y, x) {
                    return Err(Error::invalid(format!("kernel not symmetric at ({x},{y})")));
                }
            }
        }
        Ok(())
    }

    /// Largest entry max_{x,y} p(x,y).
    pub fn max_entry(&self) -> f64 {
        match &self.structure {
            ChainStructure::TranslationInvariant { row, .. } | ChainStructure::Reflective { row, .. } => {
                row.iter().copied().fold(0.0, f64::max)
            }
            ChainStructure::Block { reduced, block, .. } => reduced.iter().copied().fold(0.0, f64::max) / *block as f64,
            ChainStructure::Dense { table } => table.iter().copied().fold(0.0, f64::max),
        }
    }

    /// Kernel as CSV with header `x,y,p`, row-major.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,y,p\n");
        for x in 0..self.states {
            for y in 0..self.states {
                s.push_str(&format!("{x},{y},{:e}\n", self.entry(x, y)));
            }
        }
        s
    }
}
