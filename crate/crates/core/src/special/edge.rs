//! Reference edge laws: Gumbel and the Tracy–Widom β = 1, 2 tables.

use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// Edge-fluctuation reference law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReferenceLaw {
    Gumbel,
    #[serde(rename = "TW1")]
    Tw1,
    #[serde(rename = "TW2")]
    Tw2,
}

/// CDF value together with a flag raised when `x` lies outside the table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdfValue {
    pub p: f64,
    pub clamped: bool,
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Monotone cubic (Fritsch–Carlson) interpolant of a tabulated CDF.
pub struct CdfTable {
    x: Vec<f64>,
    y: Vec<f64>,
    slope: Vec<f64>,
    mean: f64,
    sd: f64,
}

impl CdfTable {
    pub fn from_csv(text: &str) -> Self {
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let (mut x, mut y) = (Vec::new(), Vec::new());
        for rec in rdr.records() {
            let rec = rec.expect("embedded table is valid CSV");
            x.push(rec[0].parse::<f64>().expect("numeric x"));
            y.push(rec[1].parse::<f64>().expect("numeric cdf"));
        }
        Self::new(x, y)
    }

    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut slope = vec![0.0; n];
        slope[0] = delta[0];
        slope[n - 1] = delta[n - 2];
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] > 0.0 {
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                slope[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        let mut t = Self { x, y, slope, mean: 0.0, sd: 1.0 };
        // moments of the interpolated law: E X = b − ∫F, E X² = b² − ∫2xF
        let (a, b) = (t.x[0], t.x[n - 1]);
        let steps = 20_000;
        let dx = (b - a) / steps as f64;
        let (mut i1, mut i2) = (0.0, 0.0);
        for k in 0..steps {
            let xm = a + (k as f64 + 0.5) * dx;
            let f = t.eval(xm).p;
            i1 += f * dx;
            i2 += 2.0 * xm * f * dx;
        }
        let m1 = b - i1;
        let m2 = b * b - i2 - a * a * t.y[0];
        t.mean = m1;
        t.sd = (m2 - m1 * m1).sqrt();
        t
    }

    pub fn eval(&self, x: f64) -> CdfValue {
        let n = self.x.len();
        if x <= self.x[0] {
            return CdfValue { p: self.y[0], clamped: x < self.x[0] };
        }
        if x >= self.x[n - 1] {
            return CdfValue { p: self.y[n - 1], clamped: x > self.x[n - 1] };
        }
        let i = self.x.partition_point(|&v| v <= x) - 1;
        let h = self.x[i + 1] - self.x[i];
        let t = (x - self.x[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let p = self.y[i]
            + (3.0 * t2 - 2.0 * t3) * (self.y[i + 1] - self.y[i])
            + h * ((t3 - 2.0 * t2 + t) * self.slope[i] + (t3 - t2) * self.slope[i + 1]);
        CdfValue { p: p.clamp(0.0, 1.0), clamped: false }
    }

    pub fn range(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }
}

fn tw_table(law: ReferenceLaw) -> &'static CdfTable {
    static TW1: OnceLock<CdfTable> = OnceLock::new();
    static TW2: OnceLock<CdfTable> = OnceLock::new();
    match law {
        ReferenceLaw::Tw1 => TW1.get_or_init(|| CdfTable::from_csv(include_str!("../../data/tw1.csv"))),
        ReferenceLaw::Tw2 => TW2.get_or_init(|| CdfTable::from_csv(include_str!("../../data/tw2.csv"))),
        ReferenceLaw::Gumbel => unreachable!("Gumbel is closed form"),
    }
}

impl ReferenceLaw {
    pub fn cdf(&self, x: f64) -> CdfValue {
        match self {
            ReferenceLaw::Gumbel => CdfValue { p: (-(-x).exp()).exp(), clamped: false },
            law => tw_table(*law).eval(x),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            ReferenceLaw::Gumbel => EULER_GAMMA,
            law => tw_table(*law).mean,
        }
    }

    pub fn sd(&self) -> f64 {
        match self {
            ReferenceLaw::Gumbel => std::f64::consts::PI / 6f64.sqrt(),
            law => tw_table(*law).sd,
        }
    }

    /// CDF of the law shifted and scaled to mean 0, variance 1.
    pub fn standardized_cdf(&self, z: f64) -> f64 {
        self.cdf(self.mean() + self.sd() * z).p
    }

    pub fn name(&self) -> &'static str {
        match self {
            ReferenceLaw::Gumbel => "Gumbel",
            ReferenceLaw::Tw1 => "TW1",
            ReferenceLaw::Tw2 => "TW2",
        }
    }
}

pub fn reference_cdf(law: ReferenceLaw, x: f64) -> CdfValue {
    law.cdf(x)
}

/// Sup-distance between two standardized reference CDFs on a fine grid.
pub fn standardized_distance(a: ReferenceLaw, b: ReferenceLaw) -> f64 {
    (0..=16_000)
        .map(|k| -8.0 + 0.001 * k as f64)
        .map(|z| (a.standardized_cdf(z) - b.standardized_cdf(z)).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gumbel_closed_form() {
        assert_relative_eq!(reference_cdf(ReferenceLaw::Gumbel, 0.0).p, (-1.0f64).exp(), epsilon = 1e-15);
        assert_relative_eq!(ReferenceLaw::Gumbel.standardized_cdf(0.0), ReferenceLaw::Gumbel.cdf(EULER_GAMMA).p);
    }

    #[test]
    fn tw_tables_are_cdfs() {
        for law in [ReferenceLaw::Tw1, ReferenceLaw::Tw2] {
            let (lo, hi) = tw_table(law).range();
            assert!(law.cdf(lo - 50.0).p < 1e-4 && law.cdf(lo - 50.0).clamped);
            assert!(law.cdf(hi + 50.0).p > 1.0 - 1e-4);
            let mut prev = 0.0;
            for k in 0..1000 {
                let x = lo + (hi - lo) * k as f64 / 999.0;
                let v = law.cdf(x);
                assert!(v.p >= prev && (0.0..=1.0).contains(&v.p), "{law:?} x={x} {} {prev}", v.p);
                prev = v.p;
            }
        }
    }

    #[test]
    fn tw_reference_statistics() {
        // TW1: mean −1.2065, sd 1.268, median ≈ −1.27; TW2: mean −1.7711, sd 0.9018
        let t1 = ReferenceLaw::Tw1;
        assert!((t1.cdf(-1.27).p - 0.5).abs() < 0.02, "{}", t1.cdf(-1.27).p);
        assert!((t1.mean() + 1.2065).abs() < 0.05, "{}", t1.mean());
        assert!((t1.sd() - 1.268).abs() < 0.05, "{}", t1.sd());
        let t2 = ReferenceLaw::Tw2;
        assert!((t2.mean() + 1.7711).abs() < 0.05, "{}", t2.mean());
        assert!((t2.sd() - 0.9018).abs() < 0.05, "{}", t2.sd());
    }

    #[test]
    fn interpolant_is_monotone_between_knots() {
        let t = CdfTable::new(vec![0.0, 1.0, 2.0, 3.0], vec![0.0, 0.1, 0.1, 1.0]);
        let mut prev = 0.0;
        for k in 0..=300 {
            let p = t.eval(k as f64 / 100.0).p;
            assert!(p >= prev - 1e-15);
            prev = p;
        }
    }
}
