//! Linearization of powers of U_m in the basis U_k/(k+1).

use crate::scalar::Field;
use crate::Rational;
use num_traits::ToPrimitive;
use serde::Serialize;

/// Product of a U-expansion with U_m: U_a U_m = Σ_{k=|a−m|, step 2}^{a+m} U_k.
fn times_u<T: Field>(a: &[T], m: usize) -> Vec<T> {
    let mut out = vec![T::zero(); a.len() + m];
    for (j, c) in a.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let lo = j.abs_diff(m);
        let mut k = lo;
        while k <= j + m {
            out[k] = out[k].clone() + c.clone();
            k += 2;
        }
    }
    out
}

/// Coefficients c with (U_m/(m+1))^t = Σ_k c_k U_k/(k+1); when `perturbed`,
/// one factor is replaced by U_{m−1}/m.
pub fn linearize_generic<T: Field>(m: usize, t: usize, perturbed: bool) -> Vec<T> {
    assert!(m >= 1 && t >= 1, "linearization needs m ≥ 1, t ≥ 1");
    let mut a: Vec<T> = vec![T::zero(); m + 1];
    let mut denom = T::int(m as i64 + 1);
    if perturbed {
        a = vec![T::zero(); m];
        a[m - 1] = T::one();
        denom = T::int(m as i64);
    } else {
        a[m] = T::one();
    }
    for _ in 1..t {
        a = times_u(&a, m);
        denom = denom * T::int(m as i64 + 1);
    }
    a.into_iter().enumerate().map(|(k, c)| c * T::int(k as i64 + 1) / denom.clone()).collect()
}

/// Coefficient table, exact when m·t ≤ 64.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "repr", content = "coeffs", rename_all = "snake_case")]
pub enum Coefficients {
    Exact(#[serde(serialize_with = "ser_rationals")] Vec<Rational>),
    Float(Vec<f64>),
}

fn ser_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| r.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Linearization {
    pub m: usize,
    pub t: usize,
    pub perturbed: bool,
    pub coefficients: Coefficients,
}

impl Linearization {
    pub fn len(&self) -> usize {
        match &self.coefficients {
            Coefficients::Exact(v) => v.len(),
            Coefficients::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn value(&self, k: usize) -> f64 {
        match &self.coefficients {
            Coefficients::Exact(v) => v.get(k).map_or(0.0, |r| r.to_f64().unwrap_or(f64::NAN)),
            Coefficients::Float(v) => v.get(k).copied().unwrap_or(0.0),
        }
    }

    pub fn is_exact_zero(&self, k: usize) -> bool {
        match &self.coefficients {
            Coefficients::Exact(v) => v.get(k).is_none_or(num_traits::Zero::is_zero),
            Coefficients::Float(v) => v.get(k).is_none_or(|&c| c == 0.0),
        }
    }
}

/// Largest m·t handled in exact arithmetic.
pub const EXACT_LIMIT: usize = 64;

pub fn linearize_power(m: usize, t: usize, perturbed: bool) -> crate::Result<Linearization> {
    if m < 1 || t < 2 || (perturbed && m < 2) {
        return Err(crate::Error::invalid(format!(
            "linearization needs m ≥ 1 (≥ 2 if perturbed) and t ≥ 2, got m={m}, t={t}"
        )));
    }
    let coefficients = if m * t <= EXACT_LIMIT {
        Coefficients::Exact(linearize_generic::<Rational>(m, t, perturbed))
    } else {
        Coefficients::Float(linearize_generic::<f64>(m, t, perturbed))
    };
    Ok(Linearization { m, t, perturbed, coefficients })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn square_of_u3() {
        let l = linearize_power(3, 2, false).unwrap();
        let Coefficients::Exact(c) = &l.coefficients else { panic!() };
        let want = [r(1, 16), r(0, 1), r(3, 16), r(0, 1), r(5, 16), r(0, 1), r(7, 16)];
        assert_eq!(c.as_slice(), &want);
    }

    #[test]
    fn perturbed_parity_and_mass() {
        let l = linearize_power(5, 3, true).unwrap();
        for k in 0..l.len() {
            if k % 2 != (3 * 5 - 1) % 2 {
                assert!(l.is_exact_zero(k));
            }
        }
        let Coefficients::Exact(c) = &l.coefficients else { panic!() };
        let s = c.iter().fold(r(0, 1), |a, b| a + b);
        assert_eq!(s, r(1, 1));
    }

    #[test]
    fn float_path_beyond_limit() {
        let l = linearize_power(40, 3, false).unwrap();
        assert!(matches!(l.coefficients, Coefficients::Float(_)));
        let s: f64 = (0..l.len()).map(|k| l.value(k)).sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert!(linearize_power(3, 1, false).is_err());
    }
}
