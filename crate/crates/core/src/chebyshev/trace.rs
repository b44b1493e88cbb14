//! Traces of Chebyshev polynomials of the second kind at X/2.

use crate::ensembles::SampledMatrix;
use crate::error::Result;
use crate::scalar::Real;
use faer::{c64, Mat};

/// U_n(y) by the three-term recurrence.
pub fn chebyshev_u<T: Real>(n: u32, y: T) -> T {
    let two = T::of(2.0);
    let (mut prev, mut cur) = (T::one(), two * y);
    if n == 0 {
        return prev;
    }
    for _ in 1..n {
        let next = two * y * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Monomial coefficients of U_n(x/2): Σ_j (−1)^j C(n−j, j) x^{n−2j}, indexed by power.
pub fn u_half_coefficients(n: u32) -> Vec<f64> {
    let mut c = vec![0.0; n as usize + 1];
    for j in 0..=n / 2 {
        let mut b = 1.0f64;
        for i in 0..j {
            b = b * (n - j - i) as f64 / (i + 1) as f64;
        }
        c[(n - 2 * j) as usize] = if j % 2 == 0 { b.round() } else { -b.round() };
    }
    c
}

fn frob_real(a: &Mat<f64>, b: &Mat<f64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for j in 0..n {
        for i in 0..n {
            s += a[(i, j)] * b[(i, j)];
        }
    }
    s
}

fn frob_complex(a: &Mat<c64>, b: &Mat<c64>) -> f64 {
    // Tr(A B) = Σ A_ij B_ji = Σ A_ij conj(B_ij) for Hermitian B
    let n = a.nrows();
    let mut s = 0.0;
    for j in 0..n {
        for i in 0..n {
            s += (a[(i, j)] * b[(i, j)].conj()).re;
        }
    }
    s
}

/// Tr X^k for k = 0..=kmax, pairing Hermitian powers: Tr X^{a+b} = ⟨X^a, X^b⟩.
pub fn trace_powers(x: &SampledMatrix, kmax: u32) -> Vec<f64> {
    let n = x.dim();
    let half = kmax.div_ceil(2).max(1) as usize;
    let mut out = vec![0.0; kmax as usize + 1];
    out[0] = n as f64;
    macro_rules! run {
        ($m:expr, $frob:ident, $re:expr) => {{
            let mut pows = vec![$m.clone()];
            while pows.len() < half {
                let k = pows.len() + 1;
                let a = k / 2;
                let next = &pows[a - 1] * &pows[k - a - 1];
                pows.push(next);
            }
            if kmax >= 1 {
                out[1] = (0..n).map(|i| $re($m[(i, i)])).sum();
            }
            for k in 2..=kmax as usize {
                let a = k / 2;
                out[k] = $frob(&pows[a - 1], &pows[k - a - 1]);
            }
        }};
    }
    match x {
        SampledMatrix::Real(m) => run!(m, frob_real, |v: f64| v),
        SampledMatrix::Complex(m) => run!(m, frob_complex, |v: c64| v.re),
    }
    out
}

/// Tr U_n(X/2) from precomputed power traces.
pub fn trace_from_powers(pows: &[f64], n: u32) -> f64 {
    u_half_coefficients(n).iter().zip(pows).map(|(c, p)| c * p).sum()
}

/// Tr U_n(X/2) through U_{k+1} = X U_k − U_{k−1}, keeping two matrices.
pub fn chebyshev_trace(x: &SampledMatrix, n: u32) -> Result<f64> {
    x.check_hermitian(1e-12)?;
    let dim = x.dim();
    macro_rules! run {
        ($m:expr, $t:ty, $re:expr) => {{
            let mut prev = Mat::<$t>::identity(dim, dim);
            let mut cur = $m.clone();
            if n == 0 {
                return Ok(dim as f64);
            }
            for _ in 1..n {
                let next = $m * &cur - &prev;
                prev = cur;
                cur = next;
            }
            Ok((0..dim).map(|i| $re(cur[(i, i)])).sum())
        }};
    }
    match x {
        SampledMatrix::Real(m) => run!(m, f64, |v: f64| v),
        SampledMatrix::Complex(m) => run!(m, c64, |v: c64| v.re),
    }
}

/// Σ_i U_n(λ_i/2) over the spectrum.
pub fn chebyshev_trace_eig(eigenvalues: &[f64], n: u32) -> f64 {
    eigenvalues.iter().map(|&l| chebyshev_u(n, 0.5 * l)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn real(n: usize, f: impl Fn(usize, usize) -> f64) -> SampledMatrix {
        SampledMatrix::Real(Mat::from_fn(n, n, f))
    }

    #[test]
    fn identity_and_zero() {
        let two = real(5, |i, j| if i == j { 2.0 } else { 0.0 });
        for n in 0..8 {
            assert!((chebyshev_trace(&two, n).unwrap() - 5.0 * (n + 1) as f64).abs() < 1e-9);
        }
        let zero = real(4, |_, _| 0.0);
        for n in 0..8u32 {
            let want = if n % 2 == 1 {
                0.0
            } else if (n / 2) % 2 == 0 {
                4.0
            } else {
                -4.0
            };
            assert_eq!(chebyshev_trace(&zero, n).unwrap(), want);
        }
        assert!(chebyshev_trace(&real(2, |i, j| (i * 2 + j) as f64), 2).is_err());
    }

    #[test]
    fn routes_agree() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let n = 40;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v: f64 = rng.random_range(-1.0..1.0) * 0.3;
                a[i * n + j] = v;
                a[j * n + i] = v;
            }
        }
        let x = real(n, |i, j| a[i * n + j]);
        let eig = x.eigenvalues().unwrap();
        let pows = trace_powers(&x, 12);
        for k in [1, 2, 5, 12] {
            let r = chebyshev_trace(&x, k).unwrap();
            assert!((r - chebyshev_trace_eig(&eig, k)).abs() < 1e-8 * n as f64);
            assert!((r - trace_from_powers(&pows, k)).abs() < 1e-8 * n as f64);
        }
    }

    #[test]
    fn monomial_coefficients() {
        assert_eq!(u_half_coefficients(4), vec![1.0, 0.0, -3.0, 0.0, 1.0]);
        assert_eq!(u_half_coefficients(3), vec![0.0, -2.0, 0.0, 1.0]);
        assert!((chebyshev_u(5, 1.0f64) - 6.0).abs() < 1e-14);
    }
}
