use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

/// In-place multidimensional DFT (row-major, last axis fastest).
pub(crate) fn fft_nd(data: &mut [Complex64], shape: &[usize], inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let total: usize = shape.iter().product();
    debug_assert_eq!(total, data.len());
    for (axis, &len) in shape.iter().enumerate() {
        let stride: usize = shape[axis + 1..].iter().product();
        let fft = if inverse { planner.plan_fft_inverse(len) } else { planner.plan_fft_forward(len) };
        let mut line = vec![Complex64::new(0.0, 0.0); len];
        let outer = total / (len * stride);
        for o in 0..outer {
            for s in 0..stride {
                let base = o * len * stride + s;
                for (i, v) in line.iter_mut().enumerate() {
                    *v = data[base + i * stride];
                }
                fft.process(&mut line);
                for (i, v) in line.iter().enumerate() {
                    data[base + i * stride] = *v;
                }
            }
        }
    }
    if inverse {
        let scale = 1.0 / total as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }
}

/// Real symmetric row → its (real) DFT.
pub(crate) fn spectrum(row: &[f64], shape: &[usize]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = row.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_nd(&mut buf, shape, false);
    buf
}

/// Inverse DFT of `spec^n`, clamped and renormalized into a probability vector.
pub(crate) fn power_from_spectrum(spec: &[Complex64], shape: &[usize], n: usize) -> Vec<f64> {
    let mut buf: Vec<Complex64> = spec.iter().map(|z| z.powu(n as u32)).collect();
    fft_nd(&mut buf, shape, true);
    clamp_normalize(buf.iter().map(|z| z.re).collect())
}

pub(crate) fn clamp_normalize(mut v: Vec<f64>) -> Vec<f64> {
    for x in v.iter_mut() {
        if *x < 0.0 && *x >= -1e-12 {
            *x = 0.0;
        }
    }
    let s: f64 = v.iter().sum();
    for x in v.iter_mut() {
        *x /= s;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_2d() {
        let shape = [4, 6];
        let orig: Vec<Complex64> = (0..24).map(|i| Complex64::new(i as f64, (i * i) as f64 * 0.1)).collect();
        let mut buf = orig.clone();
        fft_nd(&mut buf, &shape, false);
        fft_nd(&mut buf, &shape, true);
        for (a, b) in orig.iter().zip(&buf) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
