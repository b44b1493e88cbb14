//! Hurwitz zeta by Euler–Maclaurin summation.

// B_{2k}/(2k)!
const B2K_OVER_FACT: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
    43867.0 / 5109094217170944000.0,
    -174611.0 / 802857662698291200000.0,
];

/// ζ(s, q) = Σ_{k≥0} (k+q)^{-s} for s > 1, q > 0.
pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    assert!(s > 1.0 && q > 0.0, "hurwitz_zeta needs s > 1, q > 0");
    let m = 12usize;
    let mut sum = 0.0;
    for k in 0..m {
        sum += (q + k as f64).powf(-s);
    }
    let a = q + m as f64;
    let mut tail = a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
    // rising factorial s(s+1)...(s+2k-2) times a^{-s-2k+1}
    let mut fact = s;
    let mut pow = a.powf(-s - 1.0);
    for (k, b) in B2K_OVER_FACT.iter().enumerate() {
        let term = b * fact * pow;
        tail += term;
        if term.abs() < 1e-17 * tail.abs() {
            break;
        }
        let j = 2 * k as u32 + 1;
        fact *= (s + j as f64) * (s + j as f64 + 1.0);
        pow /= a * a;
    }
    sum + tail
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn riemann_values() {
        let pi = std::f64::consts::PI;
        assert_relative_eq!(hurwitz_zeta(2.0, 1.0), pi * pi / 6.0, epsilon = 1e-15);
        assert_relative_eq!(hurwitz_zeta(4.0, 1.0), pi.powi(4) / 90.0, epsilon = 1e-15);
        // ζ(2, 1/2) = 3ζ(2)
        assert_relative_eq!(hurwitz_zeta(2.0, 0.5), pi * pi / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn shift_identity() {
        for &(s, q) in &[(1.5, 0.3), (2.5, 7.2), (5.0, 40.0)] {
            let lhs = hurwitz_zeta(s, q) - hurwitz_zeta(s, q + 1.0);
            assert_relative_eq!(lhs, f64::powf(q, -s), max_relative = 1e-13);
        }
    }
}
