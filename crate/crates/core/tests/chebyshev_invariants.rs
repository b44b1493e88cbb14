use irmlab::chain::ProfileSpec;
use irmlab::chebyshev::{chebyshev_trace, chebyshev_trace_eig, chebyshev_u, linearize_generic};
use irmlab::chebyshev::{cumulants_from_moments, moments_from_cumulants};
use irmlab::ensembles::{sample_matrix, EnsembleSpec, SpikeSpec};
use irmlab::Rational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use std::collections::BTreeMap;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // Outliers up to a + 1/a ≈ 2.9 make U_n(λ/2) grow like 2.6ⁿ, so the
    // 1e-8·N tolerance is taken relative to the largest term.
    #[test]
    fn recurrence_trace_matches_spectrum(side in 8usize..=48, beta in 1u8..=2, a in 1.0f64..2.4, seed in any::<u64>(), n in 0u32..=64) {
        let spike = SpikeSpec::diagonal(vec![a], vec![side / 3]).unwrap();
        let spec = EnsembleSpec::new(beta, ProfileSpec::flat(side).unwrap(), seed).unwrap().with_spike(spike).unwrap();
        let x = sample_matrix(&spec, 0).unwrap();
        let eig = x.eigenvalues().unwrap();
        prop_assert!(eig.iter().all(|l| l.abs() <= 3.0));
        let scale = eig.iter().map(|&l| chebyshev_u(n, 0.5 * l).abs()).fold(1.0, f64::max);
        let rec = chebyshev_trace(&x, n).unwrap();
        let spec_route = chebyshev_trace_eig(&eig, n);
        prop_assert!((rec - spec_route).abs() <= 1e-8 * side as f64 * scale, "n={} {} vs {}", n, rec, spec_route);
    }

    #[test]
    fn cumulant_map_inverts(s in 1u32..=5, values in prop::collection::vec(-1.0f64..1.0, 31)) {
        let moments: BTreeMap<u32, f64> = (1..(1u32 << s)).map(|m| (m, values[m as usize - 1])).collect();
        let kappa = cumulants_from_moments(&moments).unwrap();
        let back = moments_from_cumulants(&kappa);
        for (k, v) in &moments {
            prop_assert!((back[k] - v).abs() <= 1e-12);
        }
    }
}

#[test]
fn exact_linearization_has_unit_mass_and_parity_zeros() {
    for m in 1..=50usize {
        for t in 1..=5usize {
            let c = linearize_generic::<Rational>(m, t, false);
            assert!(c.iter().fold(Rational::zero(), |a, b| a + b).is_one(), "m={m} t={t}");
            for (k, v) in c.iter().enumerate() {
                if k % 2 != (m * t) % 2 {
                    assert!(v.is_zero());
                }
            }
            if m >= 2 {
                let p = linearize_generic::<Rational>(m, t, true);
                for (k, v) in p.iter().enumerate() {
                    if k % 2 != (t * m + 1) % 2 {
                        assert!(v.is_zero(), "perturbed m={m} t={t} k={k}");
                    }
                }
            }
        }
    }
}
