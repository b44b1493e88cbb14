use irmlab::chain::{build_variance_profile, dense_power, n_step_fft_all, ProfileSpec};
use irmlab::diagrams::upper_bound_b;
use proptest::prelude::*;

fn interpolated(alpha: f64, side: usize, width: usize, lambda: f64) -> ProfileSpec {
    ProfileSpec::from_json(&format!(
        r#"{{"kind":"Interpolated","params":{{"base":{{"kind":"AlphaStable","params":{{"alpha":{alpha}}}}},"lambda":{lambda}}},"d":1,"L":{side},"W":{width}}}"#
    ))
    .unwrap()
}

fn band() -> impl Strategy<Value = (f64, usize, usize)> {
    (prop::sample::select(vec![1.0, 1.5, 2.0]), 4usize..=64).prop_flat_map(|(a, l)| (Just(a), Just(l), 1..=l / 2))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn built_chains_are_symmetric_markov((alpha, side, width) in band(), tail in 1.5f64..6.0) {
        let specs = [
            ProfileSpec::alpha_stable(alpha, side, width).unwrap(),
            ProfileSpec::from_json(&format!(
                r#"{{"kind":"PowerLawTail","params":{{"tail":{tail}}},"d":1,"L":{side},"W":{width}}}"#
            )).unwrap(),
        ];
        for spec in &specs {
            let c = build_variance_profile(spec).unwrap();
            for x in 0..c.states {
                let row = c.row(x);
                prop_assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
                for (y, &p) in row.iter().enumerate() {
                    prop_assert!(p >= 0.0);
                    prop_assert_eq!(p, c.entry(y, x));
                }
            }
        }
    }

    #[test]
    fn dft_powers_match_dense_powers((alpha, side, width) in band(), n in 0usize..=32) {
        let c = build_variance_profile(&ProfileSpec::alpha_stable(alpha, side, width).unwrap()).unwrap();
        let fft = n_step_fft_all(&c, n).unwrap();
        let dense = dense_power(&c, n).unwrap();
        for (y, &v) in fft[n].iter().enumerate() {
            prop_assert!((v - dense[y]).abs() <= 1e-10, "y={} {} vs {}", y, v, dense[y]);
        }
    }

    #[test]
    fn interpolated_powers_obey_the_mixing_identity(
        (alpha, side, width) in band(),
        lambda in prop::sample::select(vec![0.01, 0.3, 0.77]),
        n in 1usize..=32,
    ) {
        let base = build_variance_profile(&ProfileSpec::alpha_stable(alpha, side, width).unwrap()).unwrap();
        let mixed = build_variance_profile(&interpolated(alpha, side, width, lambda)).unwrap();
        let (p0, pl) = (dense_power(&base, n).unwrap(), dense_power(&mixed, n).unwrap());
        let keep = (1.0 - lambda).powi(n as i32);
        let j = 1.0 / side as f64;
        for k in 0..side * side {
            prop_assert!((pl[k] - (keep * p0[k] + (1.0 - keep) * j)).abs() <= 1e-12);
        }
    }
}

// n/N is not a binary fraction, so "exact" means up to the rounding of an n-term sum.
#[test]
fn flat_b_is_n_over_states() {
    for side in [4usize, 10, 64, 100] {
        let c = build_variance_profile(&ProfileSpec::flat(side).unwrap()).unwrap();
        for n in 1..=24 {
            let b = upper_bound_b(&c, n).unwrap();
            let want = n as f64 / side as f64;
            assert!((b - want).abs() <= n as f64 * f64::EPSILON * want, "L={side} n={n}: {b} vs {want}");
        }
    }
}
