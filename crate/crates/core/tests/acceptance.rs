//! Acceptance suite. Prints one PASS/FAIL line per criterion; pass criterion
//! numbers as arguments to run a subset.

use irmlab::chain::{build_variance_profile, ProfileSpec, TorusChain};
use irmlab::chebyshev::{linearize_generic, mixed_chebyshev_moment, MomentRequest};
use irmlab::comparison::{comparison_report, lclt_residual, Thresholds};
use irmlab::diagrams::{
    catalog, catalog_diagram, crossover_to_sub, crossover_to_super, diagram_function, diagram_upper_bound,
    limiting_diagram_function, split_orders, upper_bound_b, LimitRequest, Regime,
};
use irmlab::ensembles::deviation::optimized_bound;
use irmlab::ensembles::{ks_distance, simulate_edge, EdgeSampleSet, Ensemble, EnsembleSpec};
use irmlab::experiments::config::WegnerParams;
use irmlab::experiments::wegner_vs_skellam;
use irmlab::special::{limit_coeff, skellam_kernel, ReferenceLaw, Side, StableLaw, ThetaRoute};
use irmlab::Rational;
use num_traits::Zero;
use std::collections::BTreeSet;
use std::time::Instant;

const LLT_TOL: f64 = 1e-6;
const THETA_TOL: f64 = 1e-10;
const IPR_FACTOR: f64 = 5.0;
const SUPER_REL: f64 = 0.10;
const SUB_REL: f64 = 0.15;
const MOMENT_STDERRS: f64 = 3.0;
const LINEARIZATION_TOL: f64 = 0.05;
const SKELLAM_TOL: f64 = 2e-3;
const DBM_TOL: f64 = 1e-12;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn chain(spec: ProfileSpec) -> TorusChain {
    build_variance_profile(&spec).unwrap()
}

fn profile(kind: &str, params: &str, side: usize, width: usize) -> ProfileSpec {
    ProfileSpec::from_json(&format!(r#"{{"kind":"{kind}","params":{params},"d":1,"L":{side},"W":{width}}}"#)).unwrap()
}

fn llt() -> Outcome {
    let r = lclt_residual(&chain(ProfileSpec::alpha_stable(2.0, 256, 16).unwrap()), 2.0, 64).unwrap().residual;
    outcome(r <= LLT_TOL, format!("sup residual {r:.3e} (tol {LLT_TOL:e})"))
}

fn theta_duality() -> Outcome {
    let mut worst: f64 = 0.0;
    for alpha in [1.0, 1.5, 2.0] {
        let law = StableLaw::standard(alpha).unwrap();
        for tau in [0.05, 0.5, 5.0, 20.0] {
            for j in 0..64 {
                let x = j as f64 / 64.0;
                let s = law.theta_route(x, tau, ThetaRoute::Spatial).unwrap();
                let f = law.theta_route(x, tau, ThetaRoute::Frequency).unwrap();
                worst = worst.max((s - f).abs());
            }
        }
    }
    outcome(worst <= THETA_TOL, format!("max route gap {worst:.3e} (tol {THETA_TOL:e})"))
}

/// Edge samples at N = 512, β = 1, α = 2 for the narrow and wide bands.
fn edge_sets() -> (EdgeSampleSet, EdgeSampleSet) {
    let set = |w: usize, seed: u64| {
        let spec = EnsembleSpec::new(1, ProfileSpec::alpha_stable(2.0, 512, w).unwrap(), seed).unwrap();
        simulate_edge(&spec, 1000).unwrap()
    };
    (set(4, 301), set(256, 302))
}

fn gumbel_to_tw(narrow: &EdgeSampleSet, wide: &EdgeSampleSet) -> Outcome {
    let ks = |s: &EdgeSampleSet, law| ks_distance(&s.rescaled(), law, true).unwrap();
    let (ng, nt) = (ks(narrow, ReferenceLaw::Gumbel), ks(narrow, ReferenceLaw::Tw1));
    let (wg, wt) = (ks(wide, ReferenceLaw::Gumbel), ks(wide, ReferenceLaw::Tw1));
    outcome(
        ng < nt && wt < wg,
        format!("W=4: KS Gumbel {ng:.4} vs TW1 {nt:.4}; W=256: KS TW1 {wt:.4} vs Gumbel {wg:.4}"),
    )
}

fn ipr_drop(narrow: &EdgeSampleSet, wide: &EdgeSampleSet) -> Outcome {
    let mean = |s: &EdgeSampleSet| s.records[..200].iter().map(|r| r.ipr).sum::<f64>() / 200.0;
    let (a, b) = (mean(narrow), mean(wide));
    outcome(
        a >= IPR_FACTOR * b,
        format!("mean IPR {a:.4} at W=4, {b:.5} at W=256, ratio {:.1} (need ≥ {IPR_FACTOR})", a / b),
    )
}

fn diagram_crossover() -> Outcome {
    let g = catalog_diagram("self_loop").unwrap();
    let t = vec![2.0];
    let samples = 1_000_000;
    let req =
        LimitRequest { regime: Regime::Sub, t: t.clone(), alpha: 2.0, tau: None, samples, seed: 51, tolerance: None };
    let sub = limiting_diagram_function(&g, &req, None).unwrap().value;
    let hi = crossover_to_super(&g, &t, 2.0, 20.0, samples, 52).unwrap().value;
    let lo = crossover_to_sub(&g, &t, 2.0, 0.05, samples, 53).unwrap().value;
    let (e_hi, e_lo) = ((hi - 0.5).abs() / 0.5, (lo - sub).abs() / sub);
    outcome(
        e_hi <= SUPER_REL && e_lo <= SUB_REL,
        format!("γ=20: {hi:.4} vs 1/2 ({:.2}%); γ=0.05: {lo:.5} vs {sub:.5} ({:.2}%)", 100.0 * e_hi, 100.0 * e_lo),
    )
}

fn comparison_moments() -> Outcome {
    let (side, width, n, trials) = (1024, 256, 8, 5000);
    let short = profile("TruncatedGaussian", r#"{"sigma":1.0}"#, side, width);
    let long = profile("PowerLawTail", r#"{"tail":4.0}"#, side, width);
    let report =
        comparison_report(&chain(short.clone()), &chain(long.clone()), n, None, None, Thresholds::default()).unwrap();
    let mut lines = vec![format!(
        "ε/n {:.3} δ/b {:.3} n²b {:.3} verdicts {}",
        report.eps_ratio,
        report.delta_ratio,
        report.n2b,
        if report.all_pass() { "pass" } else { "fail" }
    )];
    let mut agree = true;
    for orders in [vec![8], vec![4, 4]] {
        let est: Vec<_> = [(short.clone(), 611), (long.clone(), 612)]
            .into_iter()
            .map(|(p, seed)| {
                let ens = Ensemble::new(&EnsembleSpec::new(1, p, seed).unwrap()).unwrap();
                mixed_chebyshev_moment(&ens, &MomentRequest { orders: orders.clone(), trials, seed }).unwrap()
            })
            .collect();
        let ok = est[0].agrees_with(&est[1], MOMENT_STDERRS);
        agree &= ok;
        lines.push(format!(
            "{orders:?}: {:.4}±{:.4} vs {:.4}±{:.4}",
            est[0].estimate, est[0].stderr, est[1].estimate, est[1].stderr
        ));
    }
    outcome(agree && report.all_pass(), lines.join("; "))
}

fn linearization() -> Outcome {
    let (m, t) = (400usize, 4usize);
    let c = linearize_generic::<f64>(m, t, false);
    let mut worst: f64 = 0.0;
    for j in 1..400 {
        let xi = j as f64 / 100.0;
        let mut k = (xi * m as f64).floor() as usize;
        // coefficients of the wrong parity vanish; step down to the nearest live index
        if k % 2 != (m * t) % 2 {
            k -= 1;
        }
        let xi_k = k as f64 / m as f64;
        let p = limit_coeff::<f64>(t as u32, xi_k).unwrap().0;
        worst = worst.max((0.5 * m as f64 * c[k] / xi_k - p).abs());
    }
    let mut parity_ok = true;
    for m in 1..=50usize {
        for t in 1..=5usize {
            let c = linearize_generic::<Rational>(m, t, false);
            parity_ok &= c.iter().enumerate().all(|(k, v)| k % 2 == (m * t) % 2 || v.is_zero());
        }
    }
    outcome(
        worst <= LINEARIZATION_TOL && parity_ok,
        format!("sup deviation {worst:.4} (tol {LINEARIZATION_TOL}); parity zeros exact: {parity_ok}"),
    )
}

fn wegner_skellam() -> Outcome {
    let p = WegnerParams { side: 8, d: 1, lambda: 0.02, n: 50 };
    let (sup, tau, rows) = wegner_vs_skellam(&p).unwrap();
    let at_one = rows
        .iter()
        .map(|&(k, v, _)| (v - skellam_kernel(1, Side::Finite(8), &[k as i64], 1.0).unwrap()).abs())
        .fold(0.0, f64::max);
    outcome(
        sup <= SKELLAM_TOL,
        format!("sup error {sup:.3e} at τ=nλ/2={tau} (tol {SKELLAM_TOL:e}); {at_one:.3e} against τ=1"),
    )
}

fn dbm_identity() -> Outcome {
    let base = chain(ProfileSpec::alpha_stable(2.0, 256, 8).unwrap());
    let ns = base.states;
    let j = 1.0 / ns as f64;
    let mut worst: f64 = 0.0;
    for lambda in [0.01f64, 0.3] {
        let spec = ProfileSpec::from_json(&format!(
            r#"{{"kind":"Interpolated","params":{{"base":{{"kind":"AlphaStable","params":{{"alpha":2.0}}}},"lambda":{lambda}}},"d":1,"L":256,"W":8}}"#
        ))
        .unwrap();
        let mixed = chain(spec);
        let p0 = faer::Mat::<f64>::from_fn(ns, ns, |a, b| base.entry(a, b));
        let pl = faer::Mat::<f64>::from_fn(ns, ns, |a, b| mixed.entry(a, b));
        let (mut a0, mut al) = (p0.clone(), pl.clone());
        for n in 1..=32 {
            let damp = (1.0 - lambda).powi(n);
            for r in 0..ns {
                for c in 0..ns {
                    worst = worst.max((al[(r, c)] - (damp * a0[(r, c)] + (1.0 - damp) * j)).abs());
                }
            }
            a0 = &a0 * &p0;
            al = &al * &pl;
        }
    }
    outcome(worst <= DBM_TOL, format!("max entry gap {worst:.3e} (tol {DBM_TOL:e})"))
}

fn diagram_bounds() -> Outcome {
    let chains = [chain(ProfileSpec::flat(64).unwrap()), chain(ProfileSpec::alpha_stable(2.0, 64, 8).unwrap())];
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (_, g) in catalog() {
        for c in &chains {
            for n in 4..=24 {
                let f = diagram_function(&g, c, None, &split_orders(n, g.face_count())).unwrap();
                let b = upper_bound_b(c, n).unwrap();
                worst = worst.max(f / diagram_upper_bound(&g, c.states, b, n, 0.0, 0).unwrap());
                count += 1;
            }
        }
    }
    outcome(worst <= 1.0, format!("max F/G {worst:.4} over {count} cases"))
}

fn deviation_envelope() -> Outcome {
    let (side, width, trials) = (512usize, 16usize, 2000u64);
    let prof = ProfileSpec::alpha_stable(2.0, side, width).unwrap();
    let c = chain(prof.clone());
    let b: Vec<f64> = (1..=64).map(|n| upper_bound_b(&c, n).unwrap()).collect();
    let set = simulate_edge(&EnsembleSpec::new(1, prof, 1101).unwrap(), trials).unwrap();
    let lmax = set.lambda_max();
    let freq = |t: f64| lmax.iter().filter(|&&l| l >= 2.0 + t).count() as f64 / trials as f64;
    // grid from the empirical upper tail: 10 equally spaced points between the
    // 25% and 1% exceedance levels
    let mut sorted = lmax.clone();
    sorted.sort_by(f64::total_cmp);
    let level = |q: f64| sorted[((1.0 - q) * trials as f64) as usize] - 2.0;
    let (lo, hi) = (level(0.25).max(1e-4), level(0.01));
    let grid: Vec<f64> = (0..10).map(|i| lo + (hi - lo) * i as f64 / 9.0).collect();
    // C fixed at 1; c bisected so the bound meets the frequency at the anchor
    let c_big = 1.0;
    let fit = |anchor: f64| {
        let target = freq(anchor);
        let (mut c_lo, mut c_hi) = (0.0f64, 1e4f64);
        for _ in 0..200 {
            let mid = 0.5 * (c_lo + c_hi);
            if optimized_bound(&b, side, anchor, c_big, mid) > target {
                c_lo = mid;
            } else {
                c_hi = mid;
            }
        }
        let breaks = grid.iter().filter(|&&t| freq(t) > optimized_bound(&b, side, t, c_big, c_lo)).count();
        (c_lo, breaks)
    };
    // the inequality is a tail statement, so the anchor is the deepest grid point
    let (c_small, breaks) = fit(grid[9]);
    let (c_shallow, shallow_breaks) = fit(grid[0]);
    outcome(
        breaks == 0,
        format!(
            "C={c_big}, t ∈ [{lo:.4}, {hi:.4}]; tail anchor c={c_small:.4}: {breaks} of 10 points above the curve; \
             shallow anchor c={c_shallow:.4}: {shallow_breaks} of 10 above"
        ),
    )
}

fn main() {
    let wanted: BTreeSet<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let on = |k: u32| wanted.is_empty() || wanted.contains(&k);
    let mut failed = Vec::new();
    let mut report = |k: u32, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = f();
        println!(
            "[{}] {k:>2} {name}: {} ({:.1} s)",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if !o.pass {
            failed.push(k);
        }
    };
    if on(1) {
        report(1, "local limit accuracy", &mut llt);
    }
    if on(2) {
        report(2, "theta duality", &mut theta_duality);
    }
    if on(3) || on(4) {
        let start = Instant::now();
        let (narrow, wide) = edge_sets();
        println!("     edge samples for 3 and 4 drawn in {:.1} s", start.elapsed().as_secs_f64());
        if on(3) {
            report(3, "Gumbel to Tracy-Widom transition", &mut || gumbel_to_tw(&narrow, &wide));
        }
        if on(4) {
            report(4, "IPR crossover", &mut || ipr_drop(&narrow, &wide));
        }
    }
    if on(5) {
        report(5, "diagram crossover", &mut diagram_crossover);
    }
    if on(6) {
        report(6, "comparison moment match", &mut comparison_moments);
    }
    if on(7) {
        report(7, "linearization asymptotics", &mut linearization);
    }
    if on(8) {
        report(8, "Skellam regime", &mut wegner_skellam);
    }
    if on(9) {
        report(9, "interpolation identity", &mut dbm_identity);
    }
    if on(10) {
        report(10, "diagram bound suite", &mut diagram_bounds);
    }
    if on(11) {
        report(11, "deviation envelope", &mut deviation_envelope);
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
