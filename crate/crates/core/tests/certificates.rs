use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use shocklab::flux::{approximate_pw_affine, AnalyticFluxSpec, AnalyticKind};
use shocklab::single_shock::{certify, contraction_factor, HypothesisParams, VerdictKind};
use shocklab::StepFunction;

#[test]
fn finite_speed_gap_bounds_emergence() {
    // ū₀ stays on the convex side, between α₀ = -1 and α₂
    let hp = HypothesisParams::new(-0.9, -0.5, 0.0, 0.0, 2.0, 2.0);
    let fl = approximate_pw_affine(
        &AnalyticFluxSpec::new(AnalyticKind::NegCubic, [-3.0, 3.0], 0.05)
            .with_corners([-1.0, -0.9, -0.7, -0.6, -0.5, 0.0, 2.0]),
    )
    .unwrap();
    let u0 = StepFunction::new(
        vec![-1.0, 0.0, 0.25, 0.5, 0.75, 1.0],
        vec![-0.5, -0.9, -1.0, -0.6, -0.7, -1.0, 2.0],
    )
    .unwrap();
    let cert = certify(&fl, &hp, &u0, 0.0, 1.0, 100.0).unwrap();
    assert_ne!(cert.verdict.kind, VerdictKind::Violated);
    let tt = cert.bound.t_tilde.expect("finite speed gap");
    let t0 = cert.emergence.t0.expect("single shock");
    assert_eq!(cert.bound_respected, Some(true));
    assert!(t0 <= tt);
    // any ε giving δ < 1 yields a weaker bound than the single stage
    let widths = (hp.alpha2 - hp.alpha1) + (hp.beta1 - hp.beta2);
    for eps in [widths + 0.1, widths + 1.0] {
        let delta = contraction_factor(&hp, eps);
        assert!((0.0..1.0).contains(&delta), "δ = {delta}");
        assert!(t0 <= tt / (1.0 - delta));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn emergence_respects_the_finite_bound(
        seed in any::<u64>(),
        steps in 1usize..9,
        width in 0.05f64..3.0,
    ) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let hp = HypothesisParams::new(-0.9, -0.5, 0.0, 0.0, 2.0, 2.0);
        let values: Vec<f64> = (0..steps).map(|_| r.gen_range(-1.0..=-0.5)).collect();
        let mut corners = values.clone();
        corners.extend([-1.0, -0.9, -0.5, 0.0, 2.0]);
        let fl = approximate_pw_affine(
            &AnalyticFluxSpec::new(AnalyticKind::NegCubic, [-3.0, 3.0], 0.05)
                .with_corners(corners),
        )
        .unwrap();
        let mut jumps = vec![0.0];
        jumps.extend((1..steps).map(|i| width * i as f64 / steps as f64));
        jumps.push(width);
        let mut all = vec![-0.7];
        all.extend(values);
        all.push(2.0);
        let u0 = StepFunction::new(jumps, all).unwrap();
        let cert = certify(&fl, &hp, &u0, 0.0, width, 100.0 * width).unwrap();
        let tt = cert.bound.t_tilde.unwrap();
        prop_assert!(cert.emergence.emerged);
        prop_assert_eq!(cert.bound_respected, Some(true), "T0 {:?} vs {}", cert.emergence.t0, tt);
    }
}
