use proptest::prelude::*;

use shocklab::scenario::FluxConfig;
use shocklab::scenario::{preset, run_scenario, Profile, RandomSpec, Scenario, Ubar, PRESETS};
use shocklab::StepFunction;

fn variant(name: &str, seed: u64, knobs: [bool; 4], label: String, snaps: Vec<f64>) -> Scenario {
    let mut s = preset(name).unwrap().unwrap();
    s.name = label;
    s.run.snapshots = snaps;
    if knobs[0] {
        s.flux = FluxConfig::Inline(s.build_flux().unwrap());
    }
    if knobs[1] {
        let v = s.data.u_minus.to_step().values()[0];
        s.data.u_minus = Profile::Step(StepFunction::new(vec![-1.5], vec![v, v]).unwrap());
    }
    match &s.data.ubar {
        Some(Ubar::Random(r)) if knobs[2] => {
            s.data.ubar = Some(Ubar::Random(RandomSpec { seed, ..*r }));
        }
        Some(Ubar::Random(r)) => {
            let r = RandomSpec { seed, ..*r };
            s.data.ubar = Some(Ubar::Step(r.expand(s.data.a, s.data.b).unwrap()));
        }
        _ => {}
    }
    if knobs[3] {
        s.hypothesis = None;
        s.run.t_max = None;
    }
    s
}

fn any_variant() -> impl Strategy<Value = Scenario> {
    (
        prop::sample::select(PRESETS.to_vec()),
        any::<u64>(),
        any::<[bool; 4]>(),
        "[a-z][a-z0-9_]{0,12}",
        prop::collection::vec(0.0f64..50.0, 0..4),
    )
        .prop_map(|(name, seed, knobs, label, mut snaps)| {
            snaps.sort_by(f64::total_cmp);
            snaps.dedup();
            variant(name, seed, knobs, label, snaps)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn json_round_trip(s in any_variant()) {
        let back = Scenario::from_json(&s.to_json()).unwrap();
        prop_assert_eq!(back, s);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn reports_are_reproducible(
        name in prop::sample::select(vec!["burgers", "double_well", "counterexample_2"]),
        seed in any::<u64>(),
    ) {
        let s = variant(name, seed, [false, false, true, false], name.into(), vec![0.5, 2.0]);
        let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let (r1, r2) = (run_scenario(&s, d1.path()).unwrap(), run_scenario(&s, d2.path()).unwrap());
        prop_assert_eq!(r1.reproducible_json(), r2.reproducible_json());
        for f in ["profile_000.csv", "profile_001.csv", "events.ndjson", "trajectories.csv"] {
            let a = std::fs::read(d1.path().join(f)).unwrap();
            let b = std::fs::read(d2.path().join(f)).unwrap();
            prop_assert!(a == b, "{} differs", f);
        }
    }
}
