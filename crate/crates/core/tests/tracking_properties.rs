mod common;

use proptest::prelude::*;
use rand::Rng;

use shocklab::tracking::init_state;

use common::{random_flux, random_step, seeded, step_max};

const TIMES: [f64; 4] = [0.25, 0.5, 1.0, 2.0];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn total_variation_and_maximum_principle(seed in any::<u64>(), convex in any::<bool>()) {
        let mut r = seeded(seed);
        let fl = random_flux(&mut r, 12, convex);
        let k = r.gen_range(1..8);
        let u0 = random_step(&mut r, &fl, k, -2.0, 2.0);
        let (lo, hi, tv0) = (u0.min_value(), u0.max_value(), u0.total_variation());
        let mut sim = init_state(&fl, &u0).unwrap();
        while let Some(c) = sim.next_event() {
            if c.t > 5.0 {
                break;
            }
            let before = sim.fronts().len();
            sim.process(&c).unwrap();
            prop_assert!(sim.total_variation() <= tv0 * (1.0 + 1e-12));
            prop_assert!(sim.states().iter().all(|&s| lo <= s && s <= hi));
            if convex {
                prop_assert!(sim.fronts().len() <= before, "front count rose at t={}", c.t);
            }
        }
    }

    #[test]
    fn l1_contraction_and_comparison(seed in any::<u64>()) {
        let mut r = seeded(seed);
        let fl = random_flux(&mut r, 12, false);
        let (k1, k2) = (r.gen_range(1..6), r.gen_range(1..6));
        let u0 = random_step(&mut r, &fl, k1, -2.0, 2.0);
        let w0 = random_step(&mut r, &fl, k2, -2.0, 2.0);
        let v0 = step_max(&u0, &w0);
        let m = fl.max_abs_slope_on(
            u0.min_value().min(w0.min_value()),
            u0.max_value().max(w0.max_value()),
        );
        let mut su = init_state(&fl, &u0).unwrap();
        let mut sw = init_state(&fl, &w0).unwrap();
        let mut sv = init_state(&fl, &v0).unwrap();
        for t in TIMES {
            let (u, w, v) = (su.advance(t).unwrap(), sw.advance(t).unwrap(), sv.advance(t).unwrap());
            let (a, b) = (-1.0, 1.0);
            let now = u.l1_distance(&w, a, b);
            let then = u0.l1_distance(&w0, a - m * t, b + m * t);
            prop_assert!(now <= then + 1e-9, "t={t}: {now} > {then}");
            let sliver = su.grouping_tolerance().max(sv.grouping_tolerance());
            let mut bad = None;
            u.for_each_cell(&v, -50.0, 50.0, |x0, x1, a, b| {
                if x1 - x0 > sliver && a > b {
                    bad = Some(x0);
                }
            });
            prop_assert_eq!(bad, None, "u > max(u, w) at t={}", t);
        }
    }

    #[test]
    fn runs_are_deterministic(seed in any::<u64>()) {
        let mut r = seeded(seed);
        let fl = random_flux(&mut r, 12, false);
        let k = r.gen_range(1..8);
        let u0 = random_step(&mut r, &fl, k, -2.0, 2.0);
        let run = || {
            let mut s = init_state(&fl, &u0).unwrap();
            s.advance(3.0).unwrap();
            (s.event_log_ndjson(), s.trajectories_csv(3.0))
        };
        prop_assert_eq!(run(), run());
    }
}
