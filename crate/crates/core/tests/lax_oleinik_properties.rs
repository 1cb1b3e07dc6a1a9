mod common;

use proptest::prelude::*;
use rand::Rng;

use shocklab::lax_oleinik::{eps_v, LaxOleinik};
use shocklab::tracking::init_state;

use common::{random_flux, random_step, seeded};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn feet_are_monotone_in_x(seed in any::<u64>()) {
        let mut r = seeded(seed);
        let fl = random_flux(&mut r, 12, true);
        let k = r.gen_range(1..7);
        let u0 = random_step(&mut r, &fl, k, -2.0, 2.0);
        let lo = LaxOleinik::new(&fl, &u0).unwrap();
        let t = r.gen_range(0.1..3.0);
        let mut xs: Vec<f64> = (0..40).map(|_| r.gen_range(-6.0..6.0)).collect();
        xs.sort_by(f64::total_cmp);
        let (mut ym, mut yp) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for x in xs {
            let cd = lo.value_function(x, t).unwrap();
            prop_assert!(cd.y_minus <= cd.y_plus);
            prop_assert!(cd.y_minus >= ym && cd.y_plus >= yp, "x={x}");
            let reach = lo.window().p0 * t;
            prop_assert!((x - cd.y_minus).abs() <= reach * (1.0 + 1e-12) + 1e-12);
            prop_assert!((x - cd.y_plus).abs() <= reach * (1.0 + 1e-12) + 1e-12);
            (ym, yp) = (cd.y_minus, cd.y_plus);
        }
    }

    #[test]
    fn doubling_the_window_changes_nothing(seed in any::<u64>()) {
        let mut r = seeded(seed);
        let fl = random_flux(&mut r, 12, true);
        let k = r.gen_range(1..7);
        let u0 = random_step(&mut r, &fl, k, -2.0, 2.0);
        let lo = LaxOleinik::new(&fl, &u0).unwrap();
        let wide = lo.clone().with_window_scale(2.0);
        for _ in 0..20 {
            let (x, t) = (r.gen_range(-6.0..6.0), r.gen_range(0.1..3.0));
            let (a, b) = (lo.value_function(x, t).unwrap(), wide.value_function(x, t).unwrap());
            prop_assert_eq!(a.value, b.value);
            prop_assert_eq!((a.y_minus, a.y_plus), (b.y_minus, b.y_plus));
        }
    }

    #[test]
    fn dynamic_programming(seed in any::<u64>()) {
        // restart from the exact profile at s; v(·, s) is its primitive up to
        // an additive constant
        let mut r = seeded(seed);
        let fl = random_flux(&mut r, 12, true);
        let k = r.gen_range(1..7);
        let u0 = random_step(&mut r, &fl, k, -2.0, 2.0);
        let lo = LaxOleinik::new(&fl, &u0).unwrap();
        let s = r.gen_range(0.1..1.5);
        let t = s + r.gen_range(0.1..1.5);
        let us = init_state(&fl, &u0).unwrap().advance(s).unwrap();
        let later = LaxOleinik::new(&fl, &us).unwrap();
        let shift = lo.value_function(0.0, s).unwrap().value - later.v0(0.0);
        for _ in 0..20 {
            let x = r.gen_range(-4.0..4.0);
            let direct = lo.value_function(x, t).unwrap().value;
            let restarted = later.value_function(x, t - s).unwrap().value + shift;
            prop_assert!(
                (direct - restarted).abs() <= eps_v(direct),
                "x={x}: {direct} vs {restarted}"
            );
        }
    }
}
