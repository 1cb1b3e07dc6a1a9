mod common;

use proptest::prelude::*;

use shocklab::flux::{chord_slope, hull_vertices, HullSide};
use shocklab::riemann::{oleinik_violation, solve_riemann};

use common::{random_flux, random_state, seeded};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn fans_are_hull_chains(seed in any::<u64>(), convex in any::<bool>()) {
        let mut r = seeded(seed);
        let fl = random_flux(&mut r, 15, convex);
        let (ul, ur) = (random_state(&mut r, &fl), random_state(&mut r, &fl));
        let fan = solve_riemann(&fl, ul, ur).unwrap();
        if ul == ur {
            prop_assert!(fan.is_empty());
            return Ok(());
        }
        prop_assert_eq!(fan[0].left, ul);
        prop_assert_eq!(fan[fan.len() - 1].right, ur);
        for w in fan.windows(2) {
            prop_assert_eq!(w[0].right, w[1].left);
            prop_assert!(w[0].speed < w[1].speed);
        }
        for w in &fan {
            let rh = chord_slope(w.left, fl.eval(w.left).unwrap(), w.right, fl.eval(w.right).unwrap());
            prop_assert_eq!(w.speed, rh);
            prop_assert_eq!(oleinik_violation(&fl, w, 1e-9), None, "{:?}", w);
        }

        let side = if ul < ur { HullSide::Lower } else { HullSide::Upper };
        let mut hull: Vec<f64> = hull_vertices(&fl, ul.min(ur), ul.max(ur), side)
            .unwrap()
            .into_iter()
            .map(|v| v.0)
            .collect();
        if ul > ur {
            hull.reverse();
        }
        let states: Vec<f64> = std::iter::once(ul).chain(fan.iter().map(|w| w.right)).collect();
        prop_assert_eq!(&states, &hull);

        if convex && ul < ur {
            let mut corners: Vec<f64> = fl
                .corner_points()
                .into_iter()
                .filter(|&c| ul < c && c < ur)
                .collect();
            corners.insert(0, ul);
            corners.push(ur);
            prop_assert_eq!(states, corners);
        }
    }
}
