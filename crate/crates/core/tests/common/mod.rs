#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use shocklab::{Flux, StepFunction};

/// Breakpoints from `-3` with random gaps, slopes in `[-4, 4]`, sorted when
/// `convex`.
pub fn random_flux(rng: &mut ChaCha8Rng, max_bp: usize, convex: bool) -> Flux {
    let n = rng.gen_range(3..=max_bp);
    let mut xs = vec![-3.0];
    for _ in 1..n {
        let last = *xs.last().unwrap();
        xs.push(last + rng.gen_range(0.05..0.6));
    }
    let mut slopes: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-4.0..4.0)).collect();
    if convex {
        slopes.sort_by(f64::total_cmp);
    }
    let mut vs = vec![rng.gen_range(-1.0..1.0)];
    for i in 0..n - 1 {
        let last = *vs.last().unwrap();
        vs.push(last + slopes[i] * (xs[i + 1] - xs[i]));
    }
    Flux::new(xs, vs).unwrap()
}

/// A state of `fl`: a breakpoint half the time, otherwise uniform.
pub fn random_state(rng: &mut ChaCha8Rng, fl: &Flux) -> f64 {
    let b = fl.breakpoints();
    if rng.gen_bool(0.5) {
        b[rng.gen_range(0..b.len())]
    } else {
        rng.gen_range(b[0]..=b[b.len() - 1])
    }
}

/// `k` jumps in `[lo, hi]` with values drawn by [`random_state`].
pub fn random_step(rng: &mut ChaCha8Rng, fl: &Flux, k: usize, lo: f64, hi: f64) -> StepFunction {
    let mut jumps: Vec<f64> = (0..k).map(|_| rng.gen_range(lo..hi)).collect();
    jumps.sort_by(f64::total_cmp);
    jumps.dedup();
    let values = (0..=jumps.len()).map(|_| random_state(rng, fl)).collect();
    StepFunction::new(jumps, values).unwrap()
}

/// Pointwise maximum of two step functions.
pub fn step_max(u: &StepFunction, w: &StepFunction) -> StepFunction {
    let mut cuts: Vec<f64> = u.jumps().iter().chain(w.jumps()).copied().collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut values = Vec::with_capacity(cuts.len() + 1);
    let first = cuts.first().copied().unwrap_or(0.0) - 1.0;
    values.push(u.right_value(first).max(w.right_value(first)));
    for (i, &c) in cuts.iter().enumerate() {
        let probe = match cuts.get(i + 1) {
            Some(&n) => 0.5 * (c + n),
            None => c + 1.0,
        };
        values.push(u.right_value(probe).max(w.right_value(probe)));
    }
    StepFunction::new(cuts, values).unwrap()
}

/// Convex on `[b_0, c]` and `[d, b_n]`, arbitrary in between. Returns the flux
/// with `(c, d)`, both breakpoints.
pub fn convex_convex_flux(rng: &mut ChaCha8Rng) -> (Flux, f64, f64) {
    let (nl, nm, nr) = (
        rng.gen_range(2..6),
        rng.gen_range(1..5),
        rng.gen_range(2..6),
    );
    let n = nl + nm + nr;
    let mut xs = vec![-3.0];
    for _ in 0..n {
        let last = *xs.last().unwrap();
        xs.push(last + rng.gen_range(0.1..0.5));
    }
    let mut left: Vec<f64> = (0..nl).map(|_| rng.gen_range(-4.0..4.0)).collect();
    let mut right: Vec<f64> = (0..nr).map(|_| rng.gen_range(-4.0..4.0)).collect();
    left.sort_by(f64::total_cmp);
    right.sort_by(f64::total_cmp);
    let mid: Vec<f64> = (0..nm).map(|_| rng.gen_range(-4.0..4.0)).collect();
    let slopes: Vec<f64> = left.into_iter().chain(mid).chain(right).collect();
    let mut vs = vec![0.0];
    for i in 0..n {
        let last = *vs.last().unwrap();
        vs.push(last + slopes[i] * (xs[i + 1] - xs[i]));
    }
    let (c, d) = (xs[nl], xs[nl + nm]);
    (Flux::new(xs, vs).unwrap(), c, d)
}

/// A state strictly inside a flux segment, away from every breakpoint.
pub fn off_corner_state(rng: &mut ChaCha8Rng, fl: &Flux) -> f64 {
    let b = fl.breakpoints();
    let k = rng.gen_range(0..b.len() - 1);
    b[k] + (b[k + 1] - b[k]) * rng.gen_range(0.2..0.8)
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}
