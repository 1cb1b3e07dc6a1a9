//! Entropy solutions of Riemann problems for piecewise-affine flux.
//!
//! For `u_l < u_r` the fan follows the lower convex hull of `f` on
//! `[u_l, u_r]`; for `u_l > u_r` the upper concave hull on `[u_r, u_l]`. Every
//! front joins two adjacent hull vertices, so all intermediate states are flux
//! breakpoints.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flux::{chord_slope, hull_vertices, Flux, HullSide};

/// A discontinuity `left | right` travelling at `speed`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wave {
    pub speed: f64,
    pub left: f64,
    pub right: f64,
}

/// Waves ordered by strictly increasing speed.
pub type WaveFan = Vec<Wave>;

/// Rankine-Hugoniot speed of `l | r`.
pub fn front_speed(fl: &Flux, l: f64, r: f64) -> Result<f64> {
    if l == r {
        return Err(Error::EqualStates);
    }
    Ok(chord_slope(l, fl.eval(l)?, r, fl.eval(r)?))
}

pub fn solve_riemann(fl: &Flux, u_l: f64, u_r: f64) -> Result<WaveFan> {
    fl.check_state(u_l)?;
    fl.check_state(u_r)?;
    if u_l == u_r {
        return Ok(Vec::new());
    }
    let fan = if u_l < u_r {
        hull_vertices(fl, u_l, u_r, HullSide::Lower)?
            .windows(2)
            .map(|w| Wave {
                speed: chord_slope(w[0].0, w[0].1, w[1].0, w[1].1),
                left: w[0].0,
                right: w[1].0,
            })
            .collect()
    } else {
        // traverse the upper hull from u_l down to u_r
        hull_vertices(fl, u_r, u_l, HullSide::Upper)?
            .windows(2)
            .rev()
            .map(|w| Wave {
                speed: chord_slope(w[1].0, w[1].1, w[0].0, w[0].1),
                left: w[1].0,
                right: w[0].0,
            })
            .collect()
    };
    Ok(fan)
}

/// Oleinik's condition E for `l | r` at speed `s`, checked at every flux
/// breakpoint strictly between the states:
/// `(f(v) - f(l))/(v - l) ≥ s ≥ (f(v) - f(r))/(v - r)`.
///
/// Returns the first offending breakpoint, if any. `tol` is an absolute slack.
pub fn oleinik_violation(fl: &Flux, w: &Wave, tol: f64) -> Option<f64> {
    let (lo, hi) = if w.left < w.right {
        (w.left, w.right)
    } else {
        (w.right, w.left)
    };
    let (fl_l, fl_r) = (fl.at(w.left), fl.at(w.right));
    fl.breakpoints_between(lo, hi).iter().copied().find(|&v| {
        let fv = fl.at(v);
        let from_left = chord_slope(v, fv, w.left, fl_l);
        let to_right = chord_slope(v, fv, w.right, fl_r);
        !(from_left >= w.speed - tol && w.speed >= to_right - tol)
    })
}
