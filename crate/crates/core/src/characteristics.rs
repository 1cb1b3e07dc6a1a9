//! Generalized forward characteristics `R±` for convex flux.
//!
//! `R+(t, α) = sup{x : y+(x,t) ≤ α}` and `R-(t, α) = inf{x : y-(x,t) ≥ α}`.
//! Both predicates are monotone in `x`, so each sample is one bisection. The
//! predicates compare the best feet on each side of `α` with rounding-level
//! slack rather than through the `ε_v` minimizer set, whose window would
//! shift a curve running along a shock by about `ε_v / [u]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flux::Flux;
use crate::lax_oleinik::{eps_v, LaxOleinik};
use crate::step::StepFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Plus,
    Minus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharCurve {
    pub anchor: f64,
    pub side: Side,
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
}

impl CharCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,R\n");
        for (t, x) in self.times.iter().zip(&self.positions) {
            out.push_str(&format!("{t},{x}\n"));
        }
        out
    }
}

/// Bisection tolerance used for a curve sample at time `t`.
pub fn r_tolerance(lo: &LaxOleinik, alpha: f64, t: f64) -> f64 {
    1e-10 * (alpha.abs() + lo.window().p0 * t).max(1.0)
}

/// One `R±` sample at time `t`.
pub fn r_point(lo: &LaxOleinik, alpha: f64, side: Side, t: f64) -> Result<f64> {
    let reach = lo.window().p0 * t + 1.0;
    let (mut a, mut b) = (alpha - reach, alpha + reach);
    // `pred` is false at `a` and true at `b` on both sides
    let pred = |x: f64| lo.foot_beyond(x, t, alpha, side == Side::Plus);
    if pred(a)? || !pred(b)? {
        return Err(Error::WindowExceeded { t });
    }
    let tol = r_tolerance(lo, alpha, t);
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if pred(m)? {
            b = m;
        } else {
            a = m;
        }
    }
    Ok(0.5 * (a + b))
}

pub fn r_curve(
    fl: &Flux,
    u0: &StepFunction,
    alpha: f64,
    side: Side,
    t_grid: &[f64],
) -> Result<CharCurve> {
    let lo = LaxOleinik::new(fl, u0)?;
    r_curve_with(&lo, alpha, side, t_grid)
}

pub fn r_curve_with(lo: &LaxOleinik, alpha: f64, side: Side, t_grid: &[f64]) -> Result<CharCurve> {
    if let Some(w) = t_grid.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::Validation {
            path: "t_grid".into(),
            message: format!("times must increase, got {} then {}", w[0], w[1]),
        });
    }
    let positions = t_grid
        .iter()
        .map(|&t| {
            if !(t > 0.0) {
                return Err(Error::NonPositiveTime(t));
            }
            r_point(lo, alpha, side, t)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CharCurve {
        anchor: alpha,
        side,
        times: t_grid.to_vec(),
        positions,
    })
}

/// True iff at `n_checks` equally spaced times up to `horizon`, the foot `a`
/// minimizes the value problem at `(a + p·t, t)` within `ε_v`.
pub fn is_characteristic_line(
    fl: &Flux,
    u0: &StepFunction,
    a: f64,
    p_slope: f64,
    horizon: f64,
    n_checks: usize,
) -> bool {
    let Ok(lo) = LaxOleinik::new(fl, u0) else {
        return false;
    };
    let n = n_checks.max(2);
    (1..=n).all(|k| {
        let t = horizon * k as f64 / n as f64;
        let x = a + p_slope * t;
        match (lo.value_function(x, t), lo.objective(a, p_slope, t)) {
            (Ok(cd), Ok(v)) => v <= cd.value + eps_v(cd.value),
            _ => false,
        }
    })
}
