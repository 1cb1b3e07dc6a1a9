//! Value-function solver for convex flux.
//!
//! `v(x,t) = min_y { v0(y) + t f*((x - y)/t) }` with `v0' = u0`. For a
//! piecewise-affine `f*` and piecewise-linear `v0` the objective is piecewise
//! linear in `y`, so its minimum sits at a jump of `u0` or at a point where
//! `(x - y)/t` is a dual breakpoint. Both families are enumerated exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flux::Flux;
use crate::legendre::{legendre_dual, DualFlux};
use crate::step::StepFunction;

/// Slope bound for the minimization window: every minimizer satisfies
/// `|x - y| ≤ p0·t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchWindow {
    pub p0: f64,
    /// `max |u0|`
    pub m_bound: f64,
}

/// Minimization result at one `(x, t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharData {
    pub x: f64,
    pub t: f64,
    pub value: f64,
    pub y_minus: f64,
    pub y_plus: f64,
    /// `(x - y_-)/t` as enumerated, before rounding.
    pub p_minus: f64,
    pub p_plus: f64,
    pub minimizers: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PointValue {
    Value {
        u: f64,
    },
    /// One-sided limits differ: `x` sits on a front.
    AtShock {
        left: f64,
        right: f64,
    },
}

impl PointValue {
    pub fn sides(self) -> (f64, f64) {
        match self {
            PointValue::Value { u } => (u, u),
            PointValue::AtShock { left, right } => (left, right),
        }
    }
}

/// Minimizer-set membership tolerance for an objective value `v`.
pub fn eps_v(v: f64) -> f64 {
    1e-9 * (1.0 + v.abs())
}

/// Projects `u` onto `[a, b]`, keeping `u` when it misses by rounding only.
/// Near-ties admitted by `eps_v` can otherwise pull a data value onto a
/// neighbouring flux corner.
fn snap_clamp(u: f64, (a, b): (f64, f64)) -> f64 {
    let c = u.clamp(a, b);
    if (c - u).abs() <= 1e-12 * (1.0 + u.abs()) {
        u
    } else {
        c
    }
}

#[derive(Debug, Clone)]
pub struct LaxOleinik {
    dual: DualFlux,
    data: StepFunction,
    primitive_at_jumps: Vec<f64>,
    window: SearchWindow,
    window_scale: f64,
}

impl LaxOleinik {
    pub fn new(fl: &Flux, u0: &StepFunction) -> Result<Self> {
        let dual = legendre_dual(fl)?;
        for &v in u0.values() {
            fl.check_state(v)?;
        }
        let (lo, hi) = dual.domain();
        let primitive_at_jumps = u0.jumps().iter().map(|&x| u0.integral(0.0, x)).collect();
        let m_bound = u0.values().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        Ok(LaxOleinik {
            dual,
            data: u0.clone(),
            primitive_at_jumps,
            window: SearchWindow {
                p0: lo.abs().max(hi.abs()).max(1.0),
                m_bound,
            },
            window_scale: 1.0,
        })
    }

    /// Widens (or narrows) the `|x - y| ≤ p0·t` window by `scale`.
    pub fn with_window_scale(mut self, scale: f64) -> Self {
        self.window_scale = scale;
        self
    }

    pub fn window(&self) -> SearchWindow {
        self.window
    }

    pub fn dual(&self) -> &DualFlux {
        &self.dual
    }

    pub fn data(&self) -> &StepFunction {
        &self.data
    }

    /// `v0(y) = ∫_0^y u0`.
    pub fn v0(&self, y: f64) -> f64 {
        let jumps = self.data.jumps();
        let vals = self.data.values();
        let k = jumps.partition_point(|&j| j <= y);
        if k == 0 {
            match jumps.first() {
                Some(&x1) => self.primitive_at_jumps[0] + vals[0] * (y - x1),
                None => vals[0] * y,
            }
        } else {
            self.primitive_at_jumps[k - 1] + vals[k] * (y - jumps[k - 1])
        }
    }

    /// Objective `v0(y) + t f*(p)` for a foot `y` reached with slope `p`.
    pub fn objective(&self, y: f64, p: f64, t: f64) -> Result<f64> {
        Ok(self.v0(y) + t * self.dual.eval(p)?)
    }

    fn candidates(&self, x: f64, t: f64) -> Vec<(f64, f64, f64)> {
        let (plo, phi) = self.dual.domain();
        let reach = self.window.p0 * self.window_scale * t;
        let mut out = Vec::with_capacity(self.dual.breakpoints().len() + 8);
        for &p in self.dual.breakpoints() {
            if (p * t).abs() <= reach {
                let y = x - t * p;
                out.push((y, p, self.v0(y) + t * self.dual.at(p)));
            }
        }
        let (ylo, yhi) = (x - t * phi, x - t * plo);
        let jumps = self.data.jumps();
        let start = jumps.partition_point(|&j| j < ylo);
        for &y in jumps[start..].iter().take_while(|&&j| j <= yhi) {
            if (x - y).abs() > reach {
                continue;
            }
            let p = ((x - y) / t).clamp(plo, phi);
            out.push((y, p, self.v0(y) + t * self.dual.at(p)));
        }
        out
    }

    pub fn value_function(&self, x: f64, t: f64) -> Result<CharData> {
        if !(t > 0.0) {
            return Err(Error::NonPositiveTime(t));
        }
        let cands = self.candidates(x, t);
        let value = cands.iter().map(|c| c.2).fold(f64::INFINITY, f64::min);
        let tol = eps_v(value);
        let mut mins: Vec<(f64, f64)> = cands
            .iter()
            .filter(|c| c.2 <= value + tol)
            .map(|c| (c.0, c.1))
            .collect();
        mins.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
        let (y_minus, p_minus) = mins[0];
        let (y_plus, p_plus) = *mins.last().unwrap();
        let mut minimizers: Vec<f64> = mins.iter().map(|m| m.0).collect();
        minimizers.dedup();
        Ok(CharData {
            x,
            t,
            value,
            y_minus,
            y_plus,
            p_minus,
            p_plus,
            minimizers,
        })
    }

    /// Whether the minimizer set at `(x, t)` reaches past `alpha`: for
    /// `plus`, some minimizer exceeds `alpha`; otherwise every minimizer is at
    /// least `alpha`. The best feet on either side are compared with a
    /// rounding-level slack instead of `ε_v`, so genuine ties (flat stretches
    /// of the objective) still count while the switch point at a shock is not
    /// shifted by the `ε_v` window.
    pub fn foot_beyond(&self, x: f64, t: f64, alpha: f64, plus: bool) -> Result<bool> {
        if !(t > 0.0) {
            return Err(Error::NonPositiveTime(t));
        }
        let (mut below, mut above) = (f64::INFINITY, f64::INFINITY);
        for (y, _, v) in self.candidates(x, t) {
            let upper = if plus { y > alpha } else { y >= alpha };
            if upper {
                above = above.min(v);
            } else {
                below = below.min(v);
            }
        }
        let slack = 1e-13 * (1.0 + above.abs().min(below.abs()));
        Ok(if plus {
            above <= below + slack
        } else {
            above < below - slack
        })
    }

    /// Solution value at `(x, t)`: `u(x±)` is the data value beside `y±`,
    /// projected onto the subdifferential of `f*` at `p±`.
    pub fn solve_pointwise(&self, x: f64, t: f64) -> Result<PointValue> {
        let cd = self.value_function(x, t)?;
        Ok(self.point_from(&cd))
    }

    fn point_from(&self, cd: &CharData) -> PointValue {
        let right = snap_clamp(self.data.right_value(cd.y_plus), self.dual.sub(cd.p_plus));
        let left = snap_clamp(self.data.left_value(cd.y_minus), self.dual.sub(cd.p_minus));
        if left == right {
            PointValue::Value { u: right }
        } else {
            PointValue::AtShock { left, right }
        }
    }

    /// Profile on `[a, b]` at time `t` from `n` samples; jumps between samples
    /// are located by bisection down to `1e-11·scale`.
    pub fn profile(&self, t: f64, a: f64, b: f64, n: usize) -> Result<StepFunction> {
        if !(a < b) {
            return Err(Error::EmptyInterval(a, b));
        }
        let n = n.max(2);
        let xs: Vec<f64> = (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect();
        self.profile_at(t, &xs)
    }

    /// Like [`profile`](Self::profile) on arbitrary strictly increasing
    /// sample points.
    pub fn profile_at(&self, t: f64, xs: &[f64]) -> Result<StepFunction> {
        if xs.len() < 2 || xs.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Validation {
                path: "xs".into(),
                message: "need at least two strictly increasing sample points".into(),
            });
        }
        let n = xs.len();
        let tol = 1e-11 * xs[0].abs().max(xs[n - 1].abs()).max(1.0);
        let mut samples = Vec::with_capacity(n);
        for &x in xs {
            samples.push(self.solve_pointwise(x, t)?.sides());
        }
        let mut jumps = Vec::new();
        let mut values = vec![samples[0].0];
        let record = |x: f64, l: f64, r: f64, jumps: &mut Vec<f64>, values: &mut Vec<f64>| {
            if l != r {
                *values.last_mut().unwrap() = l;
                jumps.push(x);
                values.push(r);
            }
        };
        record(xs[0], samples[0].0, samples[0].1, &mut jumps, &mut values);
        for i in 1..n {
            self.bisect(
                t,
                xs[i - 1],
                xs[i],
                samples[i - 1].1,
                samples[i].0,
                tol,
                &mut |x, l, r| record(x, l, r, &mut jumps, &mut values),
            )?;
            record(xs[i], samples[i].0, samples[i].1, &mut jumps, &mut values);
        }
        StepFunction::new(jumps, values)
    }

    #[allow(clippy::too_many_arguments)]
    fn bisect(
        &self,
        t: f64,
        a: f64,
        b: f64,
        ua: f64,
        ub: f64,
        tol: f64,
        emit: &mut dyn FnMut(f64, f64, f64),
    ) -> Result<()> {
        if ua == ub {
            return Ok(());
        }
        let m = 0.5 * (a + b);
        if b - a <= tol || m <= a || m >= b {
            emit(m, ua, ub);
            return Ok(());
        }
        let (lm, rm) = self.solve_pointwise(m, t)?.sides();
        self.bisect(t, a, m, ua, lm, tol, emit)?;
        if lm != rm {
            emit(m, lm, rm);
        }
        self.bisect(t, m, b, rm, ub, tol, emit)
    }
}
