//! Piecewise-constant profiles on the whole line.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `values[0]` on `(-inf, jumps[0])`, `values[i]` on `(jumps[i-1], jumps[i])`,
/// `values[k]` on `(jumps[k-1], +inf)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StepRepr", into = "StepRepr")]
pub struct StepFunction {
    jumps: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct StepRepr {
    jumps: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<StepRepr> for StepFunction {
    type Error = Error;

    fn try_from(r: StepRepr) -> Result<Self> {
        StepFunction::new(r.jumps, r.values)
    }
}

impl From<StepFunction> for StepRepr {
    fn from(s: StepFunction) -> Self {
        StepRepr {
            jumps: s.jumps,
            values: s.values,
        }
    }
}

impl StepFunction {
    /// Validates and normalizes: zero-strength jumps are removed.
    pub fn new(jumps: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != jumps.len() + 1 {
            return Err(Error::InvalidStepFunction(format!(
                "{} jumps need {} values, got {}",
                jumps.len(),
                jumps.len() + 1,
                values.len()
            )));
        }
        if jumps.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::InvalidStepFunction("non-finite entry".into()));
        }
        if let Some(i) = jumps.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidStepFunction(format!(
                "jump positions not strictly increasing at index {}",
                i + 1
            )));
        }
        let mut out = StepFunction {
            jumps: Vec::with_capacity(jumps.len()),
            values: Vec::with_capacity(values.len()),
        };
        out.values.push(values[0]);
        for (x, v) in jumps.into_iter().zip(values.into_iter().skip(1)) {
            if v != *out.values.last().unwrap() {
                out.jumps.push(x);
                out.values.push(v);
            }
        }
        Ok(out)
    }

    pub fn constant(v: f64) -> Self {
        StepFunction {
            jumps: Vec::new(),
            values: vec![v],
        }
    }

    pub fn jumps(&self) -> &[f64] {
        &self.jumps
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_constant(&self) -> bool {
        self.jumps.is_empty()
    }

    /// Value on the piece immediately right of `x`.
    pub fn right_value(&self, x: f64) -> f64 {
        self.values[self.jumps.partition_point(|&j| j <= x)]
    }

    /// Value on the piece immediately left of `x`.
    pub fn left_value(&self, x: f64) -> f64 {
        self.values[self.jumps.partition_point(|&j| j < x)]
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn total_variation(&self) -> f64 {
        self.values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
    }

    /// `∫_a^b u`, signed (negative when `b < a`).
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        if b < a {
            return -self.integral(b, a);
        }
        let mut total = 0.0;
        let mut x = a;
        let mut k = self.jumps.partition_point(|&j| j <= a);
        while x < b {
            let end = if k < self.jumps.len() {
                self.jumps[k].min(b)
            } else {
                b
            };
            total += self.values[k] * (end - x);
            x = end;
            k += 1;
        }
        total
    }

    /// Pieces as `(x_left, x_right, value)` with infinite outer ends.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        (0..self.values.len()).map(move |i| {
            let lo = if i == 0 {
                f64::NEG_INFINITY
            } else {
                self.jumps[i - 1]
            };
            let hi = self.jumps.get(i).copied().unwrap_or(f64::INFINITY);
            (lo, hi, self.values[i])
        })
    }

    /// Exact `∫_a^b |u - w|`.
    pub fn l1_distance(&self, other: &StepFunction, a: f64, b: f64) -> f64 {
        self.l1_distance_filtered(other, a, b, 0.0)
    }

    /// Like [`l1_distance`](Self::l1_distance) but ignores cells narrower than
    /// `min_width`.
    pub fn l1_distance_filtered(
        &self,
        other: &StepFunction,
        a: f64,
        b: f64,
        min_width: f64,
    ) -> f64 {
        let mut total = 0.0;
        self.for_each_cell(other, a, b, |lo, hi, u, w| {
            if hi - lo >= min_width {
                total += (u - w).abs() * (hi - lo);
            }
        });
        total
    }

    /// Visits the common refinement of both jump sets on `[a, b]`.
    pub fn for_each_cell(
        &self,
        other: &StepFunction,
        a: f64,
        b: f64,
        mut visit: impl FnMut(f64, f64, f64, f64),
    ) {
        if !(a < b) {
            return;
        }
        let mut cuts: Vec<f64> = self
            .jumps
            .iter()
            .chain(&other.jumps)
            .copied()
            .filter(|&x| x > a && x < b)
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut lo = a;
        for hi in cuts.into_iter().chain(std::iter::once(b)) {
            let mid = 0.5 * (lo + hi);
            visit(lo, hi, self.right_value(mid), other.right_value(mid));
            lo = hi;
        }
    }

    /// `u_-` left of `a`, `ubar` on `(a, b)`, `u_+` right of `b`.
    pub fn compose(
        u_minus: &StepFunction,
        ubar: &StepFunction,
        u_plus: &StepFunction,
        a: f64,
        b: f64,
    ) -> Result<Self> {
        if a > b {
            return Err(Error::DataShape(format!("A = {a} exceeds B = {b}")));
        }
        let mut jumps = Vec::new();
        let mut values = Vec::new();
        let push_range =
            |f: &StepFunction, lo: f64, hi: f64, jumps: &mut Vec<f64>, values: &mut Vec<f64>| {
                for (pl, ph, v) in f.pieces() {
                    if ph <= lo || pl >= hi {
                        continue;
                    }
                    if !values.is_empty() {
                        jumps.push(pl.max(lo));
                    }
                    values.push(v);
                }
            };
        push_range(u_minus, f64::NEG_INFINITY, a, &mut jumps, &mut values);
        if a < b {
            push_range(ubar, a, b, &mut jumps, &mut values);
        }
        push_range(u_plus, b, f64::INFINITY, &mut jumps, &mut values);
        StepFunction::new(jumps, values)
    }

    /// Applies an increasing affine map `x ↦ origin + scale·(x - origin)`.
    pub fn rescaled(&self, origin: f64, scale: f64) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::InvalidStepFunction(format!(
                "scale {scale} must be positive"
            )));
        }
        let jumps = self
            .jumps
            .iter()
            .map(|&x| origin + scale * (x - origin))
            .collect();
        StepFunction::new(jumps, self.values.clone())
    }

    /// CSV with header `x_left,x_right,value`; infinite ends are empty fields.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x_left,x_right,value\n");
        let fmt = |x: f64| {
            if x.is_finite() {
                format!("{x}")
            } else {
                String::new()
            }
        };
        for (lo, hi, v) in self.pieces() {
            let _ = writeln!(out, "{},{},{}", fmt(lo), fmt(hi), v);
        }
        out
    }
}
