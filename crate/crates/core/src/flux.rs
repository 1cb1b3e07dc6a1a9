//! Piecewise-affine flux functions.
//!
//! A [`Flux`] is the linear interpolant of values given at strictly increasing
//! breakpoints. Everything downstream (Riemann fans, duals, front tracking)
//! works on this representation, so states produced by the solvers are always
//! drawn from the breakpoint lattice plus the data values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance used when comparing segment slopes.
pub const SLOPE_TOL: f64 = 1e-12;

/// Rankine-Hugoniot quotient `(f(a) - f(b)) / (a - b)`.
///
/// Written so that swapping the two points gives a bit-identical result.
#[inline]
pub fn chord_slope(a: f64, fa: f64, b: f64, fb: f64) -> f64 {
    (fa - fb) / (a - b)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FluxRepr", into = "FluxRepr")]
pub struct Flux {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct FluxRepr {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<FluxRepr> for Flux {
    type Error = Error;

    fn try_from(r: FluxRepr) -> Result<Self> {
        Flux::new(r.breakpoints, r.values)
    }
}

impl From<Flux> for FluxRepr {
    fn from(f: Flux) -> Self {
        FluxRepr {
            breakpoints: f.breakpoints,
            values: f.values,
        }
    }
}

impl Flux {
    /// Validated constructor; caches the segment slopes.
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() != values.len() {
            return Err(Error::LengthMismatch {
                expected: breakpoints.len(),
                got: values.len(),
            });
        }
        if breakpoints.len() < 2 {
            return Err(Error::TooFewBreakpoints);
        }
        for (i, (b, v)) in breakpoints.iter().zip(&values).enumerate() {
            if !b.is_finite() || !v.is_finite() {
                return Err(Error::NonFinite { index: i });
            }
        }
        if let Some(i) = breakpoints.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::NonMonotoneBreakpoints { index: i + 1 });
        }
        let slopes: Vec<f64> = (0..breakpoints.len() - 1)
            .map(|i| (values[i + 1] - values[i]) / (breakpoints[i + 1] - breakpoints[i]))
            .collect();
        if let Some(i) = slopes.iter().position(|m| !m.is_finite()) {
            return Err(Error::NonFinite { index: i });
        }
        Ok(Flux {
            breakpoints,
            values,
            slopes,
        })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn segment_count(&self) -> usize {
        self.slopes.len()
    }

    /// Working interval `[b_0, b_n]`.
    pub fn domain(&self) -> (f64, f64) {
        (self.breakpoints[0], *self.breakpoints.last().unwrap())
    }

    pub fn contains(&self, u: f64) -> bool {
        let (lo, hi) = self.domain();
        u >= lo && u <= hi
    }

    pub(crate) fn check_state(&self, u: f64) -> Result<()> {
        if self.contains(u) {
            Ok(())
        } else {
            let (lo, hi) = self.domain();
            Err(Error::StateOutOfRange { state: u, lo, hi })
        }
    }

    /// Index `i` of the segment `[b_i, b_{i+1})` holding `u`; the last segment
    /// also owns the right end point.
    fn segment_of(&self, u: f64) -> usize {
        let n = self.slopes.len();
        let k = self.breakpoints.partition_point(|&b| b <= u);
        k.saturating_sub(1).min(n - 1)
    }

    /// Exact linear interpolation. Breakpoints return their stored value.
    pub fn eval(&self, u: f64) -> Result<f64> {
        self.check_state(u)?;
        Ok(self.at(u))
    }

    /// Evaluation without the range check; callers guarantee `u` is inside.
    pub(crate) fn at(&self, u: f64) -> f64 {
        debug_assert!(self.contains(u), "state {u} outside flux domain");
        if let Ok(i) = self.breakpoints.binary_search_by(|b| b.total_cmp(&u)) {
            return self.values[i];
        }
        let i = self.segment_of(u);
        self.values[i] + self.slopes[i] * (u - self.breakpoints[i])
    }

    /// Slope of the segment immediately left of `u`; `None` at `b_0`.
    pub fn left_slope(&self, u: f64) -> Option<f64> {
        if !self.contains(u) || u <= self.breakpoints[0] {
            return None;
        }
        let k = self.breakpoints.partition_point(|&b| b < u);
        Some(self.slopes[k - 1])
    }

    /// Slope of the segment immediately right of `u`; `None` at `b_n`.
    pub fn right_slope(&self, u: f64) -> Option<f64> {
        let (_, hi) = self.domain();
        if !self.contains(u) || u >= hi {
            return None;
        }
        Some(self.slopes[self.segment_of(u)])
    }

    /// Left derivative, falling back to the right one at the left end point.
    pub fn derivative(&self, u: f64) -> Result<f64> {
        self.check_state(u)?;
        Ok(self
            .left_slope(u)
            .or_else(|| self.right_slope(u))
            .expect("a flux has at least one segment"))
    }

    /// Chord `L_{a,b}(θ)` through `(a, f(a))` and `(b, f(b))`.
    pub fn eval_chord(&self, a: f64, b: f64, theta: f64) -> Result<f64> {
        if a == b {
            return Err(Error::DegenerateChord(a));
        }
        let (fa, fb) = (self.eval(a)?, self.eval(b)?);
        self.check_state(theta)?;
        if theta == a {
            return Ok(fa);
        }
        Ok(fa + chord_slope(b, fb, a, fa) * (theta - a))
    }

    /// Tangent `L_a(θ)` using the left slope at `a`.
    pub fn eval_tangent(&self, a: f64, theta: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        if !(a > lo && a < hi) {
            return Err(Error::BoundaryPoint(a));
        }
        let fa = self.at(a);
        if theta == a {
            return Ok(fa);
        }
        let m = self.left_slope(a).expect("interior point");
        Ok(fa + m * (theta - a))
    }

    /// Breakpoints strictly inside `(a, b)`.
    pub fn breakpoints_between(&self, a: f64, b: f64) -> &[f64] {
        let lo = self.breakpoints.partition_point(|&x| x <= a);
        let hi = self.breakpoints.partition_point(|&x| x < b);
        if lo >= hi {
            &[]
        } else {
            &self.breakpoints[lo..hi]
        }
    }

    /// Lattice points of `[a, b]`: the end points plus interior breakpoints.
    pub fn lattice(&self, a: f64, b: f64) -> Vec<f64> {
        let mut pts = vec![a];
        pts.extend_from_slice(self.breakpoints_between(a, b));
        if b > a {
            pts.push(b);
        }
        pts
    }

    /// Breakpoints where the slope actually changes, plus both end points.
    pub fn corner_points(&self) -> Vec<f64> {
        let mut out = vec![self.breakpoints[0]];
        for i in 1..self.slopes.len() {
            if (self.slopes[i] - self.slopes[i - 1]).abs() > SLOPE_TOL {
                out.push(self.breakpoints[i]);
            }
        }
        out.push(*self.breakpoints.last().unwrap());
        out
    }

    pub fn is_convex(&self) -> bool {
        self.slopes.windows(2).all(|w| w[1] >= w[0] - SLOPE_TOL)
    }

    /// Largest `|f'|` over segments meeting `[lo, hi]`; a Lipschitz bound there.
    pub fn max_abs_slope_on(&self, lo: f64, hi: f64) -> f64 {
        let first = self.segment_of(lo.max(self.domain().0));
        let last = self.segment_of(hi.min(self.domain().1));
        self.slopes[first..=last]
            .iter()
            .fold(0.0_f64, |acc, m| acc.max(m.abs()))
    }
}

/// Shape of `(f, C, D)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TripletShape {
    ConvexConvex,
    ConvexConcave,
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripletKind {
    pub shape: TripletShape,
    pub c: f64,
    pub d: f64,
}

fn nondecreasing(slopes: &[f64]) -> bool {
    slopes.windows(2).all(|w| w[1] >= w[0] - SLOPE_TOL)
}

fn nonincreasing(slopes: &[f64]) -> bool {
    slopes.windows(2).all(|w| w[1] <= w[0] + SLOPE_TOL)
}

/// Classifies `(f, C, D)` from slope monotonicity on `[b_0, C]` and `[D, b_n]`.
pub fn classify_triplet(fl: &Flux, c: f64, d: f64) -> Result<TripletKind> {
    if !(fl.contains(c) && fl.contains(d)) || c > d {
        return Err(Error::COutOfRange { c, d });
    }
    let bp = fl.breakpoints();
    // segments starting left of C, segments ending right of D
    let left_end = bp.partition_point(|&b| b < c).min(fl.segment_count());
    let right_start = bp.partition_point(|&b| b <= d).saturating_sub(1);
    let left = &fl.slopes()[..left_end];
    let right = &fl.slopes()[right_start.min(fl.segment_count())..];
    let shape = if !nondecreasing(left) {
        TripletShape::Neither
    } else if nondecreasing(right) {
        TripletShape::ConvexConvex
    } else if nonincreasing(right) {
        TripletShape::ConvexConcave
    } else {
        TripletShape::Neither
    };
    Ok(TripletKind { shape, c, d })
}

/// End slopes used by the chord-slope lemma: `f'(α-)` and `f'(β-)`.
pub fn end_slopes(fl: &Flux, alpha: f64, beta: f64) -> Result<(f64, f64)> {
    Ok((fl.derivative(alpha)?, fl.derivative(beta)?))
}

/// True iff `f(C)` and `f(D)` lie strictly below the chord `L_{α,β}`, with
/// `(f, C, D)` convex-convex and `α < C ≤ D < β`.
///
/// Whenever this holds the chord slope is strictly bracketed by the end slopes
/// (see [`end_slopes`]); debug builds assert it.
pub fn chord_slope_check(fl: &Flux, alpha: f64, beta: f64, c: f64, d: f64) -> Result<bool> {
    let kind = classify_triplet(fl, c, d)?;
    if kind.shape != TripletShape::ConvexConvex {
        return Err(Error::WrongTriplet);
    }
    if !(alpha < c && c <= d && d < beta) {
        return Ok(false);
    }
    fl.check_state(alpha)?;
    fl.check_state(beta)?;
    let below =
        fl.at(c) < fl.eval_chord(alpha, beta, c)? && fl.at(d) < fl.eval_chord(alpha, beta, d)?;
    if below {
        let (ml, mr) = end_slopes(fl, alpha, beta)?;
        let chord = chord_slope(beta, fl.at(beta), alpha, fl.at(alpha));
        debug_assert!(ml < chord && chord < mr, "{ml} < {chord} < {mr}");
    }
    Ok(below)
}

/// Default number of affine pieces used to sample the quadratic blend.
pub const Q_SEGMENTS: usize = 16;

/// Convex modification on `(α, β)`: tangent `l₁` on `[α, x₁]`, quadratic
/// blend on `[x₁, x₂]`, tangent `l₂` on `[x₂, β]`, and `f` elsewhere.
pub fn convex_modify(fl: &Flux, alpha: f64, beta: f64) -> Result<Flux> {
    convex_modify_with(fl, alpha, beta, Q_SEGMENTS)
}

pub fn convex_modify_with(fl: &Flux, alpha: f64, beta: f64, q_segments: usize) -> Result<Flux> {
    fl.check_state(alpha)?;
    fl.check_state(beta)?;
    if alpha >= beta {
        return Err(Error::EmptyInterval(alpha, beta));
    }
    let q_segments = q_segments.max(1);
    let (fa, fb) = (fl.at(alpha), fl.at(beta));
    let b1 = fl.derivative(alpha)?;
    let b2 = fl
        .right_slope(beta)
        .unwrap_or_else(|| fl.left_slope(beta).unwrap());
    let chord = chord_slope(beta, fb, alpha, fa);
    if !(b1 < chord && chord < b2) {
        return Err(Error::ChordSlopeViolated {
            left: b1,
            chord,
            right: b2,
        });
    }
    // tangent intersection; matching Q(x2) = l2(x2) forces x1 + x2 = 2d
    let d = (fa - alpha * b1 - fb + beta * b2) / (b2 - b1);
    let half = 0.5 * (d - alpha).min(beta - d);
    let (x1, x2) = (d - half, d + half);
    let a1 = fa + b1 * (x1 - alpha);
    let a2 = fb + b2 * (x2 - beta);
    let curvature = (b2 - b1) / (2.0 * (x2 - x1));
    let q = |x: f64| curvature * (x - x1) * (x - x1) + b1 * (x - x1) + a1;
    let mismatch = (q(x2) - a2).abs();
    if mismatch > 1e-9 * (1.0 + a2.abs()) {
        return Err(Error::Validation {
            path: "convex_modify".into(),
            message: format!("quadratic blend misses l2 at x2 by {mismatch}"),
        });
    }

    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for (&b, &v) in fl.breakpoints().iter().zip(fl.values()) {
        if b < alpha {
            xs.push(b);
            vs.push(v);
        }
    }
    xs.push(alpha);
    vs.push(fa);
    xs.push(x1);
    vs.push(a1);
    let width = x2 - x1;
    for k in 1..q_segments {
        let x = x1 + width * (k as f64) / (q_segments as f64);
        xs.push(x);
        vs.push(q(x));
    }
    xs.push(x2);
    vs.push(a2);
    xs.push(beta);
    vs.push(fb);
    for (&b, &v) in fl.breakpoints().iter().zip(fl.values()) {
        if b > beta {
            xs.push(b);
            vs.push(v);
        }
    }
    Flux::new(xs, vs)
}

/// One-sided modification: keeps `f` on `p ≤ C` and replaces it right of `C`
/// by `(p - C)² + f'(C)(p - C) + f(C)`, sampled at the original breakpoints.
pub fn quadratic_extension_right(fl: &Flux, c: f64) -> Result<Flux> {
    fl.check_state(c)?;
    let (_, hi) = fl.domain();
    if c >= hi {
        return Err(Error::EmptyInterval(c, hi));
    }
    let fc = fl.at(c);
    let s = fl.derivative(c)?;
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for (&b, &v) in fl.breakpoints().iter().zip(fl.values()) {
        if b < c {
            xs.push(b);
            vs.push(v);
        }
    }
    xs.push(c);
    vs.push(fc);
    for &b in fl.breakpoints().iter().filter(|&&b| b > c) {
        let p = b - c;
        xs.push(b);
        vs.push(p * p + s * p + fc);
    }
    Flux::new(xs, vs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HullSide {
    Lower,
    Upper,
}

/// Vertices of the lower convex (upper concave) hull of `f` on `[a, b]`.
/// Collinear vertices are dropped, so consecutive hull slopes are strictly
/// monotone.
pub fn hull_vertices(fl: &Flux, a: f64, b: f64, side: HullSide) -> Result<Vec<(f64, f64)>> {
    if !(a < b) {
        return Err(Error::EmptyInterval(a, b));
    }
    fl.check_state(a)?;
    fl.check_state(b)?;
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for x in fl.lattice(a, b) {
        let p = (x, fl.at(x));
        while hull.len() >= 2 {
            let (p0, p1) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let s01 = chord_slope(p1.0, p1.1, p0.0, p0.1);
            let s12 = chord_slope(p.0, p.1, p1.0, p1.1);
            let redundant = match side {
                HullSide::Lower => s01 >= s12,
                HullSide::Upper => s01 <= s12,
            };
            if redundant {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    Ok(hull)
}

/// Hull of `f` restricted to `[a, b]` as a flux on that interval.
pub fn hull(fl: &Flux, a: f64, b: f64, side: HullSide) -> Result<Flux> {
    let (xs, vs): (Vec<f64>, Vec<f64>) = hull_vertices(fl, a, b, side)?.into_iter().unzip();
    Flux::new(xs, vs)
}

/// Closed-form fluxes that can be sampled into a [`Flux`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum AnalyticKind {
    /// `u²/2`
    Burgers,
    /// `-u³`
    NegCubic,
    /// `u⁴/4 - u²`
    DoubleWell,
    /// `u² / (u² + r(1-u)²)`
    BuckleyLeverett { r: f64 },
    /// Linear interpolation of tabulated samples.
    Table {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
}

impl AnalyticKind {
    pub fn eval(&self, u: f64) -> f64 {
        match self {
            AnalyticKind::Burgers => 0.5 * u * u,
            AnalyticKind::NegCubic => -u * u * u,
            AnalyticKind::DoubleWell => 0.25 * u.powi(4) - u * u,
            AnalyticKind::BuckleyLeverett { r } => {
                let w = 1.0 - u;
                u * u / (u * u + r * w * w)
            }
            AnalyticKind::Table {
                breakpoints,
                values,
            } => table_eval(breakpoints, values, u),
        }
    }

    pub fn derivative(&self, u: f64) -> f64 {
        match self {
            AnalyticKind::Burgers => u,
            AnalyticKind::NegCubic => -3.0 * u * u,
            AnalyticKind::DoubleWell => u.powi(3) - 2.0 * u,
            AnalyticKind::BuckleyLeverett { r } => {
                let w = 1.0 - u;
                let den = u * u + r * w * w;
                2.0 * r * u * w / (den * den)
            }
            AnalyticKind::Table {
                breakpoints,
                values,
            } => {
                let k = breakpoints
                    .partition_point(|&b| b < u)
                    .clamp(1, breakpoints.len() - 1);
                (values[k] - values[k - 1]) / (breakpoints[k] - breakpoints[k - 1])
            }
        }
    }
}

fn table_eval(xs: &[f64], ys: &[f64], u: f64) -> f64 {
    let k = xs.partition_point(|&b| b < u).clamp(1, xs.len() - 1);
    if u == xs[k] {
        return ys[k];
    }
    ys[k - 1] + (ys[k] - ys[k - 1]) / (xs[k] - xs[k - 1]) * (u - xs[k - 1])
}

/// Recipe for a piecewise-affine approximation of an analytic flux.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticFluxSpec {
    #[serde(flatten)]
    pub kind: AnalyticKind,
    /// Working interval.
    pub domain: [f64; 2],
    /// States that must be breakpoints of the result.
    #[serde(default)]
    pub corners: Vec<f64>,
    /// Grid spacing.
    pub mesh: f64,
    /// Points `a` whose left slope must equal the analytic `f'(a)` exactly.
    #[serde(default)]
    pub tangent_pins: Vec<f64>,
}

impl AnalyticFluxSpec {
    pub fn new(kind: AnalyticKind, domain: [f64; 2], mesh: f64) -> Self {
        AnalyticFluxSpec {
            kind,
            domain,
            corners: Vec::new(),
            mesh,
            tangent_pins: Vec::new(),
        }
    }

    pub fn with_corners(mut self, corners: impl IntoIterator<Item = f64>) -> Self {
        self.corners.extend(corners);
        self
    }

    pub fn with_tangent_pins(mut self, pins: impl IntoIterator<Item = f64>) -> Self {
        self.tangent_pins.extend(pins);
        self
    }
}

#[derive(Clone, Copy)]
struct Node {
    x: f64,
    pinned_value: Option<f64>,
    fixed: bool,
}

/// Interpolates the analytic flux on a mesh-`h` grid merged with the corner
/// set. Grid nodes closer than `1e-6·h` to a corner are dropped in favour of
/// the corner.
///
/// A tangent pin at `a` inserts the node `a - δ` (δ the largest power of two
/// not above `h/4`) valued on the analytic tangent at `a`, so the left slope
/// at `a` equals `f'(a)` to rounding. Pinned nodes are the only ones that do
/// not interpolate the analytic flux.
pub fn approximate_pw_affine(spec: &AnalyticFluxSpec) -> Result<Flux> {
    let [lo, hi] = spec.domain;
    let h = spec.mesh;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::EmptyMesh(format!(
            "mesh spacing {h} must be positive"
        )));
    }
    if !(lo < hi && lo.is_finite() && hi.is_finite()) {
        return Err(Error::EmptyMesh(format!(
            "empty working interval [{lo}, {hi}]"
        )));
    }
    for &c in spec.corners.iter().chain(&spec.tangent_pins) {
        if !(c >= lo && c <= hi) {
            return Err(Error::StateOutOfRange { state: c, lo, hi });
        }
    }
    let tol = 1e-6 * h;
    let mut nodes: Vec<Node> = spec
        .corners
        .iter()
        .chain(&spec.tangent_pins)
        .chain([&lo, &hi])
        .map(|&x| Node {
            x,
            pinned_value: None,
            fixed: true,
        })
        .collect();
    let steps = ((hi - lo) / h).ceil() as usize;
    for k in 0..=steps {
        let x = lo + (k as f64) * h;
        if x < hi - tol {
            nodes.push(Node {
                x,
                pinned_value: None,
                fixed: false,
            });
        }
    }
    nodes.sort_by(|a, b| a.x.total_cmp(&b.x));
    nodes.dedup_by(|b, a| {
        a.x == b.x && {
            a.fixed |= b.fixed;
            true
        }
    });
    // drop grid nodes crowding a corner
    let fixed: Vec<f64> = nodes.iter().filter(|n| n.fixed).map(|n| n.x).collect();
    nodes.retain(|n| {
        n.fixed || {
            let k = fixed.partition_point(|&c| c < n.x);
            let near_right = k < fixed.len() && fixed[k] - n.x < tol;
            let near_left = k > 0 && n.x - fixed[k - 1] < tol;
            !(near_left || near_right)
        }
    });

    for &a in &spec.tangent_pins {
        if !(a > lo && a < hi) {
            return Err(Error::BoundaryPoint(a));
        }
        let mut delta = 2f64.powi((h / 4.0).log2().floor() as i32);
        let prev_fixed = fixed.iter().copied().filter(|&c| c < a).fold(lo, f64::max);
        while a - delta <= prev_fixed + tol {
            delta *= 0.5;
        }
        let x = a - delta;
        // keep the segment left of the pin at least h/2 wide
        nodes.retain(|n| n.fixed || !(n.x > x - 0.5 * h && n.x < a));
        let value = spec.kind.eval(a) - spec.kind.derivative(a) * delta;
        let k = nodes.partition_point(|n| n.x < x);
        nodes.insert(
            k,
            Node {
                x,
                pinned_value: Some(value),
                fixed: true,
            },
        );
    }

    let xs: Vec<f64> = nodes.iter().map(|n| n.x).collect();
    let vs: Vec<f64> = nodes
        .iter()
        .map(|n| n.pinned_value.unwrap_or_else(|| spec.kind.eval(n.x)))
        .collect();
    Flux::new(xs, vs)
}
