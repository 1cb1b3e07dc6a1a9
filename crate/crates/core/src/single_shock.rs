//! Sufficient conditions for a single shock, analytic bounds, and empirical
//! certification by front tracking.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flux::{chord_slope, classify_triplet, Flux, TripletShape};
use crate::step::StepFunction;
use crate::tracking::{init_state, run_until_single_front};

pub use crate::tracking::{EmergenceReport, RSample};

/// `α₁ ≤ α₂ < C ≤ D < β₂ ≤ β₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypothesisParams {
    pub alpha1: f64,
    pub alpha2: f64,
    pub c: f64,
    pub d: f64,
    pub beta2: f64,
    pub beta1: f64,
}

impl HypothesisParams {
    pub fn new(alpha1: f64, alpha2: f64, c: f64, d: f64, beta2: f64, beta1: f64) -> Self {
        HypothesisParams {
            alpha1,
            alpha2,
            c,
            d,
            beta2,
            beta1,
        }
    }

    pub fn alpha_range(&self) -> [f64; 2] {
        [self.alpha1, self.alpha2]
    }

    pub fn beta_range(&self) -> [f64; 2] {
        [self.beta2, self.beta1]
    }

    fn ordered(&self) -> bool {
        self.alpha1 <= self.alpha2
            && self.alpha2 < self.c
            && self.c <= self.d
            && self.d < self.beta2
            && self.beta2 <= self.beta1
    }

    /// The pair of the third chord, `(α₂ + β₁ - β₂, β₂ - (α₂ - α₁))`.
    pub fn shifted_pair(&self) -> (f64, f64) {
        (
            self.alpha2 + self.beta1 - self.beta2,
            self.beta2 - (self.alpha2 - self.alpha1),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisFailure {
    pub check: String,
    pub at: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub passed: bool,
    pub shape: TripletShape,
    pub params: HypothesisParams,
    pub failures: Vec<HypothesisFailure>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictKind {
    SatisfiedI,
    SatisfiedII1,
    SatisfiedII2,
    Violated,
}

/// One inequality that did not hold strictly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub check: String,
    pub theta: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// Equality within tolerance rather than a clear failure.
    pub at_boundary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionVerdict {
    pub kind: VerdictKind,
    pub witnesses: Vec<Witness>,
    /// Smallest chord margin of the satisfied condition.
    pub chord_margin: Option<f64>,
    /// Tangent margin of the satisfied condition (convex-concave only).
    pub tangent_margin: Option<f64>,
}

impl ConditionVerdict {
    /// `(left_range, right_range)` for the data orientation of this verdict.
    pub fn orientation(&self, hp: &HypothesisParams) -> Option<([f64; 2], [f64; 2])> {
        match self.kind {
            VerdictKind::SatisfiedI | VerdictKind::SatisfiedII2 => {
                Some((hp.beta_range(), hp.alpha_range()))
            }
            VerdictKind::SatisfiedII1 => Some((hp.alpha_range(), hp.beta_range())),
            VerdictKind::Violated => None,
        }
    }
}

fn strict_tol(scale: f64) -> f64 {
    1e-10 * (1.0 + scale.abs())
}

fn in_band(v: f64, a: f64, b: f64) -> bool {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    v >= lo - 1e-12 && v <= hi + 1e-12
}

/// Checks ordering, the strict spacing inequality, and that the slope
/// preimages of `[f'(α₁), f'(α₂)]` left of `C` and `[f'(β₂), f'(β₁)]` right of
/// `D` are exactly `[α₁, α₂]` and `[β₂, β₁]` on the breakpoint lattice.
pub fn check_hypothesis_h(fl: &Flux, hp: &HypothesisParams) -> Result<HypothesisReport> {
    let shape = classify_triplet(fl, hp.c, hp.d)?.shape;
    if shape == TripletShape::Neither {
        return Err(Error::NotATriplet);
    }
    let mut failures = Vec::new();
    fn fail(failures: &mut Vec<HypothesisFailure>, check: &str, at: f64, detail: String) {
        failures.push(HypothesisFailure {
            check: check.into(),
            at,
            detail,
        })
    }
    let (lo, hi) = fl.domain();
    let pts = [hp.alpha1, hp.alpha2, hp.c, hp.d, hp.beta2, hp.beta1];
    if !hp.ordered() {
        fail(
            &mut failures,
            "ordering",
            hp.alpha2,
            format!("{pts:?} is not ordered"),
        );
    }
    if let Some(&p) = pts.iter().find(|&&p| p <= lo || p >= hi) {
        fail(
            &mut failures,
            "domain",
            p,
            format!("{p} is not interior to [{lo}, {hi}]"),
        );
    }
    if !failures.is_empty() {
        return Ok(HypothesisReport {
            passed: false,
            shape,
            params: *hp,
            failures,
        });
    }
    let (s1, s2) = hp.shifted_pair();
    if !(hp.alpha2 + (hp.beta1 - hp.beta2) < hp.c) {
        fail(
            &mut failures,
            "spacing",
            s1,
            format!("α₂ + (β₁ - β₂) = {s1} is not below C = {}", hp.c),
        );
    }
    if !(hp.d < s2) {
        fail(
            &mut failures,
            "spacing",
            s2,
            format!("β₂ - (α₂ - α₁) = {s2} is not above D = {}", hp.d),
        );
    }

    let slope = |x: f64| fl.derivative(x).expect("interior point");
    let (fa1, fa2) = (slope(hp.alpha1), slope(hp.alpha2));
    let mut left_pts: Vec<f64> = fl
        .breakpoints()
        .iter()
        .copied()
        .filter(|&x| x < hp.c)
        .collect();
    left_pts.extend([hp.alpha1, hp.alpha2]);
    for x in left_pts {
        if x <= lo {
            continue;
        }
        let inside = x >= hp.alpha1 && x <= hp.alpha2;
        if in_band(slope(x), fa1, fa2) != inside {
            fail(
                &mut failures,
                "slope_preimage_left",
                x,
                format!("f'({x}-) = {} vs band [{fa1}, {fa2}]", slope(x)),
            );
        }
    }
    let (fb2, fb1) = (slope(hp.beta2), slope(hp.beta1));
    let mut right_pts: Vec<f64> = fl
        .breakpoints()
        .iter()
        .copied()
        .filter(|&x| x > hp.d)
        .collect();
    right_pts.extend([hp.beta2, hp.beta1]);
    for x in right_pts {
        let inside = x >= hp.beta2 && x <= hp.beta1;
        if in_band(slope(x), fb2, fb1) != inside {
            fail(
                &mut failures,
                "slope_preimage_right",
                x,
                format!("f'({x}-) = {} vs band [{fb2}, {fb1}]", slope(x)),
            );
        }
    }
    Ok(HypothesisReport {
        passed: failures.is_empty(),
        shape,
        params: *hp,
        failures,
    })
}

struct ChordScan {
    margin: f64,
    witnesses: Vec<Witness>,
}

/// Scans `θ ∈ [C, D]` on the lattice. `below = true` tests
/// `f(θ) < min chords`, otherwise `f(θ) > max chords`.
fn scan_chords(fl: &Flux, hp: &HypothesisParams, below: bool) -> Result<ChordScan> {
    let (s1, s2) = hp.shifted_pair();
    let pairs = [(hp.alpha1, hp.beta1), (hp.alpha2, hp.beta2), (s1, s2)];
    let mut margin = f64::INFINITY;
    let mut witnesses = Vec::new();
    for theta in fl.lattice(hp.c, hp.d) {
        let f = fl.eval(theta)?;
        let mut chords = Vec::with_capacity(3);
        for &(a, b) in &pairs {
            chords.push(fl.eval_chord(a, b, theta)?);
        }
        let (rhs, m) = if below {
            let c = chords.iter().copied().fold(f64::INFINITY, f64::min);
            (c, c - f)
        } else {
            let c = chords.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (c, f - c)
        };
        margin = margin.min(m);
        let tol = strict_tol(f.abs().max(rhs.abs()));
        if m <= tol {
            witnesses.push(Witness {
                check: if below { "chord_min" } else { "chord_max" }.into(),
                theta,
                lhs: f,
                rhs,
                at_boundary: m.abs() <= tol,
            });
        }
    }
    Ok(ChordScan { margin, witnesses })
}

/// `lhs - rhs > tol` as a margin plus an optional witness.
fn strict_gt(check: &str, theta: f64, lhs: f64, rhs: f64) -> (f64, Option<Witness>) {
    let m = lhs - rhs;
    let tol = strict_tol(lhs.abs().max(rhs.abs()));
    let w = (m <= tol).then(|| Witness {
        check: check.into(),
        theta,
        lhs,
        rhs,
        at_boundary: m.abs() <= tol,
    });
    (m, w)
}

/// Decides which of the sufficient conditions holds.
pub fn check_main_conditions(
    fl: &Flux,
    hp: &HypothesisParams,
    report: &HypothesisReport,
) -> Result<ConditionVerdict> {
    if !report.passed || report.params != *hp {
        return Err(Error::HypothesisNotChecked);
    }
    match report.shape {
        TripletShape::ConvexConvex => {
            let scan = scan_chords(fl, hp, true)?;
            Ok(if scan.witnesses.is_empty() {
                ConditionVerdict {
                    kind: VerdictKind::SatisfiedI,
                    witnesses: Vec::new(),
                    chord_margin: Some(scan.margin),
                    tangent_margin: None,
                }
            } else {
                ConditionVerdict {
                    kind: VerdictKind::Violated,
                    witnesses: scan.witnesses,
                    chord_margin: None,
                    tangent_margin: None,
                }
            })
        }
        TripletShape::ConvexConcave => {
            let above = scan_chords(fl, hp, false)?;
            let (m1, w1) = strict_gt(
                "tangent_alpha1_at_beta2",
                hp.beta2,
                fl.eval_tangent(hp.alpha1, hp.beta2)?,
                fl.eval(hp.beta2)?,
            );
            if above.witnesses.is_empty() && w1.is_none() {
                return Ok(ConditionVerdict {
                    kind: VerdictKind::SatisfiedII1,
                    witnesses: Vec::new(),
                    chord_margin: Some(above.margin),
                    tangent_margin: Some(m1),
                });
            }
            let below = scan_chords(fl, hp, true)?;
            let (m2, w2) = strict_gt(
                "tangent_beta1_at_alpha2",
                hp.alpha2,
                fl.eval(hp.alpha2)?,
                fl.eval_tangent(hp.beta1, hp.alpha2)?,
            );
            if below.witnesses.is_empty() && w2.is_none() {
                return Ok(ConditionVerdict {
                    kind: VerdictKind::SatisfiedII2,
                    witnesses: Vec::new(),
                    chord_margin: Some(below.margin),
                    tangent_margin: Some(m2),
                });
            }
            let mut witnesses = above.witnesses;
            witnesses.extend(w1);
            witnesses.extend(below.witnesses);
            witnesses.extend(w2);
            Ok(ConditionVerdict {
                kind: VerdictKind::Violated,
                witnesses,
                chord_margin: None,
                tangent_margin: None,
            })
        }
        TripletShape::Neither => Err(Error::NotATriplet),
    }
}

/// Breakpoint `α₀` in `(lo, hi]` where the tangent `L_{α₀}` passes through
/// `(β₂, f(β₂))`.
///
/// On a segment `(b_i, b_{i+1}]` the gap `L_a(β₂) - f(β₂)` does not depend on
/// `a`, so the gap is a step function of `a`; it is nondecreasing on a convex
/// stretch. The root is the right end of a zero-gap segment if one exists,
/// otherwise the breakpoint where the gap changes sign.
pub fn compute_alpha0(fl: &Flux, beta2: f64, lo: f64, hi: f64) -> Result<f64> {
    let fb = fl.eval(beta2)?;
    let b = fl.breakpoints();
    let m = fl.slopes();
    let segs: Vec<usize> = (0..m.len())
        .filter(|&i| b[i + 1] > lo && b[i + 1] <= hi)
        .collect();
    let gap = |i: usize| fl.values()[i + 1] + m[i] * (beta2 - b[i + 1]) - fb;
    let k = segs.partition_point(|&i| gap(i) < 0.0);
    if k == 0 || k == segs.len() {
        return Err(Error::NoRootInInterval { lo, hi });
    }
    let i = segs[k];
    if gap(i).abs() <= 1e-12 * (1.0 + fb.abs()) {
        Ok(b[i + 1])
    } else {
        Ok(b[i])
    }
}

/// Chord-speed extremes behind the finite-time bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct T0Bound {
    pub s_left: f64,
    pub s_right: f64,
    pub t_tilde: Option<f64>,
}

/// Finite-time bound from chord speeds. `middle` is the range of `ū₀` on
/// `(A, B)`, grouped with one side. Grouped left: `s_left` is the slowest chord
/// inside `hull(left ∪ middle)` and `s_right` the fastest chord from that hull
/// to `right`. Grouped right: `s_left` is the slowest chord from `left` to
/// `hull(middle ∪ right)` and `s_right` the fastest chord inside it. The
/// grouping with the larger positive gap gives `T̃ = (B - A)/(s_left - s_right)`.
pub fn analytic_t0_bound(
    fl: &Flux,
    left: [f64; 2],
    right: [f64; 2],
    middle: [f64; 2],
    a: f64,
    b: f64,
) -> Result<T0Bound> {
    for r in [left, right, middle] {
        fl.check_state(r[0])?;
        fl.check_state(r[1])?;
        if r[0] > r[1] {
            return Err(Error::EmptyInterval(r[0], r[1]));
        }
    }
    let lat = |r: [f64; 2]| -> Vec<(f64, f64)> {
        fl.lattice(r[0], r[1])
            .into_iter()
            .map(|x| (x, fl.at(x)))
            .collect()
    };
    let extreme = |ps: &[(f64, f64)], qs: &[(f64, f64)], pick: fn(f64, f64) -> f64, init: f64| {
        let mut best = init;
        for &(p, fp) in ps {
            for &(q, fq) in qs {
                if p != q {
                    best = pick(best, chord_slope(p, fp, q, fq));
                }
            }
        }
        best
    };
    let join = |r: [f64; 2], s: [f64; 2]| [r[0].min(s[0]), r[1].max(s[1])];
    let (lp, rp) = (lat(left), lat(right));
    let hl = lat(join(left, middle));
    let hr = lat(join(middle, right));
    let options = [
        (
            extreme(&hl, &hl, f64::min, f64::INFINITY),
            extreme(&hl, &rp, f64::max, f64::NEG_INFINITY),
        ),
        (
            extreme(&lp, &hr, f64::min, f64::INFINITY),
            extreme(&hr, &hr, f64::max, f64::NEG_INFINITY),
        ),
    ];
    let usable = |g: f64| g > 0.0 && g.is_finite();
    let (s_left, s_right) = options
        .into_iter()
        .filter(|(l, r)| usable(l - r))
        .max_by(|x, y| (x.0 - x.1).total_cmp(&(y.0 - y.1)))
        .unwrap_or(options[0]);
    let gap = s_left - s_right;
    let t_tilde = usable(gap).then(|| (b - a).abs() / gap);
    Ok(T0Bound {
        s_left,
        s_right,
        t_tilde,
    })
}

/// Range of `u0` on `(a, b)`, or of its value at `a` when the interval is
/// empty.
pub fn middle_range(u0: &StepFunction, a: f64, b: f64) -> [f64; 2] {
    if !(a < b) {
        let v = u0.right_value(a);
        return [v, v];
    }
    u0.pieces()
        .filter(|&(lo, hi, _)| lo < b && hi > a)
        .fold([f64::INFINITY, f64::NEG_INFINITY], |r, (_, _, v)| {
            [r[0].min(v), r[1].max(v)]
        })
}

/// `δ = (β₁ - α₁ - ε)/(β₂ - α₂)`.
pub fn contraction_factor(hp: &HypothesisParams, eps: f64) -> f64 {
    (hp.beta1 - hp.alpha1 - eps) / (hp.beta2 - hp.alpha2)
}

/// Verdict, bound and emergence run for one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub hypothesis: HypothesisReport,
    pub verdict: ConditionVerdict,
    pub bound: T0Bound,
    pub emergence: EmergenceReport,
    /// `T₀ ≤ T̃` when both are finite.
    pub bound_respected: Option<bool>,
}

/// Checks that `u0` equals the left range data on `x < a` and the right
/// range data on `x > b`.
pub fn check_data_shape(
    u0: &StepFunction,
    a: f64,
    b: f64,
    left: [f64; 2],
    right: [f64; 2],
) -> Result<()> {
    let inside = |r: [f64; 2], v: f64| v >= r[0] && v <= r[1];
    for (lo, hi, v) in u0.pieces() {
        if lo < a && !inside(left, v) {
            return Err(Error::DataShape(format!(
                "value {v} left of A = {a} is outside {left:?}"
            )));
        }
        if hi > b && !inside(right, v) {
            return Err(Error::DataShape(format!(
                "value {v} right of B = {b} is outside {right:?}"
            )));
        }
    }
    Ok(())
}

/// Runs the checks, then front tracking up to `t_max`, and reports whether a
/// single separating shock emerged.
pub fn certify(
    fl: &Flux,
    hp: &HypothesisParams,
    u0: &StepFunction,
    a: f64,
    b: f64,
    t_max: f64,
) -> Result<Certificate> {
    let hypothesis = check_hypothesis_h(fl, hp)?;
    if !hypothesis.passed {
        return Err(Error::HypothesisNotChecked);
    }
    let verdict = check_main_conditions(fl, hp, &hypothesis)?;
    let (left, right) = verdict.orientation(hp).ok_or(Error::ConditionsViolated)?;
    check_data_shape(u0, a, b, left, right)?;
    let bound = analytic_t0_bound(fl, left, right, middle_range(u0, a, b), a, b)?;
    let mut sim = init_state(fl, u0)?;
    let mut emergence = run_until_single_front(&mut sim, left, right, t_max)?;
    emergence.t_tilde = bound.t_tilde;
    if b > a {
        emergence.gamma = emergence.t0.map(|t0| t0 / (b - a));
    }
    let bound_respected = match (emergence.t0, bound.t_tilde) {
        (Some(t0), Some(tt)) => Some(t0 <= tt + 1e-12 * (1.0 + tt)),
        _ => None,
    };
    Ok(Certificate {
        hypothesis,
        verdict,
        bound,
        emergence,
        bound_respected,
    })
}
