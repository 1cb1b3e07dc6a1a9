//! Scenario files, presets, and artifact emission.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flux::{approximate_pw_affine, AnalyticFluxSpec, AnalyticKind, Flux};
use crate::single_shock::{
    analytic_t0_bound, check_hypothesis_h, check_main_conditions, middle_range, HypothesisFailure,
    HypothesisParams, T0Bound, VerdictKind, Witness,
};
use crate::step::StepFunction;
use crate::tracking::{init_state, run_until_single_front, EmergenceReport, Stats};

/// Either an explicit piecewise-affine flux or a recipe for one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FluxConfig {
    Analytic(AnalyticFluxSpec),
    Inline(Flux),
}

impl FluxConfig {
    pub fn domain(&self) -> (f64, f64) {
        match self {
            FluxConfig::Analytic(s) => (s.domain[0], s.domain[1]),
            FluxConfig::Inline(f) => f.domain(),
        }
    }

    /// Builds the flux. For a recipe, `extra_corners` inside the working
    /// interval become breakpoints.
    pub fn build(&self, extra_corners: &[f64]) -> Result<Flux> {
        match self {
            FluxConfig::Inline(f) => Ok(f.clone()),
            FluxConfig::Analytic(s) => {
                let (lo, hi) = (s.domain[0], s.domain[1]);
                let extra = extra_corners
                    .iter()
                    .copied()
                    .filter(|&c| c >= lo && c <= hi);
                approximate_pw_affine(&s.clone().with_corners(extra))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Profile {
    Constant(f64),
    Step(StepFunction),
}

impl Profile {
    pub fn to_step(&self) -> StepFunction {
        match self {
            Profile::Constant(v) => StepFunction::constant(*v),
            Profile::Step(s) => s.clone(),
        }
    }
}

/// `steps` uniform values on `[lo, hi]` at equispaced jumps inside `(A, B)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomSpec {
    pub steps: usize,
    pub lo: f64,
    pub hi: f64,
    pub seed: u64,
}

impl RandomSpec {
    pub fn expand(&self, a: f64, b: f64) -> Result<StepFunction> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let k = self.steps.max(1);
        let values: Vec<f64> = (0..k).map(|_| rng.gen_range(self.lo..=self.hi)).collect();
        let jumps = (1..k).map(|i| a + (b - a) * i as f64 / k as f64).collect();
        StepFunction::new(jumps, values)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Ubar {
    Constant(f64),
    Step(StepFunction),
    Random(RandomSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataConfig {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub u_minus: Profile,
    pub u_plus: Profile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ubar: Option<Ubar>,
}

impl DataConfig {
    pub fn ubar_step(&self) -> Result<Option<StepFunction>> {
        Ok(match &self.ubar {
            None => None,
            Some(Ubar::Constant(v)) => Some(StepFunction::constant(*v)),
            Some(Ubar::Step(s)) => Some(s.clone()),
            Some(Ubar::Random(r)) => Some(r.expand(self.a, self.b)?),
        })
    }

    /// `u_-` on `x < A`, `ū₀` on `(A, B)`, `u_+` on `x > B`.
    pub fn initial_data(&self) -> Result<StepFunction> {
        let ubar = self
            .ubar_step()?
            .unwrap_or_else(|| StepFunction::constant(0.0));
        StepFunction::compose(
            &self.u_minus.to_step(),
            &ubar,
            &self.u_plus.to_step(),
            self.a,
            self.b,
        )
    }

    /// Interval hulls of the values of `u_-` and `u_+`.
    pub fn ranges(&self) -> ([f64; 2], [f64; 2]) {
        let hull = |p: &Profile| {
            let s = p.to_step();
            [s.min_value(), s.max_value()]
        };
        (hull(&self.u_minus), hull(&self.u_plus))
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RunConfig {
    /// Defaults to `100·(B - A)`, or 100 when `A = B`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(default)]
    pub snapshots: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(default = "default_name")]
    pub name: String,
    pub flux: FluxConfig,
    pub data: DataConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypothesis: Option<HypothesisParams>,
    #[serde(default)]
    pub run: RunConfig,
}

fn default_name() -> String {
    "scenario".into()
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Validation {
        path: path.into(),
        message: message.into(),
    }
}

impl Scenario {
    pub fn t_max(&self) -> f64 {
        self.run.t_max.unwrap_or_else(|| {
            let w = self.data.b - self.data.a;
            if w > 0.0 {
                100.0 * w
            } else {
                100.0
            }
        })
    }

    /// Every data value and hypothesis point, used as extra flux corners.
    pub fn corner_hints(&self) -> Result<Vec<f64>> {
        let mut out: Vec<f64> = Vec::new();
        out.extend(self.data.u_minus.to_step().values());
        out.extend(self.data.u_plus.to_step().values());
        if let Some(u) = self.data.ubar_step()? {
            out.extend(u.values());
        }
        if let Some(h) = &self.hypothesis {
            out.extend([h.alpha1, h.alpha2, h.c, h.d, h.beta2, h.beta1]);
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        Ok(out)
    }

    pub fn build_flux(&self) -> Result<Flux> {
        self.flux.build(&self.corner_hints()?)
    }

    pub fn validate(&self) -> Result<()> {
        let d = &self.data;
        if !(d.a.is_finite() && d.b.is_finite()) {
            return Err(invalid("data.A", "A and B must be finite"));
        }
        if d.a > d.b {
            return Err(invalid(
                "data.B",
                format!("B = {} is below A = {}", d.b, d.a),
            ));
        }
        match (&d.ubar, d.a < d.b) {
            (None, true) => return Err(invalid("data.ubar", "required when A < B")),
            (Some(_), false) => return Err(invalid("data.ubar", "must be absent when A = B")),
            _ => {}
        }
        if let FluxConfig::Analytic(s) = &self.flux {
            if !(s.mesh > 0.0 && s.mesh.is_finite()) {
                return Err(invalid(
                    "flux.mesh",
                    format!("{} is not a positive mesh", s.mesh),
                ));
            }
            if !(s.domain[0] < s.domain[1]) {
                return Err(invalid("flux.domain", "empty working interval"));
            }
        }
        let (lo, hi) = self.flux.domain();
        let check = |path: &str, vals: &[f64]| -> Result<()> {
            match vals.iter().position(|&v| !(v >= lo && v <= hi)) {
                Some(i) => Err(invalid(
                    format!("{path}[{i}]"),
                    format!("{} is outside the working interval [{lo}, {hi}]", vals[i]),
                )),
                None => Ok(()),
            }
        };
        check("data.u_minus", d.u_minus.to_step().values())?;
        check("data.u_plus", d.u_plus.to_step().values())?;
        match &d.ubar {
            Some(Ubar::Random(r)) => {
                if r.steps == 0 {
                    return Err(invalid("data.ubar.steps", "must be at least 1"));
                }
                if !(r.lo <= r.hi) {
                    return Err(invalid("data.ubar.hi", "hi is below lo"));
                }
                check("data.ubar", &[r.lo, r.hi])?;
            }
            Some(_) => check("data.ubar", d.ubar_step()?.unwrap().values())?,
            None => {}
        }
        if let Some(t) = self.run.t_max {
            if !(t > 0.0 && t.is_finite()) {
                return Err(invalid("run.t_max", format!("{t} is not a positive time")));
            }
        }
        if let Some(i) = self
            .run
            .snapshots
            .iter()
            .position(|&t| !(t >= 0.0 && t.is_finite()))
        {
            return Err(invalid(
                format!("run.snapshots[{i}]"),
                "times must be finite and nonnegative",
            ));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let s: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::Parse(format!("{path}: {}", e.into_inner()))
        })?;
        s.validate()?;
        Ok(s)
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Scenario::from_json(&text)
}

/// A preset name or a path to a scenario file.
pub fn resolve_scenario(arg: &str) -> Result<Scenario> {
    let p = Path::new(arg);
    if !p.exists() {
        if let Some(s) = preset(arg) {
            return s;
        }
    }
    load_scenario(p)
}

pub const PRESETS: [&str; 6] = [
    "burgers",
    "neg_cubic",
    "double_well",
    "buckley_leverett",
    "counterexample_1",
    "counterexample_2",
];

fn run_defaults(t_max: f64) -> RunConfig {
    RunConfig {
        t_max: Some(t_max),
        snapshots: vec![0.0, 1.0, 10.0, t_max],
        output_dir: None,
    }
}

/// Built-in scenarios. `buckley_leverett:<r>` selects the mobility ratio.
pub fn preset(name: &str) -> Option<Result<Scenario>> {
    let norm = name.replace('-', "_");
    let (base, arg) = match norm.split_once(':') {
        Some((b, a)) => (b.to_string(), Some(a.to_string())),
        None => (norm, None),
    };
    let c = (2.0f64 / 3.0).sqrt();
    let s = match (base.as_str(), arg) {
        ("burgers", None) => Scenario {
            name: "burgers".into(),
            flux: FluxConfig::Analytic(AnalyticFluxSpec::new(
                AnalyticKind::Burgers,
                [-2.5, 2.5],
                0.05,
            )),
            data: DataConfig {
                a: 0.0,
                b: 1.0,
                u_minus: Profile::Constant(1.0),
                u_plus: Profile::Constant(0.0),
                ubar: Some(Ubar::Random(RandomSpec {
                    steps: 8,
                    lo: -2.0,
                    hi: 2.0,
                    seed: 1,
                })),
            },
            hypothesis: Some(HypothesisParams::new(0.0, 0.0, 0.4, 0.6, 1.0, 1.0)),
            run: run_defaults(50.0),
        },
        ("neg_cubic", None) => Scenario {
            name: "neg_cubic".into(),
            flux: FluxConfig::Analytic(AnalyticFluxSpec::new(
                AnalyticKind::NegCubic,
                [-3.0, 3.0],
                0.05,
            )),
            data: DataConfig {
                a: 0.0,
                b: 1.0,
                u_minus: Profile::Constant(-0.5),
                u_plus: Profile::Constant(2.0),
                ubar: Some(Ubar::Random(RandomSpec {
                    steps: 6,
                    lo: -1.5,
                    hi: 2.5,
                    seed: 1,
                })),
            },
            hypothesis: Some(HypothesisParams::new(-0.5, -0.5, 0.0, 0.0, 2.0, 2.0)),
            run: run_defaults(50.0),
        },
        ("double_well", None) => Scenario {
            name: "double_well".into(),
            flux: FluxConfig::Analytic(AnalyticFluxSpec::new(
                AnalyticKind::DoubleWell,
                [-3.5, 3.5],
                0.05,
            )),
            data: DataConfig {
                a: 0.0,
                b: 1.0,
                u_minus: Profile::Constant(2.45),
                u_plus: Profile::Constant(-2.45),
                ubar: Some(Ubar::Random(RandomSpec {
                    steps: 6,
                    lo: -3.0,
                    hi: 3.0,
                    seed: 1,
                })),
            },
            hypothesis: Some(HypothesisParams::new(-2.5, -2.4, -c, c, 2.4, 2.5)),
            run: run_defaults(100.0),
        },
        ("buckley_leverett", r) => {
            let r: f64 = match r {
                None => 1.0,
                Some(t) => match t.parse() {
                    Ok(v) if v > 0.0 => v,
                    _ => {
                        return Some(Err(invalid(
                            "preset",
                            format!("buckley_leverett needs a positive ratio, got {t:?}"),
                        )))
                    }
                },
            };
            let kind = AnalyticKind::BuckleyLeverett { r };
            let ip = inflection(&kind, 0.0, 1.0);
            let (alpha, beta) = (ip - 0.1, (ip + 0.4).min(0.95));
            Scenario {
                name: "buckley_leverett".into(),
                flux: FluxConfig::Analytic(AnalyticFluxSpec::new(kind, [-0.2, 1.2], 0.02)),
                data: DataConfig {
                    a: 0.0,
                    b: 1.0,
                    u_minus: Profile::Constant(alpha),
                    u_plus: Profile::Constant(beta),
                    ubar: Some(Ubar::Random(RandomSpec {
                        steps: 6,
                        lo: 0.0,
                        hi: 1.0,
                        seed: 1,
                    })),
                },
                hypothesis: Some(HypothesisParams::new(alpha, alpha, ip, ip, beta, beta)),
                run: run_defaults(100.0),
            }
        }
        ("counterexample_1", None) => Scenario {
            name: "counterexample_1".into(),
            flux: FluxConfig::Analytic(
                AnalyticFluxSpec::new(AnalyticKind::DoubleWell, [-3.0, 3.0], 0.1)
                    .with_corners([-c, c]),
            ),
            data: DataConfig {
                a: 0.0,
                b: 1.0,
                u_minus: Profile::Constant(2.0),
                u_plus: Profile::Constant(-2.0),
                ubar: Some(Ubar::Constant(0.0)),
            },
            hypothesis: Some(HypothesisParams::new(-2.0, -2.0, -c, c, 2.0, 2.0)),
            run: run_defaults(100.0),
        },
        ("counterexample_2", None) => Scenario {
            name: "counterexample_2".into(),
            flux: FluxConfig::Analytic(
                AnalyticFluxSpec::new(AnalyticKind::NegCubic, [-3.0, 3.0], 0.05)
                    .with_tangent_pins([-1.0]),
            ),
            data: DataConfig {
                a: 0.0,
                b: 1.0,
                u_minus: Profile::Constant(-1.5),
                u_plus: Profile::Constant(2.0),
                ubar: Some(Ubar::Constant(-1.0)),
            },
            hypothesis: Some(HypothesisParams::new(-1.0, -1.0, 0.0, 0.0, 2.0, 2.0)),
            run: run_defaults(100.0),
        },
        _ => return None,
    };
    Some(Ok(s))
}

/// Sign change of a central second difference of `f` on `[lo, hi]`.
fn inflection(kind: &AnalyticKind, lo: f64, hi: f64) -> f64 {
    let d2 = |u: f64| {
        let e = 1e-4;
        kind.derivative(u + e) - kind.derivative(u - e)
    };
    let (mut a, mut b) = (lo + 1e-3, hi - 1e-3);
    for _ in 0..60 {
        let m = 0.5 * (a + b);
        if (d2(m) > 0.0) == (d2(a) > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    // round so the point is reproducible as a corner in JSON
    (0.5 * (a + b) * 1e6).round() / 1e6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotInfo {
    pub t: f64,
    pub file: String,
    pub jumps: usize,
    pub total_variation: f64,
}

/// Wall-clock data, kept apart so the rest of a report is reproducible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Satisfied,
    Violated,
    NotChecked,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub name: String,
    pub verdict: Verdict,
    pub kind: Option<VerdictKind>,
    pub witnesses: Vec<Witness>,
    pub hypothesis_failures: Vec<HypothesisFailure>,
    #[serde(flatten)]
    pub emergence: EmergenceReport,
    pub bound: Option<T0Bound>,
    pub stats: Stats,
    pub snapshots: Vec<SnapshotInfo>,
    pub timing: Timing,
}

impl Report {
    /// 0 emerged, 3 conditions violated, 4 no single shock by the horizon.
    pub fn exit_code(&self) -> i32 {
        if self.verdict == Verdict::Violated {
            3
        } else if self.emergence.emerged {
            0
        } else {
            4
        }
    }

    /// Report JSON without the timing sub-object.
    pub fn reproducible_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v.as_object_mut().unwrap().remove("timing");
        serde_json::to_string_pretty(&v).unwrap()
    }
}

type Checked = (
    Verdict,
    Option<VerdictKind>,
    Vec<Witness>,
    Vec<HypothesisFailure>,
);

fn run_checks(fl: &Flux, hp: Option<&HypothesisParams>) -> Result<Checked> {
    let Some(hp) = hp else {
        return Ok((Verdict::NotChecked, None, Vec::new(), Vec::new()));
    };
    let report = match check_hypothesis_h(fl, hp) {
        Ok(r) => r,
        Err(Error::NotATriplet) => {
            let f = HypothesisFailure {
                check: "triplet".into(),
                at: hp.c,
                detail: "(f, C, D) is neither convex-convex nor convex-concave".into(),
            };
            return Ok((Verdict::Violated, None, Vec::new(), vec![f]));
        }
        Err(e) => return Err(e),
    };
    if !report.passed {
        return Ok((Verdict::Violated, None, Vec::new(), report.failures));
    }
    let v = check_main_conditions(fl, hp, &report)?;
    let verdict = if v.kind == VerdictKind::Violated {
        Verdict::Violated
    } else {
        Verdict::Satisfied
    };
    Ok((verdict, Some(v.kind), v.witnesses, Vec::new()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Runs one scenario into `out_dir`: `profile_<i>.csv` per snapshot,
/// `events.ndjson`, `trajectories.csv` and `report.json`.
pub fn run_scenario(s: &Scenario, out_dir: &Path) -> Result<Report> {
    let start = Instant::now();
    s.validate()?;
    fs::create_dir_all(out_dir).map_err(|e| Error::Io(format!("{}: {e}", out_dir.display())))?;
    let fl = s.build_flux()?;
    let u0 = s.data.initial_data()?;
    let t_max = s.t_max();

    let (verdict, kind, witnesses, hypothesis_failures) = run_checks(&fl, s.hypothesis.as_ref())?;
    let (left, right) = s.data.ranges();

    let mut sim = init_state(&fl, &u0)?;
    let mut times = s.run.snapshots.clone();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let mut snapshots = Vec::with_capacity(times.len());
    for (i, &t) in times.iter().enumerate() {
        let prof = if t <= sim.time() {
            sim.profile(t.max(sim.time()))
        } else {
            sim.advance(t)?
        };
        let file = format!("profile_{i:03}.csv");
        write(&out_dir.join(&file), &prof.to_csv())?;
        snapshots.push(SnapshotInfo {
            t,
            file,
            jumps: prof.jumps().len(),
            total_variation: prof.total_variation(),
        });
    }
    let t_end = t_max.max(sim.time());
    sim.advance(t_end)?;
    write(&out_dir.join("events.ndjson"), &sim.event_log_ndjson())?;
    write(
        &out_dir.join("trajectories.csv"),
        &sim.trajectories_csv(t_end),
    )?;

    let mut watch = init_state(&fl, &u0)?;
    let mut emergence = run_until_single_front(&mut watch, left, right, t_max)?;
    let bound = if verdict == Verdict::Violated {
        None
    } else {
        let middle = middle_range(&u0, s.data.a, s.data.b);
        Some(analytic_t0_bound(
            &fl, left, right, middle, s.data.a, s.data.b,
        )?)
    };
    emergence.t_tilde = bound.and_then(|b| b.t_tilde);
    let width = s.data.b - s.data.a;
    if width > 0.0 {
        emergence.gamma = emergence.t0.map(|t0| t0 / width);
    }
    let report = Report {
        name: s.name.clone(),
        verdict,
        kind,
        witnesses,
        hypothesis_failures,
        emergence,
        bound,
        stats: sim.stats(),
        snapshots,
        timing: Timing {
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        },
    };
    let text = serde_json::to_string_pretty(&report)?;
    write(&out_dir.join("report.json"), &text)?;
    Ok(report)
}

/// Runs scenarios concurrently on `jobs` threads, each into
/// `out_root/<name>`. Results keep the input order.
pub fn run_batch(
    scenarios: &[Scenario],
    out_root: &Path,
    jobs: usize,
) -> Result<Vec<Result<Report>>> {
    let mut seen = std::collections::HashSet::new();
    if let Some(dup) = scenarios.iter().find(|s| !seen.insert(s.name.as_str())) {
        return Err(invalid(
            "name",
            format!("duplicate scenario name {:?}", dup.name),
        ));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Io(e.to_string()))?;
    Ok(pool.install(|| {
        scenarios
            .par_iter()
            .map(|s| run_scenario(s, &out_root.join(&s.name)))
            .collect()
    }))
}

/// Every `*.json` scenario in `dir`, sorted by file name. A scenario without
/// an explicit name takes the file stem.
pub fn load_dir(dir: &Path) -> Result<Vec<Scenario>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let mut s = load_scenario(p)?;
            if s.name == default_name() {
                s.name = p.file_stem().unwrap().to_string_lossy().into_owned();
            }
            Ok(s)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "flux": {"kind": "burgers", "domain": [-2, 2], "mesh": 0.1},
        "data": {"A": 0, "B": 0, "u_minus": 1, "u_plus": 0}
    }"#;

    #[test]
    fn minimal_burgers_shock() {
        let s = Scenario::from_json(MINIMAL).unwrap();
        assert_eq!(s.data.initial_data().unwrap().jumps(), &[0.0]);
        assert_eq!(s.t_max(), 100.0);
    }

    #[test]
    fn inline_flux_and_step_profiles() {
        let s = Scenario::from_json(
            r#"{
            "flux": {"breakpoints": [-1, 0, 1], "values": [1, 0, 1]},
            "data": {"A": 0, "B": 1, "u_minus": {"jumps": [-1], "values": [1, 0.5]},
                     "u_plus": -1, "ubar": {"jumps": [0.5], "values": [0, 1]}}
        }"#,
        )
        .unwrap();
        assert!(matches!(s.flux, FluxConfig::Inline(_)));
        let u = s.data.initial_data().unwrap();
        assert_eq!(u.jumps(), &[-1.0, 0.0, 0.5, 1.0]);
        assert_eq!(u.values(), &[1.0, 0.5, 0.0, 1.0, -1.0]);
        assert_eq!(s.data.ranges(), ([0.5, 1.0], [-1.0, -1.0]));
    }

    #[test]
    fn validation_paths() {
        let bad = MINIMAL.replace(r#""A": 0, "B": 0"#, r#""A": 2, "B": 1, "ubar": 0"#);
        match Scenario::from_json(&bad) {
            Err(Error::Validation { path, .. }) => assert_eq!(path, "data.B"),
            other => panic!("{other:?}"),
        }
        let bad = MINIMAL.replace(r#""u_plus": 0"#, r#""u_plus": 5"#);
        match Scenario::from_json(&bad) {
            Err(Error::Validation { path, .. }) => assert_eq!(path, "data.u_plus[0]"),
            other => panic!("{other:?}"),
        }
        let bad = MINIMAL.replace(r#""mesh": 0.1"#, r#""mesh": "x""#);
        match Scenario::from_json(&bad) {
            Err(Error::Parse(m)) => assert!(m.starts_with("flux"), "{m}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn random_data_is_deterministic() {
        let r = RandomSpec {
            steps: 5,
            lo: -1.0,
            hi: 1.0,
            seed: 42,
        };
        let a = r.expand(0.0, 1.0).unwrap();
        assert_eq!(a, r.expand(0.0, 1.0).unwrap());
        assert_eq!(a.jumps(), &[0.2, 0.4, 0.6, 0.8]);
        assert!(a.values().iter().all(|v| (-1.0..=1.0).contains(v)));
        let other = RandomSpec { seed: 43, ..r }.expand(0.0, 1.0).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn presets_round_trip_and_build() {
        for name in PRESETS {
            let s = preset(name).unwrap().unwrap();
            s.validate().unwrap();
            assert_eq!(Scenario::from_json(&s.to_json()).unwrap(), s, "{name}");
            s.build_flux().unwrap();
        }
        let s = preset("counterexample-1").unwrap().unwrap();
        assert_eq!(
            s.flux,
            FluxConfig::Analytic(
                AnalyticFluxSpec::new(AnalyticKind::DoubleWell, [-3.0, 3.0], 0.1)
                    .with_corners([-(2.0f64 / 3.0).sqrt(), (2.0f64 / 3.0).sqrt()])
            )
        );
        assert!(preset("buckley_leverett:2").unwrap().is_ok());
        assert!(preset("buckley_leverett:-1").unwrap().is_err());
        assert!(preset("nope").is_none());
    }

    #[test]
    fn preset_checks() {
        let expect = [
            ("burgers", Verdict::Satisfied, Some(VerdictKind::SatisfiedI)),
            (
                "neg_cubic",
                Verdict::Satisfied,
                Some(VerdictKind::SatisfiedII1),
            ),
            (
                "double_well",
                Verdict::Satisfied,
                Some(VerdictKind::SatisfiedI),
            ),
            (
                "buckley_leverett",
                Verdict::Satisfied,
                Some(VerdictKind::SatisfiedII1),
            ),
            (
                "counterexample_1",
                Verdict::Violated,
                Some(VerdictKind::Violated),
            ),
            (
                "counterexample_2",
                Verdict::Violated,
                Some(VerdictKind::Violated),
            ),
        ];
        for (name, verdict, kind) in expect {
            let s = preset(name).unwrap().unwrap();
            let fl = s.build_flux().unwrap();
            let (v, k, _, fails) = run_checks(&fl, s.hypothesis.as_ref()).unwrap();
            assert_eq!((v, k), (verdict, kind), "{name}: {fails:?}");
        }
    }

    #[test]
    fn run_writes_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = preset("burgers").unwrap().unwrap();
        s.run.snapshots = vec![0.0, 2.0];
        let r = run_scenario(&s, dir.path()).unwrap();
        assert!(r.emergence.emerged);
        assert_eq!(r.emergence.final_speed, Some(0.5));
        assert_eq!(r.exit_code(), 0);
        for f in [
            "profile_000.csv",
            "profile_001.csv",
            "events.ndjson",
            "trajectories.csv",
            "report.json",
        ] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
        let p0 = fs::read_to_string(dir.path().join("profile_000.csv")).unwrap();
        assert_eq!(p0, s.data.initial_data().unwrap().to_csv());
        let again = run_scenario(&s, dir.path()).unwrap();
        assert_eq!(r.reproducible_json(), again.reproducible_json());
    }
}
