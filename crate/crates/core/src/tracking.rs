//! Event-driven front tracking.
//!
//! Fronts move at constant speed between collisions. A binary heap holds the
//! predicted collision of every adjacent converging pair; entries go stale
//! when either front is replaced and are discarded lazily. At a collision the
//! outermost states of all fronts meeting there form a new Riemann problem.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flux::Flux;
use crate::riemann::{solve_riemann, Wave};
use crate::step::StepFunction;

/// Default cap on processed collisions per run.
pub const MAX_EVENTS: usize = 1_000_000;

/// Speed differences below this are treated as parallel fronts.
pub const PARALLEL_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Front {
    pub id: u64,
    pub x0: f64,
    pub t0: f64,
    pub speed: f64,
    pub left: f64,
    pub right: f64,
}

impl Front {
    pub fn position(&self, t: f64) -> f64 {
        self.x0 + self.speed * (t - self.t0)
    }

    fn record(&self) -> FrontRecord {
        FrontRecord {
            l: self.left,
            r: self.right,
            s: self.speed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontRecord {
    pub l: f64,
    pub r: f64,
    pub s: f64,
}

/// One processed collision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub t: f64,
    pub x: f64,
    #[serde(rename = "in")]
    pub incoming: Vec<FrontRecord>,
    pub out: Vec<FrontRecord>,
}

/// Life span of a front, for trajectory output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontSpan {
    pub id: u64,
    pub t_start: f64,
    pub x_start: f64,
    pub end: Option<(f64, f64)>,
    pub speed: f64,
}

/// A pending collision: fronts `first..=last` meet at `(t, x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Collision {
    pub t: f64,
    pub x: f64,
    pub first: usize,
    pub last: usize,
    pub ids: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Stats {
    pub events: usize,
    pub fronts_created: usize,
    pub max_fronts: usize,
    pub initial_tv: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Candidate {
    t: f64,
    x: f64,
    left: u64,
    right: u64,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.t
            .total_cmp(&other.t)
            .then(self.x.total_cmp(&other.x))
            .then(self.left.cmp(&other.left))
            .then(self.right.cmp(&other.right))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone)]
pub struct SimState {
    flux: Flux,
    t: f64,
    fronts: Vec<Front>,
    index: HashMap<u64, usize>,
    queue: BinaryHeap<Reverse<Candidate>>,
    far_state: f64,
    eps_x: f64,
    next_id: u64,
    max_events: usize,
    log: Vec<EventRecord>,
    spans: Vec<FrontSpan>,
    stats: Stats,
}

/// Replaces each jump of `u0` by its Riemann fan and schedules collisions.
pub fn init_state(fl: &Flux, u0: &StepFunction) -> Result<SimState> {
    for &v in u0.values() {
        fl.check_state(v)?;
    }
    let jumps = u0.jumps();
    let width = match (jumps.first(), jumps.last()) {
        (Some(a), Some(b)) => b - a,
        _ => 0.0,
    };
    let mut s = SimState {
        flux: fl.clone(),
        t: 0.0,
        fronts: Vec::new(),
        index: HashMap::new(),
        queue: BinaryHeap::new(),
        far_state: u0.values()[0],
        eps_x: 1e-9 * width.max(1.0),
        next_id: 0,
        max_events: MAX_EVENTS,
        log: Vec::new(),
        spans: Vec::new(),
        stats: Stats {
            initial_tv: u0.total_variation(),
            ..Stats::default()
        },
    };
    for (i, &x) in jumps.iter().enumerate() {
        let fan = solve_riemann(fl, u0.values()[i], u0.values()[i + 1])?;
        let born = s.spawn(&fan, x, 0.0);
        s.fronts.extend(born);
    }
    s.reindex();
    for i in 1..s.fronts.len() {
        s.schedule(i - 1);
    }
    s.stats.max_fronts = s.fronts.len();
    Ok(s)
}

impl SimState {
    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn flux(&self) -> &Flux {
        &self.flux
    }

    pub fn fronts(&self) -> &[Front] {
        &self.fronts
    }

    pub fn stats(&self) -> Stats {
        self.stats
    }

    pub fn event_log(&self) -> &[EventRecord] {
        &self.log
    }

    pub fn spans(&self) -> &[FrontSpan] {
        &self.spans
    }

    pub fn grouping_tolerance(&self) -> f64 {
        self.eps_x
    }

    pub fn set_max_events(&mut self, n: usize) {
        self.max_events = n;
    }

    /// States of the current profile from left to right.
    pub fn states(&self) -> Vec<f64> {
        match self.fronts.first() {
            None => vec![self.far_state],
            Some(f) => std::iter::once(f.left)
                .chain(self.fronts.iter().map(|f| f.right))
                .collect(),
        }
    }

    pub fn total_variation(&self) -> f64 {
        self.fronts.iter().map(|f| (f.left - f.right).abs()).sum()
    }

    fn spawn(&mut self, fan: &[Wave], x: f64, t: f64) -> Vec<Front> {
        fan.iter()
            .map(|w| {
                let f = Front {
                    id: self.next_id,
                    x0: x,
                    t0: t,
                    speed: w.speed,
                    left: w.left,
                    right: w.right,
                };
                self.next_id += 1;
                self.stats.fronts_created += 1;
                self.spans.push(FrontSpan {
                    id: f.id,
                    t_start: t,
                    x_start: x,
                    end: None,
                    speed: w.speed,
                });
                f
            })
            .collect()
    }

    fn reindex(&mut self) {
        self.index.clear();
        self.index
            .extend(self.fronts.iter().enumerate().map(|(i, f)| (f.id, i)));
    }

    /// Predicts the collision of fronts `i` and `i + 1`, if they converge.
    fn schedule(&mut self, i: usize) {
        let (a, b) = (self.fronts[i], self.fronts[i + 1]);
        let closing = a.speed - b.speed;
        if closing <= PARALLEL_TOL {
            return;
        }
        let t_ref = a.t0.max(b.t0);
        let gap = (b.position(t_ref) - a.position(t_ref)).max(0.0);
        let t = t_ref + gap / closing;
        let x = 0.5 * (a.position(t) + b.position(t));
        self.queue.push(Reverse(Candidate {
            t,
            x,
            left: a.id,
            right: b.id,
        }));
    }

    /// Earliest pending collision, with every front within `ε_x` of the
    /// collision point grouped in. Stale heap entries are dropped.
    pub fn next_event(&mut self) -> Option<Collision> {
        while let Some(Reverse(c)) = self.queue.peek().copied() {
            let i = match self.index.get(&c.left) {
                Some(&i) if i + 1 < self.fronts.len() && self.fronts[i + 1].id == c.right => i,
                _ => {
                    self.queue.pop();
                    continue;
                }
            };
            let t = c.t.max(self.t);
            let x = 0.5 * (self.fronts[i].position(t) + self.fronts[i + 1].position(t));
            let near = |f: &Front| (f.position(t) - x).abs() <= self.eps_x;
            let mut first = i;
            while first > 0 && near(&self.fronts[first - 1]) {
                first -= 1;
            }
            let mut last = i + 1;
            while last + 1 < self.fronts.len() && near(&self.fronts[last + 1]) {
                last += 1;
            }
            return Some(Collision {
                t,
                x,
                first,
                last,
                ids: self.fronts[first..=last].iter().map(|f| f.id).collect(),
            });
        }
        None
    }

    /// Resolves one collision returned by [`next_event`](Self::next_event).
    pub fn process(&mut self, c: &Collision) -> Result<()> {
        if self.stats.events >= self.max_events {
            return Err(Error::EventOverflow(self.max_events));
        }
        self.queue.pop();
        let incoming: Vec<Front> = self.fronts[c.first..=c.last].to_vec();
        let (l, r) = (incoming[0].left, incoming[incoming.len() - 1].right);
        let fan = solve_riemann(&self.flux, l, r)?;
        let born = self.spawn(&fan, c.x, c.t);
        for f in &incoming {
            if let Some(span) = self.spans.get_mut(f.id as usize) {
                span.end = Some((c.t, c.x));
            }
        }
        self.log.push(EventRecord {
            t: c.t,
            x: c.x,
            incoming: incoming.iter().map(Front::record).collect(),
            out: born.iter().map(Front::record).collect(),
        });
        let n_new = born.len();
        self.fronts.splice(c.first..=c.last, born);
        self.reindex();
        self.t = c.t;
        if n_new == 0 {
            if c.first > 0 && c.first < self.fronts.len() {
                self.schedule(c.first - 1);
            }
        } else {
            if c.first > 0 {
                self.schedule(c.first - 1);
            }
            let last = c.first + n_new - 1;
            if last + 1 < self.fronts.len() {
                self.schedule(last);
            }
        }
        if self.fronts.is_empty() {
            self.far_state = l;
        }
        self.stats.events += 1;
        self.stats.max_fronts = self.stats.max_fronts.max(self.fronts.len());
        Ok(())
    }

    /// Processes every collision up to and including `t_target` and returns
    /// the profile there.
    pub fn advance(&mut self, t_target: f64) -> Result<StepFunction> {
        if t_target < self.t {
            return Err(Error::TimeReversal {
                target: t_target,
                current: self.t,
            });
        }
        while let Some(c) = self.next_event() {
            if c.t > t_target {
                break;
            }
            self.process(&c)?;
        }
        self.t = t_target;
        Ok(self.profile(t_target))
    }

    /// Profile at `t ≥` the last processed event; coincident fronts collapse.
    pub fn profile(&self, t: f64) -> StepFunction {
        let mut jumps: Vec<f64> = Vec::with_capacity(self.fronts.len());
        let mut values = vec![self.states()[0]];
        for f in &self.fronts {
            let x = f.position(t);
            match jumps.last() {
                Some(&prev) if x <= prev => *values.last_mut().unwrap() = f.right,
                _ => {
                    jumps.push(x);
                    values.push(f.right);
                }
            }
        }
        StepFunction::new(jumps, values).expect("front positions are ordered")
    }

    pub fn event_log_ndjson(&self) -> String {
        let mut out = String::new();
        for e in &self.log {
            out.push_str(&serde_json::to_string(e).expect("plain data"));
            out.push('\n');
        }
        out
    }

    /// CSV `id,t,x,speed`: birth and death (or `t_end`) of every front.
    pub fn trajectories_csv(&self, t_end: f64) -> String {
        let mut out = String::from("id,t,x,speed\n");
        for s in &self.spans {
            let (te, xe) = s
                .end
                .unwrap_or((t_end, s.x_start + s.speed * (t_end - s.t_start)));
            let _ = writeln!(out, "{},{},{},{}", s.id, s.t_start, s.x_start, s.speed);
            let _ = writeln!(out, "{},{},{},{}", s.id, te, xe, s.speed);
        }
        out
    }

    /// Index of the front separating a prefix of states in `left` from a
    /// suffix in `right`.
    pub fn separating_front(&self, left: [f64; 2], right: [f64; 2]) -> Option<usize> {
        let states = self.states();
        let inside = |r: [f64; 2], v: f64| v >= r[0] && v <= r[1];
        let p = states.iter().take_while(|&&v| inside(left, v)).count();
        if p == 0 || p == states.len() {
            return None;
        }
        states[p..]
            .iter()
            .all(|&v| inside(right, v))
            .then_some(p - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RSample {
    pub t: f64,
    pub x: f64,
}

/// Outcome of watching a simulation for a single separating shock.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmergenceReport {
    pub emerged: bool,
    #[serde(rename = "T0")]
    pub t0: Option<f64>,
    pub x0: Option<f64>,
    pub r_samples: Vec<RSample>,
    pub left_range: [f64; 2],
    pub right_range: [f64; 2],
    #[serde(rename = "T_tilde")]
    pub t_tilde: Option<f64>,
    pub gamma: Option<f64>,
    pub horizon: f64,
    /// Speed of the separating front at the horizon.
    pub final_speed: Option<f64>,
    pub events: usize,
}

/// Runs to `t_max` and reports the last time a single front began to separate
/// `left_range` states from `right_range` states for good.
pub fn run_until_single_front(
    s: &mut SimState,
    left_range: [f64; 2],
    right_range: [f64; 2],
    t_max: f64,
) -> Result<EmergenceReport> {
    if !(t_max > 0.0) {
        return Err(Error::NonPositiveTime(t_max));
    }
    let mut since: Option<(f64, f64)> = s
        .separating_front(left_range, right_range)
        .map(|k| (s.time(), s.fronts()[k].position(s.time())));
    let mut samples: Vec<RSample> = since.iter().map(|&(t, x)| RSample { t, x }).collect();
    while let Some(c) = s.next_event() {
        if c.t > t_max {
            break;
        }
        s.process(&c)?;
        match s.separating_front(left_range, right_range) {
            Some(k) => {
                let x = s.fronts()[k].position(c.t);
                if since.is_none() {
                    since = Some((c.t, x));
                    samples.clear();
                }
                samples.push(RSample { t: c.t, x });
            }
            None => {
                since = None;
                samples.clear();
            }
        }
    }
    s.t = s.t.max(t_max);
    let sep = s.separating_front(left_range, right_range);
    let final_speed = sep.map(|k| s.fronts()[k].speed);
    if let Some(k) = sep {
        samples.push(RSample {
            t: t_max,
            x: s.fronts()[k].position(t_max),
        });
    }
    Ok(EmergenceReport {
        emerged: since.is_some(),
        t0: since.map(|p| p.0),
        x0: since.map(|p| p.1),
        r_samples: samples,
        left_range,
        right_range,
        t_tilde: None,
        gamma: None,
        horizon: t_max,
        final_speed,
        events: s.stats().events,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::{approximate_pw_affine, AnalyticFluxSpec, AnalyticKind};

    fn burgers_coarse() -> Flux {
        Flux::new(vec![0.0, 1.0, 2.0], vec![0.0, 0.5, 2.0]).unwrap()
    }

    fn v_flux() -> Flux {
        Flux::new(
            vec![-2.0, -1.0, 0.0, 1.0, 2.0],
            vec![4.0, 1.0, 0.0, 1.0, 4.0],
        )
        .unwrap()
    }

    fn merge_data() -> StepFunction {
        StepFunction::new(vec![0.0, 1.0], vec![2.0, 1.0, 0.0]).unwrap()
    }

    #[test]
    fn init_builds_fans() {
        let s = init_state(&burgers_coarse(), &merge_data()).unwrap();
        let f = s.fronts();
        assert_eq!(f.len(), 2);
        assert_eq!((f[0].speed, f[0].x0), (1.5, 0.0));
        assert_eq!((f[1].speed, f[1].x0), (0.5, 1.0));
        assert!(init_state(&burgers_coarse(), &StepFunction::constant(1.0))
            .unwrap()
            .fronts()
            .is_empty());
        let s = init_state(
            &v_flux(),
            &StepFunction::new(vec![0.0], vec![-1.0, 1.0]).unwrap(),
        )
        .unwrap();
        let speeds: Vec<f64> = s.fronts().iter().map(|f| f.speed).collect();
        assert_eq!(speeds, vec![-1.0, 1.0]);
        assert!(matches!(
            init_state(&burgers_coarse(), &StepFunction::constant(3.0)),
            Err(Error::StateOutOfRange { .. })
        ));
    }

    #[test]
    fn first_collision() {
        let mut s = init_state(&burgers_coarse(), &merge_data()).unwrap();
        let c = s.next_event().unwrap();
        assert_eq!((c.t, c.x), (1.0, 1.5));
        assert_eq!(c.ids.len(), 2);
        let mut single = init_state(
            &burgers_coarse(),
            &StepFunction::new(vec![0.0], vec![1.0, 0.0]).unwrap(),
        )
        .unwrap();
        assert!(single.next_event().is_none());
    }

    #[test]
    fn triple_collision_is_grouped() {
        let fl = Flux::new(vec![-3.0, -1.0, 1.0, 3.0], vec![9.0, 1.0, 1.0, 9.0]).unwrap();
        // states 3 | 1 | -1 | -3: shocks with speeds 4, 0, -4
        let u0 = StepFunction::new(vec![-2.0, 0.0, 2.0], vec![3.0, 1.0, -1.0, -3.0]).unwrap();
        let mut s = init_state(&fl, &u0).unwrap();
        let speeds: Vec<f64> = s.fronts().iter().map(|f| f.speed).collect();
        assert_eq!(speeds, vec![4.0, 0.0, -4.0]);
        let c = s.next_event().unwrap();
        assert_eq!((c.t, c.x), (0.5, 0.0));
        assert_eq!(c.ids.len(), 3);
        s.process(&c).unwrap();
        assert_eq!(s.fronts().len(), 1);
        assert_eq!(
            (s.fronts()[0].left, s.fronts()[0].right, s.fronts()[0].speed),
            (3.0, -3.0, 0.0)
        );
    }

    #[test]
    fn merge_then_single_front() {
        let mut s = init_state(&burgers_coarse(), &merge_data()).unwrap();
        let p = s.advance(2.0).unwrap();
        assert_eq!(p.jumps(), &[2.5]);
        assert_eq!(p.values(), &[2.0, 0.0]);
        assert_eq!(s.fronts()[0].speed, 1.0);
        let again = s.advance(2.0).unwrap();
        assert_eq!(again, p);
        assert!(matches!(s.advance(1.0), Err(Error::TimeReversal { .. })));
        let log = s.event_log_ndjson();
        assert_eq!(
            log,
            "{\"t\":1.0,\"x\":1.5,\"in\":[{\"l\":2.0,\"r\":1.0,\"s\":1.5},{\"l\":1.0,\"r\":0.0,\"s\":0.5}],\"out\":[{\"l\":2.0,\"r\":0.0,\"s\":1.0}]}\n"
        );
    }

    #[test]
    fn stationary_double_well_data() {
        let c = (2.0f64 / 3.0).sqrt();
        let fl = approximate_pw_affine(
            &AnalyticFluxSpec::new(AnalyticKind::DoubleWell, [-3.0, 3.0], 0.1)
                .with_corners([-2.0, -c, 0.0, c, 2.0]),
        )
        .unwrap();
        let u0 = StepFunction::new(vec![0.0, 1.0], vec![2.0, 0.0, -2.0]).unwrap();
        let mut s = init_state(&fl, &u0).unwrap();
        assert_eq!(s.advance(10.0).unwrap(), u0);
        assert_eq!(s.stats().events, 0);
    }

    #[test]
    fn annihilation_leaves_constant_state() {
        // 0 | 1 | 0 on a V-flux: fan then shock; check the state chain survives
        let mut s = init_state(
            &v_flux(),
            &StepFunction::new(vec![0.0, 1.0], vec![1.0, -1.0, 1.0]).unwrap(),
        )
        .unwrap();
        let p = s.advance(50.0).unwrap();
        assert!(p.total_variation() <= 4.0);
        assert_eq!(p.values()[0], 1.0);
    }

    #[test]
    fn event_guard() {
        let mut s = init_state(&burgers_coarse(), &merge_data()).unwrap();
        s.set_max_events(0);
        assert!(matches!(s.advance(5.0), Err(Error::EventOverflow(0))));
    }

    #[test]
    fn emergence_on_merge() {
        let mut s = init_state(&burgers_coarse(), &merge_data()).unwrap();
        let r = run_until_single_front(&mut s, [2.0, 2.0], [0.0, 0.0], 10.0).unwrap();
        assert!(r.emerged);
        assert_eq!(r.t0, Some(1.0));
        assert_eq!(r.x0, Some(1.5));
        assert_eq!(r.final_speed, Some(1.0));
        assert_eq!(r.r_samples.last().unwrap(), &RSample { t: 10.0, x: 10.5 });
    }
}
