use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("breakpoints must be strictly increasing and finite (index {index})")]
    NonMonotoneBreakpoints { index: usize },
    #[error("length mismatch: {expected} expected, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("a flux needs at least two breakpoints")]
    TooFewBreakpoints,
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
    #[error("state {state} lies outside the working interval [{lo}, {hi}]")]
    StateOutOfRange { state: f64, lo: f64, hi: f64 },
    #[error("chord endpoints coincide at {0}")]
    DegenerateChord(f64),
    #[error("tangent point {0} is not interior to the working interval")]
    BoundaryPoint(f64),
    #[error("triplet points C={c}, D={d} are out of range or misordered")]
    COutOfRange { c: f64, d: f64 },
    #[error("expected a convex-convex triplet")]
    WrongTriplet,
    #[error("chord slope {chord} is not strictly between the end slopes {left} and {right}")]
    ChordSlopeViolated { left: f64, chord: f64, right: f64 },
    #[error("empty interval [{0}, {1}]")]
    EmptyInterval(f64, f64),
    #[error("empty mesh: {0}")]
    EmptyMesh(String),
    #[error("flux is not convex (slope decreases at segment {segment})")]
    NotConvex { segment: usize },
    #[error("slope {p} lies outside the dual domain [{lo}, {hi}]")]
    OutsideDualDomain { p: f64, lo: f64, hi: f64 },
    #[error("fronts with equal states have no speed")]
    EqualStates,
    #[error("event budget of {0} exhausted")]
    EventOverflow(usize),
    #[error("target time {target} precedes current time {current}")]
    TimeReversal { target: f64, current: f64 },
    #[error("time must be positive, got {0}")]
    NonPositiveTime(f64),
    #[error("bisection bracket exceeded the search window at t={t}")]
    WindowExceeded { t: f64 },
    #[error("flux is not a triplet at (C, D)")]
    NotATriplet,
    #[error("hypothesis check did not pass")]
    HypothesisNotChecked,
    #[error("main conditions are violated")]
    ConditionsViolated,
    #[error("no tangency root in [{lo}, {hi}]")]
    NoRootInInterval { lo: f64, hi: f64 },
    #[error("invalid step function: {0}")]
    InvalidStepFunction(String),
    #[error("data does not match the scenario shape: {0}")]
    DataShape(String),
    #[error("validation error at {path}: {message}")]
    Validation { path: String, message: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
