use thiserror::Error;

/// Errors raised anywhere in the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("invalid witness order: {0}")]
    InvalidOrder(String),

    #[error("{kind}: closed form not derived for this order; use the exact backend")]
    NotDerived { kind: String },

    #[error("{kind} is an exact-only witness (no closed form)")]
    ExactOnly { kind: String },

    #[error("witness {kind} undefined: {reason}")]
    Undefined { kind: String, reason: String },

    #[error("invalid cutoff: {0}")]
    InvalidCutoff(String),

    #[error("cutoff too small: truncated tail mass {tail:e} exceeds {bound:e}")]
    CutoffTooSmall { tail: f64, bound: f64 },

    #[error("cutoff exhausted at t={t:e}: top-shell population {population:e} exceeds {bound:e}")]
    CutoffExhausted { t: f64, population: f64, bound: f64 },

    #[error("norm drift {drift:e} at t={t:e} exceeds {bound:e}")]
    NormDrift { t: f64, drift: f64, bound: f64 },

    #[error("step size underflow at t={t:e} (step {step:e})")]
    StepUnderflow { t: f64, step: f64 },

    #[error("moment order ({p},{q},{r},{s}) exceeds cutoff headroom ({cutoff_a},{cutoff_b})")]
    Headroom {
        p: usize,
        q: usize,
        r: usize,
        s: usize,
        cutoff_a: usize,
        cutoff_b: usize,
    },

    #[error("target time {target:e} precedes state time {current:e}")]
    BackwardsInTime { target: f64, current: f64 },

    #[error("degenerate convergence ladder: {0}")]
    DegenerateLadder(String),

    #[error("exact backend at |alpha|^2 = {alpha_sq} exceeds the desk-scale ceiling {ceiling}; opt in to heavy runs")]
    ExactCeiling { alpha_sq: f64, ceiling: f64 },

    #[error("snapshot: {0}")]
    Snapshot(String),

    #[error("unknown witness `{0}`")]
    UnknownWitness(String),
}

pub type Result<T> = std::result::Result<T, Error>;
