//! Simulator for the two-mode atom-molecule condensate
//! `H = (delta/2) a^dag a + (omega/2) (a^dag^2 b + a^2 b^dag)`.
//!
//! Two backends evaluate nonclassicality witnesses on a grid of rescaled times
//! `omega * t`: closed forms from a third-order operator expansion
//! ([`perturbative`]) and Krylov propagation in a truncated Fock space
//! ([`fock`]). [`engine`] sweeps, compares and locates nonclassical regions.
//!
//! Everything is generic over [`Real`] (`f32`, `f64`); the aliases below fix `f64`.

pub mod engine;
pub mod error;
pub mod fock;
pub mod model;
pub mod perturbative;
pub mod scalar;

pub use engine::{
    compare, coupling_ladder, default_ladder, log_log_slope, regions, sweep, ComparisonReport, ExactOptions,
    ExactRun, LadderPoint, NonclassicalRegion, SweepOptions, WitnessSeries, EXACT_ALPHA_CEILING, MIN_LADDER_POINTS,
};
pub use error::{Error, Result};
pub use fock::witness_exact;
pub use model::{
    preset, presets, validate, BackendSelection, PRESET_GRID_MAX, PRESET_GRID_SAMPLES, OUTSIDE_VALIDITY, BackendTag, Mode, Preset, Severity, SystemParams, TimeGrid,
    ValidationReport, Violation, WitnessKind,
};
pub use scalar::Real;

pub type Params = SystemParams<f64>;
pub type Grid = TimeGrid<f64>;
pub type State = fock::StateVector<f64>;
pub type Series = WitnessSeries<f64>;
pub type Report = ComparisonReport<f64>;
pub type Region = NonclassicalRegion<f64>;
pub type Coeffs = perturbative::Coefficients<f64>;
