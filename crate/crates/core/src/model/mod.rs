//! Deterministic continuum model of aggressive one-sided worm interaction.

mod analysis;
mod integrate;
mod ode;
mod params;

pub use analysis::{model_metrics, suppression_threshold, ta_closed_form, ModelThresholds};
pub use integrate::{default_horizon, default_step, integrate, Trajectory};
pub use ode::{derivatives_basic, derivatives_characteristic, Derivative, ModelKind, ModelState};
pub use params::ModelParams;

/// Euler-Mascheroni constant as it appears in the epidemic broadcast time.
pub const EULER_GAMMA: f64 = 0.5772;
