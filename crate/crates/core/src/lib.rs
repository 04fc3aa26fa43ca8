//! Predator-prey worm interactions in encounter-based networks.
//!
//! The crate has four layers:
//!
//! * [`model`]: the deterministic continuum model of an aggressive one-sided
//!   interaction (a beneficial "predator" worm that terminates a malicious
//!   "prey" worm and vaccinates susceptible hosts), with and without node
//!   characteristics (cooperation, prey immunity, on-off behavior).
//! * [`sim`]: an exact continuous-time stochastic encounter simulator over
//!   uniform random encounters.
//! * [`trace`]: ingestion of association/encounter traces, trace statistics,
//!   seed selection and trace-driven replay.
//! * [`metrics`] and [`experiment`]: the six infection metrics, aggregation
//!   across rounds, parameter sweeps and plot-data emission.

// `!(x >= 0.0)` style guards are kept on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiment;
pub mod metrics;
pub mod model;
pub mod rng;
pub mod sim;
pub mod trace;

pub use error::{Result, WormError};
pub use metrics::{aggregate, extract_metrics, MetricSet, RoundAggregate, Summary};
pub use model::{
    derivatives_basic, derivatives_characteristic, integrate, model_metrics, suppression_threshold, ta_closed_form,
    Derivative, ModelKind, ModelParams, ModelState, Trajectory,
};
pub use sim::{
    apply_encounter, run_round, run_rounds, Compartment, EncounterEvent, EventLog, NodeProfile, RoundConfig,
};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
