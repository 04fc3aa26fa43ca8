//! Event-driven stochastic simulation of worm interactions.

mod batch;
mod encounter;
mod engine;
mod node;

pub use batch::{run_rounds, run_uniform_rounds, RoundRecord};
pub use encounter::{generate_uniform_encounters, EncounterEvent, EncounterSource, UniformEncounters};
pub(crate) use engine::drive as engine_drive;
pub use engine::{
    apply_encounter, run_round, simulate_uniform_round, EventLog, Population, RoundConfig, Transition, TransitionCause,
};
pub use node::{assign_profiles, Compartment, NodeProfile, NodeState, Role};
