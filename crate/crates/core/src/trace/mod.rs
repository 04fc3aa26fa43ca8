//! Trace ingestion, encounter statistics, seed selection and replay.
//!
//! Two CSV schemas are accepted:
//!
//! * associations: `node_id,ap_id,t_start,t_end` (WLAN sessions; an
//!   encounter is two nodes on the same access point at the same time)
//! * encounters: `node_u,node_v,t_start,t_end`

mod overlap;
mod parse;
mod replay;
mod seeds;
mod stats;
mod synth;

pub use overlap::derive_encounters;
pub use parse::{
    parse_associations, parse_encounters, parse_trace, AssociationRecord, DerivedEncounter, ParseIssue, Parsed,
    TraceFormat, TraceRecords, ASSOCIATION_HEADER, ENCOUNTER_HEADER,
};
pub use replay::{replay_round, ReplayConfig};
pub use seeds::{select_seeds, select_seeds_by_score, Scenario, SeedPlan, StrataBands, PAPER_ARRIVAL_DELAY};
pub use stats::{compute_stats, online_time, Histogram, TraceStats};
pub use synth::{generate_synthetic_trace, write_encounter_csv, SyntheticTraceConfig};

use std::collections::HashMap;

use crate::sim::{EncounterEvent, EncounterSource};

/// Time-ordered encounters over a dense node index.
#[derive(Debug, Clone)]
pub struct EncounterTrace {
    node_ids: Vec<u64>,
    index: HashMap<u64, usize>,
    encounters: Vec<DerivedEncounter>,
    start: f64,
    end: f64,
}

impl EncounterTrace {
    /// Builds a trace from encounters plus any nodes that never met anyone.
    pub fn new(mut encounters: Vec<DerivedEncounter>, extra_nodes: impl IntoIterator<Item = u64>) -> Self {
        encounters.sort_by(DerivedEncounter::cmp_time);
        let mut node_ids: Vec<u64> = encounters.iter().flat_map(|e| [e.node_u, e.node_v]).chain(extra_nodes).collect();
        node_ids.sort_unstable();
        node_ids.dedup();
        let index = node_ids.iter().enumerate().map(|(k, &id)| (id, k)).collect();
        let start = encounters.iter().map(|e| e.t_start).fold(f64::INFINITY, f64::min);
        let end = encounters.iter().map(|e| e.t_end).fold(f64::NEG_INFINITY, f64::max);
        let (start, end) = if encounters.is_empty() { (0.0, 0.0) } else { (start.min(0.0), end) };
        EncounterTrace { node_ids, index, encounters, start, end }
    }

    pub fn from_associations(records: &[AssociationRecord]) -> Self {
        EncounterTrace::new(derive_encounters(records), records.iter().map(|r| r.node_id))
    }

    pub fn n_nodes(&self) -> usize {
        self.node_ids.len()
    }

    pub fn node_ids(&self) -> &[u64] {
        &self.node_ids
    }

    pub fn index_of(&self, node_id: u64) -> Option<usize> {
        self.index.get(&node_id).copied()
    }

    pub fn encounters(&self) -> &[DerivedEncounter] {
        &self.encounters
    }

    /// Trace end in trace-relative seconds.
    pub fn end(&self) -> f64 {
        self.end
    }

    /// Observation span, from time 0 (or the earliest start) to the end.
    pub fn duration(&self) -> f64 {
        self.end - self.start
    }

    /// One simulator event per encounter, at its start time.
    pub fn events(&self) -> impl Iterator<Item = EncounterEvent> + '_ {
        self.encounters.iter().map(|e| EncounterEvent {
            time: e.t_start,
            node_u: self.index[&e.node_u],
            node_v: self.index[&e.node_v],
            source: EncounterSource::Trace,
        })
    }
}
