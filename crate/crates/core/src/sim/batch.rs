use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::engine::{simulate_uniform_round, EventLog, RoundConfig};
use crate::error::Result;
use crate::metrics::{extract_metrics, MetricSet};
use crate::rng::derive_seed;

/// Outcome of one round in a batch. Errors are kept per round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub seed: u64,
    pub outcome: std::result::Result<MetricSet, String>,
}

impl RoundRecord {
    pub fn metrics(&self) -> Option<&MetricSet> {
        self.outcome.as_ref().ok()
    }
}

/// Runs `rounds` independent rounds in parallel. Round `k` gets seed
/// `derive_seed(master_seed, k)`; output is in round order regardless of
/// scheduling.
pub fn run_rounds<F>(rounds: usize, master_seed: u64, round: F) -> Vec<RoundRecord>
where
    F: Fn(u64) -> Result<EventLog> + Sync,
{
    (0..rounds)
        .into_par_iter()
        .map(|k| {
            let seed = derive_seed(master_seed, k as u64);
            let outcome = round(seed).and_then(|log| extract_metrics(&log)).map_err(|e| e.to_string());
            RoundRecord { round: k, seed, outcome }
        })
        .collect()
}

/// Uniform-encounter rounds from a template; the template's `rng_seed` is
/// replaced per round.
pub fn run_uniform_rounds(template: &RoundConfig, rounds: usize, master_seed: u64) -> Vec<RoundRecord> {
    run_rounds(rounds, master_seed, |seed| simulate_uniform_round(&RoundConfig { rng_seed: seed, ..*template }))
}
