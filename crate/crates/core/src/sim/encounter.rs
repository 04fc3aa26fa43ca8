use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::error::{Result, WormError};
use crate::model::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EncounterSource {
    Generated,
    Trace,
}

/// An instantaneous pairwise contact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EncounterEvent {
    pub time: f64,
    pub node_u: usize,
    pub node_v: usize,
    pub source: EncounterSource,
}

/// Superposition of the N(N-1)/2 independent pairwise Poisson processes:
/// exponential gaps at total rate beta N (N-1) / 2, each event landing on a
/// uniformly chosen unordered pair.
#[derive(Debug)]
pub struct UniformEncounters<R> {
    rng: R,
    n_nodes: usize,
    gap: Option<Exp<f64>>,
    time: f64,
    horizon: f64,
}

/// Encounter stream for `params` up to `horizon`. All N nodes take part,
/// non-cooperative ones included.
pub fn generate_uniform_encounters<R: Rng>(params: &ModelParams, rng: R, horizon: f64) -> Result<UniformEncounters<R>> {
    if params.n_total < 2 {
        return Err(WormError::param("n_total", "encounters need at least two nodes"));
    }
    if !(params.beta >= 0.0 && params.beta.is_finite()) {
        return Err(WormError::param("beta", format!("{} is not a finite rate >= 0", params.beta)));
    }
    let n = params.n_total as f64;
    let total_rate = params.beta * n * (n - 1.0) / 2.0;
    let gap = if total_rate > 0.0 {
        Some(Exp::new(total_rate).map_err(|e| WormError::param("beta", e.to_string()))?)
    } else {
        None
    };
    Ok(UniformEncounters { rng, n_nodes: params.n_total, gap, time: 0.0, horizon })
}

impl<R: Rng> Iterator for UniformEncounters<R> {
    type Item = EncounterEvent;

    fn next(&mut self) -> Option<EncounterEvent> {
        let gap = self.gap.as_ref()?;
        self.time += gap.sample(&mut self.rng);
        if self.time > self.horizon {
            self.gap = None;
            return None;
        }
        let u = self.rng.random_range(0..self.n_nodes);
        let mut v = self.rng.random_range(0..self.n_nodes - 1);
        if v >= u {
            v += 1;
        }
        Some(EncounterEvent { time: self.time, node_u: u.min(v), node_v: u.max(v), source: EncounterSource::Generated })
    }
}
