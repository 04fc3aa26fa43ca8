use serde::{Deserialize, Serialize};

use super::seeds::SeedPlan;
use super::EncounterTrace;
use crate::error::{Result, WormError};
use crate::rng::{stream, Stream};
use crate::sim::{assign_profiles, EventLog, Population};

/// Node characteristics applied to trace nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplayConfig {
    pub coop_frac: f64,
    pub immune_frac: f64,
    pub on_prob: f64,
}

impl Default for ReplayConfig {
    fn default() -> Self {
        ReplayConfig { coop_frac: 1.0, immune_frac: 0.0, on_prob: 1.0 }
    }
}

/// Replays the trace once: one prey and one predator seed drawn from the
/// plan's groups, injected at the plan's offsets from trace start; each
/// encounter is one transmission opportunity at its start time. The log
/// runs to the trace end.
pub fn replay_round(trace: &EncounterTrace, plan: &SeedPlan, config: &ReplayConfig, rng_seed: u64) -> Result<EventLog> {
    for (name, v) in [("coop_frac", config.coop_frac), ("immune_frac", config.immune_frac), ("on_prob", config.on_prob)]
    {
        if !(0.0..=1.0).contains(&v) {
            return Err(WormError::param(name, format!("{v} outside [0, 1]")));
        }
    }
    let n = trace.n_nodes();
    let (prey, predator) = plan.draw(&mut stream(rng_seed, Stream::Seeds));
    for node in [prey, predator] {
        if node >= n {
            return Err(WormError::UnknownNode(node));
        }
    }
    let cooperative = ((config.coop_frac * n as f64) + 1e-9).floor() as usize;
    let immune = ((config.immune_frac * cooperative as f64) + 1e-9).floor() as usize;
    let profiles =
        assign_profiles(n, cooperative.min(n), immune, &[prey], &[predator], &mut stream(rng_seed, Stream::Profiles))?;
    let (t_pred, t_prey) = plan.injection_times();
    crate::sim::engine_drive(
        Population::new(profiles),
        vec![(t_prey, prey), (t_pred, predator)],
        trace.events(),
        config.on_prob,
        trace.end(),
        &mut stream(rng_seed, Stream::Activity),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::extract_metrics;
    use crate::sim::{Compartment, TransitionCause};
    use crate::trace::{DerivedEncounter, Scenario};

    fn plan(prey: usize, predator: usize, delay: f64) -> SeedPlan {
        SeedPlan {
            predator_group: vec![predator],
            prey_group: vec![prey],
            scenario: Scenario::FastPredator,
            arrival_delay: delay,
        }
    }

    #[test]
    fn isolated_prey_seed() {
        let trace = EncounterTrace::new(
            vec![DerivedEncounter::new(1, 2, 0.0, 5.0), DerivedEncounter::new(2, 3, 10.0, 15.0)],
            [0],
        );
        let log = replay_round(&trace, &plan(0, 1, 0.0), &ReplayConfig::default(), 3).unwrap();
        let m = extract_metrics(&log).unwrap();
        assert_eq!(m.ti, 1.0);
        assert!(m.tl_censored);
        assert_eq!(m.tl, 15.0);
    }

    #[test]
    fn hand_walked_fixture() {
        // nodes a=0 (prey seed), b=1 (predator seed), c=2, d=3
        // t=1  a-c : c prey-infected
        // t=2  c-d : d prey-infected
        // t=3  b-c : c terminated
        // t=4  a-d : no-op (both prey)
        // t=5  b-a : a terminated
        // d stays prey-infected to the trace end (t_end of last encounter = 6)
        let enc = vec![
            DerivedEncounter::new(0, 2, 1.0, 1.5),
            DerivedEncounter::new(2, 3, 2.0, 2.5),
            DerivedEncounter::new(1, 2, 3.0, 3.5),
            DerivedEncounter::new(0, 3, 4.0, 4.5),
            DerivedEncounter::new(0, 1, 5.0, 6.0),
        ];
        let trace = EncounterTrace::new(enc, []);
        let log = replay_round(&trace, &plan(0, 1, 0.0), &ReplayConfig::default(), 9).unwrap();
        let finals = {
            let mut s = log.initial.clone();
            for t in &log.transitions {
                s[t.node] = t.to;
            }
            s
        };
        use Compartment::*;
        assert_eq!(finals, vec![PredatorInfected, PredatorInfected, PredatorInfected, PreyInfected]);
        let causes: Vec<_> = log.transitions.iter().skip(2).map(|t| (t.time, t.cause)).collect();
        assert_eq!(
            causes,
            vec![
                (1.0, TransitionCause::PreyInfection),
                (2.0, TransitionCause::PreyInfection),
                (3.0, TransitionCause::Termination),
                (5.0, TransitionCause::Termination),
            ]
        );
        let m = extract_metrics(&log).unwrap();
        // lifetimes: a 5, c 2, d 6 - 2 = 4 (censored at trace end)
        assert_eq!((m.ti, m.mi, m.tl), (3.0, 3.0, 11.0));
        assert_eq!(log.horizon, 6.0);
    }

    #[test]
    fn deterministic_and_seed_checked() {
        let enc: Vec<_> =
            (0..40u64).map(|k| DerivedEncounter::new(k % 7, (k * 3 + 1) % 7 + 7, k as f64, k as f64 + 1.0)).collect();
        let trace = EncounterTrace::new(enc, []);
        let p = plan(0, 8, -2.0);
        let cfg = ReplayConfig { coop_frac: 0.8, immune_frac: 0.25, on_prob: 0.7 };
        assert_eq!(replay_round(&trace, &p, &cfg, 5).unwrap(), replay_round(&trace, &p, &cfg, 5).unwrap());
        assert!(matches!(replay_round(&trace, &plan(99, 1, 0.0), &cfg, 5), Err(WormError::UnknownNode(99))));
    }
}
