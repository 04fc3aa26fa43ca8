//! Property checks shared by the property tests and the acceptance run.

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use wormsim::sim::{run_uniform_rounds, simulate_uniform_round, Compartment, RoundConfig, TransitionCause};
use wormsim::trace::{
    derive_encounters, replay_round, AssociationRecord, DerivedEncounter, EncounterTrace, ReplayConfig, Scenario,
    SeedPlan,
};
use wormsim::{extract_metrics, EventLog, ModelParams};

use Compartment::*;

pub type Check = Result<(), TestCaseError>;

/// The allowed edges, listed independently of the library.
const EDGES: [(Compartment, Compartment); 4] = [
    (Susceptible, PreyInfected),
    (Susceptible, PredatorInfected),
    (ImmuneSusceptible, PredatorInfected),
    (PreyInfected, PredatorInfected),
];

pub fn arb_params() -> impl Strategy<Value = ModelParams> {
    (3usize..40, 1e-4f64..5e-3, 0.0f64..=1.0, 0.0f64..=0.9, 0.05f64..=1.0, 1usize..3, 0usize..3).prop_filter_map(
        "seeds must fit",
        |(n, beta, c, i, p, ia, ib)| {
            let params = ModelParams::basic(n, beta, ia, ib).with_characteristics(c, i, p);
            params.validate().ok().map(|_| params)
        },
    )
}

pub fn arb_round() -> impl Strategy<Value = (RoundConfig, u64)> {
    (arb_params(), -200.0f64..200.0, any::<u64>()).prop_map(|(params, delay, seed)| {
        let mut cfg = RoundConfig::new(params, seed, 5e4);
        cfg.prey_delay = delay;
        (cfg, seed)
    })
}

pub fn check_log(log: &EventLog) -> Check {
    let n = log.n_nodes();
    let mut state = log.initial.clone();
    let mut done = vec![false; n];
    let mut seeded = vec![false; n];
    let mut last = f64::NEG_INFINITY;
    for tr in &log.transitions {
        prop_assert!(tr.time >= last, "time order");
        last = tr.time;
        prop_assert_eq!(state[tr.node], tr.from);
        prop_assert!(!done[tr.node], "predator-infected node {} changed again", tr.node);
        match tr.cause {
            TransitionCause::Seed => {
                prop_assert!(!seeded[tr.node]);
                prop_assert_eq!(tr.from, Susceptible);
                seeded[tr.node] = true;
            }
            _ => prop_assert!(EDGES.contains(&(tr.from, tr.to)), "edge {:?} -> {:?}", tr.from, tr.to),
        }
        prop_assert!(tr.from != NonCooperative);
        prop_assert!(!(log.initial[tr.node] == ImmuneSusceptible && tr.to == PreyInfected));
        state[tr.node] = tr.to;
        if tr.to == PredatorInfected {
            done[tr.node] = true;
        }
        let counts = log.counts_at(tr.time);
        prop_assert_eq!(counts.iter().sum::<usize>(), n);
        let noncoop = log.initial.iter().filter(|c| **c == NonCooperative).count();
        prop_assert_eq!(counts[NonCooperative as usize], noncoop);
    }
    let m = extract_metrics(log).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let seeds_a = log.transitions.iter().filter(|t| t.cause == TransitionCause::Seed && t.to == PreyInfected).count();
    prop_assert!(seeds_a as f64 <= m.mi && m.mi <= m.ti);
    if m.ti > 0.0 {
        prop_assert!(m.al <= m.tl + 1e-9);
    }
    if let (Some(ta), Some(tr)) = (m.ta, m.tr) {
        prop_assert!(tr <= ta);
    }
    prop_assert!(m.ti_relative <= 1.0 + 1e-12);
    Ok(())
}

pub type ReplayInput = (Vec<(u64, u64, u32)>, f64, f64, f64, f64, u64);

pub fn arb_replay() -> impl Strategy<Value = ReplayInput> {
    (
        proptest::collection::vec((0u64..12, 0u64..12, 0u32..1000), 1..150),
        0.5f64..=1.0,
        0.0f64..=0.8,
        0.1f64..=1.0,
        -300.0f64..300.0,
        any::<u64>(),
    )
}

pub fn arb_associations() -> impl Strategy<Value = Vec<AssociationRecord>> {
    proptest::collection::vec((0u64..20, 0u8..6, 0u32..2000, 1u32..400), 0..=200).prop_map(|recs| {
        recs.into_iter()
            .map(|(n, ap, s, d)| AssociationRecord {
                node_id: n,
                ap_id: format!("ap{ap}"),
                t_start: s as f64,
                t_end: (s + d) as f64,
            })
            .collect()
    })
}

pub fn uniform_round(cfg: &RoundConfig) -> Check {
    check_log(&simulate_uniform_round(cfg).unwrap())
}

pub fn seed_determinism(cfg: &RoundConfig, master: u64) -> Check {
    prop_assert_eq!(simulate_uniform_round(cfg).unwrap(), simulate_uniform_round(cfg).unwrap());
    prop_assert_eq!(run_uniform_rounds(cfg, 4, master), run_uniform_rounds(cfg, 4, master));
    Ok(())
}

/// Only the seeds cooperate, so nothing but termination can happen.
pub fn non_cooperative_inert(params: &ModelParams, seed: u64) -> Check {
    let c = (params.i_a0 + params.i_b0) as f64 / params.n_total as f64;
    let p = params.with_characteristics(c, 0.0, params.on_prob);
    let log = simulate_uniform_round(&RoundConfig::new(p, seed, 1e4)).unwrap();
    check_log(&log)?;
    for t in log.transitions.iter().filter(|t| t.cause != TransitionCause::Seed) {
        prop_assert!(t.cause == TransitionCause::Termination, "{:?}", t);
    }
    Ok(())
}

pub fn trace_replay(input: &ReplayInput) -> Check {
    let (enc, c, i, p, delay, seed) = input.clone();
    let encounters: Vec<_> = enc
        .into_iter()
        .filter(|(u, v, _)| u != v)
        .map(|(u, v, t)| DerivedEncounter::new(u, v, t as f64, t as f64 + 5.0))
        .collect();
    let trace = EncounterTrace::new(encounters, 0..12);
    let plan = SeedPlan {
        predator_group: vec![0, 1, 2],
        prey_group: vec![3, 4, 5],
        scenario: Scenario::FastPredator,
        arrival_delay: delay,
    };
    let cfg = ReplayConfig { coop_frac: c, immune_frac: i, on_prob: p };
    let log = replay_round(&trace, &plan, &cfg, seed).unwrap();
    check_log(&log)?;
    prop_assert_eq!(&log, &replay_round(&trace, &plan, &cfg, seed).unwrap());
    Ok(())
}

/// All pairs at the same access point, different nodes, positive overlap.
pub fn quadratic_encounters(records: &[AssociationRecord]) -> Vec<DerivedEncounter> {
    let mut out = Vec::new();
    for (k, a) in records.iter().enumerate() {
        for b in &records[k + 1..] {
            if a.ap_id == b.ap_id && a.node_id != b.node_id {
                let (s, e) = (a.t_start.max(b.t_start), a.t_end.min(b.t_end));
                if e > s {
                    out.push(DerivedEncounter::new(a.node_id, b.node_id, s, e));
                }
            }
        }
    }
    out
}

pub fn overlap_matches_quadratic(records: &[AssociationRecord]) -> Check {
    let key = |e: &DerivedEncounter| (e.t_start.to_bits(), e.node_u, e.node_v, e.t_end.to_bits());
    let mut got = derive_encounters(records);
    let mut expected = quadratic_encounters(records);
    got.sort_by_key(key);
    expected.sort_by_key(key);
    prop_assert_eq!(got, expected);
    Ok(())
}
