//! extract_metrics against a naive evaluation of the compartment paths.

use proptest::prelude::*;
use wormsim::sim::{simulate_uniform_round, Compartment, RoundConfig};
use wormsim::{extract_metrics, EventLog, ModelParams};

use Compartment::*;

/// Compartment of `node` just after all transitions at or before `t`.
fn state_at(log: &EventLog, node: usize, t: f64) -> Compartment {
    let mut c = log.initial[node];
    for tr in log.transitions.iter().filter(|tr| tr.node == node && tr.time <= t) {
        c = tr.to;
    }
    c
}

struct Naive {
    ti: f64,
    mi: f64,
    tl: f64,
    ta: Option<f64>,
    tr: Option<f64>,
}

fn naive(log: &EventLog) -> Naive {
    let n = log.initial.len();
    let mut times: Vec<f64> = vec![0.0];
    times.extend(log.transitions.iter().map(|t| t.time));
    let prey_count = |t: f64| (0..n).filter(|&v| state_at(log, v, t) == PreyInfected).count();

    let ti = (0..n).filter(|&v| log.transitions.iter().any(|t| t.node == v && t.to == PreyInfected)).count() as f64;
    let mi = times.iter().map(|&t| prey_count(t)).max().unwrap_or(0) as f64;

    let mut tl = 0.0;
    for v in 0..n {
        let start = log.transitions.iter().find(|t| t.node == v && t.to == PreyInfected);
        if let Some(s) = start {
            let end =
                log.transitions.iter().find(|t| t.node == v && t.from == PreyInfected).map_or(log.horizon, |e| e.time);
            tl += end - s.time;
        }
    }

    let done = |t: f64| (0..n).all(|v| matches!(state_at(log, v, t), PredatorInfected | NonCooperative));
    let ta = times.iter().copied().find(|&t| done(t));

    let end = *times.last().unwrap();
    let tr = if prey_count(end) > 0 {
        None
    } else {
        // the last moment the prey count fell to zero
        let mut last = 0.0;
        let mut before = 0;
        for &t in &times {
            let now = prey_count(t);
            if before > 0 && now == 0 {
                last = t;
            }
            before = now;
        }
        Some(last)
    };
    Naive { ti, mi, tl, ta, tr }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn metrics_match_naive_evaluation(
        beta in 1e-3f64..1e-2,
        i_b0 in 0usize..3,
        c in prop::sample::select(vec![0.6, 0.8, 1.0]),
        i in prop::sample::select(vec![0.0, 0.25, 0.5]),
        p in 0.2f64..=1.0,
        delay in -300.0f64..300.0,
        horizon in 50.0f64..2000.0,
        seed in any::<u64>(),
    ) {
        let params = ModelParams::basic(5, beta, 1, i_b0).with_characteristics(c, i, p);
        prop_assume!(params.validate().is_ok());
        let mut cfg = RoundConfig::new(params, seed, horizon);
        cfg.prey_delay = delay;
        let log = simulate_uniform_round(&cfg).unwrap();
        prop_assume!(log.transitions.len() <= 20);

        let m = extract_metrics(&log).unwrap();
        let o = naive(&log);
        prop_assert_eq!(m.ti, o.ti);
        prop_assert_eq!(m.mi, o.mi);
        prop_assert!(close(m.tl, o.tl), "tl {} vs {}", m.tl, o.tl);
        if m.ti > 0.0 {
            prop_assert!(close(m.al, o.tl / o.ti));
        }
        prop_assert_eq!(m.ta, o.ta);
        prop_assert_eq!(m.tr, o.tr);
    }
}
