use super::MetricSet;
use crate::error::{Result, WormError};
use crate::sim::{Compartment, EventLog, TransitionCause};

/// Replays the log once, checking every transition against the transition
/// graph, and extracts the metrics.
pub fn extract_metrics(log: &EventLog) -> Result<MetricSet> {
    use Compartment::*;
    let mut state = log.initial.clone();
    let mut infected_at: Vec<Option<f64>> = vec![None; state.len()];
    let mut lifetimes = 0.0;
    let mut ever_prey = 0usize;
    let mut prey_now = 0usize;
    let mut peak = 0usize;
    let mut last_termination = None;
    let mut last_predator = None;
    let mut previous = f64::NEG_INFINITY;

    for tr in &log.transitions {
        let current = *state.get(tr.node).ok_or(WormError::UnknownNode(tr.node))?;
        let legal = current == tr.from
            && tr.from.can_become(tr.to)
            && tr.time >= previous
            && (tr.cause != TransitionCause::Seed || tr.from == Susceptible);
        if !legal {
            return Err(WormError::IllegalTransition { node: tr.node, time: tr.time, from: current, to: tr.to });
        }
        previous = tr.time;
        state[tr.node] = tr.to;
        if tr.to == PreyInfected {
            ever_prey += 1;
            prey_now += 1;
            peak = peak.max(prey_now);
            infected_at[tr.node] = Some(tr.time);
        }
        if tr.from == PreyInfected {
            prey_now -= 1;
            let start = infected_at[tr.node].take().expect("prey node has an infection time");
            lifetimes += tr.time - start;
            last_termination = Some(tr.time);
        }
        if tr.to == PredatorInfected {
            last_predator = Some(tr.time);
        }
    }

    let tl_censored = prey_now > 0;
    let tl = lifetimes + infected_at.iter().flatten().map(|start| log.horizon - start).sum::<f64>();
    let ti = ever_prey as f64;
    let (al, al_undefined) = if ever_prey > 0 { (tl / ti, false) } else { (0.0, true) };
    let tr = if prey_now > 0 { None } else { Some(last_termination.unwrap_or(0.0)) };
    let all_predator = state.iter().all(|c| matches!(c, PredatorInfected | NonCooperative));
    let ta = all_predator.then(|| last_predator.unwrap_or(0.0));

    let n_star = log.initial.iter().filter(|c| **c == Susceptible).count();
    let relative = |x: f64| if n_star > 0 { x / n_star as f64 } else { 0.0 };
    Ok(MetricSet {
        ti,
        mi: peak as f64,
        tl,
        al,
        ta,
        tr,
        ti_relative: relative(ti),
        mi_relative: relative(peak as f64),
        tl_censored,
        al_undefined,
    })
}

/// First time every cooperative non-immune node is prey-infected at once.
/// Used for single-worm (prey-only) runs, where it is the time to infect all.
pub fn prey_saturation_time(log: &EventLog) -> Option<f64> {
    let target = log.initial.iter().filter(|c| **c == Compartment::Susceptible).count();
    let mut prey = 0usize;
    for tr in &log.transitions {
        if tr.to == Compartment::PreyInfected {
            prey += 1;
        }
        if tr.from == Compartment::PreyInfected {
            prey -= 1;
        }
        if prey == target {
            return Some(tr.time);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::Transition;
    use Compartment::*;

    fn t(time: f64, node: usize, from: Compartment, to: Compartment, cause: TransitionCause) -> Transition {
        Transition { time, node, from, to, cause }
    }

    #[test]
    fn seed_only_round() {
        let log = EventLog {
            initial: vec![Susceptible, Susceptible, NonCooperative],
            transitions: vec![
                t(0.0, 0, Susceptible, PreyInfected, TransitionCause::Seed),
                t(0.0, 1, Susceptible, PredatorInfected, TransitionCause::Seed),
                t(7.5, 0, PreyInfected, PredatorInfected, TransitionCause::Termination),
            ],
            horizon: 100.0,
            ended_at: 7.5,
        };
        let m = extract_metrics(&log).unwrap();
        assert_eq!((m.ti, m.mi, m.tl, m.al), (1.0, 1.0, 7.5, 7.5));
        assert_eq!((m.tr, m.ta), (Some(7.5), Some(7.5)));
        assert_eq!(m.ti_relative, 0.5);
        assert!(!m.censored());
    }

    #[test]
    fn surviving_prey_truncated_at_horizon() {
        let log = EventLog {
            initial: vec![Susceptible, Susceptible, ImmuneSusceptible],
            transitions: vec![
                t(2.0, 0, Susceptible, PreyInfected, TransitionCause::Seed),
                t(5.0, 1, Susceptible, PreyInfected, TransitionCause::PreyInfection),
            ],
            horizon: 10.0,
            ended_at: 5.0,
        };
        let m = extract_metrics(&log).unwrap();
        assert_eq!((m.ti, m.mi, m.tl), (2.0, 2.0, 13.0));
        assert!(m.tl_censored && m.tr.is_none() && m.ta.is_none());
        assert_eq!(prey_saturation_time(&log), Some(5.0));
    }

    #[test]
    fn no_prey_round() {
        let log = EventLog {
            initial: vec![Susceptible, Susceptible],
            transitions: vec![
                t(0.0, 0, Susceptible, PredatorInfected, TransitionCause::Seed),
                t(3.0, 1, Susceptible, PredatorInfected, TransitionCause::Vaccination),
            ],
            horizon: 10.0,
            ended_at: 3.0,
        };
        let m = extract_metrics(&log).unwrap();
        assert_eq!((m.ti, m.tl, m.al, m.tr, m.ta), (0.0, 0.0, 0.0, Some(0.0), Some(3.0)));
        assert!(m.al_undefined);
    }

    #[test]
    fn rejects_illegal_edges() {
        let bad = [
            vec![
                t(0.0, 0, Susceptible, PredatorInfected, TransitionCause::Seed),
                t(1.0, 0, PredatorInfected, PreyInfected, TransitionCause::PreyInfection),
            ],
            vec![t(1.0, 1, ImmuneSusceptible, PreyInfected, TransitionCause::PreyInfection)],
            vec![t(1.0, 0, PreyInfected, PredatorInfected, TransitionCause::Termination)],
            vec![t(1.0, 2, NonCooperative, PredatorInfected, TransitionCause::Vaccination)],
            vec![
                t(2.0, 0, Susceptible, PreyInfected, TransitionCause::Seed),
                t(1.0, 0, PreyInfected, PredatorInfected, TransitionCause::Termination),
            ],
        ];
        for transitions in bad {
            let log = EventLog {
                initial: vec![Susceptible, ImmuneSusceptible, NonCooperative],
                transitions,
                horizon: 10.0,
                ended_at: 10.0,
            };
            assert!(matches!(extract_metrics(&log), Err(WormError::IllegalTransition { .. })));
        }
    }
}
