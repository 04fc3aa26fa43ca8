//! Exact analysis of the uniform-mixing predator-prey chain on a handful of
//! nodes by brute-force enumeration.
//!
//! Node states: `S` susceptible, `A` prey, `B` predator, `I` prey-immune
//! susceptible, `X` non-cooperative. Every unordered node pair meets at the
//! same rate; the only state-changing meetings are
//! A+S -> A+A, B+S -> B+B, B+I -> B+B and B+A -> B+B.

use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum N {
    S,
    A,
    B,
    I,
    X,
}

pub type State = Vec<N>;

/// Successor states reachable by one effective meeting, one entry per
/// changing pair (duplicates kept so each pair has equal weight).
pub fn successors(s: &State) -> Vec<(State, usize, N)> {
    let mut out = Vec::new();
    for u in 0..s.len() {
        for v in (u + 1)..s.len() {
            let change = match (s[u], s[v]) {
                (N::A, N::S) => Some((v, N::A)),
                (N::S, N::A) => Some((u, N::A)),
                (N::B, N::S | N::I | N::A) => Some((v, N::B)),
                (N::S | N::I | N::A, N::B) => Some((u, N::B)),
                _ => None,
            };
            if let Some((node, to)) = change {
                let mut t = s.clone();
                t[node] = to;
                out.push((t, node, to));
            }
        }
    }
    out
}

/// Probability that node `target` is ever prey-infected.
pub fn prob_ever_prey(s: &State, target: usize) -> f64 {
    fn go(s: &State, target: usize, memo: &mut HashMap<State, f64>) -> f64 {
        if s[target] == N::A {
            return 1.0;
        }
        if s[target] == N::B {
            return 0.0;
        }
        if let Some(&p) = memo.get(s) {
            return p;
        }
        let next = successors(s);
        let p = if next.is_empty() {
            0.0
        } else {
            next.iter().map(|(t, _, _)| go(t, target, memo)).sum::<f64>() / next.len() as f64
        };
        memo.insert(s.clone(), p);
        p
    }
    go(s, target, &mut HashMap::new())
}

/// Expected number of nodes ever prey-infected, seeds included.
pub fn expected_ti(s: &State) -> f64 {
    fn future(s: &State, memo: &mut HashMap<State, f64>) -> f64 {
        if let Some(&v) = memo.get(s) {
            return v;
        }
        let next = successors(s);
        let v = if next.is_empty() {
            0.0
        } else {
            next.iter().map(|(t, _, to)| f64::from(u8::from(*to == N::A)) + future(t, memo)).sum::<f64>()
                / next.len() as f64
        };
        memo.insert(s.clone(), v);
        v
    }
    s.iter().filter(|&&c| c == N::A).count() as f64 + future(s, &mut HashMap::new())
}

/// Expected peak number of simultaneous prey.
pub fn expected_mi(s: &State) -> f64 {
    fn go(s: &State, peak: usize, memo: &mut HashMap<(State, usize), f64>) -> f64 {
        let key = (s.clone(), peak);
        if let Some(&v) = memo.get(&key) {
            return v;
        }
        let next = successors(s);
        let v = if next.is_empty() {
            peak as f64
        } else {
            next.iter()
                .map(|(t, _, _)| {
                    let now = t.iter().filter(|&&c| c == N::A).count();
                    go(t, peak.max(now), memo)
                })
                .sum::<f64>()
                / next.len() as f64
        };
        memo.insert(key, v);
        v
    }
    let now = s.iter().filter(|&&c| c == N::A).count();
    go(s, now, &mut HashMap::new())
}

/// Expected time until no prey remain, with per-pair meeting rate `rate`.
pub fn expected_tr(s: &State, rate: f64) -> f64 {
    fn go(s: &State, rate: f64, memo: &mut HashMap<State, f64>) -> f64 {
        if !s.contains(&N::A) {
            return 0.0;
        }
        if let Some(&v) = memo.get(s) {
            return v;
        }
        let next = successors(s);
        assert!(!next.is_empty(), "prey without a predator never clears");
        let k = next.len() as f64;
        let v = 1.0 / (rate * k) + next.iter().map(|(t, _, _)| go(t, rate, memo)).sum::<f64>() / k;
        memo.insert(s.clone(), v);
        v
    }
    go(s, rate, &mut HashMap::new())
}

/// Expected summed prey lifetime (TL), with per-pair meeting rate `rate`:
/// while the chain sits in a state, every current prey accrues the holding
/// time.
pub fn expected_tl(s: &State, rate: f64) -> f64 {
    fn go(s: &State, rate: f64, memo: &mut HashMap<State, f64>) -> f64 {
        let prey = s.iter().filter(|&&c| c == N::A).count();
        if prey == 0 {
            return 0.0;
        }
        if let Some(&v) = memo.get(s) {
            return v;
        }
        let next = successors(s);
        let k = next.len() as f64;
        let v = prey as f64 / (rate * k) + next.iter().map(|(t, _, _)| go(t, rate, memo)).sum::<f64>() / k;
        memo.insert(s.clone(), v);
        v
    }
    go(s, rate, &mut HashMap::new())
}
