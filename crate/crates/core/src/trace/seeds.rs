use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::stats::TraceStats;
use crate::error::{Result, WormError};

/// Median arrival delay (seconds) between the predator and prey seed
/// groups observed in the campus WLAN trace.
pub const PAPER_ARRIVAL_DELAY: f64 = 539_795.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// Predator seeds come from the high-contact-rate group and arrive first.
    FastPredator,
    /// Predator seeds come from the low-contact-rate group and arrive last.
    SlowPredator,
}

impl Scenario {
    pub fn mirrored(self) -> Scenario {
        match self {
            Scenario::FastPredator => Scenario::SlowPredator,
            Scenario::SlowPredator => Scenario::FastPredator,
        }
    }
}

impl std::str::FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "fast_predator" | "fast" => Ok(Scenario::FastPredator),
            "slow_predator" | "slow" => Ok(Scenario::SlowPredator),
            other => Err(format!("unknown scenario `{other}`")),
        }
    }
}

/// Quantile centers of the two contact-rate strata the seed groups come from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrataBands {
    pub high: f64,
    pub low: f64,
}

impl Default for StrataBands {
    fn default() -> Self {
        StrataBands { high: 0.9, low: 0.6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedPlan {
    /// Dense trace node indices.
    pub predator_group: Vec<usize>,
    pub prey_group: Vec<usize>,
    pub scenario: Scenario,
    /// Signed seed arrival offset; negative means the predator arrives
    /// |arrival_delay| seconds before the prey.
    pub arrival_delay: f64,
}

impl SeedPlan {
    /// One (prey, predator) seed pair, each uniform within its group.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, usize) {
        let prey = *self.prey_group.choose(rng).expect("non-empty group");
        let predator = *self.predator_group.choose(rng).expect("non-empty group");
        (prey, predator)
    }

    /// The opposite scenario over the same two groups.
    pub fn mirrored(&self) -> SeedPlan {
        SeedPlan {
            predator_group: self.prey_group.clone(),
            prey_group: self.predator_group.clone(),
            scenario: self.scenario.mirrored(),
            arrival_delay: -self.arrival_delay,
        }
    }

    /// Injection times (predator, prey) from trace start.
    pub fn injection_times(&self) -> (f64, f64) {
        (self.arrival_delay.max(0.0), (-self.arrival_delay).max(0.0))
    }
}

/// Seed groups ranked by estimated contact rate.
pub fn select_seeds(
    stats: &TraceStats,
    scenario: Scenario,
    group_frac: f64,
    arrival_delay: f64,
    bands: StrataBands,
) -> Result<SeedPlan> {
    select_seeds_by_score(&stats.contact_rate, scenario, group_frac, arrival_delay, bands)
}

/// Seed groups ranked by an arbitrary activity score (contact rate, online
/// time, ...). Each group holds ceil(group_frac * N) nodes of consecutive
/// rank around its band's quantile center. `arrival_delay` is a magnitude;
/// its sign follows the scenario.
pub fn select_seeds_by_score(
    scores: &[f64],
    scenario: Scenario,
    group_frac: f64,
    arrival_delay: f64,
    bands: StrataBands,
) -> Result<SeedPlan> {
    if !(group_frac > 0.0 && group_frac < 0.5) {
        return Err(WormError::param("group_frac", format!("{group_frac} outside (0, 0.5)")));
    }
    let n = scores.len();
    let size = ((group_frac * n as f64) - 1e-9).ceil().max(1.0) as usize;
    if n < 2 * size {
        return Err(WormError::SeedSelection(format!("{n} nodes cannot hold two groups of {size}")));
    }
    for (name, q) in [("high", bands.high), ("low", bands.low)] {
        if !(0.0..=1.0).contains(&q) {
            return Err(WormError::SeedSelection(format!("{name} band {q} outside [0, 1]")));
        }
    }
    let mut ranked: Vec<usize> = (0..n).collect();
    ranked.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
    let window = |q: f64| -> std::ops::Range<usize> {
        let center = (q * (n - 1) as f64).round() as usize;
        let start = center.saturating_sub(size / 2).min(n - size);
        start..start + size
    };
    let (high, low) = (window(bands.high), window(bands.low));
    if high.start < low.end && low.start < high.end {
        return Err(WormError::SeedSelection(format!("bands overlap: ranks {high:?} and {low:?}")));
    }
    let high_group = ranked[high].to_vec();
    let low_group = ranked[low].to_vec();
    let delay = arrival_delay.abs();
    Ok(match scenario {
        Scenario::FastPredator => {
            SeedPlan { predator_group: high_group, prey_group: low_group, scenario, arrival_delay: -delay }
        }
        Scenario::SlowPredator => {
            SeedPlan { predator_group: low_group, prey_group: high_group, scenario, arrival_delay: delay }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scores(n: usize) -> Vec<f64> {
        // deterministic, unsorted
        (0..n).map(|k| ((k * 7919) % n) as f64).collect()
    }

    fn mean(group: &[usize], s: &[f64]) -> f64 {
        group.iter().map(|&k| s[k]).sum::<f64>() / group.len() as f64
    }

    #[test]
    fn fast_predator_gets_high_group() {
        let s = scores(100);
        let plan = select_seeds_by_score(&s, Scenario::FastPredator, 0.03, PAPER_ARRIVAL_DELAY, StrataBands::default())
            .unwrap();
        assert_eq!(plan.predator_group.len(), 3);
        assert!(mean(&plan.predator_group, &s) > mean(&plan.prey_group, &s));
        assert_eq!(plan.arrival_delay, -539_795.0);
        assert_eq!(plan.injection_times(), (0.0, 539_795.0));
        assert!(plan.predator_group.iter().all(|k| !plan.prey_group.contains(k)));
    }

    #[test]
    fn scenarios_mirror_exactly() {
        let s = scores(200);
        let b = StrataBands::default();
        let fast = select_seeds_by_score(&s, Scenario::FastPredator, 0.03, PAPER_ARRIVAL_DELAY, b).unwrap();
        let slow = select_seeds_by_score(&s, Scenario::SlowPredator, 0.03, PAPER_ARRIVAL_DELAY, b).unwrap();
        assert_eq!(fast.mirrored(), slow);
        assert_eq!(slow.arrival_delay, 539_795.0);
    }

    #[test]
    fn errors() {
        let s = scores(10);
        let b = StrataBands::default();
        assert!(select_seeds_by_score(&s, Scenario::FastPredator, 0.6, 0.0, b).is_err());
        assert!(select_seeds_by_score(&s[..1], Scenario::FastPredator, 0.03, 0.0, b).is_err());
        let tight = StrataBands { high: 0.5, low: 0.5 };
        assert!(select_seeds_by_score(&scores(100), Scenario::FastPredator, 0.03, 0.0, tight).is_err());
    }

    #[test]
    fn draw_stays_in_groups() {
        let s = scores(300);
        let plan = select_seeds_by_score(&s, Scenario::SlowPredator, 0.03, 1.0, StrataBands::default()).unwrap();
        let mut rng = crate::rng::stream(1, crate::rng::Stream::Seeds);
        for _ in 0..100 {
            let (prey, pred) = plan.draw(&mut rng);
            assert!(plan.prey_group.contains(&prey) && plan.predator_group.contains(&pred));
        }
    }
}
