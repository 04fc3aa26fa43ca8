use serde::{Deserialize, Serialize};

use super::MetricSet;
use crate::error::{Result, WormError};

/// Moments of one metric across rounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    /// Lower-middle element for even counts.
    pub median: f64,
    /// Sample standard deviation (n - 1); 0 for a single value.
    pub std_dev: f64,
    pub count: usize,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Summary> {
        if values.is_empty() {
            return None;
        }
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = if n > 1 { values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Some(Summary { mean, median: sorted[(n - 1) / 2], std_dev: var.sqrt(), count: n })
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        self.std_dev / (self.count as f64).sqrt()
    }
}

/// Per-metric statistics over a set of rounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundAggregate {
    pub rounds: usize,
    pub ti: Summary,
    pub mi: Summary,
    pub tl: Summary,
    pub al: Summary,
    /// Over uncensored rounds only; `None` if every round was censored.
    pub ta: Option<Summary>,
    pub tr: Option<Summary>,
    pub ti_relative: Summary,
    pub mi_relative: Summary,
    pub ta_censored: usize,
    pub tr_censored: usize,
    pub tl_censored: usize,
}

impl RoundAggregate {
    pub fn get(&self, name: &str) -> Option<&Summary> {
        match name {
            "ti" => Some(&self.ti),
            "mi" => Some(&self.mi),
            "tl" => Some(&self.tl),
            "al" => Some(&self.al),
            "ta" => self.ta.as_ref(),
            "tr" => self.tr.as_ref(),
            "ti_rel" => Some(&self.ti_relative),
            "mi_rel" => Some(&self.mi_relative),
            _ => None,
        }
    }
}

pub fn aggregate(metric_sets: &[MetricSet]) -> Result<RoundAggregate> {
    if metric_sets.is_empty() {
        return Err(WormError::Empty("no metric sets to aggregate"));
    }
    let column = |f: fn(&MetricSet) -> f64| -> Summary {
        let v: Vec<f64> = metric_sets.iter().map(f).collect();
        Summary::of(&v).expect("non-empty")
    };
    let optional = |f: fn(&MetricSet) -> Option<f64>| -> (Option<Summary>, usize) {
        let v: Vec<f64> = metric_sets.iter().filter_map(f).collect();
        (Summary::of(&v), metric_sets.len() - v.len())
    };
    let (ta, ta_censored) = optional(|m| m.ta);
    let (tr, tr_censored) = optional(|m| m.tr);
    Ok(RoundAggregate {
        rounds: metric_sets.len(),
        ti: column(|m| m.ti),
        mi: column(|m| m.mi),
        tl: column(|m| m.tl),
        al: column(|m| m.al),
        ta,
        tr,
        ti_relative: column(|m| m.ti_relative),
        mi_relative: column(|m| m.mi_relative),
        ta_censored,
        tr_censored,
        tl_censored: metric_sets.iter().filter(|m| m.tl_censored).count(),
    })
}
