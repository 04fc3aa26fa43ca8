use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::Mode;
use super::sweep::{PointResult, SweepReport};
use crate::error::{Result, WormError};

/// Model-vs-simulation comparison of one metric at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub point: usize,
    pub value: Option<f64>,
    pub metric: String,
    pub model: Option<f64>,
    pub simulation: Option<f64>,
    /// |sim - model| / |model|; `None` when skipped.
    pub relative_error: Option<f64>,
    pub threshold: f64,
    pub breach: bool,
    /// Why the comparison was skipped (censoring, undefined AL, ...).
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorStats {
    pub max: f64,
    pub mean: f64,
    pub compared: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationSummary {
    pub comparisons: Vec<Comparison>,
    pub per_metric: BTreeMap<String, ErrorStats>,
    pub breached: bool,
}

/// |sim - model| / |model|, with 0/0 = 0 and x/0 = infinity.
pub fn relative_error(model: f64, sim: f64) -> f64 {
    let diff = (sim - model).abs();
    if diff == 0.0 {
        0.0
    } else if model == 0.0 {
        f64::INFINITY
    } else {
        diff / model.abs()
    }
}

fn compare(p: &PointResult, metric: &str, threshold: f64, report: &SweepReport) -> Comparison {
    let model = p.model_value(metric);
    let simulation = p.sim_value(metric, report.aggregation);
    let mut skipped = None;
    if p.model.is_none() || p.simulation.is_none() {
        skipped = Some(p.error.clone().unwrap_or_else(|| "point has no model or simulation result".into()));
    } else if model.is_none() {
        skipped = Some(format!("{metric} censored in the model"));
    } else if let Some(sim) = &p.simulation {
        let censored = match metric {
            "ta" => sim.ta_censored,
            "tr" => sim.tr_censored,
            "tl" | "al" => sim.tl_censored,
            _ => 0,
        };
        if censored > 0 {
            skipped = Some(format!("{metric} censored in {censored} of {} rounds", sim.rounds));
        } else if metric == "al" && p.model.is_some_and(|m| m.al_undefined) {
            skipped = Some("al undefined in the model (TI = 0)".into());
        }
    }
    let relative_error = match (&skipped, model, simulation) {
        (None, Some(m), Some(s)) => Some(relative_error(m, s)),
        _ => None,
    };
    Comparison {
        point: p.index,
        value: p.value,
        metric: metric.to_string(),
        model,
        simulation,
        relative_error,
        threshold,
        breach: relative_error.is_some_and(|e| !(e <= threshold)),
        skipped,
    }
}

/// Relative errors for every thresholded metric at every point of a
/// compare-mode report.
pub fn validate_model(report: &SweepReport, thresholds: &BTreeMap<String, f64>) -> Result<ValidationSummary> {
    if report.mode != Mode::Compare {
        return Err(WormError::Config("validation needs a compare-mode report".into()));
    }
    let mut comparisons = Vec::new();
    for p in &report.points {
        for (metric, &threshold) in thresholds {
            comparisons.push(compare(p, metric, threshold, report));
        }
    }
    let per_metric = thresholds
        .keys()
        .map(|m| {
            let errs: Vec<f64> =
                comparisons.iter().filter(|c| &c.metric == m).filter_map(|c| c.relative_error).collect();
            let total = comparisons.iter().filter(|c| &c.metric == m).count();
            let stats = ErrorStats {
                max: errs.iter().copied().fold(0.0, f64::max),
                mean: if errs.is_empty() { 0.0 } else { errs.iter().sum::<f64>() / errs.len() as f64 },
                compared: errs.len(),
                skipped: total - errs.len(),
            };
            (m.clone(), stats)
        })
        .collect();
    let breached = comparisons.iter().any(|c| c.breach);
    Ok(ValidationSummary { comparisons, per_metric, breached })
}
