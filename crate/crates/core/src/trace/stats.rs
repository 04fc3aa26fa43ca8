use std::io::Write;

use serde::Serialize;

use super::parse::AssociationRecord;
use super::EncounterTrace;
use crate::error::{Result, WormError};

/// Equal-width histogram over [0, max].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn of(values: &[u64], bins: usize) -> Histogram {
        let bins = bins.max(1);
        let max = values.iter().copied().max().unwrap_or(0) as f64;
        let width = if max > 0.0 { max / bins as f64 } else { 1.0 };
        let edges = (0..=bins).map(|k| k as f64 * width).collect();
        let mut counts = vec![0; bins];
        for &v in values {
            let k = ((v as f64 / width) as usize).min(bins - 1);
            counts[k] += 1;
        }
        Histogram { edges, counts }
    }

    /// CSV with header `bin_start,bin_end,count`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["bin_start", "bin_end", "count"])?;
        for (k, c) in self.counts.iter().enumerate() {
            w.write_record([self.edges[k].to_string(), self.edges[k + 1].to_string(), c.to_string()])?;
        }
        w.flush().map_err(|e| WormError::io("<histogram>", e))?;
        Ok(())
    }
}

/// Per-node encounter statistics of a trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceStats {
    pub node_ids: Vec<u64>,
    pub total_encounters: Vec<u64>,
    pub unique_peers: Vec<u64>,
    /// Per-node pairwise contact rate: count_i / (T (N - 1)).
    pub contact_rate: Vec<f64>,
    pub encounter_count: u64,
    pub duration: f64,
    pub median_contact_rate: f64,
    pub median_unique_peers: u64,
    /// Share of all encounters held by the top 20% of nodes.
    pub top20_share: f64,
    /// Fraction of nodes that met fewer than 20% of the other nodes.
    pub unique_below_20pct: f64,
    pub total_histogram: Histogram,
    pub unique_histogram: Histogram,
}

impl TraceStats {
    pub fn n_nodes(&self) -> usize {
        self.node_ids.len()
    }

    /// Share of all per-node encounter counts held by the top `frac` of
    /// nodes (ceil(frac * N) nodes).
    pub fn top_share(&self, frac: f64) -> f64 {
        top_share(&self.total_encounters, frac)
    }

    pub fn mean_contact_rate(&self) -> f64 {
        self.contact_rate.iter().sum::<f64>() / self.contact_rate.len() as f64
    }
}

fn top_share(totals: &[u64], frac: f64) -> f64 {
    let all: u64 = totals.iter().sum();
    if all == 0 {
        return 0.0;
    }
    let mut sorted = totals.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let k = ((frac * totals.len() as f64) - 1e-9).ceil().max(0.0) as usize;
    sorted[..k.min(sorted.len())].iter().sum::<u64>() as f64 / all as f64
}

fn lower_median<T: Copy + PartialOrd>(values: &[T]) -> T {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    v[(v.len() - 1) / 2]
}

/// Statistics over the trace's full observation span.
pub fn compute_stats(trace: &EncounterTrace, bins: usize) -> Result<TraceStats> {
    compute_stats_over(trace, trace.duration(), bins)
}

/// Statistics with an explicit observation span `duration`.
pub fn compute_stats_over(trace: &EncounterTrace, duration: f64, bins: usize) -> Result<TraceStats> {
    if trace.encounters().is_empty() {
        return Err(WormError::Empty("trace has no encounters"));
    }
    if !(duration > 0.0) {
        return Err(WormError::param("trace_duration", format!("{duration} must be positive")));
    }
    let n = trace.n_nodes();
    let mut totals = vec![0u64; n];
    let mut peers: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in trace.events() {
        totals[e.node_u] += 1;
        totals[e.node_v] += 1;
        peers[e.node_u].push(e.node_v);
        peers[e.node_v].push(e.node_u);
    }
    let unique: Vec<u64> = peers
        .into_iter()
        .map(|mut p| {
            p.sort_unstable();
            p.dedup();
            p.len() as u64
        })
        .collect();
    let pair_norm = duration * (n.max(2) - 1) as f64;
    let contact_rate: Vec<f64> = totals.iter().map(|&c| c as f64 / pair_norm).collect();
    let cutoff = 0.2 * (n - 1) as f64;
    Ok(TraceStats {
        node_ids: trace.node_ids().to_vec(),
        encounter_count: trace.encounters().len() as u64,
        duration,
        median_contact_rate: lower_median(&contact_rate),
        median_unique_peers: lower_median(&unique),
        top20_share: top_share(&totals, 0.2),
        unique_below_20pct: unique.iter().filter(|&&u| (u as f64) < cutoff).count() as f64 / n as f64,
        total_histogram: Histogram::of(&totals, bins),
        unique_histogram: Histogram::of(&unique, bins),
        total_encounters: totals,
        unique_peers: unique,
        contact_rate,
    })
}

/// Total associated (online) time per trace node, the activity measure
/// used to pick "most active" nodes.
pub fn online_time(records: &[AssociationRecord], trace: &EncounterTrace) -> Vec<f64> {
    let mut online = vec![0.0; trace.n_nodes()];
    for r in records {
        if let Some(k) = trace.index_of(r.node_id) {
            online[k] += r.t_end - r.t_start;
        }
    }
    online
}
