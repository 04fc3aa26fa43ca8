use std::cmp::Ordering;
use std::collections::HashMap;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WormError};

pub const ASSOCIATION_HEADER: [&str; 4] = ["node_id", "ap_id", "t_start", "t_end"];
pub const ENCOUNTER_HEADER: [&str; 4] = ["node_u", "node_v", "t_start", "t_end"];

/// Fraction of malformed data lines above which parsing gives up.
const MAX_MALFORMED_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceFormat {
    Associations,
    Encounters,
}

impl std::str::FromStr for TraceFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "associations" => Ok(TraceFormat::Associations),
            "encounters" => Ok(TraceFormat::Encounters),
            other => Err(format!("unknown trace format `{other}`")),
        }
    }
}

/// A node's session on one access point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssociationRecord {
    pub node_id: u64,
    pub ap_id: String,
    pub t_start: f64,
    pub t_end: f64,
}

/// A pairwise contact interval, `node_u < node_v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedEncounter {
    pub node_u: u64,
    pub node_v: u64,
    pub t_start: f64,
    pub t_end: f64,
}

impl DerivedEncounter {
    pub fn new(a: u64, b: u64, t_start: f64, t_end: f64) -> Self {
        DerivedEncounter { node_u: a.min(b), node_v: a.max(b), t_start, t_end }
    }

    pub fn duration(&self) -> f64 {
        self.t_end - self.t_start
    }

    /// Start time, then the node pair, then end time.
    pub fn cmp_time(a: &Self, b: &Self) -> Ordering {
        a.t_start
            .total_cmp(&b.t_start)
            .then(a.node_u.cmp(&b.node_u))
            .then(a.node_v.cmp(&b.node_v))
            .then(a.t_end.total_cmp(&b.t_end))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParseIssue {
    pub line: u64,
    pub reason: String,
}

/// Validated records with what was dropped along the way. Times are shifted
/// so the earliest start is 0; `origin` holds the shift.
#[derive(Debug, Clone, PartialEq)]
pub struct Parsed<T> {
    pub records: Vec<T>,
    pub malformed: Vec<ParseIssue>,
    pub zero_duration: usize,
    pub self_overlaps: Vec<ParseIssue>,
    pub origin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TraceRecords {
    Associations(Parsed<AssociationRecord>),
    Encounters(Parsed<DerivedEncounter>),
}

pub fn parse_trace(path: impl AsRef<Path>, format: TraceFormat) -> Result<TraceRecords> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| WormError::io(path, e))?;
    let label = path.display().to_string();
    Ok(match format {
        TraceFormat::Associations => TraceRecords::Associations(parse_associations(file, &label)?),
        TraceFormat::Encounters => TraceRecords::Encounters(parse_encounters(file, &label)?),
    })
}

fn parse_time(field: Option<&str>, name: &str) -> std::result::Result<f64, String> {
    let raw = field.ok_or_else(|| format!("missing {name}"))?.trim();
    let v: f64 = raw.parse().map_err(|_| format!("{name} `{raw}` is not a number"))?;
    if !v.is_finite() {
        return Err(format!("{name} `{raw}` is not finite"));
    }
    Ok(v)
}

fn parse_id(field: Option<&str>, name: &str) -> std::result::Result<u64, String> {
    let raw = field.ok_or_else(|| format!("missing {name}"))?.trim();
    raw.parse().map_err(|_| format!("{name} `{raw}` is not a non-negative integer"))
}

enum LineOutcome<T> {
    Record(T),
    ZeroDuration,
}

/// Shared line loop: header check, per-line parse, malformed accounting.
fn parse_lines<R, T, F>(reader: R, label: &str, header: [&str; 4], mut parse: F) -> Result<Parsed<T>>
where
    R: Read,
    F: FnMut(&csv::StringRecord) -> std::result::Result<LineOutcome<T>, String>,
{
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(reader);
    let mut out =
        Parsed { records: Vec::new(), malformed: Vec::new(), zero_duration: 0, self_overlaps: Vec::new(), origin: 0.0 };
    let mut data_lines = 0usize;
    let mut first = true;
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        if first {
            first = false;
            if row.iter().eq(header.iter().copied()) {
                continue;
            }
            if row.get(0).is_some_and(|f| f == header[0]) {
                return Err(WormError::Config(format!("{label}: header must be `{}`", header.join(","))));
            }
        }
        if row.len() == 1 && row.get(0) == Some("") {
            continue;
        }
        data_lines += 1;
        if row.len() != 4 {
            out.malformed.push(ParseIssue { line, reason: format!("expected 4 fields, got {}", row.len()) });
            continue;
        }
        match parse(&row) {
            Ok(LineOutcome::Record(r)) => out.records.push(r),
            Ok(LineOutcome::ZeroDuration) => out.zero_duration += 1,
            Err(reason) => out.malformed.push(ParseIssue { line, reason }),
        }
    }
    if data_lines == 0 {
        warn!("{label}: empty trace");
    }
    for issue in out.malformed.iter().take(10) {
        warn!("{label}:{}: {}", issue.line, issue.reason);
    }
    if !out.malformed.is_empty() && out.malformed.len() as f64 > MAX_MALFORMED_FRACTION * data_lines as f64 {
        let first = &out.malformed[0];
        return Err(WormError::TooManyMalformed {
            path: label.to_string(),
            count: out.malformed.len(),
            total: data_lines,
            first_line: first.line,
            first_reason: first.reason.clone(),
        });
    }
    if out.zero_duration > 0 {
        warn!("{label}: dropped {} zero-duration records", out.zero_duration);
    }
    Ok(out)
}

fn interval(row: &csv::StringRecord) -> std::result::Result<Option<(f64, f64)>, String> {
    let start = parse_time(row.get(2), "t_start")?;
    let end = parse_time(row.get(3), "t_end")?;
    match end.partial_cmp(&start) {
        Some(Ordering::Greater) => Ok(Some((start, end))),
        Some(Ordering::Equal) => Ok(None),
        _ => Err(format!("t_end {end} precedes t_start {start}")),
    }
}

/// Parses an association CSV. Sessions of one node overlapping on the same
/// access point are dropped as anomalies (the later one is rejected).
pub fn parse_associations<R: Read>(reader: R, label: &str) -> Result<Parsed<AssociationRecord>> {
    let mut lines = Vec::new();
    let mut parsed = parse_lines(reader, label, ASSOCIATION_HEADER, |row| {
        let node_id = parse_id(row.get(0), "node_id")?;
        let ap_id = row.get(1).unwrap_or_default().to_string();
        if ap_id.is_empty() {
            return Err("empty ap_id".to_string());
        }
        let line = row.position().map_or(0, |p| p.line());
        Ok(match interval(row)? {
            Some((t_start, t_end)) => {
                lines.push(line);
                LineOutcome::Record(AssociationRecord { node_id, ap_id, t_start, t_end })
            }
            None => LineOutcome::ZeroDuration,
        })
    })?;

    let mut order: Vec<usize> = (0..parsed.records.len()).collect();
    {
        let r = &parsed.records;
        order.sort_by(|&a, &b| {
            (r[a].node_id, &r[a].ap_id)
                .cmp(&(r[b].node_id, &r[b].ap_id))
                .then(r[a].t_start.total_cmp(&r[b].t_start))
                .then(lines[a].cmp(&lines[b]))
        });
    }
    let mut keep = vec![true; parsed.records.len()];
    let mut last_end: HashMap<(u64, &str), f64> = HashMap::new();
    for &k in &order {
        let r = &parsed.records[k];
        let key = (r.node_id, r.ap_id.as_str());
        match last_end.get(&key) {
            Some(&end) if r.t_start < end => {
                keep[k] = false;
                parsed.self_overlaps.push(ParseIssue {
                    line: lines[k],
                    reason: format!("node {} overlaps itself on ap {}", r.node_id, r.ap_id),
                });
            }
            _ => {
                last_end.insert(key, r.t_end);
            }
        }
    }
    for issue in &parsed.self_overlaps {
        warn!("{label}:{}: {}", issue.line, issue.reason);
    }
    let mut k = 0;
    parsed.records.retain(|_| {
        k += 1;
        keep[k - 1]
    });
    parsed.self_overlaps.sort_by_key(|i| i.line);

    let origin = parsed.records.iter().map(|r| r.t_start).fold(f64::INFINITY, f64::min);
    if origin.is_finite() {
        for r in &mut parsed.records {
            r.t_start -= origin;
            r.t_end -= origin;
        }
        parsed.origin = origin;
    }
    Ok(parsed)
}

/// Parses an encounter CSV into canonical (`node_u < node_v`) encounters.
pub fn parse_encounters<R: Read>(reader: R, label: &str) -> Result<Parsed<DerivedEncounter>> {
    let mut parsed = parse_lines(reader, label, ENCOUNTER_HEADER, |row| {
        let u = parse_id(row.get(0), "node_u")?;
        let v = parse_id(row.get(1), "node_v")?;
        if u == v {
            return Err(format!("self-encounter of node {u}"));
        }
        Ok(match interval(row)? {
            Some((s, e)) => LineOutcome::Record(DerivedEncounter::new(u, v, s, e)),
            None => LineOutcome::ZeroDuration,
        })
    })?;
    let origin = parsed.records.iter().map(|r| r.t_start).fold(f64::INFINITY, f64::min);
    if origin.is_finite() {
        for r in &mut parsed.records {
            r.t_start -= origin;
            r.t_end -= origin;
        }
        parsed.origin = origin;
    }
    parsed.records.sort_by(DerivedEncounter::cmp_time);
    Ok(parsed)
}
