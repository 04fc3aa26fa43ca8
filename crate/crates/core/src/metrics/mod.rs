//! The six infection metrics and their aggregation across rounds.
//!
//! | metric | meaning |
//! |--------|---------|
//! | TI | hosts ever infected by the prey (seeds included) |
//! | MI | peak number of simultaneously prey-infected hosts |
//! | TL | summed prey lifetime over all prey-infected hosts |
//! | AL | TL / TI |
//! | TA | time until every cooperative node carries the predator |
//! | TR | time until the predator has terminated every prey |

mod aggregate;
mod extract;

pub use aggregate::{aggregate, RoundAggregate, Summary};
pub use extract::{extract_metrics, prey_saturation_time};

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Result, WormError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    pub ti: f64,
    pub mi: f64,
    /// Seconds. Truncated at the horizon for prey never terminated.
    pub tl: f64,
    /// Seconds. 0 with `al_undefined` when TI = 0.
    pub al: f64,
    /// Seconds; `None` when not reached (censored).
    pub ta: Option<f64>,
    /// Seconds; `None` when not reached (censored).
    pub tr: Option<f64>,
    /// TI / N* with N* the cooperative non-immune population.
    pub ti_relative: f64,
    pub mi_relative: f64,
    pub tl_censored: bool,
    pub al_undefined: bool,
}

impl MetricSet {
    pub fn censored(&self) -> bool {
        self.ta.is_none() || self.tr.is_none() || self.tl_censored
    }

    /// Flat JSON object with keys `ti, mi, tl, al, ta, tr, censored`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "ti": self.ti,
            "mi": self.mi,
            "tl": self.tl,
            "al": self.al,
            "ta": self.ta,
            "tr": self.tr,
            "censored": self.censored(),
        })
    }

    /// Value of a metric by its column name.
    pub fn get(&self, name: &str) -> Option<f64> {
        match name {
            "ti" => Some(self.ti),
            "mi" => Some(self.mi),
            "tl" => Some(self.tl),
            "al" => Some(self.al),
            "ta" => self.ta,
            "tr" => self.tr,
            "ti_rel" => Some(self.ti_relative),
            "mi_rel" => Some(self.mi_relative),
            _ => None,
        }
    }
}

/// Metric column names in report order.
pub const METRIC_NAMES: [&str; 8] = ["ti", "mi", "tl", "al", "ta", "tr", "ti_rel", "mi_rel"];

pub const ROUND_CSV_HEADER: [&str; 11] =
    ["round", "ti", "mi", "tl", "al", "ta", "tr", "ti_rel", "mi_rel", "censored_ta", "censored_tr"];

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Per-round CSV. Censored TA/TR fields are left empty.
pub fn write_rounds_csv<'a, W, I>(writer: W, rows: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = (usize, &'a MetricSet)>,
{
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(ROUND_CSV_HEADER)?;
    for (round, m) in rows {
        w.write_record([
            round.to_string(),
            m.ti.to_string(),
            m.mi.to_string(),
            m.tl.to_string(),
            m.al.to_string(),
            opt(m.ta),
            opt(m.tr),
            m.ti_relative.to_string(),
            m.mi_relative.to_string(),
            m.ta.is_none().to_string(),
            m.tr.is_none().to_string(),
        ])?;
    }
    w.flush().map_err(|e| WormError::io("<rounds csv>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_keys() {
        let m = MetricSet {
            ti: 3.0,
            mi: 2.0,
            tl: 10.0,
            al: 10.0 / 3.0,
            ta: None,
            tr: Some(4.0),
            ti_relative: 0.3,
            mi_relative: 0.2,
            tl_censored: false,
            al_undefined: false,
        };
        let v = m.to_json();
        let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(keys, ["al", "censored", "mi", "ta", "ti", "tl", "tr"]);
        assert_eq!(v["ta"], serde_json::Value::Null);
        assert_eq!(v["censored"], true);

        let mut buf = Vec::new();
        write_rounds_csv(&mut buf, [(0, &m)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text.lines().collect::<Vec<_>>(),
            [ROUND_CSV_HEADER.join(","), format!("0,3,2,10,{},,4,0.3,0.2,true,false", 10.0 / 3.0)]
        );
    }
}
