use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{Aggregation, Axis};
use super::sweep::{scenario_name, PointResult, SweepReport};
use crate::error::{Result, WormError};
use crate::trace::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    /// Relative TI and MI against Y.
    Fig2,
    /// TL and AL against Y.
    Fig3,
    /// TA and TR against Y.
    Fig4,
    /// Every metric over a c/i/p sweep; a two-axis sweep gives a grid.
    Fig6,
    /// Trace replay, one panel per seed scenario.
    Fig7,
}

impl std::str::FromStr for Figure {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "fig2" => Ok(Figure::Fig2),
            "fig3" => Ok(Figure::Fig3),
            "fig4" => Ok(Figure::Fig4),
            "fig6" => Ok(Figure::Fig6),
            "fig7" => Ok(Figure::Fig7),
            other => Err(format!("unknown figure `{other}`")),
        }
    }
}

const FIG6_METRICS: [&str; 6] = ["ti_rel", "mi_rel", "tl", "al", "ta", "tr"];

/// In-memory CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn write(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| WormError::io(path, e))?;
        let mut w = csv::Writer::from_writer(BufWriter::new(file));
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.map(|x| x.to_string()).unwrap_or_default()))?;
        }
        w.flush().map_err(|e| WormError::io(path, e))?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Table> {
        let mut r = csv::Reader::from_path(path)?;
        let header = r.headers()?.iter().map(String::from).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|f| {
                    if f.is_empty() {
                        Ok(None)
                    } else {
                        f.parse::<f64>()
                            .map(Some)
                            .map_err(|e| WormError::Config(format!("{}: `{f}`: {e}", path.display())))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        Ok(Table { name, header, rows })
    }
}

#[derive(Clone, Copy)]
enum Source {
    Sim(Aggregation),
    Model,
}

struct Column {
    header: String,
    metric: String,
    source: Source,
}

impl Column {
    fn value(&self, p: &PointResult) -> Option<f64> {
        match self.source {
            Source::Sim(agg) => p.sim_value(&self.metric, agg),
            Source::Model => p.model_value(&self.metric),
        }
    }
}

/// Value columns for `metrics` present in the report: simulation columns
/// `<m>` (and `<m>_median` under `Both`), then model columns `<m>_model`.
fn columns(report: &SweepReport, points: &[&PointResult], metrics: &[&str]) -> Result<Vec<Column>> {
    let has_sim = points.iter().any(|p| p.simulation.is_some());
    let has_model = points.iter().any(|p| p.model.is_some());
    let agg = report.aggregation;
    let mut cols = Vec::new();
    for &m in metrics {
        let present = points.iter().any(|p| p.sim_value(m, Aggregation::Mean).is_some() || p.model_value(m).is_some());
        if !present && (has_sim || has_model) && !matches!(m, "ta" | "tr") {
            return Err(WormError::MissingColumn(m.to_string()));
        }
    }
    if has_sim {
        for &m in metrics {
            let metric = m.to_string();
            cols.push(Column { header: metric.clone(), metric: metric.clone(), source: Source::Sim(agg) });
            if agg == Aggregation::Both {
                cols.push(Column { header: format!("{m}_median"), metric, source: Source::Sim(Aggregation::Median) });
            }
        }
    }
    if has_model {
        for &m in metrics {
            cols.push(Column { header: format!("{m}_model"), metric: m.to_string(), source: Source::Model });
        }
    }
    if cols.is_empty() {
        return Err(WormError::MissingColumn(metrics.first().copied().unwrap_or("").to_string()));
    }
    Ok(cols)
}

fn axis_table(report: &SweepReport, name: String, x: &str, points: &[&PointResult], metrics: &[&str]) -> Result<Table> {
    let cols = columns(report, points, metrics)?;
    let mut header = vec![x.to_string()];
    header.extend(cols.iter().map(|c| c.header.clone()));
    let rows = points
        .iter()
        .map(|p| {
            let mut row = vec![p.value];
            row.extend(cols.iter().map(|c| c.value(p)));
            row
        })
        .collect();
    Ok(Table { name, header, rows })
}

fn require_axis(report: &SweepReport, allowed: &[Axis], figure: &str) -> Result<Axis> {
    match report.axis {
        Some(a) if allowed.contains(&a) => Ok(a),
        other => Err(WormError::Config(format!(
            "{figure} needs a sweep over {}; report axis is {}",
            allowed.iter().map(|a| a.name()).collect::<Vec<_>>().join("/"),
            other.map(|a| a.name()).unwrap_or("none")
        ))),
    }
}

/// Builds the tables of one figure.
pub fn plot_tables(report: &SweepReport, figure: Figure) -> Result<Vec<Table>> {
    let points: Vec<&PointResult> = report.points.iter().collect();
    match figure {
        Figure::Fig2 | Figure::Fig3 | Figure::Fig4 => {
            let (name, metrics): (&str, &[&str]) = match figure {
                Figure::Fig2 => ("fig2", &["ti_rel", "mi_rel"]),
                Figure::Fig3 => ("fig3", &["tl", "al"]),
                _ => ("fig4", &["ta", "tr"]),
            };
            require_axis(report, &[Axis::Y], name)?;
            Ok(vec![axis_table(report, name.into(), "y", &points, metrics)?])
        }
        Figure::Fig6 => {
            let axis = require_axis(report, &[Axis::C, Axis::I, Axis::P], "fig6")?;
            match report.secondary {
                None => FIG6_METRICS
                    .iter()
                    .map(|m| axis_table(report, format!("fig6_{m}"), axis.name(), &points, &[m]))
                    .collect(),
                Some(inner) => FIG6_METRICS.iter().map(|m| grid_table(report, axis, inner, m)).collect(),
            }
        }
        Figure::Fig7 => {
            if report.points.iter().all(|p| p.scenario.is_none()) {
                return Err(WormError::MissingColumn("scenario".into()));
            }
            let x = report.axis.map(|a| a.name()).unwrap_or("point");
            let mut scenarios: Vec<Scenario> = report.points.iter().filter_map(|p| p.scenario).collect();
            scenarios.sort_by_key(|s| scenario_name(*s));
            scenarios.dedup();
            scenarios
                .into_iter()
                .map(|s| {
                    let pts: Vec<&PointResult> = points.iter().copied().filter(|p| p.scenario == Some(s)).collect();
                    let mut t = axis_table(report, format!("fig7_{}", scenario_name(s)), x, &pts, &FIG6_METRICS)?;
                    if report.axis.is_none() {
                        for (k, row) in t.rows.iter_mut().enumerate() {
                            row[0] = Some(k as f64);
                        }
                    }
                    Ok(t)
                })
                .collect()
        }
    }
}

/// Primary axis values as rows, secondary values as columns `<axis>=<v>`.
fn grid_table(report: &SweepReport, outer: Axis, inner: Axis, metric: &str) -> Result<Table> {
    let mut rows_v: Vec<f64> = Vec::new();
    let mut cols_v: Vec<f64> = Vec::new();
    for p in &report.points {
        if let (Some(v), Some(w)) = (p.value, p.secondary_value) {
            if !rows_v.contains(&v) {
                rows_v.push(v);
            }
            if !cols_v.contains(&w) {
                cols_v.push(w);
            }
        }
    }
    let has_sim = report.points.iter().any(|p| p.simulation.is_some());
    let value = |p: &PointResult| {
        if has_sim {
            p.sim_value(metric, report.aggregation)
        } else {
            p.model_value(metric)
        }
    };
    if !report.points.iter().any(|p| value(p).is_some()) && !matches!(metric, "ta" | "tr") {
        return Err(WormError::MissingColumn(metric.to_string()));
    }
    let mut header = vec![outer.name().to_string()];
    header.extend(cols_v.iter().map(|w| format!("{}={w}", inner.name())));
    let rows = rows_v
        .iter()
        .map(|&v| {
            let mut row = vec![Some(v)];
            row.extend(cols_v.iter().map(|&w| {
                report.points.iter().find(|p| p.value == Some(v) && p.secondary_value == Some(w)).and_then(value)
            }));
            row
        })
        .collect();
    Ok(Table { name: format!("fig6_{metric}"), header, rows })
}

/// Writes one CSV per panel into `out_dir` and returns their paths.
pub fn emit_plot_data(report: &SweepReport, figure: Figure, out_dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).map_err(|e| WormError::io(out_dir, e))?;
    plot_tables(report, figure)?
        .into_iter()
        .map(|t| {
            let path = out_dir.join(format!("{}.csv", t.name));
            t.write(&path)?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::config::{AxisSpec, Mode, SweepConfig};
    use crate::experiment::sweep::run_sweep;
    use crate::model::ModelParams;

    fn y_report(mode: Mode) -> SweepReport {
        let mut c = SweepConfig::desk(mode);
        c.model = ModelParams::basic(30, 5e-4, 1, 1);
        c.rounds = 8;
        c.sweep = Some(AxisSpec { axis: Axis::Y, values: vec![1.0, 3.0, 9.0], grid: Default::default(), points: 3 });
        run_sweep(&c).unwrap()
    }

    #[test]
    fn fig2_schema_and_round_trip() {
        let report = y_report(Mode::Compare);
        let dir = tempfile::tempdir().unwrap();
        let paths = emit_plot_data(&report, Figure::Fig2, dir.path()).unwrap();
        assert_eq!(paths.len(), 1);
        let t = Table::read(&paths[0]).unwrap();
        assert_eq!(t.header, ["y", "ti_rel", "mi_rel", "ti_rel_model", "mi_rel_model"]);
        for (row, p) in t.rows.iter().zip(&report.points) {
            assert_eq!(row[0], p.value);
            assert_eq!(row[1], Some(p.simulation.as_ref().unwrap().ti_relative.mean));
            assert_eq!(row[2], Some(p.simulation.as_ref().unwrap().mi_relative.mean));
            assert_eq!(row[3], Some(p.model.unwrap().ti_relative));
            assert_eq!(row[4], Some(p.model.unwrap().mi_relative));
        }
    }

    #[test]
    fn model_columns_only_when_present() {
        let t = &plot_tables(&y_report(Mode::UniformSim), Figure::Fig3).unwrap()[0];
        assert_eq!(t.header, ["y", "tl", "al"]);
        let t = &plot_tables(&y_report(Mode::Ode), Figure::Fig4).unwrap()[0];
        assert_eq!(t.header, ["y", "ta_model", "tr_model"]);
    }

    #[test]
    fn both_aggregation_adds_medians() {
        let mut r = y_report(Mode::UniformSim);
        r.aggregation = Aggregation::Both;
        let t = &plot_tables(&r, Figure::Fig2).unwrap()[0];
        assert_eq!(t.header, ["y", "ti_rel", "ti_rel_median", "mi_rel", "mi_rel_median"]);
    }

    #[test]
    fn missing_column_is_named() {
        let mut r = y_report(Mode::UniformSim);
        for p in &mut r.points {
            p.simulation = None;
            p.model = None;
        }
        match plot_tables(&r, Figure::Fig2) {
            Err(WormError::MissingColumn(c)) => assert_eq!(c, "ti_rel"),
            other => panic!("{other:?}"),
        }
        match plot_tables(&y_report(Mode::Ode), Figure::Fig7) {
            Err(WormError::MissingColumn(c)) => assert_eq!(c, "scenario"),
            other => panic!("{other:?}"),
        }
        assert!(plot_tables(&y_report(Mode::Ode), Figure::Fig6).is_err());
    }

    #[test]
    fn fig6_grid() {
        let mut c = SweepConfig::desk(Mode::Ode);
        c.model = ModelParams::basic(100, 1e-4, 1, 1);
        c.sweep = Some(AxisSpec { axis: Axis::C, values: vec![0.5, 1.0], grid: Default::default(), points: 2 });
        c.secondary =
            Some(AxisSpec { axis: Axis::I, values: vec![0.0, 0.3, 0.6], grid: Default::default(), points: 3 });
        let r = run_sweep(&c).unwrap();
        let tables = plot_tables(&r, Figure::Fig6).unwrap();
        assert_eq!(tables.len(), 6);
        let ti = &tables[0];
        assert_eq!(ti.name, "fig6_ti_rel");
        assert_eq!(ti.header, ["c", "i=0", "i=0.3", "i=0.6"]);
        assert_eq!(ti.rows.len(), 2);
        assert_eq!(ti.rows[1][0], Some(1.0));
        let p = r.points.iter().find(|p| p.value == Some(1.0) && p.secondary_value == Some(0.3)).unwrap();
        assert_eq!(ti.rows[1][2], Some(p.model.unwrap().ti_relative));
    }
}
