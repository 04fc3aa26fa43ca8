use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Result, WormError};
use crate::model::{ModelKind, ModelParams};
use crate::trace::{Scenario, StrataBands, SyntheticTraceConfig, TraceFormat, PAPER_ARRIVAL_DELAY};

pub const DEFAULT_ROUNDS: usize = 1000;

/// Sweep parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    /// Predator-to-prey seeding ratio I_B(0) / I_A(0).
    Y,
    C,
    I,
    P,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Y => "y",
            Axis::C => "c",
            Axis::I => "i",
            Axis::P => "p",
        }
    }

    /// Checks `value` against the axis domain: Y an integer in
    /// [1, Y_max], c/i/p in [0, 1].
    pub fn check(self, baseline: &ModelParams, value: f64) -> Result<()> {
        match self {
            Axis::Y => {
                if value < 1.0 || value.fract() != 0.0 {
                    return Err(WormError::param("y", format!("{value} is not a positive integer")));
                }
                let y_max = baseline.y_max();
                if value as usize > y_max {
                    return Err(WormError::param("y", format!("{value} exceeds Y_max = {y_max}")));
                }
            }
            _ => {
                if !(0.0..=1.0).contains(&value) {
                    return Err(WormError::param("sweep value", format!("{} = {value} outside [0, 1]", self.name())));
                }
            }
        }
        Ok(())
    }

    /// Baseline parameters with this axis set to `value`.
    pub fn apply(self, params: ModelParams, value: f64) -> Result<ModelParams> {
        self.check(&params, value)?;
        let mut p = params;
        match self {
            Axis::Y => p = p.with_y(value as usize),
            Axis::C => p.coop_frac = value,
            Axis::I => p.immune_frac = value,
            Axis::P => p.on_prob = value,
        }
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Ode,
    UniformSim,
    TraceReplay,
    /// ODE and uniform simulation at every point.
    #[default]
    Compare,
}

impl Mode {
    pub fn runs_ode(self) -> bool {
        matches!(self, Mode::Ode | Mode::Compare)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    #[default]
    Mean,
    Median,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Grid {
    /// Log-spaced integers from 1 to Y_max.
    #[default]
    Log,
    /// Every integer from 1 to Y_max.
    Full,
}

/// One sweep axis. An empty `values` list on the Y axis expands to a grid
/// up to Y_max.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub axis: Axis,
    #[serde(default)]
    pub values: Vec<f64>,
    #[serde(default)]
    pub grid: Grid,
    #[serde(default = "default_points")]
    pub points: usize,
}

fn default_points() -> usize {
    16
}

impl AxisSpec {
    pub fn resolve(&self, baseline: &ModelParams) -> Result<Vec<f64>> {
        if !self.values.is_empty() {
            return Ok(self.values.clone());
        }
        match (self.axis, self.grid) {
            (Axis::Y, Grid::Log) => Ok(log_grid(baseline.y_max(), self.points)),
            (Axis::Y, Grid::Full) => Ok((1..=baseline.y_max()).map(|y| y as f64).collect()),
            (axis, _) => Err(WormError::Config(format!("axis `{}` needs explicit values", axis.name()))),
        }
    }
}

/// Up to `points` distinct integers, log-spaced over [1, max], both ends
/// included.
pub fn log_grid(max: usize, points: usize) -> Vec<f64> {
    if max == 0 || points == 0 {
        return Vec::new();
    }
    if points == 1 || max == 1 {
        return vec![1.0];
    }
    let top = (max as f64).ln();
    let mut v: Vec<f64> =
        (0..points).map(|k| (top * k as f64 / (points - 1) as f64).exp().round().clamp(1.0, max as f64)).collect();
    v.dedup();
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimOptions {
    /// Seconds; defaults to 20 closed-form infect-all times over the
    /// cooperative population.
    pub horizon: Option<f64>,
    /// Signed seed arrival offset; negative injects the predator first.
    #[serde(default)]
    pub prey_delay: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdeOptions {
    pub step: Option<f64>,
    pub horizon: Option<f64>,
    /// Defaults to the basic model when c = 1, i = 0, p = 1.
    pub model: Option<ModelKind>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankBy {
    #[default]
    ContactRate,
    /// Total association time; association traces only.
    OnlineTime,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceOptions {
    /// Trace CSV. Without it a synthetic trace is generated.
    pub path: Option<PathBuf>,
    #[serde(default = "default_format")]
    pub format: TraceFormat,
    pub synthetic: Option<SyntheticTraceConfig>,
    #[serde(default = "default_scenarios")]
    pub scenarios: Vec<Scenario>,
    #[serde(default = "default_group_frac")]
    pub group_frac: f64,
    /// Magnitude in seconds; the sign follows the scenario.
    #[serde(default = "default_arrival_delay")]
    pub arrival_delay: f64,
    #[serde(default)]
    pub bands: StrataBands,
    #[serde(default)]
    pub rank_by: RankBy,
}

fn default_format() -> TraceFormat {
    TraceFormat::Encounters
}

fn default_scenarios() -> Vec<Scenario> {
    vec![Scenario::FastPredator, Scenario::SlowPredator]
}

fn default_group_frac() -> f64 {
    0.03
}

fn default_arrival_delay() -> f64 {
    PAPER_ARRIVAL_DELAY
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            path: None,
            format: default_format(),
            synthetic: None,
            scenarios: default_scenarios(),
            group_frac: default_group_frac(),
            arrival_delay: default_arrival_delay(),
            bands: StrataBands::default(),
            rank_by: RankBy::default(),
        }
    }
}

/// Maximum relative model-vs-simulation error per metric column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateOptions {
    #[serde(default = "default_thresholds")]
    pub thresholds: BTreeMap<String, f64>,
}

fn default_thresholds() -> BTreeMap<String, f64> {
    [("mi_rel".to_string(), 0.10), ("ti_rel".to_string(), 0.20)].into_iter().collect()
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions { thresholds: default_thresholds() }
    }
}

/// A full experiment description, normally read from TOML.
///
/// ```toml
/// mode = "compare"
/// rounds = 1000
/// master_seed = 7
///
/// [model]
/// n_total = 200
/// beta = 3e-5
/// i_a0 = 1
/// i_b0 = 1
///
/// [sweep]
/// axis = "y"
/// grid = "log"
/// points = 12
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub model: ModelParams,
    #[serde(default)]
    pub mode: Mode,
    /// Absent: a single point at the baseline.
    pub sweep: Option<AxisSpec>,
    /// Inner axis of a two-dimensional grid.
    pub secondary: Option<AxisSpec>,
    #[serde(default = "default_rounds")]
    pub rounds: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub aggregation: Aggregation,
    #[serde(default)]
    pub sim: SimOptions,
    #[serde(default)]
    pub ode: OdeOptions,
    pub trace: Option<TraceOptions>,
    #[serde(default)]
    pub validate: ValidateOptions,
}

fn default_rounds() -> usize {
    DEFAULT_ROUNDS
}

impl SweepConfig {
    /// Desk-scale basic-model preset: N = 200, beta = 3e-5, one seed each.
    pub fn desk(mode: Mode) -> Self {
        SweepConfig {
            model: ModelParams::basic(200, 3e-5, 1, 1),
            mode,
            sweep: None,
            secondary: None,
            rounds: DEFAULT_ROUNDS,
            master_seed: 0,
            aggregation: Aggregation::Mean,
            sim: SimOptions::default(),
            ode: OdeOptions::default(),
            trace: (mode == Mode::TraceReplay).then(TraceOptions::default),
            validate: ValidateOptions::default(),
        }
    }

    pub fn from_toml_str(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table = toml::from_str(text).map_err(|e| WormError::Config(e.to_string()))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let config: SweepConfig = table.try_into().map_err(|e| WormError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>, overrides: &[String]) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| WormError::io(path, e))?;
        Self::from_toml_str(&text, overrides)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| WormError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.rounds == 0 && self.mode != Mode::Ode {
            return Err(WormError::param("rounds", "must be at least 1"));
        }
        for spec in [&self.sweep, &self.secondary].into_iter().flatten() {
            for v in spec.resolve(&self.model)? {
                spec.axis.check(&self.model, v)?;
            }
        }
        if self.secondary.is_some() && self.sweep.is_none() {
            return Err(WormError::Config("`secondary` needs a primary `sweep` axis".into()));
        }
        if let (Some(a), Some(b)) = (&self.sweep, &self.secondary) {
            if a.axis == b.axis {
                return Err(WormError::Config("primary and secondary axes coincide".into()));
            }
        }
        if self.mode == Mode::TraceReplay {
            let trace =
                self.trace.as_ref().ok_or_else(|| WormError::Config("trace_replay needs a [trace] table".into()))?;
            if trace.scenarios.is_empty() {
                return Err(WormError::Config("trace.scenarios is empty".into()));
            }
            if [&self.sweep, &self.secondary].into_iter().flatten().any(|s| s.axis == Axis::Y) {
                return Err(WormError::Config(
                    "trace replay seeds one node per worm; a Y axis is not supported".into(),
                ));
            }
        }
        for (k, v) in &self.validate.thresholds {
            if !crate::metrics::METRIC_NAMES.contains(&k.as_str()) {
                return Err(WormError::Config(format!("unknown metric `{k}` in validate.thresholds")));
            }
            if !(*v >= 0.0) {
                return Err(WormError::Config(format!("threshold for `{k}` must be non-negative")));
            }
        }
        Ok(())
    }
}

/// Applies `a.b.c=value` to a TOML table. The value is parsed as a TOML
/// literal, falling back to a bare string.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<()> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| WormError::Config(format!("override `{assignment}` is not key=value")))?;
    let keys: Vec<&str> = path.trim().split('.').map(str::trim).collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(WormError::Config(format!("bad key path `{path}`")));
    }
    let raw = raw.trim();
    let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let (last, parents) = keys.split_last().expect("non-empty");
    let mut cur = table;
    for k in parents {
        let entry = cur.entry(k.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry.as_table_mut().ok_or_else(|| WormError::Config(format!("`{k}` in `{path}` is not a table")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
mode = "compare"
rounds = 10

[model]
n_total = 200
beta = 3e-5
i_a0 = 1
i_b0 = 1

[sweep]
axis = "y"
points = 6
"#;

    #[test]
    fn parse_and_defaults() {
        let c = SweepConfig::from_toml_str(BASE, &[]).unwrap();
        assert_eq!(c.rounds, 10);
        assert_eq!(c.master_seed, 0);
        assert_eq!(c.aggregation, Aggregation::Mean);
        assert_eq!(c.model.coop_frac, 1.0);
        let ys = c.sweep.as_ref().unwrap().resolve(&c.model).unwrap();
        assert_eq!(ys.first(), Some(&1.0));
        assert_eq!(ys.last(), Some(&(c.model.y_max() as f64)));
        assert_eq!(c.validate.thresholds["mi_rel"], 0.10);
    }

    #[test]
    fn overrides() {
        let c = SweepConfig::from_toml_str(
            BASE,
            &[
                "model.beta=6e-6".into(),
                "sweep.values=[1, 2, 3]".into(),
                "mode=ode".into(),
                "trace.path = t.csv".into(),
            ],
        )
        .unwrap();
        assert_eq!(c.model.beta, 6e-6);
        assert_eq!(c.mode, Mode::Ode);
        assert_eq!(c.sweep.unwrap().values, vec![1.0, 2.0, 3.0]);
        assert_eq!(c.trace.unwrap().path, Some(PathBuf::from("t.csv")));
        assert!(SweepConfig::from_toml_str(BASE, &["rounds".into()]).is_err());
        assert!(SweepConfig::from_toml_str(BASE, &["rounds.x=1".into()]).is_err());
    }

    #[test]
    fn domain_checks() {
        let bad = |o: &str| SweepConfig::from_toml_str(BASE, &[o.to_string()]).is_err();
        assert!(bad("rounds=0"));
        assert!(bad("sweep.values=[0]"));
        assert!(bad("sweep.values=[1.5]"));
        assert!(bad("sweep.values=[199]"));
        assert!(!bad("sweep.values=[198]"));
        assert!(bad("sweep.axis=\"c\""));
        assert!(bad("model.unknown=1"));
        assert!(bad("validate.thresholds.xx=0.1"));
        let c = "sweep = { axis = \"c\", values = [0.2, 1.2] }";
        assert!(SweepConfig::from_toml_str(&BASE.replace("[sweep]\naxis = \"y\"\npoints = 6", c), &[]).is_err());
    }

    #[test]
    fn log_grid_shape() {
        assert_eq!(log_grid(998, 4), vec![1.0, 10.0, 100.0, 998.0]);
        assert_eq!(log_grid(3, 10), vec![1.0, 2.0, 3.0]);
        assert_eq!(log_grid(1, 5), vec![1.0]);
        assert!(log_grid(0, 5).is_empty());
        let g = log_grid(998, 30);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn toml_round_trip() {
        let mut c = SweepConfig::desk(Mode::TraceReplay);
        c.trace = Some(TraceOptions::default());
        c.sweep = Some(AxisSpec { axis: Axis::I, values: vec![0.0, 0.5], grid: Grid::Log, points: 2 });
        let text = c.to_toml().unwrap();
        assert_eq!(SweepConfig::from_toml_str(&text, &[]).unwrap(), c);
    }
}
