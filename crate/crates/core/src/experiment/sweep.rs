use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Aggregation, Axis, Mode, RankBy, SweepConfig, TraceOptions};
use crate::error::{Result, WormError};
use crate::metrics::{aggregate, write_rounds_csv, MetricSet, RoundAggregate, METRIC_NAMES};
use crate::model::{default_horizon, default_step, integrate, model_metrics, ModelKind, ModelParams, EULER_GAMMA};
use crate::rng::derive_seed;
use crate::sim::{run_rounds, run_uniform_rounds, RoundConfig, RoundRecord};
use crate::trace::{
    compute_stats, generate_synthetic_trace, online_time, parse_trace, replay_round, select_seeds,
    select_seeds_by_score, EncounterTrace, ReplayConfig, Scenario, SeedPlan, TraceRecords,
};

/// Results at one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub index: usize,
    pub value: Option<f64>,
    pub secondary_value: Option<f64>,
    pub scenario: Option<Scenario>,
    pub params: ModelParams,
    /// Master seed of this point's rounds.
    pub seed: u64,
    pub model: Option<MetricSet>,
    pub simulation: Option<RoundAggregate>,
    pub failed_rounds: usize,
    pub error: Option<String>,
    /// Per-round outcomes; written as CSV, not part of the report JSON.
    #[serde(skip)]
    pub rounds: Vec<RoundRecord>,
}

impl PointResult {
    /// Simulation statistic of a metric column under `agg` (the mean for
    /// `Both`).
    pub fn sim_value(&self, metric: &str, agg: Aggregation) -> Option<f64> {
        let s = self.simulation.as_ref()?.get(metric)?;
        Some(if agg == Aggregation::Median { s.median } else { s.mean })
    }

    pub fn model_value(&self, metric: &str) -> Option<f64> {
        self.model.as_ref()?.get(metric)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub mode: Mode,
    pub axis: Option<Axis>,
    pub secondary: Option<Axis>,
    pub aggregation: Aggregation,
    pub rounds: usize,
    pub master_seed: u64,
    pub points: Vec<PointResult>,
}

impl SweepReport {
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| WormError::io(path, e))?;
        Ok(serde_json::from_reader(std::io::BufReader::new(file))?)
    }
}

/// Default simulation horizon: 20 closed-form infect-all times over the
/// cooperative population at rate p * beta.
pub fn sim_horizon(params: &ModelParams) -> f64 {
    let m = params.cooperative_count().max(2) as f64;
    let rate = params.contact_rate() * m;
    if rate > 0.0 {
        20.0 * (2.0 * m.ln() + EULER_GAMMA) / rate
    } else {
        1.0
    }
}

/// ODE metrics under the config's integrator options.
pub fn ode_point(config: &SweepConfig, params: &ModelParams) -> Result<MetricSet> {
    let kind = config.ode.model.unwrap_or(if params.is_basic() { ModelKind::Basic } else { ModelKind::Characteristic });
    let step = config.ode.step.unwrap_or_else(|| default_step(params));
    let horizon = config.ode.horizon.unwrap_or_else(|| default_horizon(params));
    model_metrics(&integrate(params, kind, step, horizon)?)
}

/// A loaded trace with per-scenario seed plans.
#[derive(Debug, Clone)]
pub struct PreparedTrace {
    pub trace: EncounterTrace,
    pub plans: Vec<SeedPlan>,
}

pub fn prepare_trace(options: &TraceOptions) -> Result<PreparedTrace> {
    let (trace, online) = match &options.path {
        Some(path) => match parse_trace(path, options.format)? {
            TraceRecords::Associations(p) => {
                let trace = EncounterTrace::from_associations(&p.records);
                let online = online_time(&p.records, &trace);
                (trace, Some(online))
            }
            TraceRecords::Encounters(p) => (EncounterTrace::new(p.records, []), None),
        },
        None => {
            let synth = options.synthetic.unwrap_or_default();
            let enc = generate_synthetic_trace(&synth)?;
            (EncounterTrace::new(enc, 0..synth.n_nodes as u64), None)
        }
    };
    if trace.n_nodes() < 2 {
        return Err(WormError::Empty("trace has fewer than two nodes"));
    }
    let stats = compute_stats(&trace, 20)?;
    let plans = options
        .scenarios
        .iter()
        .map(|&s| match (options.rank_by, &online) {
            (RankBy::ContactRate, _) => {
                select_seeds(&stats, s, options.group_frac, options.arrival_delay, options.bands)
            }
            (RankBy::OnlineTime, Some(scores)) => {
                select_seeds_by_score(scores, s, options.group_frac, options.arrival_delay, options.bands)
            }
            (RankBy::OnlineTime, None) => {
                Err(WormError::Config("rank_by = online_time needs an association trace".into()))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PreparedTrace { trace, plans })
}

struct PointSpec {
    value: Option<f64>,
    secondary_value: Option<f64>,
    scenario: Option<(Scenario, usize)>,
    params: Result<ModelParams>,
}

fn point_specs(config: &SweepConfig, plans: Option<&[SeedPlan]>) -> Result<Vec<PointSpec>> {
    let primary: Vec<Option<f64>> = match &config.sweep {
        Some(s) => s.resolve(&config.model)?.into_iter().map(Some).collect(),
        None => vec![None],
    };
    let secondary: Vec<Option<f64>> = match &config.secondary {
        Some(s) => s.resolve(&config.model)?.into_iter().map(Some).collect(),
        None => vec![None],
    };
    let scenarios: Vec<Option<(Scenario, usize)>> = match plans {
        Some(p) => p.iter().enumerate().map(|(k, plan)| Some((plan.scenario, k))).collect(),
        None => vec![None],
    };
    let mut specs = Vec::new();
    for &v in &primary {
        for &w in &secondary {
            for &sc in &scenarios {
                let mut params = Ok(config.model);
                if let (Some(spec), Some(v)) = (&config.sweep, v) {
                    params = params.and_then(|p| spec.axis.apply(p, v));
                }
                if let (Some(spec), Some(w)) = (&config.secondary, w) {
                    params = params.and_then(|p| spec.axis.apply(p, w));
                }
                specs.push(PointSpec { value: v, secondary_value: w, scenario: sc, params });
            }
        }
    }
    Ok(specs)
}

fn simulate_point(
    config: &SweepConfig,
    params: &ModelParams,
    seed: u64,
    replay: Option<(&EncounterTrace, &SeedPlan)>,
) -> Vec<RoundRecord> {
    match replay {
        Some((trace, plan)) => {
            let rc =
                ReplayConfig { coop_frac: params.coop_frac, immune_frac: params.immune_frac, on_prob: params.on_prob };
            run_rounds(config.rounds, seed, |s| replay_round(trace, plan, &rc, s))
        }
        None => {
            let template = RoundConfig {
                params: *params,
                rng_seed: 0,
                prey_delay: config.sim.prey_delay,
                horizon: config.sim.horizon.unwrap_or_else(|| sim_horizon(params)),
            };
            run_uniform_rounds(&template, config.rounds, seed)
        }
    }
}

/// Runs every sweep point. Failures are recorded per point and never stop
/// the sweep. Point `k` draws its rounds from `derive_seed(master_seed, k)`,
/// so results do not depend on evaluation order or thread count.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepReport> {
    config.validate()?;
    let prepared = match config.mode {
        Mode::TraceReplay => Some(prepare_trace(config.trace.as_ref().expect("validated"))?),
        _ => None,
    };
    run_sweep_with(config, prepared.as_ref())
}

/// As [`run_sweep`] with an already loaded trace.
pub fn run_sweep_with(config: &SweepConfig, prepared: Option<&PreparedTrace>) -> Result<SweepReport> {
    if config.mode == Mode::TraceReplay && prepared.is_none() {
        return Err(WormError::Config("trace_replay needs a trace".into()));
    }
    let specs = point_specs(config, prepared.map(|p| p.plans.as_slice()))?;
    let points: Vec<PointResult> = specs
        .into_par_iter()
        .enumerate()
        .map(|(index, spec)| {
            let seed = derive_seed(config.master_seed, index as u64);
            let mut point = PointResult {
                index,
                value: spec.value,
                secondary_value: spec.secondary_value,
                scenario: spec.scenario.map(|s| s.0),
                params: config.model,
                seed,
                model: None,
                simulation: None,
                failed_rounds: 0,
                error: None,
                rounds: Vec::new(),
            };
            let params = match spec.params {
                Ok(p) => p,
                Err(e) => {
                    point.error = Some(e.to_string());
                    return point;
                }
            };
            point.params = params;
            let mut errors = Vec::new();
            if config.mode.runs_ode() {
                match ode_point(config, &params) {
                    Ok(m) => point.model = Some(m),
                    Err(e) => errors.push(format!("ode: {e}")),
                }
            }
            if config.mode != Mode::Ode {
                let replay = match (prepared, spec.scenario) {
                    (Some(p), Some((_, k))) => Some((&p.trace, &p.plans[k])),
                    _ => None,
                };
                let rounds = simulate_point(config, &params, seed, replay);
                let ok: Vec<MetricSet> = rounds.iter().filter_map(|r| r.metrics().copied()).collect();
                point.failed_rounds = rounds.len() - ok.len();
                if let Some(first) = rounds.iter().find_map(|r| r.outcome.as_ref().err()) {
                    log::warn!("point {index}: {} of {} rounds failed: {first}", point.failed_rounds, rounds.len());
                }
                match aggregate(&ok) {
                    Ok(a) => point.simulation = Some(a),
                    Err(_) => errors.push(format!(
                        "simulation: every round failed ({})",
                        rounds.iter().find_map(|r| r.outcome.as_ref().err()).cloned().unwrap_or_default()
                    )),
                }
                point.rounds = rounds;
            }
            if !errors.is_empty() {
                point.error = Some(errors.join("; "));
            }
            point
        })
        .collect();
    Ok(SweepReport {
        mode: config.mode,
        axis: config.sweep.as_ref().map(|s| s.axis),
        secondary: config.secondary.as_ref().map(|s| s.axis),
        aggregation: config.aggregation,
        rounds: config.rounds,
        master_seed: config.master_seed,
        points,
    })
}

/// Run manifest: everything needed to reproduce a run.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest<'a> {
    pub version: &'static str,
    /// Unix seconds.
    pub created: u64,
    pub command: String,
    pub config: &'a SweepConfig,
    pub point_seeds: Vec<u64>,
    pub threads: usize,
}

pub fn write_manifest(out_dir: &Path, config: &SweepConfig, report: Option<&SweepReport>, command: &str) -> Result<()> {
    fs::create_dir_all(out_dir).map_err(|e| WormError::io(out_dir, e))?;
    let manifest = Manifest {
        version: crate::VERSION,
        created: std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        command: command.to_string(),
        config,
        point_seeds: report.map(|r| r.points.iter().map(|p| p.seed).collect()).unwrap_or_default(),
        threads: rayon::current_num_threads(),
    };
    write_json(&out_dir.join("manifest.json"), &manifest)
}

pub(crate) fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let file = File::create(path).map_err(|e| WormError::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)?;
    use std::io::Write;
    w.write_all(b"\n").map_err(|e| WormError::io(path, e))?;
    Ok(())
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Aggregate CSV, one row per point.
pub fn write_points_csv(path: &Path, report: &SweepReport) -> Result<()> {
    let file = File::create(path).map_err(|e| WormError::io(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    let mut header: Vec<String> = ["index", "value", "secondary_value", "scenario"].map(String::from).to_vec();
    for m in METRIC_NAMES {
        for suffix in ["mean", "median", "sd", "n", "model"] {
            header.push(format!("{m}_{suffix}"));
        }
    }
    header.extend(["ta_censored", "tr_censored", "tl_censored", "failed_rounds", "error"].map(String::from));
    w.write_record(&header)?;
    for p in &report.points {
        let mut row = vec![
            p.index.to_string(),
            cell(p.value),
            cell(p.secondary_value),
            p.scenario.map(|s| scenario_name(s).to_string()).unwrap_or_default(),
        ];
        for m in METRIC_NAMES {
            let s = p.simulation.as_ref().and_then(|a| a.get(m));
            row.push(cell(s.map(|s| s.mean)));
            row.push(cell(s.map(|s| s.median)));
            row.push(cell(s.map(|s| s.std_dev)));
            row.push(s.map(|s| s.count.to_string()).unwrap_or_default());
            row.push(cell(p.model_value(m)));
        }
        let sim = p.simulation.as_ref();
        row.push(sim.map(|a| a.ta_censored.to_string()).unwrap_or_default());
        row.push(sim.map(|a| a.tr_censored.to_string()).unwrap_or_default());
        row.push(sim.map(|a| a.tl_censored.to_string()).unwrap_or_default());
        row.push(p.failed_rounds.to_string());
        row.push(p.error.clone().unwrap_or_default());
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| WormError::io(path, e))?;
    Ok(())
}

pub fn scenario_name(s: Scenario) -> &'static str {
    match s {
        Scenario::FastPredator => "fast_predator",
        Scenario::SlowPredator => "slow_predator",
    }
}

/// Writes `report.json`, `points.csv`, `rounds/point_<k>.csv` and
/// `manifest.json` under `out_dir`.
pub fn write_report(out_dir: &Path, config: &SweepConfig, report: &SweepReport, command: &str) -> Result<()> {
    fs::create_dir_all(out_dir).map_err(|e| WormError::io(out_dir, e))?;
    write_json(&out_dir.join("report.json"), report)?;
    write_points_csv(&out_dir.join("points.csv"), report)?;
    let rounds_dir = out_dir.join("rounds");
    if report.points.iter().any(|p| !p.rounds.is_empty()) {
        fs::create_dir_all(&rounds_dir).map_err(|e| WormError::io(&rounds_dir, e))?;
    }
    for p in report.points.iter().filter(|p| !p.rounds.is_empty()) {
        let path = rounds_dir.join(format!("point_{}.csv", p.index));
        let file = File::create(&path).map_err(|e| WormError::io(&path, e))?;
        write_rounds_csv(BufWriter::new(file), p.rounds.iter().filter_map(|r| r.metrics().map(|m| (r.round, m))))?;
    }
    write_manifest(out_dir, config, Some(report), command)
}
