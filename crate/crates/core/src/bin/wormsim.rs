use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use wormsim::experiment::{
    emit_plot_data, prepare_trace, run_sweep, run_sweep_with, validate_model, write_manifest, write_report, Figure,
    Mode, SweepConfig, SweepReport, TraceOptions,
};
use wormsim::metrics::write_rounds_csv;
use wormsim::model::{default_horizon, default_step, integrate, model_metrics, ModelKind};
use wormsim::trace::{
    compute_stats, generate_synthetic_trace, parse_trace, write_encounter_csv, EncounterTrace, Scenario,
    SyntheticTraceConfig, TraceFormat, TraceRecords,
};
use wormsim::{Result, WormError};

/// Predator-prey worm interaction models and simulators.
#[derive(Debug, Parser)]
#[command(name = "wormsim", version)]
struct Cli {
    /// TOML experiment config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Rounds per point (overrides the config).
    #[arg(long, global = true)]
    rounds: Option<usize>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Config override `table.key=value`; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate the continuum model once.
    Ode(OdeArgs),
    /// Uniform-encounter simulation rounds at one parameter point.
    Simulate(SimulateArgs),
    /// Encounter statistics of a trace.
    TraceStats(TraceStatsArgs),
    /// Trace-driven replay rounds.
    TraceReplay(TraceReplayArgs),
    /// Run the sweep described by --config.
    Sweep,
    /// Compare model and simulation; exit 2 on a threshold breach.
    Validate(ValidateArgs),
    /// Figure CSVs from a saved sweep report.
    EmitPlots(EmitPlotsArgs),
    /// Write a synthetic heavy-tailed encounter trace.
    SynthTrace(SynthArgs),
}

/// Model parameter overrides.
#[derive(Debug, Args)]
struct ParamArgs {
    /// Total nodes N.
    #[arg(short = 'n', long)]
    nodes: Option<usize>,
    #[arg(long)]
    beta: Option<f64>,
    /// Initial prey infectives I_A(0).
    #[arg(long)]
    ia: Option<usize>,
    /// Initial predator infectives I_B(0).
    #[arg(long)]
    ib: Option<usize>,
    /// Cooperative fraction c.
    #[arg(long)]
    coop: Option<f64>,
    /// Prey-immune fraction i of cooperative nodes.
    #[arg(long)]
    immune: Option<f64>,
    /// On probability p.
    #[arg(long)]
    on: Option<f64>,
}

#[derive(Debug, Args)]
struct OdeArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// basic or characteristic; defaults from the parameters.
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Signed seed arrival offset in seconds; negative injects the predator first.
    #[arg(long, allow_hyphen_values = true)]
    prey_delay: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
}

#[derive(Debug, Args)]
struct TraceArgs {
    /// Trace CSV; a synthetic trace is generated when absent.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// associations or encounters.
    #[arg(long, default_value = "encounters")]
    format: TraceFormat,
}

#[derive(Debug, Args)]
struct TraceStatsArgs {
    #[command(flatten)]
    trace: TraceArgs,
    #[arg(long, default_value_t = 20)]
    bins: usize,
}

#[derive(Debug, Args)]
struct TraceReplayArgs {
    #[command(flatten)]
    trace: TraceArgs,
    /// fast_predator or slow_predator; repeatable (default both).
    #[arg(long)]
    scenario: Vec<Scenario>,
    #[arg(long)]
    group_frac: Option<f64>,
    /// Arrival delay magnitude in seconds.
    #[arg(long)]
    arrival_delay: Option<f64>,
    #[arg(long)]
    coop: Option<f64>,
    #[arg(long)]
    immune: Option<f64>,
    #[arg(long)]
    on: Option<f64>,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// Saved compare-mode report.json; the config is run when absent.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EmitPlotsArgs {
    /// Defaults to <out-dir>/report.json.
    #[arg(long)]
    report: Option<PathBuf>,
    /// fig2, fig3, fig4, fig6 or fig7; repeatable.
    #[arg(long, required = true)]
    figure: Vec<Figure>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    days: Option<f64>,
    #[arg(long)]
    skew: Option<f64>,
    /// Mean pairwise contact rate per second.
    #[arg(long)]
    mean_rate: Option<f64>,
    /// Output CSV; defaults to <out-dir>/synthetic_trace.csv.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            warn!("thread pool: {e}");
        }
    }
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn command_line() -> String {
    std::env::args().collect::<Vec<_>>().join(" ")
}

/// The config file (or the desk preset) with overrides and global flags.
fn load_config(cli: &Cli, default_mode: Mode) -> Result<SweepConfig> {
    let mut config = match &cli.config {
        Some(path) => SweepConfig::load(path, &cli.set)?,
        None => {
            let text = SweepConfig::desk(default_mode).to_toml()?;
            SweepConfig::from_toml_str(&text, &cli.set)?
        }
    };
    if let Some(s) = cli.seed {
        config.master_seed = s;
    }
    if let Some(r) = cli.rounds {
        config.rounds = r;
    }
    Ok(config)
}

fn apply_params(config: &mut SweepConfig, a: &ParamArgs) {
    let m = &mut config.model;
    if let Some(v) = a.nodes {
        m.n_total = v;
    }
    if let Some(v) = a.beta {
        m.beta = v;
    }
    if let Some(v) = a.ia {
        m.i_a0 = v;
    }
    if let Some(v) = a.ib {
        m.i_b0 = v;
    }
    if let Some(v) = a.coop {
        m.coop_frac = v;
    }
    if let Some(v) = a.immune {
        m.immune_frac = v;
    }
    if let Some(v) = a.on {
        m.on_prob = v;
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| WormError::Io { path: dir.to_path_buf(), source: e })
}

fn create_file(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| WormError::Io { path: path.to_path_buf(), source: e })
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(create_file(path)?, value)?;
    Ok(())
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let out = &cli.out_dir;
    match &cli.command {
        Command::Ode(a) => {
            let mut config = load_config(cli, Mode::Ode)?;
            apply_params(&mut config, &a.params);
            let params = config.model;
            params.validate()?;
            let kind = match a.model.as_deref().or(config.ode.model.map(|k| match k {
                ModelKind::Basic => "basic",
                ModelKind::Characteristic => "characteristic",
            })) {
                Some("basic") => ModelKind::Basic,
                Some("characteristic") => ModelKind::Characteristic,
                None if params.is_basic() => ModelKind::Basic,
                None => ModelKind::Characteristic,
                Some(other) => return Err(WormError::Config(format!("unknown model `{other}`"))),
            };
            let step = a.step.or(config.ode.step).unwrap_or_else(|| default_step(&params));
            let horizon = a.horizon.or(config.ode.horizon).unwrap_or_else(|| default_horizon(&params));
            let traj = integrate(&params, kind, step, horizon)?;
            let metrics = model_metrics(&traj)?;
            create_dir(out)?;
            traj.write_csv(create_file(&out.join("trajectory.csv"))?)?;
            let mut json = metrics.to_json();
            json["ti_rel"] = metrics.ti_relative.into();
            json["mi_rel"] = metrics.mi_relative.into();
            write_json(&out.join("metrics.json"), &json)?;
            write_manifest(out, &config, None, &command_line())?;
            println!("{}", serde_json::to_string_pretty(&json)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate(a) => {
            let mut config = load_config(cli, Mode::UniformSim)?;
            apply_params(&mut config, &a.params);
            config.mode = Mode::UniformSim;
            config.sweep = None;
            config.secondary = None;
            if let Some(d) = a.prey_delay {
                config.sim.prey_delay = d;
            }
            if let Some(h) = a.horizon {
                config.sim.horizon = Some(h);
            }
            let report = run_sweep(&config)?;
            let point = &report.points[0];
            if let Some(e) = &point.error {
                return Err(WormError::Config(e.clone()));
            }
            create_dir(out)?;
            write_rounds_csv(
                create_file(&out.join("rounds.csv"))?,
                point.rounds.iter().filter_map(|r| r.metrics().map(|m| (r.round, m))),
            )?;
            let agg = point.simulation.as_ref().expect("no error");
            write_json(&out.join("aggregate.json"), agg)?;
            write_manifest(out, &config, Some(&report), &command_line())?;
            if point.failed_rounds > 0 {
                warn!("{} rounds failed", point.failed_rounds);
            }
            println!(
                "rounds={} ti_rel={:.4} mi_rel={:.4} tl={:.1} al={:.1}",
                agg.rounds, agg.ti_relative.mean, agg.mi_relative.mean, agg.tl.mean, agg.al.mean
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::TraceStats(a) => {
            let trace = load_trace(&a.trace)?;
            let stats = compute_stats(&trace, a.bins)?;
            create_dir(out)?;
            write_json(&out.join("trace_stats.json"), &stats)?;
            stats.total_histogram.write_csv(create_file(&out.join("histogram_total.csv"))?)?;
            stats.unique_histogram.write_csv(create_file(&out.join("histogram_unique.csv"))?)?;
            println!(
                "nodes={} encounters={} duration={} top20_share={:.3} median_rate={:.3e} median_unique={}",
                stats.n_nodes(),
                stats.encounter_count,
                stats.duration,
                stats.top20_share,
                stats.median_contact_rate,
                stats.median_unique_peers
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::TraceReplay(a) => {
            let mut config = load_config(cli, Mode::TraceReplay)?;
            config.mode = Mode::TraceReplay;
            let mut t = config.trace.clone().unwrap_or_default();
            if a.trace.trace.is_some() {
                t.path = a.trace.trace.clone();
                t.format = a.trace.format;
            }
            if !a.scenario.is_empty() {
                t.scenarios = a.scenario.clone();
            }
            if let Some(v) = a.group_frac {
                t.group_frac = v;
            }
            if let Some(v) = a.arrival_delay {
                t.arrival_delay = v;
            }
            config.trace = Some(t);
            let m = &mut config.model;
            m.coop_frac = a.coop.unwrap_or(m.coop_frac);
            m.immune_frac = a.immune.unwrap_or(m.immune_frac);
            m.on_prob = a.on.unwrap_or(m.on_prob);
            config.validate()?;
            let prepared = prepare_trace(config.trace.as_ref().expect("set above"))?;
            info!("trace: {} nodes, {} encounters", prepared.trace.n_nodes(), prepared.trace.encounters().len());
            let report = run_sweep_with(&config, Some(&prepared))?;
            write_report(out, &config, &report, &command_line())?;
            for p in &report.points {
                match (&p.simulation, &p.error) {
                    (Some(s), _) => println!(
                        "{:?}: ti_rel={:.4} mi_rel={:.4} tl={:.1}",
                        p.scenario.expect("replay point"),
                        s.ti_relative.mean,
                        s.mi_relative.mean,
                        s.tl.mean
                    ),
                    (None, e) => println!("{:?}: failed: {}", p.scenario, e.clone().unwrap_or_default()),
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep => {
            if cli.config.is_none() {
                return Err(WormError::Config("sweep needs --config".into()));
            }
            let config = load_config(cli, Mode::Compare)?;
            let report = run_sweep(&config)?;
            write_report(out, &config, &report, &command_line())?;
            let failed = report.points.iter().filter(|p| p.error.is_some()).count();
            println!("{} points ({} with errors) written to {}", report.points.len(), failed, out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate(a) => {
            let config = load_config(cli, Mode::Compare)?;
            let report = match &a.report {
                Some(path) => SweepReport::from_json_file(path)?,
                None => {
                    let mut c = config.clone();
                    if c.mode != Mode::Compare {
                        warn!("running the config in compare mode");
                        c.mode = Mode::Compare;
                    }
                    let report = run_sweep(&c)?;
                    write_report(out, &c, &report, &command_line())?;
                    report
                }
            };
            let summary = validate_model(&report, &config.validate.thresholds)?;
            create_dir(out)?;
            write_json(&out.join("validation.json"), &summary)?;
            for (m, s) in &summary.per_metric {
                println!(
                    "{m}: max={:.4} mean={:.4} threshold={} compared={} skipped={}",
                    s.max, s.mean, config.validate.thresholds[m], s.compared, s.skipped
                );
            }
            if summary.breached {
                println!("validation FAILED");
                Ok(ExitCode::from(2))
            } else {
                println!("validation passed");
                Ok(ExitCode::SUCCESS)
            }
        }
        Command::EmitPlots(a) => {
            let path = a.report.clone().unwrap_or_else(|| out.join("report.json"));
            let report = SweepReport::from_json_file(&path)?;
            for &fig in &a.figure {
                for p in emit_plot_data(&report, fig, out)? {
                    println!("{}", p.display());
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::SynthTrace(a) => {
            let d = SyntheticTraceConfig::default();
            let config = SyntheticTraceConfig {
                n_nodes: a.nodes.unwrap_or(d.n_nodes),
                duration: a.days.map(|x| x * 86_400.0).unwrap_or(d.duration),
                skew: a.skew.unwrap_or(d.skew),
                mean_rate: a.mean_rate.unwrap_or(d.mean_rate),
                mean_contact: d.mean_contact,
                seed: cli.seed.unwrap_or(d.seed),
            };
            let enc = generate_synthetic_trace(&config)?;
            let path = match &a.output {
                Some(p) => p.clone(),
                None => {
                    create_dir(out)?;
                    out.join("synthetic_trace.csv")
                }
            };
            write_encounter_csv(create_file(&path)?, &enc)?;
            println!("{} encounters written to {}", enc.len(), path.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn load_trace(a: &TraceArgs) -> Result<EncounterTrace> {
    let Some(path) = &a.trace else {
        let options = TraceOptions::default();
        return Ok(prepare_trace(&options)?.trace);
    };
    Ok(match parse_trace(path, a.format)? {
        TraceRecords::Associations(p) => {
            report_drops(path, p.malformed.len(), p.zero_duration, p.self_overlaps.len());
            EncounterTrace::from_associations(&p.records)
        }
        TraceRecords::Encounters(p) => {
            report_drops(path, p.malformed.len(), p.zero_duration, p.self_overlaps.len());
            EncounterTrace::new(p.records, [])
        }
    })
}

fn report_drops(path: &Path, malformed: usize, zero: usize, overlaps: usize) {
    if malformed + zero + overlaps > 0 {
        warn!(
            "{}: skipped {malformed} malformed, {zero} zero-duration, {overlaps} self-overlapping records",
            path.display()
        );
    }
}
