//! C ABI over `wormsim`.
//!
//! Conventions:
//!
//! * Every fallible call returns a [`WormsimStatus`]; results go through out
//!   pointers. On failure [`wormsim_last_error`] describes the error.
//! * Objects (`WormsimTrajectory`, `WormsimBatch`, `WormsimTrace`) are
//!   opaque handles created by this library and released with the matching
//!   `*_free` function. Passing NULL to a free function is a no-op.
//! * Censored times are reported as NaN with the matching flag set.
//! * Panics never cross the boundary; they surface as
//!   `WORMSIM_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wormsim::experiment::{prepare_trace, TraceOptions};
use wormsim::metrics::{aggregate, MetricSet};
use wormsim::model::{
    default_horizon, default_step, integrate, model_metrics, ta_closed_form, ModelKind, ModelParams, Trajectory,
};
use wormsim::sim::{run_rounds, run_uniform_rounds, RoundConfig, RoundRecord};
use wormsim::trace::{
    replay_round, EncounterTrace, ReplayConfig, Scenario, SeedPlan, SyntheticTraceConfig, TraceFormat,
};
use wormsim::WormError;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WormsimStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    Numerical = 3,
    Io = 4,
    Parse = 5,
    OutOfRange = 6,
    /// The requested round or metric exists but failed or was censored.
    Unavailable = 7,
    Panic = 8,
    Other = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WormsimModel {
    /// Basic model when c = 1, i = 0, p = 1, characteristic otherwise.
    Auto = 0,
    Basic = 1,
    Characteristic = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WormsimScenario {
    FastPredator = 0,
    SlowPredator = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WormsimTraceFormat {
    Associations = 0,
    Encounters = 1,
}

/// Model and simulation parameters.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WormsimParams {
    /// Pairwise contact rate per second.
    pub beta: f64,
    pub n_total: u64,
    pub coop_frac: f64,
    pub immune_frac: f64,
    pub on_prob: f64,
    pub i_a0: u64,
    pub i_b0: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WormsimState {
    pub t: f64,
    pub s_star: f64,
    pub s_prime: f64,
    pub i_a: f64,
    pub i_b: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WormsimMetrics {
    pub ti: f64,
    pub mi: f64,
    pub tl: f64,
    pub al: f64,
    /// NaN when `ta_censored`.
    pub ta: f64,
    /// NaN when `tr_censored`.
    pub tr: f64,
    pub ti_rel: f64,
    pub mi_rel: f64,
    pub ta_censored: bool,
    pub tr_censored: bool,
    pub tl_censored: bool,
    pub al_undefined: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WormsimSummary {
    pub mean: f64,
    pub median: f64,
    pub std_dev: f64,
    pub count: u64,
}

/// Integrated model trajectory.
pub struct WormsimTrajectory {
    inner: Trajectory,
}

/// Per-round metrics of a simulation or replay batch.
pub struct WormsimBatch {
    rounds: Vec<RoundRecord>,
}

/// Loaded encounter trace with fast/slow predator seed plans.
pub struct WormsimTrace {
    trace: EncounterTrace,
    plans: Vec<SeedPlan>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(WormsimStatus, String);

impl From<WormError> for Failure {
    fn from(e: WormError) -> Self {
        let status = match &e {
            WormError::InvalidParameter { .. }
            | WormError::NotBasicModel
            | WormError::SeedPoolExhausted { .. }
            | WormError::SeedSelection(_)
            | WormError::Config(_) => WormsimStatus::InvalidParameter,
            WormError::UnstableStep { .. } | WormError::Diverged { .. } => WormsimStatus::Numerical,
            WormError::Io { .. } => WormsimStatus::Io,
            WormError::TooManyMalformed { .. } | WormError::Csv(_) | WormError::Json(_) => WormsimStatus::Parse,
            WormError::UnknownNode(_) => WormsimStatus::OutOfRange,
            _ => WormsimStatus::Other,
        };
        Failure(status, e.to_string())
    }
}

fn fail<T>(status: WormsimStatus, msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure(status, msg.into()))
}

/// Runs `f`, recording any error or panic.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> WormsimStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WormsimStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(format!("panic: {msg}"));
            WormsimStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().map_or_else(|| fail(WormsimStatus::NullPointer, format!("`{name}` is NULL")), Ok)
}

unsafe fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().map_or_else(|| fail(WormsimStatus::NullPointer, format!("`{name}` is NULL")), Ok)
}

fn to_usize(v: u64, name: &str) -> Result<usize, Failure> {
    usize::try_from(v).or_else(|_| fail(WormsimStatus::InvalidParameter, format!("`{name}` too large")))
}

impl WormsimParams {
    fn to_model(self) -> Result<ModelParams, Failure> {
        let p = ModelParams {
            beta: self.beta,
            n_total: to_usize(self.n_total, "n_total")?,
            coop_frac: self.coop_frac,
            immune_frac: self.immune_frac,
            on_prob: self.on_prob,
            i_a0: to_usize(self.i_a0, "i_a0")?,
            i_b0: to_usize(self.i_b0, "i_b0")?,
        };
        p.validate()?;
        Ok(p)
    }
}

impl From<&MetricSet> for WormsimMetrics {
    fn from(m: &MetricSet) -> Self {
        WormsimMetrics {
            ti: m.ti,
            mi: m.mi,
            tl: m.tl,
            al: m.al,
            ta: m.ta.unwrap_or(f64::NAN),
            tr: m.tr.unwrap_or(f64::NAN),
            ti_rel: m.ti_relative,
            mi_rel: m.mi_relative,
            ta_censored: m.ta.is_none(),
            tr_censored: m.tr.is_none(),
            tl_censored: m.tl_censored,
            al_undefined: m.al_undefined,
        }
    }
}

/// Last error on the calling thread, or NULL. Valid until the next failing
/// call on the same thread.
#[no_mangle]
pub extern "C" fn wormsim_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn wormsim_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Fully cooperative, non-immune, always-on parameters.
#[no_mangle]
pub extern "C" fn wormsim_params_basic(n_total: u64, beta: f64, i_a0: u64, i_b0: u64) -> WormsimParams {
    WormsimParams { beta, n_total, coop_frac: 1.0, immune_frac: 0.0, on_prob: 1.0, i_a0, i_b0 }
}

/// Closed-form time-to-infect-all of a single worm, (2 ln N + 0.5772) / (p N beta).
///
/// # Safety
/// `params` and `out` must be valid pointers or NULL.
#[no_mangle]
pub unsafe extern "C" fn wormsim_ta_closed_form(params: *const WormsimParams, out_value: *mut f64) -> WormsimStatus {
    guard(|| {
        let p = deref(params, "params")?.to_model()?;
        *out(out_value, "out_value")? = ta_closed_form(&p)?;
        Ok(())
    })
}

/// Integrates the continuum model with RK4. `step <= 0` and
/// `horizon <= 0` select the defaults.
///
/// # Safety
/// `params` must be valid or NULL; `out_trajectory` must be a valid
/// pointer to a handle slot or NULL.
#[no_mangle]
pub unsafe extern "C" fn wormsim_ode_integrate(
    params: *const WormsimParams,
    model: WormsimModel,
    step: f64,
    horizon: f64,
    out_trajectory: *mut *mut WormsimTrajectory,
) -> WormsimStatus {
    guard(|| {
        let slot = out(out_trajectory, "out_trajectory")?;
        *slot = ptr::null_mut();
        let p = deref(params, "params")?.to_model()?;
        let kind = match model {
            WormsimModel::Basic => ModelKind::Basic,
            WormsimModel::Characteristic => ModelKind::Characteristic,
            WormsimModel::Auto if p.is_basic() => ModelKind::Basic,
            WormsimModel::Auto => ModelKind::Characteristic,
        };
        let step = if step > 0.0 { step } else { default_step(&p) };
        let horizon = if horizon > 0.0 { horizon } else { default_horizon(&p) };
        let inner = integrate(&p, kind, step, horizon)?;
        *slot = Box::into_raw(Box::new(WormsimTrajectory { inner }));
        Ok(())
    })
}

/// Number of stored states (0 for NULL).
///
/// # Safety
/// `trajectory` must be a handle from this library or NULL.
#[no_mangle]
pub unsafe extern "C" fn wormsim_trajectory_len(trajectory: *const WormsimTrajectory) -> usize {
    trajectory.as_ref().map_or(0, |t| t.inner.states.len())
}

/// # Safety
/// `trajectory` must be a handle from this library or NULL; `out_state`
/// valid or NULL.
#[no_mangle]
pub unsafe extern "C" fn wormsim_trajectory_state(
    trajectory: *const WormsimTrajectory,
    index: usize,
    out_state: *mut WormsimState,
) -> WormsimStatus {
    guard(|| {
        let t = deref(trajectory, "trajectory")?;
        let o = out(out_state, "out_state")?;
        let Some(s) = t.inner.states.get(index) else {
            return fail(WormsimStatus::OutOfRange, format!("state {index} of {}", t.inner.states.len()));
        };
        *o = WormsimState { t: s.t, s_star: s.s_star, s_prime: s.s_prime, i_a: s.i_a, i_b: s.i_b };
        Ok(())
    })
}

/// The six metrics of a trajectory.
///
/// # Safety
/// `trajectory` must be a handle from this library or NULL; `out_metrics`
/// valid or NULL.
#[no_mangle]
pub unsafe extern "C" fn wormsim_trajectory_metrics(
    trajectory: *const WormsimTrajectory,
    out_metrics: *mut WormsimMetrics,
) -> WormsimStatus {
    guard(|| {
        let t = deref(trajectory, "trajectory")?;
        let o = out(out_metrics, "out_metrics")?;
        *o = (&model_metrics(&t.inner)?).into();
        Ok(())
    })
}

/// # Safety
/// `trajectory` must be a handle from this library (not yet freed) or NULL.
#[no_mangle]
pub unsafe extern "C" fn wormsim_trajectory_free(trajectory: *mut WormsimTrajectory) {
    if !trajectory.is_null() {
        drop(Box::from_raw(trajectory));
    }
}

/// Runs `rounds` uniform-encounter rounds in parallel. `horizon <= 0`
/// selects 20 closed-form infect-all times. Negative `prey_delay` injects
/// the predator first.
///
/// # Safety
/// `params` valid or NULL; `out_batch` a valid handle slot or NULL.
#[no_mangle]
pub unsafe extern "C" fn wormsim_simulate(
    params: *const WormsimParams,
    rounds: u64,
    master_seed: u64,
    horizon: f64,
    prey_delay: f64,
    out_batch: *mut *mut WormsimBatch,
) -> WormsimStatus {
    guard(|| {
        let slot = out(out_batch, "out_batch")?;
        *slot = ptr::null_mut();
        let p = deref(params, "params")?.to_model()?;
        if rounds == 0 {
            return fail(WormsimStatus::InvalidParameter, "rounds must be at least 1");
        }
        let horizon = if horizon > 0.0 { horizon } else { wormsim::experiment::sim_horizon(&p) };
        let template = RoundConfig { params: p, rng_seed: 0, prey_delay, horizon };
        let rounds = run_uniform_rounds(&template, to_usize(rounds, "rounds")?, master_seed);
        *slot = Box::into_raw(Box::new(WormsimBatch { rounds }));
        Ok(())
    })
}

/// # Safety
/// `batch` must be a handle from this library or NULL.
#[no_mangle]
pub unsafe extern "C" fn wormsim_batch_len(batch: *const WormsimBatch) -> usize {
    batch.as_ref().map_or(0, |b| b.rounds.len())
}

/// Metrics of one round; `WORMSIM_STATUS_UNAVAILABLE` if it failed.
///
/// # Safety
/// `batch` a handle from this library or NULL; `out_metrics` valid or NULL.
#[no_mangle]
pub unsafe extern "C" fn wormsim_batch_round(
    batch: *const WormsimBatch,
    index: usize,
    out_metrics: *mut WormsimMetrics,
) -> WormsimStatus {
    guard(|| {
        let b = deref(batch, "batch")?;
        let o = out(out_metrics, "out_metrics")?;
        let Some(r) = b.rounds.get(index) else {
            return fail(WormsimStatus::OutOfRange, format!("round {index} of {}", b.rounds.len()));
        };
        match &r.outcome {
            Ok(m) => {
                *o = m.into();
                Ok(())
            }
            Err(e) => fail(WormsimStatus::Unavailable, format!("round {index} failed: {e}")),
        }
    })
}

/// Statistics of one metric (`ti`, `mi`, `tl`, `al`, `ta`, `tr`, `ti_rel`,
/// `mi_rel`) over the successful rounds; TA/TR over uncensored rounds.
///
/// # Safety
/// `batch` a handle from this library or NULL; `metric` a NUL-terminated
/// string or NULL; `out_summary` valid or NULL.
#[no_mangle]
pub unsafe extern "C" fn wormsim_batch_summary(
    batch: *const WormsimBatch,
    metric: *const c_char,
    out_summary: *mut WormsimSummary,
) -> WormsimStatus {
    guard(|| {
        let b = deref(batch, "batch")?;
        if metric.is_null() {
            return fail(WormsimStatus::NullPointer, "`metric` is NULL");
        }
        let name = CStr::from_ptr(metric)
            .to_str()
            .or_else(|_| fail(WormsimStatus::InvalidParameter, "metric name is not UTF-8"))?;
        let o = out(out_summary, "out_summary")?;
        let ok: Vec<MetricSet> = b.rounds.iter().filter_map(|r| r.metrics().copied()).collect();
        if ok.is_empty() {
            return fail(WormsimStatus::Unavailable, "no successful rounds");
        }
        let agg = aggregate(&ok)?;
        if !wormsim::metrics::METRIC_NAMES.contains(&name) {
            return fail(WormsimStatus::InvalidParameter, format!("unknown metric `{name}`"));
        }
        let Some(s) = agg.get(name) else {
            return fail(WormsimStatus::Unavailable, format!("`{name}` censored in every round"));
        };
        *o = WormsimSummary { mean: s.mean, median: s.median, std_dev: s.std_dev, count: s.count as u64 };
        Ok(())
    })
}

/// # Safety
/// `batch` must be a handle from this library (not yet freed) or NULL.
#[no_mangle]
pub unsafe extern "C" fn wormsim_batch_free(batch: *mut WormsimBatch) {
    if !batch.is_null() {
        drop(Box::from_raw(batch));
    }
}

fn prepared(options: TraceOptions) -> Result<*mut WormsimTrace, Failure> {
    let p = prepare_trace(&options)?;
    Ok(Box::into_raw(Box::new(WormsimTrace { trace: p.trace, plans: p.plans })))
}

/// Loads a trace CSV and selects fast/slow predator seed groups
/// (3% of nodes each, default strata and arrival delay).
///
/// # Safety
/// `path` a NUL-terminated string or NULL; `out_trace` a valid handle slot
/// or NULL.
#[no_mangle]
pub unsafe extern "C" fn wormsim_trace_load(
    path: *const c_char,
    format: WormsimTraceFormat,
    out_trace: *mut *mut WormsimTrace,
) -> WormsimStatus {
    guard(|| {
        let slot = out(out_trace, "out_trace")?;
        *slot = ptr::null_mut();
        if path.is_null() {
            return fail(WormsimStatus::NullPointer, "`path` is NULL");
        }
        let path =
            CStr::from_ptr(path).to_str().or_else(|_| fail(WormsimStatus::InvalidParameter, "path is not UTF-8"))?;
        let format = match format {
            WormsimTraceFormat::Associations => TraceFormat::Associations,
            WormsimTraceFormat::Encounters => TraceFormat::Encounters,
        };
        *slot = prepared(TraceOptions { path: Some(path.into()), format, ..Default::default() })?;
        Ok(())
    })
}

/// Generates a synthetic heavy-tailed trace (see `SyntheticTraceConfig`).
///
/// # Safety
/// `out_trace` a valid handle slot or NULL.
#[no_mangle]
pub unsafe extern "C" fn wormsim_trace_synthetic(
    n_nodes: u64,
    duration: f64,
    skew: f64,
    mean_rate: f64,
    seed: u64,
    out_trace: *mut *mut WormsimTrace,
) -> WormsimStatus {
    guard(|| {
        let slot = out(out_trace, "out_trace")?;
        *slot = ptr::null_mut();
        let synthetic = SyntheticTraceConfig {
            n_nodes: to_usize(n_nodes, "n_nodes")?,
            duration,
            skew,
            mean_rate,
            seed,
            ..Default::default()
        };
        *slot = prepared(TraceOptions { synthetic: Some(synthetic), ..Default::default() })?;
        Ok(())
    })
}

/// # Safety
/// `trace` a handle from this library or NULL.
#[no_mangle]
pub unsafe extern "C" fn wormsim_trace_node_count(trace: *const WormsimTrace) -> usize {
    trace.as_ref().map_or(0, |t| t.trace.n_nodes())
}

/// # Safety
/// `trace` a handle from this library or NULL.
#[no_mangle]
pub unsafe extern "C" fn wormsim_trace_encounter_count(trace: *const WormsimTrace) -> usize {
    trace.as_ref().map_or(0, |t| t.trace.encounters().len())
}

/// Replays the trace `rounds` times under one seed scenario.
///
/// # Safety
/// `trace` a handle from this library or NULL; `out_batch` a valid handle
/// slot or NULL.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn wormsim_trace_replay(
    trace: *const WormsimTrace,
    scenario: WormsimScenario,
    coop_frac: f64,
    immune_frac: f64,
    on_prob: f64,
    rounds: u64,
    master_seed: u64,
    out_batch: *mut *mut WormsimBatch,
) -> WormsimStatus {
    guard(|| {
        let slot = out(out_batch, "out_batch")?;
        *slot = ptr::null_mut();
        let t = deref(trace, "trace")?;
        let want = match scenario {
            WormsimScenario::FastPredator => Scenario::FastPredator,
            WormsimScenario::SlowPredator => Scenario::SlowPredator,
        };
        let Some(plan) = t.plans.iter().find(|p| p.scenario == want) else {
            return fail(WormsimStatus::Other, "scenario missing from trace");
        };
        let config = ReplayConfig { coop_frac, immune_frac, on_prob };
        let rounds = run_rounds(to_usize(rounds, "rounds")?, master_seed, |s| replay_round(&t.trace, plan, &config, s));
        if let Some(e) = rounds.iter().find_map(|r| r.outcome.as_ref().err()) {
            if rounds.iter().all(|r| r.outcome.is_err()) {
                return fail(WormsimStatus::InvalidParameter, e.clone());
            }
        }
        *slot = Box::into_raw(Box::new(WormsimBatch { rounds }));
        Ok(())
    })
}

/// # Safety
/// `trace` must be a handle from this library (not yet freed) or NULL.
#[no_mangle]
pub unsafe extern "C" fn wormsim_trace_free(trace: *mut WormsimTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}
