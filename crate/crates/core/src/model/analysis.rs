use super::integrate::Trajectory;
use super::ode::ModelKind;
use super::params::ModelParams;
use super::EULER_GAMMA;
use crate::error::{Result, WormError};
use crate::metrics::MetricSet;

/// Continuum stand-ins for "no prey left" and "everyone reached".
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelThresholds {
    /// Prey are considered removed once I_A drops below this.
    pub removal: f64,
    /// All cooperative nodes are considered predator-infected once
    /// c N - I_B drops below this.
    pub saturation: f64,
}

impl Default for ModelThresholds {
    fn default() -> Self {
        ModelThresholds { removal: 0.5, saturation: 0.5 }
    }
}

/// Metrics of a continuum trajectory with the default half-node thresholds.
pub fn model_metrics(traj: &Trajectory) -> Result<MetricSet> {
    model_metrics_with(traj, ModelThresholds::default())
}

/// Metrics of a continuum trajectory.
///
/// TI counts the seeds plus the integrated prey inflow p beta S* I_A
/// (trapezoidal). TL is the left Riemann sum of I_A up to TR. Time metrics
/// that are not reached inside the trajectory are `None`.
pub fn model_metrics_with(traj: &Trajectory, thresholds: ModelThresholds) -> Result<MetricSet> {
    let params = &traj.params;
    let rate = params.contact_rate();
    let h = traj.step;
    let states = &traj.states;
    let first = traj.initial();

    let inflow = |i: usize| rate * states[i].s_star * states[i].i_a;
    let integral: f64 = (1..states.len()).map(|k| 0.5 * h * (inflow(k - 1) + inflow(k))).sum();
    let ti = first.i_a + integral;
    let mi = states.iter().map(|s| s.i_a).fold(f64::NEG_INFINITY, f64::max);

    let tr_index = states.iter().position(|s| s.i_a < thresholds.removal);
    let tr = tr_index.map(|k| states[k].t);
    let cooperative = params.cooperative_mass();
    let ta = states.iter().find(|s| cooperative - s.i_b < thresholds.saturation).map(|s| s.t);

    let tl_end = tr_index.unwrap_or(states.len());
    let tl: f64 = states[..tl_end].iter().map(|s| s.i_a * h).sum();
    let (al, al_undefined) = if ti > 0.0 { (tl / ti, false) } else { (0.0, true) };

    let n_star = params.susceptible_mass();
    let relative = |x: f64| if n_star > 0.0 { x / n_star } else { 0.0 };
    let metrics = MetricSet {
        ti,
        mi,
        tl,
        al,
        ta,
        tr,
        ti_relative: relative(ti),
        mi_relative: relative(mi),
        tl_censored: tr_index.is_none(),
        al_undefined,
    };
    check_ordering(&metrics, first.i_a, params.n_total as f64)?;
    Ok(metrics)
}

fn check_ordering(m: &MetricSet, i_a0: f64, n: f64) -> Result<()> {
    let tol = 1e-9 * n.max(1.0);
    if m.mi + tol < i_a0 || m.mi > m.ti + tol {
        return Err(WormError::MetricOrdering(format!(
            "expected I_A(0) <= MI <= TI, got {i_a0} / {} / {}",
            m.mi, m.ti
        )));
    }
    if m.ti >= 1.0 && m.al > m.tl * (1.0 + 1e-12) {
        return Err(WormError::MetricOrdering(format!("AL {} > TL {}", m.al, m.tl)));
    }
    if let (Some(tr), Some(ta)) = (m.tr, m.ta) {
        if tr > ta {
            return Err(WormError::MetricOrdering(format!("TR {tr} > TA {ta}")));
        }
    }
    Ok(())
}

/// Mean time for a single message (or worm) to reach every node under
/// uniform encounters: (2 ln N + 0.5772) / (p N beta).
pub fn ta_closed_form(params: &ModelParams) -> Result<f64> {
    if params.n_total < 2 {
        return Err(WormError::param("n_total", "closed form needs N >= 2"));
    }
    if !(params.beta > 0.0) {
        return Err(WormError::param("beta", "closed form needs beta > 0"));
    }
    if !(params.on_prob > 0.0) {
        return Err(WormError::param("on_prob", "closed form needs p > 0"));
    }
    let n = params.n_total as f64;
    Ok((2.0 * n.ln() + EULER_GAMMA) / (params.on_prob * n * params.beta))
}

/// Predator seeding at which the prey cannot grow at t = 0: the initial
/// susceptible S(0) (basic) or S*(0) (with characteristics), never negative.
pub fn suppression_threshold(params: &ModelParams, model: ModelKind) -> Result<f64> {
    if model == ModelKind::Basic && !params.is_basic() {
        return Err(WormError::NotBasicModel);
    }
    Ok(params.initial_state().s_star.max(0.0))
}
