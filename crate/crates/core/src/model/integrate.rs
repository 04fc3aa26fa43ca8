use std::io::Write;

use log::warn;
use serde::{Deserialize, Serialize};

use super::ode::{derivatives_basic, derivatives_characteristic, Derivative, ModelKind, ModelState};
use super::params::ModelParams;
use super::EULER_GAMMA;
use crate::error::{Result, WormError};

/// beta * N * step above which a warning is logged.
const STABILITY_WARN: f64 = 0.01;
/// beta * N * step above which integration is refused.
const STABILITY_MAX: f64 = 0.1;
/// beta * N * step used by [`default_step`].
const DEFAULT_STEP_PRODUCT: f64 = 0.005;

/// Fixed-step solution of one of the model systems.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    pub step: f64,
    pub model: ModelKind,
    pub params: ModelParams,
    pub states: Vec<ModelState>,
}

impl Trajectory {
    pub fn initial(&self) -> &ModelState {
        &self.states[0]
    }

    pub fn last(&self) -> &ModelState {
        self.states.last().expect("trajectory is never empty")
    }

    /// CSV with header `t,s_star,s_prime,i_a,i_b`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for s in &self.states {
            w.serialize(s)?;
        }
        w.flush().map_err(|e| WormError::io("<trajectory>", e))?;
        Ok(())
    }
}

/// Step with beta * N * step = 0.005.
pub fn default_step(params: &ModelParams) -> f64 {
    let scale = params.beta * params.n_total as f64;
    if scale > 0.0 {
        DEFAULT_STEP_PRODUCT / scale
    } else {
        1.0
    }
}

/// Ten times the closed-form time-to-infect-all, long enough for every
/// paper-scale trajectory to settle.
pub fn default_horizon(params: &ModelParams) -> f64 {
    let n = params.n_total.max(2) as f64;
    let rate = params.contact_rate() * n;
    if rate > 0.0 {
        10.0 * (2.0 * n.ln() + EULER_GAMMA) / rate
    } else {
        1.0
    }
}

fn rhs(kind: ModelKind, state: &ModelState, params: &ModelParams) -> Result<Derivative> {
    match kind {
        ModelKind::Basic => derivatives_basic(state, params),
        ModelKind::Characteristic => Ok(derivatives_characteristic(state, params)),
    }
}

fn rk4_step(kind: ModelKind, y: &ModelState, h: f64, params: &ModelParams) -> Result<ModelState> {
    let k1 = rhs(kind, y, params)?;
    let k2 = rhs(kind, &y.advanced(&k1, h / 2.0), params)?;
    let k3 = rhs(kind, &y.advanced(&k2, h / 2.0), params)?;
    let k4 = rhs(kind, &y.advanced(&k3, h), params)?;
    let combine = |a: f64, b: f64, c: f64, d: f64| (a + 2.0 * b + 2.0 * c + d) / 6.0;
    let slope = Derivative {
        s_star: combine(k1.s_star, k2.s_star, k3.s_star, k4.s_star),
        s_prime: combine(k1.s_prime, k2.s_prime, k3.s_prime, k4.s_prime),
        i_a: combine(k1.i_a, k2.i_a, k3.i_a, k4.i_a),
        i_b: combine(k1.i_b, k2.i_b, k3.i_b, k4.i_b),
    };
    Ok(y.advanced(&slope, h))
}

/// Classical fourth-order Runge-Kutta from the seeded initial state.
///
/// Times are `k * step` for `k = 0..=ceil(horizon / step)`.
pub fn integrate(params: &ModelParams, model: ModelKind, step: f64, horizon: f64) -> Result<Trajectory> {
    params.validate()?;
    if model == ModelKind::Basic && !params.is_basic() {
        return Err(WormError::NotBasicModel);
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(WormError::param("step", format!("{step} must be positive")));
    }
    if !(horizon >= step && horizon.is_finite()) {
        return Err(WormError::param("horizon", format!("{horizon} must be >= step {step}")));
    }
    let n = params.n_total as f64;
    let product = params.beta * n * step;
    if product > STABILITY_MAX {
        return Err(WormError::UnstableStep { step, product });
    }
    if product > STABILITY_WARN {
        warn!("beta*N*step = {product:.4} > {STABILITY_WARN}; RK4 accuracy may suffer");
    }

    let steps = (horizon / step).ceil() as usize;
    let floor = -1e-6 * n;
    let mut states = Vec::with_capacity(steps + 1);
    let mut y = params.initial_state();
    states.push(y);
    for k in 1..=steps {
        y = rk4_step(model, &y, step, params)?;
        y.t = k as f64 * step;
        for (name, v) in [("s_star", y.s_star), ("s_prime", y.s_prime), ("i_a", y.i_a), ("i_b", y.i_b)] {
            if !(v >= floor) {
                return Err(WormError::Diverged { t: y.t, compartment: name, value: v });
            }
        }
        states.push(y);
    }
    Ok(Trajectory { step, model, params: *params, states })
}
