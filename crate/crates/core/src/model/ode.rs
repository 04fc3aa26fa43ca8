use serde::{Deserialize, Serialize};

use super::params::ModelParams;
use crate::error::{Result, WormError};

/// Which system of equations to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// Fully cooperative, susceptible, always-on population (S, I_A, I_B).
    Basic,
    /// Cooperation, prey immunity and on-off behavior (S*, S', I_A, I_B).
    Characteristic,
}

/// Continuum state. In the basic model `s_prime` stays 0 and `s_star` is S.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelState {
    pub t: f64,
    pub s_star: f64,
    pub s_prime: f64,
    pub i_a: f64,
    pub i_b: f64,
}

/// Time derivative of the four compartments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative {
    pub s_star: f64,
    pub s_prime: f64,
    pub i_a: f64,
    pub i_b: f64,
}

impl ModelState {
    pub fn total(&self) -> f64 {
        self.s_star + self.s_prime + self.i_a + self.i_b
    }

    pub(crate) fn advanced(&self, d: &Derivative, h: f64) -> ModelState {
        ModelState {
            t: self.t + h,
            s_star: self.s_star + h * d.s_star,
            s_prime: self.s_prime + h * d.s_prime,
            i_a: self.i_a + h * d.i_a,
            i_b: self.i_b + h * d.i_b,
        }
    }
}

impl Derivative {
    pub fn sum(&self) -> f64 {
        self.s_star + self.s_prime + self.i_a + self.i_b
    }
}

/// Right-hand side of the basic aggressive one-sided model:
///
/// ```text
/// dS/dt   = -beta S (I_A + I_B)
/// dI_A/dt =  beta I_A (S - I_B)
/// dI_B/dt =  beta (S I_B + I_A I_B)
/// ```
pub fn derivatives_basic(state: &ModelState, params: &ModelParams) -> Result<Derivative> {
    if !params.is_basic() {
        return Err(WormError::NotBasicModel);
    }
    let beta = params.beta;
    let s = state.s_star;
    Ok(Derivative {
        s_star: -beta * s * (state.i_a + state.i_b),
        s_prime: 0.0,
        i_a: beta * state.i_a * (s - state.i_b),
        i_b: beta * (s * state.i_b + state.i_a * state.i_b),
    })
}

/// Right-hand side with node characteristics. Only the product p * beta
/// enters; non-cooperative nodes never appear.
pub fn derivatives_characteristic(state: &ModelState, params: &ModelParams) -> Derivative {
    let rate = params.on_prob * params.beta;
    let (s_star, s_prime, i_a, i_b) = (state.s_star, state.s_prime, state.i_a, state.i_b);
    Derivative {
        s_star: -rate * s_star * (i_a + i_b),
        s_prime: -rate * s_prime * i_b,
        i_a: rate * i_a * (s_star - i_b),
        i_b: rate * ((s_star + s_prime) * i_b + i_a * i_b),
    }
}
