use serde::{Deserialize, Serialize};

use super::ode::ModelState;
use crate::error::{Result, WormError};

/// Parameters shared by the continuum model and the encounter simulator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Pairwise contact rate, per second per node pair.
    pub beta: f64,
    /// Total node count N.
    pub n_total: usize,
    /// Fraction c of N willing to cooperate (forward worms).
    #[serde(default = "one")]
    pub coop_frac: f64,
    /// Fraction i of cooperative nodes immune to the prey.
    #[serde(default)]
    pub immune_frac: f64,
    /// Probability p that a link is "on" during an encounter.
    #[serde(default = "one")]
    pub on_prob: f64,
    /// Initial prey infectives I_A(0).
    pub i_a0: usize,
    /// Initial predator infectives I_B(0).
    pub i_b0: usize,
}

fn one() -> f64 {
    1.0
}

// Products like 0.29 * 100 land a hair below the integer.
fn floor_count(x: f64) -> usize {
    (x + 1e-9).floor().max(0.0) as usize
}

impl ModelParams {
    /// Fully cooperative, non-immune, always-on population.
    pub fn basic(n_total: usize, beta: f64, i_a0: usize, i_b0: usize) -> Self {
        ModelParams { beta, n_total, coop_frac: 1.0, immune_frac: 0.0, on_prob: 1.0, i_a0, i_b0 }
    }

    pub fn with_characteristics(mut self, coop_frac: f64, immune_frac: f64, on_prob: f64) -> Self {
        self.coop_frac = coop_frac;
        self.immune_frac = immune_frac;
        self.on_prob = on_prob;
        self
    }

    pub fn is_basic(&self) -> bool {
        self.coop_frac == 1.0 && self.immune_frac == 0.0 && self.on_prob == 1.0
    }

    /// Range checks plus the continuum seeding rule: both seeds come out of
    /// the cooperative non-immune pool.
    pub fn validate(&self) -> Result<()> {
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(WormError::param("beta", format!("{} is not a finite rate >= 0", self.beta)));
        }
        for (name, v) in [("coop_frac", self.coop_frac), ("immune_frac", self.immune_frac), ("on_prob", self.on_prob)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(WormError::param(name, format!("{v} outside [0, 1]")));
            }
        }
        if self.n_total == 0 {
            return Err(WormError::param("n_total", "must be positive"));
        }
        let pool = self.susceptible_mass();
        let seeds = (self.i_a0 + self.i_b0) as f64;
        if seeds > pool + 1e-9 {
            return Err(WormError::param(
                "i_a0 + i_b0",
                format!("{seeds} seeds exceed the cooperative non-immune pool {pool}"),
            ));
        }
        Ok(())
    }

    /// Contact rate seen by both worms, p * beta.
    pub fn contact_rate(&self) -> f64 {
        self.on_prob * self.beta
    }

    /// c * N, the population the compartments live in.
    pub fn cooperative_mass(&self) -> f64 {
        self.coop_frac * self.n_total as f64
    }

    /// N* = c (1 - i) N.
    pub fn susceptible_mass(&self) -> f64 {
        self.coop_frac * (1.0 - self.immune_frac) * self.n_total as f64
    }

    /// Continuum initial state: S*(0) = c(1-i)N - I_A(0) - I_B(0), S'(0) = c i N.
    pub fn initial_state(&self) -> ModelState {
        let n = self.n_total as f64;
        ModelState {
            t: 0.0,
            s_star: self.susceptible_mass() - self.i_a0 as f64 - self.i_b0 as f64,
            s_prime: self.coop_frac * self.immune_frac * n,
            i_a: self.i_a0 as f64,
            i_b: self.i_b0 as f64,
        }
    }

    /// Integer cooperative node count floor(cN) used by the simulator.
    pub fn cooperative_count(&self) -> usize {
        floor_count(self.coop_frac * self.n_total as f64).min(self.n_total)
    }

    /// Integer immune node count floor(i * floor(cN)).
    pub fn immune_count(&self) -> usize {
        floor_count(self.immune_frac * self.cooperative_count() as f64)
    }

    /// Cooperative non-immune node count (seeds included).
    pub fn susceptible_count(&self) -> usize {
        self.cooperative_count() - self.immune_count()
    }

    /// Largest predator-to-prey seeding ratio that still leaves one
    /// susceptible: floor((N* - I_A(0) - 1) / I_A(0)).
    pub fn y_max(&self) -> usize {
        if self.i_a0 == 0 {
            return 0;
        }
        self.susceptible_count().saturating_sub(self.i_a0 + 1) / self.i_a0
    }

    /// Sets I_B(0) = Y * I_A(0).
    pub fn with_y(mut self, y: usize) -> Self {
        self.i_b0 = y * self.i_a0;
        self
    }
}
