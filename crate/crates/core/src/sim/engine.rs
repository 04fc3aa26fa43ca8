use rand::Rng;
use serde::{Deserialize, Serialize};

use super::encounter::{generate_uniform_encounters, EncounterEvent};
use super::node::{assign_profiles, Compartment, NodeProfile, NodeState, Role};
use crate::error::{Result, WormError};
use crate::model::ModelParams;
use crate::rng::{stream, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransitionCause {
    Seed,
    PreyInfection,
    Vaccination,
    Termination,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub time: f64,
    pub node: usize,
    pub from: Compartment,
    pub to: Compartment,
    pub cause: TransitionCause,
}

/// Complete state-transition history of one round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventLog {
    /// Compartment of every node at t = 0, from its profile. Seeds show the
    /// compartment they leave at injection.
    pub initial: Vec<Compartment>,
    pub transitions: Vec<Transition>,
    /// Configured end of observation. Prey still alive at the end are
    /// truncated here.
    pub horizon: f64,
    /// When the run actually stopped: the horizon, or the time the
    /// population became absorbing.
    pub ended_at: f64,
}

impl EventLog {
    pub fn n_nodes(&self) -> usize {
        self.initial.len()
    }

    /// Compartment counts after every transition with time <= `t`, indexed
    /// like [`Compartment`] variants.
    pub fn counts_at(&self, t: f64) -> [usize; 5] {
        let mut state = self.initial.clone();
        for tr in self.transitions.iter().take_while(|tr| tr.time <= t) {
            state[tr.node] = tr.to;
        }
        let mut counts = [0; 5];
        for c in state {
            counts[c as usize] += 1;
        }
        counts
    }
}

/// One uniform-encounter round.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundConfig {
    pub params: ModelParams,
    pub rng_seed: u64,
    /// Signed seed arrival offset. Negative: the predator seed is injected
    /// |prey_delay| seconds before the prey seed; positive: the prey first.
    #[serde(default)]
    pub prey_delay: f64,
    pub horizon: f64,
}

impl RoundConfig {
    /// Each encounter grants exactly one transmission opportunity.
    pub const TRANSMISSION_TRIALS_PER_ENCOUNTER: u32 = 1;

    pub fn new(params: ModelParams, rng_seed: u64, horizon: f64) -> Self {
        RoundConfig { params, rng_seed, prey_delay: 0.0, horizon }
    }

    /// Injection times (predator, prey).
    pub fn injection_times(&self) -> (f64, f64) {
        (self.prey_delay.max(0.0), (-self.prey_delay).max(0.0))
    }
}

/// Live node states of a round. Seeds are inert until injected.
#[derive(Debug, Clone)]
pub struct Population {
    profiles: Vec<NodeProfile>,
    states: Vec<NodeState>,
    active: Vec<bool>,
    counts: [usize; 5],
    pending: usize,
    last_time: f64,
}

impl Population {
    pub fn new(profiles: Vec<NodeProfile>) -> Self {
        let states: Vec<NodeState> = profiles.iter().map(|p| NodeState::new(p.initial_compartment())).collect();
        let active: Vec<bool> = profiles.iter().map(|p| p.role == Role::None).collect();
        let mut counts = [0; 5];
        for (s, &a) in states.iter().zip(&active) {
            if a {
                counts[s.compartment as usize] += 1;
            }
        }
        let pending = active.iter().filter(|a| !**a).count();
        Population { profiles, states, active, counts, pending, last_time: 0.0 }
    }

    pub fn profiles(&self) -> &[NodeProfile] {
        &self.profiles
    }

    pub fn states(&self) -> &[NodeState] {
        &self.states
    }

    pub fn initial_compartments(&self) -> Vec<Compartment> {
        self.profiles.iter().map(NodeProfile::initial_compartment).collect()
    }

    /// Active nodes in `c`.
    pub fn count(&self, c: Compartment) -> usize {
        self.counts[c as usize]
    }

    /// No pending seeds and no pair that could still change state.
    pub fn is_absorbed(&self) -> bool {
        use Compartment::*;
        let (s, im, a, b) = (
            self.count(Susceptible),
            self.count(ImmuneSusceptible),
            self.count(PreyInfected),
            self.count(PredatorInfected),
        );
        let possible = (b > 0 && s + im + a > 0) || (a > 0 && s > 0);
        self.pending == 0 && !possible
    }

    fn advance_clock(&mut self, time: f64) -> Result<()> {
        if time < self.last_time {
            return Err(WormError::OutOfOrder { time, previous: self.last_time });
        }
        self.last_time = time;
        Ok(())
    }

    fn set(&mut self, node: usize, to: Compartment, time: f64, cause: TransitionCause) -> Transition {
        let from = self.states[node].compartment;
        debug_assert!(from.can_become(to), "{from:?} -> {to:?}");
        self.counts[from as usize] -= 1;
        self.counts[to as usize] += 1;
        let state = &mut self.states[node];
        state.compartment = to;
        match to {
            Compartment::PreyInfected => state.infected_at = Some(time),
            Compartment::PredatorInfected if from == Compartment::PreyInfected => state.removed_at = Some(time),
            _ => {}
        }
        Transition { time, node, from, to, cause }
    }

    /// Activates a seed node in the compartment matching its role.
    pub fn inject(&mut self, node: usize, time: f64) -> Result<Transition> {
        self.advance_clock(time)?;
        let profile = *self.profiles.get(node).ok_or(WormError::UnknownNode(node))?;
        let to = match profile.role {
            Role::PreySeed => Compartment::PreyInfected,
            Role::PredatorSeed => Compartment::PredatorInfected,
            Role::None => {
                return Err(WormError::SeedSelection(format!("node {node} is not a seed")));
            }
        };
        if self.active[node] {
            return Err(WormError::SeedSelection(format!("seed {node} injected twice")));
        }
        self.active[node] = true;
        self.pending -= 1;
        self.counts[self.states[node].compartment as usize] += 1;
        Ok(self.set(node, to, time, TransitionCause::Seed))
    }

    /// Applies one encounter. See [`apply_encounter`].
    pub fn apply<R: Rng + ?Sized>(
        &mut self,
        event: &EncounterEvent,
        on_prob: f64,
        rng: &mut R,
    ) -> Result<Option<Transition>> {
        use Compartment::*;
        let (u, v) = (event.node_u, event.node_v);
        let n = self.states.len();
        for node in [u, v] {
            if node >= n {
                return Err(WormError::UnknownNode(node));
            }
        }
        if u == v {
            return Err(WormError::param("encounter", format!("self-encounter of node {u}")));
        }
        self.advance_clock(event.time)?;
        if !(self.profiles[u].cooperative && self.profiles[v].cooperative) {
            return Ok(None);
        }
        if !(self.active[u] && self.active[v]) {
            return Ok(None);
        }
        // One on-off trial per link, so the effective contact rate is p * beta.
        if !rng.random_bool(on_prob) {
            return Ok(None);
        }
        let (cu, cv) = (self.states[u].compartment, self.states[v].compartment);
        let change = match (cu, cv) {
            (PredatorInfected, PreyInfected) => Some((v, PredatorInfected, TransitionCause::Termination)),
            (PreyInfected, PredatorInfected) => Some((u, PredatorInfected, TransitionCause::Termination)),
            (PredatorInfected, Susceptible | ImmuneSusceptible) => {
                Some((v, PredatorInfected, TransitionCause::Vaccination))
            }
            (Susceptible | ImmuneSusceptible, PredatorInfected) => {
                Some((u, PredatorInfected, TransitionCause::Vaccination))
            }
            (PreyInfected, Susceptible) => Some((v, PreyInfected, TransitionCause::PreyInfection)),
            (Susceptible, PreyInfected) => Some((u, PreyInfected, TransitionCause::PreyInfection)),
            _ => None,
        };
        Ok(change.map(|(node, to, cause)| self.set(node, to, event.time, cause)))
    }
}

/// Applies one encounter to the population: at most one state change.
///
/// Encounters with a non-cooperative or not-yet-injected endpoint are
/// no-ops. Otherwise a single Bernoulli(`on_prob`) trial decides whether the
/// link is on; if it is, the predator terminates prey or vaccinates
/// susceptibles (immune or not), and prey infect non-immune susceptibles.
pub fn apply_encounter<R: Rng + ?Sized>(
    event: &EncounterEvent,
    population: &mut Population,
    on_prob: f64,
    rng: &mut R,
) -> Result<Option<Transition>> {
    population.apply(event, on_prob, rng)
}

/// Drives a population through time-ordered encounters with scheduled seed
/// injections until the horizon or absorption.
pub(crate) fn drive<I, R>(
    mut population: Population,
    mut injections: Vec<(f64, usize)>,
    encounters: I,
    on_prob: f64,
    horizon: f64,
    rng: &mut R,
) -> Result<EventLog>
where
    I: IntoIterator<Item = EncounterEvent>,
    R: Rng + ?Sized,
{
    let initial = population.initial_compartments();
    injections.retain(|(t, _)| *t <= horizon);
    injections.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut injections = injections.into_iter().peekable();
    let mut transitions = Vec::new();

    let mut ended_at = horizon;
    let mut absorbed = population.is_absorbed() && injections.peek().is_none();
    if absorbed {
        ended_at = 0.0;
    }
    let mut events = encounters.into_iter();
    while !absorbed {
        let next = events.next().filter(|e| e.time <= horizon);
        let cutoff = next.as_ref().map_or(horizon, |e| e.time);
        while let Some(&(t, node)) = injections.peek() {
            if t > cutoff {
                break;
            }
            injections.next();
            transitions.push(population.inject(node, t)?);
            if population.is_absorbed() {
                absorbed = true;
                ended_at = t;
                break;
            }
        }
        if absorbed {
            break;
        }
        let Some(event) = next else { break };
        if let Some(tr) = population.apply(&event, on_prob, rng)? {
            transitions.push(tr);
            if population.is_absorbed() {
                absorbed = true;
                ended_at = event.time;
            }
        }
    }
    Ok(EventLog { initial, transitions, horizon, ended_at })
}

/// Runs one round over the given time-ordered encounters.
///
/// Profiles and seeds are sampled from `config.rng_seed`: floor(cN)
/// cooperative nodes, floor(i floor(cN)) of them immune, seeds drawn
/// uniformly and forced cooperative and non-immune.
pub fn run_round<I>(config: &RoundConfig, encounters: I) -> Result<EventLog>
where
    I: IntoIterator<Item = EncounterEvent>,
{
    let params = &config.params;
    if !(config.horizon > 0.0) {
        return Err(WormError::param("horizon", "must be positive"));
    }
    if !(0.0..=1.0).contains(&params.on_prob) {
        return Err(WormError::param("on_prob", format!("{} outside [0, 1]", params.on_prob)));
    }
    let n = params.n_total;
    let seeds = params.i_a0 + params.i_b0;
    if seeds > n {
        return Err(WormError::SeedPoolExhausted { available: n, requested: seeds });
    }
    let mut rng = stream(config.rng_seed, Stream::Profiles);
    let chosen = rand::seq::index::sample(&mut rng, n, seeds).into_vec();
    let (prey, predator) = chosen.split_at(params.i_a0);
    let profiles = assign_profiles(n, params.cooperative_count(), params.immune_count(), prey, predator, &mut rng)?;
    let (t_pred, t_prey) = config.injection_times();
    let injections: Vec<(f64, usize)> =
        prey.iter().map(|&k| (t_prey, k)).chain(predator.iter().map(|&k| (t_pred, k))).collect();
    let mut activity = stream(config.rng_seed, Stream::Activity);
    drive(Population::new(profiles), injections, encounters, params.on_prob, config.horizon, &mut activity)
}

/// One round over freshly generated uniform encounters.
pub fn simulate_uniform_round(config: &RoundConfig) -> Result<EventLog> {
    let encounters =
        generate_uniform_encounters(&config.params, stream(config.rng_seed, Stream::Encounters), config.horizon)?;
    run_round(config, encounters)
}
