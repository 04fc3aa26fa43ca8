use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WormError};

/// Seeding role of a node in a round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    None,
    PreySeed,
    PredatorSeed,
}

/// Static characteristics of a node for one round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeProfile {
    pub node_id: usize,
    pub cooperative: bool,
    /// Immune to the prey. Only cooperative nodes can be immune.
    pub immune: bool,
    pub role: Role,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Compartment {
    Susceptible,
    ImmuneSusceptible,
    PreyInfected,
    PredatorInfected,
    NonCooperative,
}

impl Compartment {
    /// The aggressive one-sided transition graph with node characteristics.
    pub fn can_become(self, to: Compartment) -> bool {
        use Compartment::*;
        matches!(
            (self, to),
            (Susceptible, PreyInfected)
                | (Susceptible, PredatorInfected)
                | (ImmuneSusceptible, PredatorInfected)
                | (PreyInfected, PredatorInfected)
        )
    }
}

impl NodeProfile {
    pub fn initial_compartment(&self) -> Compartment {
        match (self.cooperative, self.immune) {
            (false, _) => Compartment::NonCooperative,
            (true, true) => Compartment::ImmuneSusceptible,
            (true, false) => Compartment::Susceptible,
        }
    }
}

/// Dynamic state of a node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeState {
    pub compartment: Compartment,
    /// When the node became prey-infected.
    pub infected_at: Option<f64>,
    /// When the prey was terminated on this node.
    pub removed_at: Option<f64>,
}

impl NodeState {
    pub fn new(compartment: Compartment) -> Self {
        NodeState { compartment, infected_at: None, removed_at: None }
    }
}

/// Assigns cooperation, immunity and seed roles.
///
/// The listed seeds are always cooperative and non-immune. The remaining
/// `cooperative - seeds` cooperative nodes are drawn uniformly from the other
/// nodes, then `immune` of the cooperative non-seed nodes are made immune.
pub fn assign_profiles<R: Rng + ?Sized>(
    n_nodes: usize,
    cooperative: usize,
    immune: usize,
    prey_seeds: &[usize],
    predator_seeds: &[usize],
    rng: &mut R,
) -> Result<Vec<NodeProfile>> {
    let seeds = prey_seeds.len() + predator_seeds.len();
    let available = cooperative.saturating_sub(immune);
    if seeds > available || cooperative > n_nodes {
        return Err(WormError::SeedPoolExhausted { available, requested: seeds });
    }
    let mut profiles: Vec<NodeProfile> = (0..n_nodes)
        .map(|node_id| NodeProfile { node_id, cooperative: false, immune: false, role: Role::None })
        .collect();
    for (&node, role) in
        prey_seeds.iter().map(|n| (n, Role::PreySeed)).chain(predator_seeds.iter().map(|n| (n, Role::PredatorSeed)))
    {
        let p = profiles.get_mut(node).ok_or(WormError::UnknownNode(node))?;
        if p.role != Role::None {
            return Err(WormError::SeedSelection(format!("node {node} seeded twice")));
        }
        p.role = role;
        p.cooperative = true;
    }

    let mut others: Vec<usize> = (0..n_nodes).filter(|&k| profiles[k].role == Role::None).collect();
    others.shuffle(rng);
    let extra = &others[..cooperative - seeds];
    for &k in extra {
        profiles[k].cooperative = true;
    }
    // `extra` is already a uniform random order, so its prefix is a uniform subset.
    for &k in &extra[..immune] {
        profiles[k].immune = true;
    }
    Ok(profiles)
}
