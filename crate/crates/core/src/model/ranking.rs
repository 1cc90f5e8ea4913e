use std::collections::HashSet;

use super::{AgentId, ModelError};

/// A weak priority ranking over agents with an eligibility cutoff.
///
/// Tiers are listed highest priority first. Agents in tiers before `cutoff`
/// rank strictly above the empty outcome and are eligible; agents in tiers at
/// or after it rank strictly below it. Agents that appear in no tier are tied
/// with the empty outcome, which also makes them ineligible.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PriorityRanking {
    tiers: Vec<Vec<AgentId>>,
    cutoff: usize,
}

impl PriorityRanking {
    pub fn new(tiers: Vec<Vec<AgentId>>, cutoff: usize) -> Result<Self, ModelError> {
        if cutoff > tiers.len() {
            return Err(ModelError::InvalidCutoff {
                cutoff,
                tiers: tiers.len(),
            });
        }
        let mut seen = HashSet::new();
        for tier in &tiers {
            if tier.is_empty() {
                return Err(ModelError::EmptyTier);
            }
            for &agent in tier {
                if !seen.insert(agent) {
                    return Err(ModelError::DuplicateInRanking(agent));
                }
            }
        }
        Ok(Self { tiers, cutoff })
    }

    /// A strict ranking with every listed agent eligible.
    pub fn strict(order: &[AgentId]) -> Self {
        Self {
            tiers: order.iter().map(|&a| vec![a]).collect(),
            cutoff: order.len(),
        }
    }

    pub fn tiers(&self) -> &[Vec<AgentId>] {
        &self.tiers
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn tier_of(&self, agent: AgentId) -> Option<usize> {
        self.tiers.iter().position(|tier| tier.contains(&agent))
    }

    /// Agents ranked above the empty outcome, highest tier first.
    pub fn eligible_agents(&self) -> impl Iterator<Item = AgentId> + '_ {
        self.tiers[..self.cutoff].iter().flatten().copied()
    }

    /// Position key of an agent (`Some`) or of the empty outcome (`None`).
    /// Smaller keys rank higher; equal keys are tied.
    pub fn key(&self, slot: Option<AgentId>) -> u32 {
        match slot.and_then(|a| self.tier_of(a)) {
            Some(t) => tier_key(t, self.cutoff),
            None => empty_key(self.cutoff),
        }
    }

    /// `a ≻ b` in this ranking, where `None` stands for the empty outcome.
    pub fn strictly_prefers(&self, a: Option<AgentId>, b: Option<AgentId>) -> bool {
        self.key(a) < self.key(b)
    }

    pub fn is_eligible(&self, agent: AgentId) -> bool {
        self.strictly_prefers(Some(agent), None)
    }
}

pub(crate) fn tier_key(tier: usize, cutoff: usize) -> u32 {
    let doubled = 2 * tier as u32;
    if tier < cutoff {
        doubled
    } else {
        doubled + 1
    }
}

pub(crate) fn empty_key(cutoff: usize) -> u32 {
    2 * cutoff as u32
}
