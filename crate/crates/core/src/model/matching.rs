use std::collections::{BTreeMap, BTreeSet};

use super::{AgentId, CategoryId, Instance, ModelError};

/// Partial assignment of agents to categories.
///
/// Ordered by its sorted `(agent, category)` pairs, which doubles as the
/// canonical form used when comparing sets of matchings.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Matching {
    assignment: BTreeMap<AgentId, CategoryId>,
}

impl Matching {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (AgentId, CategoryId)>) -> Self {
        Self {
            assignment: pairs.into_iter().collect(),
        }
    }

    pub fn assign(&mut self, agent: AgentId, category: CategoryId) {
        self.assignment.insert(agent, category);
    }

    pub fn unassign(&mut self, agent: AgentId) -> Option<CategoryId> {
        self.assignment.remove(&agent)
    }

    pub fn get(&self, agent: AgentId) -> Option<CategoryId> {
        self.assignment.get(&agent).copied()
    }

    pub fn is_matched(&self, agent: AgentId) -> bool {
        self.assignment.contains_key(&agent)
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Pairs in canonical (agent-sorted) order.
    pub fn pairs(&self) -> impl Iterator<Item = (AgentId, CategoryId)> + '_ {
        self.assignment.iter().map(|(&a, &c)| (a, c))
    }

    pub fn matched_agents(&self) -> BTreeSet<AgentId> {
        self.assignment.keys().copied().collect()
    }

    pub fn load(&self, c: CategoryId) -> usize {
        self.assignment.values().filter(|&&x| x == c).count()
    }

    pub fn loads(&self, num_categories: usize) -> Vec<usize> {
        let mut loads = vec![0; num_categories];
        for &c in self.assignment.values() {
            if c.0 < num_categories {
                loads[c.0] += 1;
            }
        }
        loads
    }

    /// Checks ids and quotas against `inst`.
    pub fn validate(&self, inst: &Instance) -> Result<(), ModelError> {
        for (a, c) in self.pairs() {
            if a.0 >= inst.num_agents() {
                return Err(ModelError::AgentOutOfRange(a));
            }
            if c.0 >= inst.num_categories() {
                return Err(ModelError::CategoryOutOfRange(c));
            }
        }
        for (c, load) in self.loads(inst.num_categories()).into_iter().enumerate() {
            let cat = inst.category(CategoryId(c));
            if load > cat.quota {
                return Err(ModelError::QuotaExceeded {
                    category: cat.name.clone(),
                    load,
                    quota: cat.quota,
                });
            }
        }
        Ok(())
    }

    /// Human-readable `{agent→category, ...}` using instance names.
    pub fn describe(&self, inst: &Instance) -> String {
        let parts: Vec<String> = self
            .pairs()
            .map(|(a, c)| format!("{}→{}", inst.agent_name(a), inst.category(c).name))
            .collect();
        format!("{{{}}}", parts.join(", "))
    }
}

impl FromIterator<(AgentId, CategoryId)> for Matching {
    fn from_iter<T: IntoIterator<Item = (AgentId, CategoryId)>>(iter: T) -> Self {
        Self::from_pairs(iter)
    }
}
