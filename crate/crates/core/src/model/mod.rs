//! Rationing instances, priority rankings, matchings and priority decreases.

mod document;
mod manipulation;
mod matching;
mod ranking;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use document::{
    parse_instance, CategoryDocument, InstanceDocument, KindDocument, SplitDocument,
};
pub use manipulation::{
    enumerate_priority_decreases, is_priority_decrease, Edit, ManipulatedInstance, Manipulation,
};
pub use matching::Matching;
pub use ranking::PriorityRanking;

use ranking::{empty_key, tier_key};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AgentId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CategoryId(pub usize);

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

impl fmt::Display for CategoryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

/// Preferential categories carry their own priorities. Unreserved units are
/// split into a pool handed out before the preferential units and a pool
/// handed out after them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CategoryKind {
    Preferential,
    UnreservedFirst,
    UnreservedLast,
}

impl CategoryKind {
    pub fn is_unreserved(self) -> bool {
        !matches!(self, CategoryKind::Preferential)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Category {
    pub name: String,
    pub kind: CategoryKind,
    pub quota: usize,
    pub priority: PriorityRanking,
}

/// Capacities of the early and late unreserved pools.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnreservedSplit {
    pub first: usize,
    pub last: usize,
}

impl UnreservedSplit {
    pub fn new(first: usize, last: usize) -> Self {
        Self { first, last }
    }

    pub fn total(&self) -> usize {
        self.first + self.last
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("unknown category `{0}`")]
    UnknownCategory(String),
    #[error("duplicate agent name `{0}`")]
    DuplicateAgentName(String),
    #[error("duplicate category name `{0}`")]
    DuplicateCategoryName(String),
    #[error("agent {0} appears twice in one ranking")]
    DuplicateInRanking(AgentId),
    #[error("empty tier in priority ranking")]
    EmptyTier,
    #[error("cutoff {cutoff} exceeds tier count {tiers}")]
    InvalidCutoff { cutoff: usize, tiers: usize },
    #[error("agent id {0} out of range")]
    AgentOutOfRange(AgentId),
    #[error("category id {0} out of range")]
    CategoryOutOfRange(CategoryId),
    #[error("baseline is not a permutation of the agents")]
    BaselineNotPermutation,
    #[error("unreserved category `{0}` must rank every agent eligible in baseline order")]
    UnreservedPriority(String),
    #[error("at most one unreserved category of each kind is allowed")]
    TooManyUnreserved,
    #[error("instance has no unreserved category")]
    NoUnreserved,
    #[error("split {first}+{last} does not match {total} unreserved units")]
    SplitMismatch {
        first: usize,
        last: usize,
        total: usize,
    },
    #[error("manipulation edits {got} categories, instance has {expected}")]
    EditCount { expected: usize, got: usize },
    #[error("manipulation would raise agent {agent} in category `{category}`")]
    RaisesPriority { agent: AgentId, category: String },
    #[error("edit targets tier {tier} in category `{category}` which has {tiers} tiers")]
    TierOutOfRange {
        category: String,
        tier: usize,
        tiers: usize,
    },
    #[error("manipulation edits unreserved category `{0}`")]
    EditsUnreserved(String),
    #[error("matching assigns {load} agents to `{category}` with quota {quota}")]
    QuotaExceeded {
        category: String,
        load: usize,
        quota: usize,
    },
}

/// A validated rationing instance.
///
/// Besides the categories and the baseline ordering the instance caches, for
/// every category, an integer position key per agent so that priority
/// comparisons are O(1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    agent_names: Vec<String>,
    categories: Vec<Category>,
    baseline: Vec<AgentId>,
    baseline_pos: Vec<usize>,
    keys: Vec<Vec<u32>>,
}

impl Instance {
    pub fn new(
        agent_names: Vec<String>,
        categories: Vec<Category>,
        baseline: Vec<AgentId>,
    ) -> Result<Self, ModelError> {
        let n = agent_names.len();
        let mut seen = std::collections::HashSet::new();
        for name in &agent_names {
            if !seen.insert(name.as_str()) {
                return Err(ModelError::DuplicateAgentName(name.clone()));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for c in &categories {
            if !seen.insert(c.name.as_str()) {
                return Err(ModelError::DuplicateCategoryName(c.name.clone()));
            }
        }

        let mut baseline_pos = vec![usize::MAX; n];
        if baseline.len() != n {
            return Err(ModelError::BaselineNotPermutation);
        }
        for (pos, &a) in baseline.iter().enumerate() {
            if a.0 >= n || baseline_pos[a.0] != usize::MAX {
                return Err(ModelError::BaselineNotPermutation);
            }
            baseline_pos[a.0] = pos;
        }

        let firsts = categories
            .iter()
            .filter(|c| c.kind == CategoryKind::UnreservedFirst)
            .count();
        let lasts = categories
            .iter()
            .filter(|c| c.kind == CategoryKind::UnreservedLast)
            .count();
        if firsts > 1 || lasts > 1 {
            return Err(ModelError::TooManyUnreserved);
        }

        let mut keys = Vec::with_capacity(categories.len());
        for c in &categories {
            let cutoff = c.priority.cutoff();
            let mut row = vec![empty_key(cutoff); n];
            for (t, tier) in c.priority.tiers().iter().enumerate() {
                for &a in tier {
                    if a.0 >= n {
                        return Err(ModelError::AgentOutOfRange(a));
                    }
                    row[a.0] = tier_key(t, cutoff);
                }
            }
            if c.kind.is_unreserved() {
                let follows_baseline = c.priority.cutoff() == n
                    && c.priority.tiers().len() == n
                    && c.priority
                        .tiers()
                        .iter()
                        .zip(&baseline)
                        .all(|(tier, &a)| tier.as_slice() == [a]);
                if !follows_baseline {
                    return Err(ModelError::UnreservedPriority(c.name.clone()));
                }
            }
            keys.push(row);
        }

        Ok(Self {
            agent_names,
            categories,
            baseline,
            baseline_pos,
            keys,
        })
    }

    /// Instance with agents named by their 1-based index.
    pub fn with_numbered_agents(
        n: usize,
        categories: Vec<Category>,
        baseline: Vec<AgentId>,
    ) -> Result<Self, ModelError> {
        let names = (1..=n).map(|i| i.to_string()).collect();
        Self::new(names, categories, baseline)
    }

    pub fn num_agents(&self) -> usize {
        self.agent_names.len()
    }

    pub fn num_categories(&self) -> usize {
        self.categories.len()
    }

    pub fn agents(&self) -> impl Iterator<Item = AgentId> {
        (0..self.num_agents()).map(AgentId)
    }

    pub fn category_ids(&self) -> impl Iterator<Item = CategoryId> {
        (0..self.num_categories()).map(CategoryId)
    }

    pub fn categories(&self) -> &[Category] {
        &self.categories
    }

    pub fn category(&self, c: CategoryId) -> &Category {
        &self.categories[c.0]
    }

    pub fn quota(&self, c: CategoryId) -> usize {
        self.categories[c.0].quota
    }

    pub fn agent_name(&self, a: AgentId) -> &str {
        &self.agent_names[a.0]
    }

    pub fn agent_names(&self) -> &[String] {
        &self.agent_names
    }

    pub fn agent_by_name(&self, name: &str) -> Option<AgentId> {
        self.agent_names.iter().position(|n| n == name).map(AgentId)
    }

    pub fn category_by_name(&self, name: &str) -> Option<CategoryId> {
        self.categories
            .iter()
            .position(|c| c.name == name)
            .map(CategoryId)
    }

    /// Agents from highest to lowest baseline priority.
    pub fn baseline(&self) -> &[AgentId] {
        &self.baseline
    }

    /// 0 for the agent with the highest baseline priority.
    pub fn baseline_position(&self, a: AgentId) -> usize {
        self.baseline_pos[a.0]
    }

    /// `a ≻_π b` in the baseline ordering.
    pub fn baseline_prefers(&self, a: AgentId, b: AgentId) -> bool {
        self.baseline_pos[a.0] < self.baseline_pos[b.0]
    }

    pub(crate) fn key(&self, c: CategoryId, a: AgentId) -> u32 {
        self.keys[c.0][a.0]
    }

    pub(crate) fn empty_key(&self, c: CategoryId) -> u32 {
        empty_key(self.categories[c.0].priority.cutoff())
    }

    /// `a ≻_c b`, where `None` stands for the empty outcome.
    pub fn strictly_prefers(&self, c: CategoryId, a: Option<AgentId>, b: Option<AgentId>) -> bool {
        let key = |s: Option<AgentId>| match s {
            Some(a) => self.key(c, a),
            None => self.empty_key(c),
        };
        key(a) < key(b)
    }

    pub fn eligible(&self, a: AgentId, c: CategoryId) -> bool {
        self.key(c, a) < self.empty_key(c)
    }

    pub fn eligible_agents(&self, c: CategoryId) -> impl Iterator<Item = AgentId> + '_ {
        self.agents().filter(move |&a| self.eligible(a, c))
    }

    pub fn preferential(&self) -> impl Iterator<Item = CategoryId> + '_ {
        self.category_ids()
            .filter(|&c| self.category(c).kind == CategoryKind::Preferential)
    }

    pub fn unreserved(&self) -> impl Iterator<Item = CategoryId> + '_ {
        self.category_ids()
            .filter(|&c| self.category(c).kind.is_unreserved())
    }

    pub fn category_of_kind(&self, kind: CategoryKind) -> Option<CategoryId> {
        self.category_ids().find(|&c| self.category(c).kind == kind)
    }

    pub fn has_unreserved(&self) -> bool {
        self.unreserved().next().is_some()
    }

    /// Total unreserved units across both pools.
    pub fn unreserved_quota(&self) -> usize {
        self.unreserved().map(|c| self.quota(c)).sum()
    }

    /// The split currently encoded by the unreserved categories.
    pub fn unreserved_split(&self) -> UnreservedSplit {
        let q = |kind| self.category_of_kind(kind).map_or(0, |c| self.quota(c));
        UnreservedSplit::new(
            q(CategoryKind::UnreservedFirst),
            q(CategoryKind::UnreservedLast),
        )
    }

    /// Re-partitions the unreserved units into an early and a late pool.
    ///
    /// The unreserved categories are replaced by at most two categories
    /// appended after all preferential ones. When only one pool is non-empty
    /// it keeps the base name; when both are, they are named `base^1` and
    /// `base^2`. With no unreserved units at all a single empty late pool
    /// remains, so the instance still designates an unreserved category.
    pub fn with_unreserved_split(&self, split: UnreservedSplit) -> Result<Self, ModelError> {
        let total = self.unreserved_quota();
        let base = self
            .unreserved()
            .next()
            .map(|c| base_name(&self.category(c).name).to_string())
            .ok_or(ModelError::NoUnreserved)?;
        if split.total() != total {
            return Err(ModelError::SplitMismatch {
                first: split.first,
                last: split.last,
                total,
            });
        }
        let mut categories: Vec<Category> = self
            .categories
            .iter()
            .filter(|c| !c.kind.is_unreserved())
            .cloned()
            .collect();
        let priority = PriorityRanking::strict(&self.baseline);
        let both = split.first > 0 && split.last > 0;
        let name = |suffix: &str| {
            if both {
                format!("{base}{suffix}")
            } else {
                base.clone()
            }
        };
        if split.first > 0 {
            categories.push(Category {
                name: name("^1"),
                kind: CategoryKind::UnreservedFirst,
                quota: split.first,
                priority: priority.clone(),
            });
        }
        if split.last > 0 || split.first == 0 {
            categories.push(Category {
                name: name("^2"),
                kind: CategoryKind::UnreservedLast,
                quota: split.last,
                priority,
            });
        }
        Self::new(self.agent_names.clone(), categories, self.baseline.clone())
    }

    /// Same instance under another baseline ordering. Unreserved rankings
    /// follow the new baseline.
    pub fn with_baseline(&self, baseline: Vec<AgentId>) -> Result<Self, ModelError> {
        let categories = self
            .categories
            .iter()
            .map(|c| {
                let mut c = c.clone();
                if c.kind.is_unreserved() {
                    c.priority = PriorityRanking::strict(&baseline);
                }
                c
            })
            .collect();
        Self::new(self.agent_names.clone(), categories, baseline)
    }

    pub(crate) fn with_priority(
        &self,
        c: CategoryId,
        priority: PriorityRanking,
    ) -> Result<Self, ModelError> {
        let mut categories = self.categories.clone();
        categories[c.0].priority = priority;
        Self::new(self.agent_names.clone(), categories, self.baseline.clone())
    }
}

fn base_name(name: &str) -> &str {
    name.strip_suffix("^1")
        .or_else(|| name.strip_suffix("^2"))
        .unwrap_or(name)
}
