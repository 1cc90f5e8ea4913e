//! The structured instance document: agents and categories referenced by
//! name, resolved into a dense-id [`Instance`].

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{
    AgentId, Category, CategoryKind, Instance, ModelError, PriorityRanking, UnreservedSplit,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub agents: Vec<String>,
    /// Highest priority first.
    pub baseline: Vec<String>,
    pub categories: Vec<CategoryDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unreserved_split: Option<SplitDocument>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategoryDocument {
    pub name: String,
    pub quota: usize,
    pub kind: KindDocument,
    /// May be left empty for unreserved categories, which always follow the
    /// baseline.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tiers: Vec<Vec<String>>,
    /// Defaults to the number of tiers (every listed agent eligible).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindDocument {
    Preferential,
    /// A single unreserved pool, allocated last unless `unreserved_split`
    /// says otherwise.
    Unreserved,
    UnreservedFirst,
    UnreservedLast,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitDocument {
    pub first: usize,
    pub last: usize,
}

impl From<SplitDocument> for UnreservedSplit {
    fn from(s: SplitDocument) -> Self {
        UnreservedSplit::new(s.first, s.last)
    }
}

impl From<UnreservedSplit> for SplitDocument {
    fn from(s: UnreservedSplit) -> Self {
        SplitDocument {
            first: s.first,
            last: s.last,
        }
    }
}

/// Parses a UTF-8 JSON instance document and validates it.
pub fn parse_instance(bytes: &[u8]) -> Result<Instance, ModelError> {
    let text = std::str::from_utf8(bytes).map_err(|e| ModelError::Syntax(e.to_string()))?;
    let doc: InstanceDocument =
        serde_json::from_str(text).map_err(|e| ModelError::Syntax(e.to_string()))?;
    doc.resolve()
}

impl InstanceDocument {
    pub fn resolve(&self) -> Result<Instance, ModelError> {
        let mut index = HashMap::new();
        for (i, name) in self.agents.iter().enumerate() {
            if index.insert(name.as_str(), AgentId(i)).is_some() {
                return Err(ModelError::DuplicateAgentName(name.clone()));
            }
        }
        let lookup = |name: &String| {
            index
                .get(name.as_str())
                .copied()
                .ok_or_else(|| ModelError::UnknownAgent(name.clone()))
        };
        let baseline = self
            .baseline
            .iter()
            .map(lookup)
            .collect::<Result<Vec<_>, _>>()?;

        let mut preferential = Vec::new();
        let mut unreserved = Vec::new();
        for c in &self.categories {
            let kind = match c.kind {
                KindDocument::Preferential => CategoryKind::Preferential,
                KindDocument::UnreservedFirst => CategoryKind::UnreservedFirst,
                KindDocument::Unreserved | KindDocument::UnreservedLast => {
                    CategoryKind::UnreservedLast
                }
            };
            let tiers = c
                .tiers
                .iter()
                .map(|t| t.iter().map(lookup).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            let priority = if kind.is_unreserved() && tiers.is_empty() {
                if baseline.len() != self.agents.len() {
                    return Err(ModelError::BaselineNotPermutation);
                }
                PriorityRanking::strict(&baseline)
            } else {
                let cutoff = c.cutoff.unwrap_or(tiers.len());
                PriorityRanking::new(tiers, cutoff)?
            };
            let category = Category {
                name: c.name.clone(),
                kind,
                quota: c.quota,
                priority,
            };
            if kind.is_unreserved() {
                unreserved.push(category);
            } else {
                preferential.push(category);
            }
        }
        unreserved.sort_by_key(|c| c.kind == CategoryKind::UnreservedLast);
        preferential.extend(unreserved);

        let inst = Instance::new(self.agents.clone(), preferential, baseline)?;
        match self.unreserved_split {
            Some(split) => inst.with_unreserved_split(split.into()),
            None => Ok(inst),
        }
    }

    pub fn from_instance(inst: &Instance) -> Self {
        let name = |a: &AgentId| inst.agent_name(*a).to_string();
        let categories = inst
            .categories()
            .iter()
            .map(|c| {
                let (kind, tiers, cutoff) = match c.kind {
                    CategoryKind::Preferential => (
                        KindDocument::Preferential,
                        c.priority
                            .tiers()
                            .iter()
                            .map(|t| t.iter().map(name).collect())
                            .collect(),
                        Some(c.priority.cutoff()),
                    ),
                    CategoryKind::UnreservedFirst => {
                        (KindDocument::UnreservedFirst, Vec::new(), None)
                    }
                    CategoryKind::UnreservedLast => {
                        (KindDocument::UnreservedLast, Vec::new(), None)
                    }
                };
                CategoryDocument {
                    name: c.name.clone(),
                    quota: c.quota,
                    kind,
                    tiers,
                    cutoff,
                }
            })
            .collect();
        Self {
            agents: inst.agent_names().to_vec(),
            baseline: inst.baseline().iter().map(name).collect(),
            categories,
            unreserved_split: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance documents always serialize")
    }
}
