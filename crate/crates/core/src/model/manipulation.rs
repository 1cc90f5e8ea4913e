//! Unilateral priority decreases, the report changes strategyproofness and
//! weak non-bossiness quantify over.

use std::collections::HashSet;

use super::{AgentId, CategoryId, Instance, ModelError, PriorityRanking};

/// What an agent does to its position in one category's ranking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Edit {
    Unchanged,
    /// Leave the ranking, which ties the agent with the empty outcome and
    /// makes it ineligible.
    Hide,
    /// Join an existing lower tier, by index in the original ranking.
    DemoteToTier(usize),
    /// Form a new singleton tier directly below the given original tier.
    /// The new tier is eligible only if the tier after `t` was.
    DemoteBelowTier(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Manipulation {
    pub agent: AgentId,
    /// One edit per category, in category order.
    pub edits: Vec<Edit>,
}

#[derive(Debug, Clone)]
pub struct ManipulatedInstance {
    pub manipulation: Manipulation,
    pub instance: Instance,
}

impl Manipulation {
    pub fn identity(agent: AgentId, num_categories: usize) -> Self {
        Self {
            agent,
            edits: vec![Edit::Unchanged; num_categories],
        }
    }

    pub fn hide(agent: AgentId, categories: &[CategoryId], num_categories: usize) -> Self {
        let mut m = Self::identity(agent, num_categories);
        for c in categories {
            m.edits[c.0] = Edit::Hide;
        }
        m
    }

    pub fn single(agent: AgentId, category: CategoryId, edit: Edit, num_categories: usize) -> Self {
        let mut m = Self::identity(agent, num_categories);
        m.edits[category.0] = edit;
        m
    }

    /// Applies the edits, refusing any that would raise the agent anywhere.
    pub fn apply(&self, inst: &Instance) -> Result<Instance, ModelError> {
        if self.edits.len() != inst.num_categories() {
            return Err(ModelError::EditCount {
                expected: inst.num_categories(),
                got: self.edits.len(),
            });
        }
        if self.agent.0 >= inst.num_agents() {
            return Err(ModelError::AgentOutOfRange(self.agent));
        }
        let mut out = inst.clone();
        for (c, &edit) in self.edits.iter().enumerate() {
            if edit == Edit::Unchanged {
                continue;
            }
            let cat = inst.category(CategoryId(c));
            if cat.kind.is_unreserved() {
                return Err(ModelError::EditsUnreserved(cat.name.clone()));
            }
            let ranking = edit_ranking(&cat.priority, self.agent, edit, &cat.name)?;
            out = out.with_priority(CategoryId(c), ranking)?;
        }
        if !is_priority_decrease(inst, &out, self.agent) {
            let category = self
                .edits
                .iter()
                .position(|&e| e != Edit::Unchanged)
                .map(|c| inst.category(CategoryId(c)).name.clone())
                .unwrap_or_default();
            return Err(ModelError::RaisesPriority {
                agent: self.agent,
                category,
            });
        }
        Ok(out)
    }
}

fn edit_ranking(
    ranking: &PriorityRanking,
    agent: AgentId,
    edit: Edit,
    name: &str,
) -> Result<PriorityRanking, ModelError> {
    let tiers = ranking.tiers();
    let cutoff = ranking.cutoff();
    let target = match edit {
        Edit::DemoteToTier(t) | Edit::DemoteBelowTier(t) => Some(t),
        _ => None,
    };
    if let Some(t) = target {
        if t >= tiers.len() {
            return Err(ModelError::TierOutOfRange {
                category: name.to_string(),
                tier: t,
                tiers: tiers.len(),
            });
        }
    }

    let mut entries: Vec<(Vec<AgentId>, bool)> = Vec::with_capacity(tiers.len() + 1);
    for (k, tier) in tiers.iter().enumerate() {
        let mut members: Vec<AgentId> = tier.iter().copied().filter(|&a| a != agent).collect();
        if edit == Edit::DemoteToTier(k) {
            members.push(agent);
        }
        entries.push((members, k < cutoff));
        if edit == Edit::DemoteBelowTier(k) {
            entries.push((vec![agent], k + 1 < cutoff));
        }
    }
    entries.retain(|(members, _)| !members.is_empty());
    let new_cutoff = entries.iter().filter(|(_, eligible)| *eligible).count();
    PriorityRanking::new(entries.into_iter().map(|(m, _)| m).collect(), new_cutoff)
}

/// Whether `after` differs from `before` only by a (weak) decrease of
/// `agent`'s priority: relations among everyone else, the empty outcome
/// included, are unchanged, and nobody who weakly (strictly) beat `agent`
/// stops weakly (strictly) beating it.
pub fn is_priority_decrease(before: &Instance, after: &Instance, agent: AgentId) -> bool {
    if before.agent_names() != after.agent_names()
        || before.baseline() != after.baseline()
        || before.num_categories() != after.num_categories()
    {
        return false;
    }
    let others: Vec<Option<AgentId>> = before
        .agents()
        .filter(|&a| a != agent)
        .map(Some)
        .chain(std::iter::once(None))
        .collect();
    for c in before.category_ids() {
        let (x, y) = (before.category(c), after.category(c));
        if x.name != y.name || x.kind != y.kind || x.quota != y.quota {
            return false;
        }
        let key = |inst: &Instance, s: Option<AgentId>| match s {
            Some(a) => inst.key(c, a),
            None => inst.empty_key(c),
        };
        for &j in &others {
            let (bj, aj) = (key(before, j), key(after, j));
            for &k in &others {
                if (bj <= key(before, k)) != (aj <= key(after, k)) {
                    return false;
                }
            }
            let (bi, ai) = (key(before, Some(agent)), key(after, Some(agent)));
            if bj <= bi && aj > ai {
                return false;
            }
            if bj < bi && aj >= ai {
                return false;
            }
        }
    }
    true
}

/// Priority decreases of `agent` used by the manipulation harnesses.
///
/// First every way of hiding a non-empty subset of the preferential
/// categories the agent is eligible for (subsets in increasing bitmask
/// order), then up to `budget` single-category demotions: splitting off
/// below the agent's own tier and joining or slotting below each lower tier.
/// Unreserved categories are never edited; their rankings are pinned to the
/// baseline. Results are pairwise distinct and differ from `inst`.
pub fn enumerate_priority_decreases(
    inst: &Instance,
    agent: AgentId,
    budget: usize,
) -> Vec<ManipulatedInstance> {
    let n_cat = inst.num_categories();
    let eligible: Vec<CategoryId> = inst
        .preferential()
        .filter(|&c| inst.eligible(agent, c))
        .collect();
    let mut out = Vec::new();
    let mut seen: HashSet<Vec<PriorityRanking>> = HashSet::new();
    seen.insert(rankings(inst));
    let mut push = |m: Manipulation, out: &mut Vec<ManipulatedInstance>| {
        if let Ok(instance) = m.apply(inst) {
            if seen.insert(rankings(&instance)) {
                out.push(ManipulatedInstance {
                    manipulation: m,
                    instance,
                });
                return true;
            }
        }
        false
    };

    for mask in 1u64..(1u64 << eligible.len()) {
        let subset: Vec<CategoryId> = eligible
            .iter()
            .enumerate()
            .filter(|(b, _)| mask >> b & 1 == 1)
            .map(|(_, &c)| c)
            .collect();
        push(Manipulation::hide(agent, &subset, n_cat), &mut out);
    }

    let mut demotions = 0;
    'outer: for c in inst.preferential() {
        let ranking = &inst.category(c).priority;
        let Some(current) = ranking.tier_of(agent) else {
            continue;
        };
        let mut edits = vec![Edit::DemoteBelowTier(current)];
        for t in current + 1..ranking.tiers().len() {
            edits.push(Edit::DemoteToTier(t));
            edits.push(Edit::DemoteBelowTier(t));
        }
        for edit in edits {
            if demotions >= budget {
                break 'outer;
            }
            if push(Manipulation::single(agent, c, edit, n_cat), &mut out) {
                demotions += 1;
            }
        }
    }
    out
}

fn rankings(inst: &Instance) -> Vec<PriorityRanking> {
    inst.categories()
        .iter()
        .map(|c| c.priority.clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn cat(inst: &Instance, name: &str) -> CategoryId {
        inst.category_by_name(name).unwrap()
    }

    fn agent(inst: &Instance, name: &str) -> AgentId {
        inst.agent_by_name(name).unwrap()
    }

    #[test]
    fn hiding_removes_eligibility() {
        let inst = fixtures::running_example();
        let c1 = cat(&inst, "c1");
        let m = Manipulation::hide(agent(&inst, "3"), &[c1], 2);
        let out = m.apply(&inst).unwrap();
        let eligible: Vec<_> = out.eligible_agents(c1).collect();
        assert_eq!(eligible, vec![agent(&inst, "2")]);
    }

    #[test]
    fn identity_is_noop() {
        let inst = fixtures::running_example();
        let out = Manipulation::identity(AgentId(1), 2).apply(&inst).unwrap();
        assert_eq!(out, inst);
    }

    #[test]
    fn hiding_promotes_lower_agent_to_second_class() {
        let inst = fixtures::rr_walkthrough();
        let c1 = cat(&inst, "c1");
        let out = Manipulation::hide(agent(&inst, "4"), &[c1], 2)
            .apply(&inst)
            .unwrap();
        assert_eq!(
            out.category(c1).priority.tier_of(agent(&inst, "2")),
            Some(1)
        );
        assert!(!out.eligible(agent(&inst, "4"), c1));
    }

    #[test]
    fn raising_is_rejected() {
        let inst = fixtures::rr_walkthrough();
        let c1 = cat(&inst, "c1");
        // agent 2 sits in tier 2 of c1; tier 0 is above it
        let m = Manipulation::single(agent(&inst, "2"), c1, Edit::DemoteToTier(0), 2);
        assert!(matches!(
            m.apply(&inst),
            Err(ModelError::RaisesPriority { .. })
        ));
        let m = Manipulation::single(agent(&inst, "2"), c1, Edit::DemoteToTier(9), 2);
        assert!(matches!(
            m.apply(&inst),
            Err(ModelError::TierOutOfRange { .. })
        ));
    }

    #[test]
    fn unreserved_edits_are_rejected() {
        let inst = fixtures::reserve_comparison();
        let cu = cat(&inst, "c_u");
        let m = Manipulation::hide(AgentId(0), &[cu], inst.num_categories());
        assert!(matches!(
            m.apply(&inst),
            Err(ModelError::EditsUnreserved(_))
        ));
    }

    #[test]
    fn demotion_joins_lower_tier() {
        let inst = fixtures::rr_walkthrough();
        let c1 = cat(&inst, "c1");
        let a1 = agent(&inst, "1");
        let out = Manipulation::single(a1, c1, Edit::DemoteToTier(1), 2)
            .apply(&inst)
            .unwrap();
        let a4 = agent(&inst, "4");
        assert!(!out.strictly_prefers(c1, Some(a1), Some(a4)));
        assert!(!out.strictly_prefers(c1, Some(a4), Some(a1)));
        assert!(is_priority_decrease(&inst, &out, a1));
        assert!(!is_priority_decrease(&out, &inst, a1));
    }

    #[test]
    fn enumeration_counts() {
        let inst = fixtures::running_example();
        let two = enumerate_priority_decreases(&inst, agent(&inst, "2"), 0);
        assert_eq!(two.len(), 3);
        // agent 1 is listed only below the cutoff; with no budget nothing remains
        assert!(enumerate_priority_decreases(&inst, agent(&inst, "1"), 0).is_empty());
        let with_demotions = enumerate_priority_decreases(&inst, agent(&inst, "2"), 50);
        assert!(with_demotions.len() > 3);
        for m in &with_demotions {
            assert!(is_priority_decrease(&inst, &m.instance, agent(&inst, "2")));
            assert_ne!(m.instance, inst);
        }
    }

    #[test]
    fn enumeration_includes_remark_manipulation() {
        let inst = fixtures::rr_walkthrough();
        let a4 = agent(&inst, "4");
        let target = Manipulation::hide(a4, &[cat(&inst, "c1")], 2)
            .apply(&inst)
            .unwrap();
        let all = enumerate_priority_decreases(&inst, a4, 0);
        assert!(all.iter().any(|m| m.instance == target));
    }

    #[test]
    fn budget_caps_demotions() {
        let inst = fixtures::rr_walkthrough();
        let a1 = agent(&inst, "1");
        let hides = enumerate_priority_decreases(&inst, a1, 0).len();
        assert_eq!(hides, 3);
        assert_eq!(enumerate_priority_decreases(&inst, a1, 2).len(), hides + 2);
    }
}
