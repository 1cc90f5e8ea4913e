use std::collections::BTreeSet;

use crate::graph::ReducedMatcher;
use crate::model::{AgentId, CategoryId, CategoryKind, Instance, Matching, UnreservedSplit};

use super::rr::rr_excluding;
use super::RuleError;

/// Smart reverse rejecting, with the unreserved split read from the
/// instance's early and late unreserved categories.
///
/// 1. Walk the baseline from the top. An agent takes an early unreserved
///    unit while units remain and the agents not yet holding one, minus this
///    agent, can still fill as many preferential units as everyone can.
/// 2. Reverse rejecting over the preferential categories among the rest.
/// 3. Late unreserved units go to the remaining unmatched agents in baseline
///    order.
pub fn srr(inst: &Instance) -> Result<Matching, RuleError> {
    if !inst.has_unreserved() {
        return Err(RuleError::MissingUnreserved);
    }
    let early = inst.category_of_kind(CategoryKind::UnreservedFirst);
    let late = inst.category_of_kind(CategoryKind::UnreservedLast);
    let preferential: Vec<CategoryId> = inst.preferential().collect();

    let mut early_set = BTreeSet::new();
    if let Some(c) = early {
        let quota = inst.quota(c);
        let mut matcher = ReducedMatcher::new(inst, &preferential);
        let best = matcher.size();
        for &a in inst.baseline() {
            if early_set.len() >= quota {
                break;
            }
            if matcher.try_remove(a, false, best) == best {
                early_set.insert(a);
            }
        }
    }

    let (mut matching, _) = rr_excluding(inst, &preferential, &early_set);
    if let Some(c) = early {
        for &a in &early_set {
            matching.assign(a, c);
        }
    }
    if let Some(c) = late {
        let unmatched: Vec<AgentId> = inst
            .baseline()
            .iter()
            .copied()
            .filter(|&a| !matching.is_matched(a))
            .take(inst.quota(c))
            .collect();
        for a in unmatched {
            matching.assign(a, c);
        }
    }
    Ok(matching)
}

/// Re-partitions the unreserved units per `split` and runs [`srr`]. The
/// returned matching refers to the returned instance.
pub fn srr_with_split(
    inst: &Instance,
    split: UnreservedSplit,
) -> Result<(Instance, Matching), RuleError> {
    if !inst.has_unreserved() {
        return Err(RuleError::MissingUnreserved);
    }
    let split_inst = inst.with_unreserved_split(split)?;
    let matching = srr(&split_inst)?;
    Ok((split_inst, matching))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rules::rr;

    #[test]
    fn late_split_matches_minimum_guarantees() {
        let inst = fixtures::reserve_comparison();
        let (split, m) = srr_with_split(&inst, UnreservedSplit::new(0, 1)).unwrap();
        assert_eq!(m.describe(&split), "{1→c, 2→c_u}");
    }

    #[test]
    fn early_split_matches_over_and_above() {
        let inst = fixtures::reserve_comparison();
        let (split, m) = srr_with_split(&inst, UnreservedSplit::new(1, 0)).unwrap();
        assert_eq!(m.describe(&split), "{1→c_u, 4→c}");
    }

    #[test]
    fn empty_pool_reduces_to_rr() {
        let mut doc =
            crate::model::InstanceDocument::from_instance(&fixtures::reserve_comparison());
        doc.categories
            .iter_mut()
            .find(|c| c.name == "c_u")
            .unwrap()
            .quota = 0;
        let inst = doc.resolve().unwrap();
        let m = srr(&inst).unwrap();
        let pref: Vec<_> = inst.preferential().collect();
        let (rr_m, _) = rr(&inst, &pref);
        assert_eq!(m.matched_agents(), rr_m.matched_agents());
    }

    #[test]
    fn missing_unreserved_is_an_error() {
        let inst = fixtures::rr_walkthrough();
        assert_eq!(srr(&inst), Err(RuleError::MissingUnreserved));
    }
}
