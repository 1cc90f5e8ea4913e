use std::collections::BTreeSet;

use crate::graph::{max_matching, reduced_graph, ReducedMatcher};
use crate::model::{AgentId, CategoryId, Instance, Matching};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RrDecision {
    pub agent: AgentId,
    pub rejected: bool,
    /// Maximum matching size of the reduced graph with this agent rejected.
    pub ms: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RrTrace {
    pub rejected: BTreeSet<AgentId>,
    /// In scan order, lowest baseline priority first.
    pub decisions: Vec<RrDecision>,
    pub ms_total: usize,
}

/// Reverse rejecting over all categories.
pub fn rr_all(inst: &Instance) -> (Matching, RrTrace) {
    let cats: Vec<CategoryId> = inst.category_ids().collect();
    rr(inst, &cats)
}

/// Reverse rejecting over `cats`.
///
/// Agents are scanned from the lowest baseline priority up. An agent is
/// rejected iff the reduced graph with it added to the rejected set still
/// has a matching as large as the full reservation graph. The result is a
/// maximum matching of the final reduced graph, which matches every agent
/// that was not rejected.
pub fn rr(inst: &Instance, cats: &[CategoryId]) -> (Matching, RrTrace) {
    rr_excluding(inst, cats, &BTreeSet::new())
}

/// Reverse rejecting among the agents outside `excluded`. Excluded agents
/// are neither matched nor rejected: they take no units and remove no edges.
pub fn rr_excluding(
    inst: &Instance,
    cats: &[CategoryId],
    excluded: &BTreeSet<AgentId>,
) -> (Matching, RrTrace) {
    let mut matcher = ReducedMatcher::new(inst, cats);
    for &a in excluded {
        matcher.exclude(a);
    }
    let target = matcher.size();

    let mut rejected = BTreeSet::new();
    let mut decisions = Vec::new();
    for &a in inst.baseline().iter().rev() {
        if excluded.contains(&a) {
            continue;
        }
        let ms = matcher.try_remove(a, true, target);
        let is_rejected = ms == target;
        if is_rejected {
            rejected.insert(a);
        }
        decisions.push(RrDecision {
            agent: a,
            rejected: is_rejected,
            ms,
        });
    }

    let graph = reduced_graph(inst, cats, &rejected).without_agents(excluded);
    let matching = max_matching(&graph);
    debug_assert_eq!(matching.len(), target);
    debug_assert!(inst
        .agents()
        .filter(|a| !rejected.contains(a) && !excluded.contains(a))
        .all(|a| matching.is_matched(a)));

    (
        matching,
        RrTrace {
            rejected,
            decisions,
            ms_total: target,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::generate::{generate, GenParams};
    use crate::graph::{max_matching_size, reservation_graph};
    use proptest::prelude::*;

    /// Recomputes every tested maximum from scratch on an explicit graph.
    fn rr_by_recomputation(
        inst: &Instance,
        cats: &[CategoryId],
    ) -> (BTreeSet<AgentId>, Vec<usize>) {
        let target = max_matching_size(&reservation_graph(inst, cats));
        let mut rejected = BTreeSet::new();
        let mut tested = Vec::new();
        for &a in inst.baseline().iter().rev() {
            let mut candidate = rejected.clone();
            candidate.insert(a);
            let ms = max_matching_size(&reduced_graph(inst, cats, &candidate));
            tested.push(ms);
            if ms == target {
                rejected = candidate;
            }
        }
        (rejected, tested)
    }

    fn named(inst: &Instance, set: &BTreeSet<AgentId>) -> Vec<String> {
        set.iter()
            .map(|&a| inst.agent_name(a).to_string())
            .collect()
    }

    #[test]
    fn walkthrough_trace() {
        let inst = fixtures::rr_walkthrough();
        let (m, trace) = rr_all(&inst);
        assert_eq!(m.describe(&inst), "{1→c1, 3→c2}");
        assert_eq!(named(&inst, &trace.rejected), vec!["2", "4"]);
        let steps: Vec<(String, bool)> = trace
            .decisions
            .iter()
            .map(|d| (inst.agent_name(d.agent).to_string(), d.rejected))
            .collect();
        assert_eq!(
            steps,
            vec![
                ("4".into(), true),
                ("3".into(), false),
                ("2".into(), true),
                ("1".into(), false)
            ]
        );
        assert_eq!(trace.ms_total, 2);
        let tested: Vec<usize> = trace.decisions.iter().map(|d| d.ms).collect();
        assert_eq!(tested, vec![2, 1, 2, 0]);
    }

    #[test]
    fn running_example_gives_unique_maximum() {
        let inst = fixtures::running_example();
        let (m, _) = rr_all(&inst);
        assert_eq!(m.describe(&inst), "{2→c2, 3→c1}");
    }

    #[test]
    fn no_eligible_pairs_rejects_everyone() {
        let inst = crate::model::parse_instance(
            br#"{"agents":["a","b"],"baseline":["a","b"],"categories":[
            {"name":"c","quota":2,"kind":"preferential","tiers":[["a","b"]],"cutoff":0}]}"#,
        )
        .unwrap();
        let (m, trace) = rr_all(&inst);
        assert!(m.is_empty());
        assert_eq!(trace.rejected.len(), 2);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn incremental_matches_recomputation(seed in any::<u64>(), n in 1usize..8, k in 0usize..4,
                                             p in 0.0f64..1.0, t in 0.0f64..0.6) {
            let params = GenParams { agents: n, categories: k, max_quota: 2, density: p,
                                     tie_prob: t, seed, ..GenParams::default() };
            let inst = generate(&params).unwrap();
            let cats: Vec<_> = inst.category_ids().collect();
            let (m, trace) = rr(&inst, &cats);
            let (rejected, tested) = rr_by_recomputation(&inst, &cats);
            prop_assert_eq!(&trace.rejected, &rejected);
            let ms: Vec<usize> = trace.decisions.iter().map(|d| d.ms).collect();
            prop_assert_eq!(ms, tested);
            let matched = m.matched_agents();
            let expected: BTreeSet<AgentId> = inst.agents().filter(|a| !rejected.contains(a)).collect();
            prop_assert_eq!(matched, expected);
        }
    }
}
