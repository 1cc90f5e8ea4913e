use std::collections::BTreeSet;

use proptest::prelude::*;
use rationing::axioms::{
    check_eligibility, check_max_beneficiary, check_max_size, check_nonwasteful,
    check_order_preservation, check_respect_priorities,
};
use rationing::generate::{generate, GenParams};
use rationing::graph::{max_matching, max_matching_size, reduced_graph, reservation_graph};
use rationing::model::{enumerate_priority_decreases, is_priority_decrease, InstanceDocument};
use rationing::oracle::{axiom_satisfying_set, enumerate_matchings, rr_outcome_set};
use rationing::rules::{
    deferred_acceptance, rr_all, soft_reserves, srr, srr_with_split, uniform_preferences,
};
use rationing::{parse_instance, AgentId, CategoryId, Instance, UnreservedSplit};

fn params() -> impl Strategy<Value = GenParams> {
    (
        any::<u64>(),
        0usize..8,
        0usize..4,
        0usize..3,
        0.0f64..=1.0,
        0.0f64..0.6,
    )
        .prop_map(
            |(seed, agents, categories, max_quota, density, tie_prob)| GenParams {
                agents,
                categories,
                max_quota,
                density,
                tie_prob,
                seed,
                ..GenParams::default()
            },
        )
}

fn instance() -> impl Strategy<Value = Instance> {
    params().prop_map(|p| generate(&p).unwrap())
}

fn with_unreserved() -> impl Strategy<Value = Instance> {
    (params(), 0usize..4).prop_map(|(mut p, u)| {
        p.unreserved = Some(u);
        generate(&p).unwrap()
    })
}

fn subset(inst: &Instance, mask: u64) -> BTreeSet<AgentId> {
    inst.agents().filter(|a| mask >> a.0 & 1 == 1).collect()
}

fn all_cats(inst: &Instance) -> Vec<CategoryId> {
    inst.category_ids().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn document_round_trip(inst in with_unreserved()) {
        let text = InstanceDocument::from_instance(&inst).to_json();
        let back = parse_instance(text.as_bytes()).unwrap();
        prop_assert_eq!(back, inst);
    }

    #[test]
    fn eligibility_is_the_edge_set(inst in instance()) {
        let g = reservation_graph(&inst, &all_cats(&inst));
        for a in inst.agents() {
            for c in inst.category_ids() {
                prop_assert_eq!(g.contains_edge(a, c), inst.eligible(a, c));
            }
        }
    }

    #[test]
    fn reduction_is_monotone(inst in instance(), small in any::<u64>(), extra in any::<u64>()) {
        let cats = all_cats(&inst);
        let r = subset(&inst, small);
        let bigger: BTreeSet<AgentId> = r.union(&subset(&inst, extra)).copied().collect();
        let g = reduced_graph(&inst, &cats, &r);
        let h = reduced_graph(&inst, &cats, &bigger);
        prop_assert!(h.edges().is_subset(&g.edges()));
        prop_assert!(max_matching_size(&h) <= max_matching_size(&g));
        prop_assert_eq!(reduced_graph(&inst, &cats, &BTreeSet::new()).edges(),
                        reservation_graph(&inst, &cats).edges());
    }

    #[test]
    fn max_matching_is_valid_and_maximum(inst in instance(), mask in any::<u64>()) {
        let cats = all_cats(&inst);
        let g = reduced_graph(&inst, &cats, &subset(&inst, mask));
        let m = max_matching(&g);
        prop_assert!(m.validate(&inst).is_ok());
        prop_assert!(m.pairs().all(|(a, c)| g.contains_edge(a, c)));
        prop_assert_eq!(m.len(), max_matching_size(&g));
        prop_assert_eq!(m, max_matching(&g));
    }

    #[test]
    fn rr_theorem_one(inst in instance()) {
        let (m, trace) = rr_all(&inst);
        prop_assert!(check_eligibility(&inst, &m).holds);
        prop_assert!(check_respect_priorities(&inst, &m).holds);
        prop_assert!(check_max_size(&inst, &m).unwrap().holds);
        let unrejected: BTreeSet<AgentId> =
            inst.agents().filter(|a| !trace.rejected.contains(a)).collect();
        prop_assert_eq!(m.matched_agents(), unrejected);
        let marked: BTreeSet<AgentId> =
            trace.decisions.iter().filter(|d| d.rejected).map(|d| d.agent).collect();
        prop_assert_eq!(&marked, &trace.rejected);
        for d in trace.decisions.iter().filter(|d| d.rejected) {
            prop_assert_eq!(d.ms, trace.ms_total);
        }
    }

    #[test]
    fn envy_free_and_covering_means_reduced_matching(inst in instance(), mask in any::<u64>()) {
        // a matching without justified envy whose unmatched agents are
        // exactly U only uses edges of the graph reduced by U
        let u = subset(&inst, mask);
        let g = reduced_graph(&inst, &all_cats(&inst), &u);
        for m in enumerate_matchings(&inst).unwrap() {
            let exact = inst.agents().all(|a| u.contains(&a) != m.is_matched(a));
            if exact && check_respect_priorities(&inst, &m).holds {
                prop_assert!(m.pairs().all(|(a, c)| g.contains_edge(a, c)));
            }
        }
    }

    #[test]
    fn manipulations_are_priority_decreases(inst in instance(), budget in 0usize..12) {
        for a in inst.agents() {
            let all = enumerate_priority_decreases(&inst, a, budget);
            let distinct: BTreeSet<String> = all
                .iter()
                .map(|mi| InstanceDocument::from_instance(&mi.instance).to_json())
                .collect();
            prop_assert_eq!(distinct.len(), all.len());
            for mi in &all {
                prop_assert!(is_priority_decrease(&inst, &mi.instance, a));
                prop_assert!(mi.instance != inst);
            }
        }
    }

    #[test]
    fn srr_theorem_four(inst in with_unreserved(), first in 0usize..4) {
        let q = inst.unreserved_quota();
        let split = UnreservedSplit::new(first.min(q), q - first.min(q));
        let (inst, m) = srr_with_split(&inst, split).unwrap();
        prop_assert!(check_eligibility(&inst, &m).holds);
        prop_assert!(check_max_beneficiary(&inst, &m).holds);
        prop_assert!(check_respect_priorities(&inst, &m).holds);
        prop_assert!(check_order_preservation(&inst, &m).holds);
        prop_assert!(check_nonwasteful(&inst, &m).holds);
        prop_assert!(m.validate(&inst).is_ok());
    }

    #[test]
    fn soft_reserves_extend_srr(inst in with_unreserved()) {
        let hard = srr(&inst).unwrap();
        let soft = soft_reserves(&inst).unwrap();
        for (a, c) in hard.pairs() {
            prop_assert_eq!(soft.get(a), Some(c));
        }
        prop_assert!(soft.validate(&inst).is_ok());
        let leftover = inst.preferential().any(|c| soft.load(c) < inst.quota(c));
        let unmatched = inst.agents().any(|a| !soft.is_matched(a));
        prop_assert!(!(leftover && unmatched));
    }

    #[test]
    fn da_respects_priorities(inst in instance(), rotate in 0usize..4) {
        let mut order = all_cats(&inst);
        if !order.is_empty() {
            let k = rotate % order.len();
            order.rotate_left(k);
        }
        let prefs = uniform_preferences(&inst, &order);
        let m = deferred_acceptance(&inst, &prefs).unwrap();
        prop_assert!(m.validate(&inst).is_ok());
        prop_assert!(check_eligibility(&inst, &m).holds);
        prop_assert!(check_respect_priorities(&inst, &m).holds);
        prop_assert!(check_nonwasteful(&inst, &m).holds);
        prop_assert!(m.len() <= rr_all(&inst).0.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rr_outcomes_satisfy_the_axioms(inst in params().prop_map(|mut p| {
        p.agents %= 6;
        generate(&p).unwrap()
    })) {
        let outcomes = rr_outcome_set(&inst).unwrap();
        let axioms = axiom_satisfying_set(&inst).unwrap();
        prop_assert!(outcomes.is_subset(&axioms));
    }
}
