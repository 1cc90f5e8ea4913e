//! Exhaustive ground truth for small instances.
//!
//! Nothing here goes through the graph module: feasibility, maxima and the
//! reduced edge sets are all recomputed by enumeration.

use std::collections::BTreeSet;

use itertools::Itertools;
use thiserror::Error;

use crate::model::{AgentId, CategoryId, Instance, Matching};
use crate::rules::rr_all;

pub type MatchingSet = BTreeSet<Matching>;

/// Largest agent count [`enumerate_matchings`] accepts.
pub const MAX_ENUMERATION_AGENTS: usize = 8;
/// Largest agent count [`rr_outcome_set`] accepts; it runs `n!` orderings.
pub const MAX_ORDERING_AGENTS: usize = 7;
/// Upper bound on the raw search space, the product over agents of one plus
/// their number of eligible categories.
pub const MAX_STATES: u64 = 5_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{what} is {value}, above the oracle bound {bound}")]
    BoundExceeded {
        what: &'static str,
        value: u64,
        bound: u64,
    },
}

/// Every matching that complies with eligibility and respects quotas, each
/// once, depth first over agents by id with categories in declaration order
/// before leaving the agent unmatched.
pub fn enumerate_matchings(inst: &Instance) -> Result<Vec<Matching>, OracleError> {
    enumerate_with(inst, |a, c| inst.eligible(a, c))
}

fn enumerate_with(
    inst: &Instance,
    allowed: impl Fn(AgentId, CategoryId) -> bool,
) -> Result<Vec<Matching>, OracleError> {
    let n = inst.num_agents();
    if n > MAX_ENUMERATION_AGENTS {
        return Err(OracleError::BoundExceeded {
            what: "agent count",
            value: n as u64,
            bound: MAX_ENUMERATION_AGENTS as u64,
        });
    }
    let options: Vec<Vec<CategoryId>> = inst
        .agents()
        .map(|a| inst.category_ids().filter(|&c| allowed(a, c)).collect())
        .collect();
    let states = options
        .iter()
        .try_fold(1u64, |acc, o| acc.checked_mul(o.len() as u64 + 1))
        .unwrap_or(u64::MAX);
    if states > MAX_STATES {
        return Err(OracleError::BoundExceeded {
            what: "search space",
            value: states,
            bound: MAX_STATES,
        });
    }

    let mut out = Vec::new();
    let mut remaining: Vec<usize> = inst.category_ids().map(|c| inst.quota(c)).collect();
    let mut current = Vec::new();
    dfs(0, &options, &mut remaining, &mut current, &mut out);
    Ok(out)
}

fn dfs(
    a: usize,
    options: &[Vec<CategoryId>],
    remaining: &mut [usize],
    current: &mut Vec<(AgentId, CategoryId)>,
    out: &mut Vec<Matching>,
) {
    if a == options.len() {
        out.push(current.iter().copied().collect());
        return;
    }
    for &c in &options[a] {
        if remaining[c.0] > 0 {
            remaining[c.0] -= 1;
            current.push((AgentId(a), c));
            dfs(a + 1, options, remaining, current, out);
            current.pop();
            remaining[c.0] += 1;
        }
    }
    dfs(a + 1, options, remaining, current, out);
}

fn has_envy(inst: &Instance, m: &Matching) -> bool {
    m.pairs().any(|(i, c)| {
        inst.agents()
            .any(|j| !m.is_matched(j) && inst.strictly_prefers(c, Some(j), Some(i)))
    })
}

/// Matchings that comply with eligibility, respect priorities and have
/// maximum size.
pub fn axiom_satisfying_set(inst: &Instance) -> Result<MatchingSet, OracleError> {
    let all = enumerate_matchings(inst)?;
    let best = all.iter().map(Matching::len).max().unwrap_or(0);
    Ok(all
        .into_iter()
        .filter(|m| m.len() == best && !has_envy(inst, m))
        .collect())
}

/// All maximum matchings of the reduced graph for `rejected`, with its edge
/// set rebuilt from the definition.
pub fn reduced_maximum_matchings(
    inst: &Instance,
    rejected: &BTreeSet<AgentId>,
) -> Result<MatchingSet, OracleError> {
    let allowed = |j: AgentId, c: CategoryId| {
        !rejected.contains(&j)
            && inst.eligible(j, c)
            && !rejected
                .iter()
                .any(|&i| inst.strictly_prefers(c, Some(i), Some(j)))
    };
    let all = enumerate_with(inst, allowed)?;
    let best = all.iter().map(Matching::len).max().unwrap_or(0);
    Ok(all.into_iter().filter(|m| m.len() == best).collect())
}

fn check_orderings(inst: &Instance) -> Result<(), OracleError> {
    let n = inst.num_agents();
    if n > MAX_ORDERING_AGENTS {
        return Err(OracleError::BoundExceeded {
            what: "agent count",
            value: n as u64,
            bound: MAX_ORDERING_AGENTS as u64,
        });
    }
    Ok(())
}

/// The union over every baseline ordering of all maximum matchings of the
/// final reduced graph of reverse rejecting.
pub fn rr_outcome_set(inst: &Instance) -> Result<MatchingSet, OracleError> {
    rr_outcome_set_with(inst, |i| rr_all(i).1.rejected)
}

fn rr_outcome_set_with(
    inst: &Instance,
    rejector: impl Fn(&Instance) -> BTreeSet<AgentId>,
) -> Result<MatchingSet, OracleError> {
    check_orderings(inst)?;
    let n = inst.num_agents();
    let mut rejected_sets = BTreeSet::new();
    for order in (0..n).map(AgentId).permutations(n) {
        let reordered = inst
            .with_baseline(order)
            .expect("a permutation is a valid baseline");
        rejected_sets.insert(rejector(&reordered));
    }
    let mut out = MatchingSet::new();
    for rejected in &rejected_sets {
        out.extend(reduced_maximum_matchings(inst, rejected)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Characterization {
    pub holds: bool,
    pub rr_outcomes: MatchingSet,
    pub axiom_set: MatchingSet,
}

impl Characterization {
    /// Outcomes reverse rejecting can produce that violate an axiom.
    pub fn rr_only(&self) -> Vec<&Matching> {
        self.rr_outcomes.difference(&self.axiom_set).collect()
    }

    /// Axiom-satisfying matchings no ordering produces.
    pub fn axiom_only(&self) -> Vec<&Matching> {
        self.axiom_set.difference(&self.rr_outcomes).collect()
    }
}

/// Whether the reverse rejecting outcomes over all orderings are exactly
/// the matchings that comply with eligibility, respect priorities and have
/// maximum size.
pub fn verify_characterization(inst: &Instance) -> Result<Characterization, OracleError> {
    verify_characterization_with(inst, |i| rr_all(i).1.rejected)
}

/// [`verify_characterization`] with the rejected set of each ordering
/// supplied by `rejector`, so that faulty implementations can be planted.
pub fn verify_characterization_with(
    inst: &Instance,
    rejector: impl Fn(&Instance) -> BTreeSet<AgentId>,
) -> Result<Characterization, OracleError> {
    let rr_outcomes = rr_outcome_set_with(inst, rejector)?;
    let axiom_set = axiom_satisfying_set(inst)?;
    Ok(Characterization {
        holds: rr_outcomes == axiom_set,
        rr_outcomes,
        axiom_set,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::generate::{generate, GenParams};
    use crate::graph::{max_matching_size, reservation_graph};
    use crate::model::parse_instance;
    use proptest::prelude::*;

    fn names(inst: &Instance, set: &MatchingSet) -> Vec<String> {
        set.iter().map(|m| m.describe(inst)).collect()
    }

    #[test]
    fn running_example_has_five_matchings() {
        let inst = fixtures::running_example();
        let all: Vec<String> = enumerate_matchings(&inst)
            .unwrap()
            .iter()
            .map(|m| m.describe(&inst))
            .collect();
        assert_eq!(
            all,
            vec!["{2→c1}", "{2→c2, 3→c1}", "{2→c2}", "{3→c1}", "{}"]
        );
        assert_eq!(
            names(&inst, &axiom_satisfying_set(&inst).unwrap()),
            vec!["{2→c2, 3→c1}"]
        );
        assert_eq!(
            names(&inst, &rr_outcome_set(&inst).unwrap()),
            vec!["{2→c2, 3→c1}"]
        );
        assert!(verify_characterization(&inst).unwrap().holds);
    }

    #[test]
    fn trivial_enumerations() {
        let none = parse_instance(
            br#"{"agents":["1","2"],"baseline":["1","2"],"categories":[
            {"name":"c","quota":1,"kind":"preferential","tiers":[]}]}"#,
        )
        .unwrap();
        assert_eq!(enumerate_matchings(&none).unwrap(), vec![Matching::new()]);
        assert_eq!(
            axiom_satisfying_set(&none)
                .unwrap()
                .into_iter()
                .collect::<Vec<_>>(),
            vec![Matching::new()]
        );

        let one = parse_instance(
            br#"{"agents":["1"],"baseline":["1"],"categories":[
            {"name":"c","quota":1,"kind":"preferential","tiers":[["1"]]}]}"#,
        )
        .unwrap();
        assert_eq!(enumerate_matchings(&one).unwrap().len(), 2);
        assert_eq!(names(&one, &rr_outcome_set(&one).unwrap()), vec!["{1→c}"]);

        let empty = parse_instance(br#"{"agents":[],"baseline":[],"categories":[]}"#).unwrap();
        assert!(verify_characterization(&empty).unwrap().holds);
    }

    #[test]
    fn walkthrough_sets_agree() {
        let inst = fixtures::rr_walkthrough();
        let axioms = axiom_satisfying_set(&inst).unwrap();
        assert!(names(&inst, &axioms).contains(&"{1→c1, 3→c2}".to_string()));
        assert_eq!(rr_outcome_set(&inst).unwrap(), axioms);
    }

    #[test]
    fn skipped_rejection_is_detected() {
        let inst = fixtures::rr_walkthrough();
        // forget the lowest-priority rejected agent in every ordering
        let faulty = |i: &Instance| {
            let mut r = rr_all(i).1.rejected;
            if let Some(&last) = i.baseline().iter().rev().find(|a| r.contains(a)) {
                r.remove(&last);
            }
            r
        };
        let report = verify_characterization_with(&inst, faulty).unwrap();
        assert!(!report.holds);
        assert!(!report.rr_only().is_empty());
    }

    #[test]
    fn bounds_are_enforced() {
        let p = GenParams {
            agents: 9,
            ..GenParams::default()
        };
        let inst = generate(&p).unwrap();
        assert!(matches!(
            enumerate_matchings(&inst),
            Err(OracleError::BoundExceeded { .. })
        ));
        let p = GenParams {
            agents: 8,
            ..GenParams::default()
        };
        assert!(rr_outcome_set(&generate(&p).unwrap()).is_err());
    }

    #[test]
    fn exclusive_categories_count_in_closed_form() {
        // every agent eligible for exactly one category: independent choices
        // per category, sum over k ≤ q of C(|N_c|, k)
        for seed in 0..30 {
            let p = GenParams {
                agents: 6,
                categories: 3,
                max_quota: 3,
                density: 1.0,
                seed,
                consistent: true,
                ..GenParams::default()
            };
            let inst = generate(&p).unwrap();
            let binom =
                |n: usize, k: usize| -> usize { (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1)) };
            let expected: usize = inst
                .category_ids()
                .map(|c| {
                    let size = inst.eligible_agents(c).count();
                    (0..=inst.quota(c).min(size))
                        .map(|k| binom(size, k))
                        .sum::<usize>()
                })
                .product();
            assert_eq!(enumerate_matchings(&inst).unwrap().len(), expected);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(150))]
        #[test]
        fn oracle_maximum_matches_graph(seed in any::<u64>(), n in 0usize..8, k in 0usize..4,
                                        p in 0.0f64..1.0, t in 0.0f64..0.6) {
            let params = GenParams { agents: n, categories: k, max_quota: 2, density: p,
                                     tie_prob: t, seed, ..GenParams::default() };
            let inst = generate(&params).unwrap();
            let cats: Vec<_> = inst.category_ids().collect();
            let best = enumerate_matchings(&inst).unwrap().iter().map(Matching::len).max().unwrap();
            prop_assert_eq!(best, max_matching_size(&reservation_graph(&inst, &cats)));
        }

        #[test]
        fn rr_outcomes_are_sound(seed in any::<u64>(), n in 0usize..5, k in 0usize..4,
                                 p in 0.0f64..1.0, t in 0.0f64..0.6) {
            let params = GenParams { agents: n, categories: k, max_quota: 2, density: p,
                                     tie_prob: t, seed, ..GenParams::default() };
            let inst = generate(&params).unwrap();
            let report = verify_characterization(&inst).unwrap();
            prop_assert!(report.rr_only().is_empty());
        }
    }
}
