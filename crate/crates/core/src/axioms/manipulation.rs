//! Strategyproofness and weak non-bossiness, checked over the priority
//! decreases produced by [`enumerate_priority_decreases`]. Verdicts hold
//! within that manipulation space only.

use crate::model::{enumerate_priority_decreases, CategoryId, Edit, Instance, Manipulation};
use crate::rules::Rule;

use super::{Axiom, AxiomError, AxiomReport, Witness};

pub fn describe_manipulation(inst: &Instance, m: &Manipulation) -> String {
    let mut hidden = Vec::new();
    let mut parts = Vec::new();
    for (c, edit) in m.edits.iter().enumerate() {
        let name = &inst.category(CategoryId(c)).name;
        match edit {
            Edit::Unchanged => {}
            Edit::Hide => hidden.push(name.as_str()),
            Edit::DemoteToTier(t) => parts.push(format!("join tier {} of {name}", t + 1)),
            Edit::DemoteBelowTier(t) => {
                parts.push(format!("new tier below tier {} of {name}", t + 1))
            }
        }
    }
    if !hidden.is_empty() {
        parts.insert(0, format!("hide {}", hidden.join(", ")));
    }
    if parts.is_empty() {
        "truthful".into()
    } else {
        parts.join("; ")
    }
}

/// Both manipulation axioms from one pass over the manipulated instances.
/// Manipulated instances the rule refuses (a broken precondition) are
/// counted as skipped.
pub fn check_manipulation_axioms(
    rule: Rule,
    inst: &Instance,
    budget: usize,
) -> Result<(AxiomReport, AxiomReport), AxiomError> {
    if !matches!(rule, Rule::Rr | Rule::Srr | Rule::SoftReserves) {
        return Err(AxiomError::UnsupportedRule(rule));
    }
    let truthful = rule.apply(inst)?;
    let mut sp = AxiomReport::new(Axiom::Strategyproofness);
    let mut wnb = AxiomReport::new(Axiom::WeakNonbossiness);
    let (mut tested, mut skipped) = (0, 0);

    for agent in inst.agents().filter(|&a| !truthful.is_matched(a)) {
        for (index, mi) in enumerate_priority_decreases(inst, agent, budget)
            .into_iter()
            .enumerate()
        {
            let Ok(outcome) = rule.apply(&mi.instance) else {
                skipped += 1;
                continue;
            };
            tested += 1;
            let witness = |affected, matched_before, matched_after| Witness::Manipulation {
                agent,
                index,
                description: describe_manipulation(inst, &mi.manipulation),
                affected,
                matched_before,
                matched_after,
            };
            if outcome.is_matched(agent) {
                sp.push(witness(agent, false, true));
            }
            for &j in &inst.baseline()[inst.baseline_position(agent) + 1..] {
                let (before, after) = (truthful.is_matched(j), outcome.is_matched(j));
                if before != after {
                    wnb.push(witness(j, before, after));
                }
            }
        }
    }
    for r in [&mut sp, &mut wnb] {
        r.tested = Some(tested);
        r.skipped = Some(skipped);
    }
    Ok((sp, wnb))
}

pub fn check_strategyproofness(
    rule: Rule,
    inst: &Instance,
    budget: usize,
) -> Result<AxiomReport, AxiomError> {
    check_manipulation_axioms(rule, inst, budget).map(|(sp, _)| sp)
}

pub fn check_weak_nonbossiness(
    rule: Rule,
    inst: &Instance,
    budget: usize,
) -> Result<AxiomReport, AxiomError> {
    check_manipulation_axioms(rule, inst, budget).map(|(_, wnb)| wnb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::parse_instance;

    #[test]
    fn rr_on_running_example() {
        let inst = fixtures::running_example();
        let (sp, wnb) = check_manipulation_axioms(Rule::Rr, &inst, 20).unwrap();
        assert!(sp.holds && wnb.holds);
        // agent 1 is eligible nowhere; it can only sink further below ∅
        assert_eq!(sp.tested, Some(2));
    }

    #[test]
    fn rr_on_walkthrough_holds() {
        let inst = fixtures::rr_walkthrough();
        let (sp, wnb) = check_manipulation_axioms(Rule::Rr, &inst, 20).unwrap();
        assert!(sp.holds, "{sp:?}");
        assert!(wnb.holds, "{wnb:?}");
        assert!(sp.tested.unwrap() > 0);
    }

    #[test]
    fn single_agent_holds_for_every_supported_rule() {
        let inst = parse_instance(
            br#"{"agents":["1"],"baseline":["1"],"categories":[
            {"name":"c","quota":0,"kind":"preferential","tiers":[["1"]]},
            {"name":"u","quota":0,"kind":"unreserved"}]}"#,
        )
        .unwrap();
        for rule in [Rule::Rr, Rule::Srr, Rule::SoftReserves] {
            assert!(check_strategyproofness(rule, &inst, 10).unwrap().holds);
            assert!(check_weak_nonbossiness(rule, &inst, 10).unwrap().holds);
        }
    }

    #[test]
    fn reserve_rules_are_refused() {
        let inst = fixtures::reserve_comparison();
        assert_eq!(
            check_strategyproofness(Rule::MinimumGuarantees, &inst, 1),
            Err(AxiomError::UnsupportedRule(Rule::MinimumGuarantees))
        );
    }

    #[test]
    fn descriptions() {
        let inst = fixtures::rr_walkthrough();
        let a = inst.agent_by_name("4").unwrap();
        let c1 = inst.category_by_name("c1").unwrap();
        let c2 = inst.category_by_name("c2").unwrap();
        let m = Manipulation::hide(a, &[c1, c2], 2);
        assert_eq!(describe_manipulation(&inst, &m), "hide c1, c2");
        let m = Manipulation::single(a, c1, Edit::DemoteToTier(2), 2);
        assert_eq!(describe_manipulation(&inst, &m), "join tier 3 of c1");
    }
}
