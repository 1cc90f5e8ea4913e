use std::collections::VecDeque;

use crate::model::{AgentId, CategoryId, Instance, Matching};

use super::RuleError;

/// Preferences where every agent ranks its eligible categories in the given
/// common order.
pub fn uniform_preferences(inst: &Instance, order: &[CategoryId]) -> Vec<Vec<CategoryId>> {
    inst.agents()
        .map(|a| {
            order
                .iter()
                .copied()
                .filter(|&c| inst.eligible(a, c))
                .collect()
        })
        .collect()
}

/// Agent-proposing deferred acceptance on artificial strict preferences.
///
/// `prefs[a]` lists, best first, the categories agent `a` is willing to
/// take; every listed category must be one the agent is eligible for. Each
/// category holds on to its `quota` best proposers by priority, ties broken
/// by the baseline.
pub fn deferred_acceptance(
    inst: &Instance,
    prefs: &[Vec<CategoryId>],
) -> Result<Matching, RuleError> {
    if prefs.len() != inst.num_agents() {
        return Err(RuleError::Preferences(format!(
            "expected {} preference lists, got {}",
            inst.num_agents(),
            prefs.len()
        )));
    }
    for (a, list) in prefs.iter().enumerate() {
        let a = AgentId(a);
        for (k, &c) in list.iter().enumerate() {
            if c.0 >= inst.num_categories() {
                return Err(RuleError::Preferences(format!("unknown category {c}")));
            }
            if !inst.eligible(a, c) {
                return Err(RuleError::Preferences(format!(
                    "agent `{}` lists `{}` without being eligible",
                    inst.agent_name(a),
                    inst.category(c).name
                )));
            }
            if list[..k].contains(&c) {
                return Err(RuleError::Preferences(format!(
                    "agent `{}` lists `{}` twice",
                    inst.agent_name(a),
                    inst.category(c).name
                )));
            }
        }
    }

    let rank = |c: CategoryId, a: AgentId| (inst.key(c, a), inst.baseline_position(a));
    let mut next = vec![0usize; inst.num_agents()];
    let mut held: Vec<Vec<AgentId>> = vec![Vec::new(); inst.num_categories()];
    let mut free: VecDeque<AgentId> = inst.baseline().iter().copied().collect();

    while let Some(a) = free.pop_front() {
        let Some(&c) = prefs[a.0].get(next[a.0]) else {
            continue;
        };
        next[a.0] += 1;
        let pool = &mut held[c.0];
        pool.push(a);
        if pool.len() > inst.quota(c) {
            let worst = pool
                .iter()
                .enumerate()
                .max_by_key(|(_, &b)| rank(c, b))
                .map(|(k, _)| k)
                .expect("pool is non-empty");
            free.push_back(pool.swap_remove(worst));
        }
    }

    Ok(held
        .iter()
        .enumerate()
        .flat_map(|(c, pool)| pool.iter().map(move |&a| (a, CategoryId(c))))
        .collect())
}
