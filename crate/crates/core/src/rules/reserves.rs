//! The classical minimum-guarantees and over-and-above reserve rules. Both
//! are only defined when every agent is eligible for at most one
//! preferential category and every preferential ranking lists its eligible
//! agents strictly in baseline order.

use crate::model::{AgentId, CategoryId, Instance, Matching};

use super::RuleError;

pub fn check_reserve_preconditions(inst: &Instance) -> Result<(), RuleError> {
    for a in inst.agents() {
        let count = inst.preferential().filter(|&c| inst.eligible(a, c)).count();
        if count > 1 {
            return Err(RuleError::Precondition(format!(
                "agent `{}` is eligible for {count} preferential categories",
                inst.agent_name(a)
            )));
        }
    }
    for c in inst.preferential() {
        let ranking = &inst.category(c).priority;
        let eligible = &ranking.tiers()[..ranking.cutoff()];
        if eligible.iter().any(|t| t.len() != 1) {
            return Err(RuleError::Precondition(format!(
                "category `{}` has tied eligible agents",
                inst.category(c).name
            )));
        }
        let consistent = eligible
            .windows(2)
            .all(|w| inst.baseline_prefers(w[0][0], w[1][0]));
        if !consistent {
            return Err(RuleError::Precondition(format!(
                "category `{}` ranks eligible agents against the baseline",
                inst.category(c).name
            )));
        }
    }
    Ok(())
}

fn preferential_of(inst: &Instance, a: AgentId) -> Option<CategoryId> {
    inst.preferential().find(|&c| inst.eligible(a, c))
}

struct Pool {
    cats: Vec<CategoryId>,
    remaining: Vec<usize>,
}

impl Pool {
    fn new(inst: &Instance) -> Self {
        let cats: Vec<CategoryId> = inst.unreserved().collect();
        let remaining = cats.iter().map(|&c| inst.quota(c)).collect();
        Self { cats, remaining }
    }

    fn has_unit(&self) -> bool {
        self.remaining.iter().any(|&r| r > 0)
    }

    fn take(&mut self) -> Option<CategoryId> {
        let k = self.remaining.iter().position(|&r| r > 0)?;
        self.remaining[k] -= 1;
        Some(self.cats[k])
    }
}

/// Walk the baseline; each agent takes a unit of its preferential category
/// while any remain, otherwise an unreserved unit while any remain.
pub fn minimum_guarantees(inst: &Instance) -> Result<Matching, RuleError> {
    check_reserve_preconditions(inst)?;
    let mut pool = Pool::new(inst);
    let mut remaining: Vec<usize> = inst.category_ids().map(|c| inst.quota(c)).collect();
    let mut matching = Matching::new();
    for &a in inst.baseline() {
        match preferential_of(inst, a) {
            Some(c) if remaining[c.0] > 0 => {
                remaining[c.0] -= 1;
                matching.assign(a, c);
            }
            _ => {
                if let Some(u) = pool.take() {
                    matching.assign(a, u);
                }
            }
        }
    }
    Ok(matching)
}

/// Walk the baseline handing out unreserved units first, skipping an agent
/// whose preferential category would otherwise run short of unmatched
/// eligible agents; then fill each preferential category with its
/// highest-priority unmatched eligible agents.
pub fn over_and_above(inst: &Instance) -> Result<Matching, RuleError> {
    check_reserve_preconditions(inst)?;
    let mut pool = Pool::new(inst);
    let mut matching = Matching::new();
    for &a in inst.baseline() {
        if !pool.has_unit() {
            break;
        }
        let allowed = match preferential_of(inst, a) {
            None => true,
            Some(c) => {
                let others = inst
                    .eligible_agents(c)
                    .filter(|&b| b != a && !matching.is_matched(b))
                    .count();
                others >= inst.quota(c)
            }
        };
        if allowed {
            let u = pool.take().expect("pool has a unit");
            matching.assign(a, u);
        }
    }
    for c in inst.preferential() {
        let mut candidates: Vec<AgentId> = inst
            .eligible_agents(c)
            .filter(|&b| !matching.is_matched(b))
            .collect();
        candidates.sort_by_key(|&b| (inst.key(c, b), inst.baseline_position(b)));
        for b in candidates.into_iter().take(inst.quota(c)) {
            matching.assign(b, c);
        }
    }
    Ok(matching)
}
