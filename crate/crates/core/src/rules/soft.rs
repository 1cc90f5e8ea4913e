use crate::model::{AgentId, Instance, Matching};

use super::{srr, RuleError};

/// Every preferential ranking must order its ineligible agents consistently
/// with the baseline: an ineligible agent ranked strictly above another must
/// also come first in the baseline.
pub fn check_soft_preconditions(inst: &Instance) -> Result<(), RuleError> {
    for c in inst.preferential() {
        let mut ineligible: Vec<AgentId> =
            inst.agents().filter(|&a| !inst.eligible(a, c)).collect();
        ineligible.sort_by_key(|&a| inst.baseline_position(a));
        // sorted by baseline, keys must be non-decreasing
        let consistent = ineligible
            .windows(2)
            .all(|w| inst.key(c, w[0]) <= inst.key(c, w[1]));
        if !consistent {
            return Err(RuleError::Precondition(format!(
                "category `{}` ranks ineligible agents against the baseline",
                inst.category(c).name
            )));
        }
    }
    Ok(())
}

/// Smart reverse rejecting, after which preferential units left over go to
/// still-unmatched agents in baseline order regardless of eligibility.
pub fn soft_reserves(inst: &Instance) -> Result<Matching, RuleError> {
    check_soft_preconditions(inst)?;
    let mut matching = srr(inst)?;
    let mut leftover: Vec<(crate::model::CategoryId, usize)> = inst
        .preferential()
        .map(|c| (c, inst.quota(c).saturating_sub(matching.load(c))))
        .filter(|&(_, r)| r > 0)
        .collect();
    for &a in inst.baseline() {
        if matching.is_matched(a) {
            continue;
        }
        let Some(slot) = leftover.iter_mut().find(|(_, r)| *r > 0) else {
            break;
        };
        slot.1 -= 1;
        matching.assign(a, slot.0);
    }
    Ok(matching)
}
