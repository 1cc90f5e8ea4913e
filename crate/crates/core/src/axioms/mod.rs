//! Axiom checkers. Each returns an [`AxiomReport`] whose witnesses are the
//! concrete violations found.

mod manipulation;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{max_matching_size, reservation_graph};
use crate::model::{AgentId, CategoryId, CategoryKind, Instance, Matching};
use crate::rules::{Rule, RuleError};

pub use manipulation::{
    check_manipulation_axioms, check_strategyproofness, check_weak_nonbossiness,
    describe_manipulation,
};

/// Reports keep at most this many witnesses; `total` counts all of them.
pub const WITNESS_CAP: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axiom {
    Eligibility,
    RespectPriorities,
    Nonwasteful,
    MaxSize,
    MaxBeneficiary,
    OrderPreservation,
    Strategyproofness,
    WeakNonbossiness,
}

impl Axiom {
    pub const ALL: [Axiom; 8] = [
        Axiom::Eligibility,
        Axiom::RespectPriorities,
        Axiom::Nonwasteful,
        Axiom::MaxSize,
        Axiom::MaxBeneficiary,
        Axiom::OrderPreservation,
        Axiom::Strategyproofness,
        Axiom::WeakNonbossiness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::Eligibility => "eligibility",
            Axiom::RespectPriorities => "respect-priorities",
            Axiom::Nonwasteful => "nonwasteful",
            Axiom::MaxSize => "max-size",
            Axiom::MaxBeneficiary => "max-beneficiary",
            Axiom::OrderPreservation => "order-preservation",
            Axiom::Strategyproofness => "strategyproofness",
            Axiom::WeakNonbossiness => "weak-nonbossiness",
        }
    }

    /// Whether the axiom is a property of a rule rather than of one matching.
    pub fn needs_rule(self) -> bool {
        matches!(self, Axiom::Strategyproofness | Axiom::WeakNonbossiness)
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axiom {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Axiom::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown axiom `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Ineligible {
        agent: AgentId,
        category: CategoryId,
    },
    /// `envier` is unmatched and ranked strictly above `envied` at `category`.
    Envy {
        envier: AgentId,
        envied: AgentId,
        category: CategoryId,
    },
    Waste {
        agent: AgentId,
        category: CategoryId,
    },
    SizeGap {
        found: usize,
        optimal: usize,
    },
    /// Agents `higher` and `lower` in the sense of the violated clause, with
    /// their assignments.
    OrderPreservation {
        clause: u8,
        higher: AgentId,
        lower: AgentId,
        higher_category: CategoryId,
        lower_category: CategoryId,
    },
    /// `index` is the position of the manipulated instance in the
    /// enumeration for `agent`. `affected` is the agent whose status is
    /// reported (the manipulator itself for strategyproofness).
    Manipulation {
        agent: AgentId,
        index: usize,
        description: String,
        affected: AgentId,
        matched_before: bool,
        matched_after: bool,
    },
}

impl Witness {
    pub fn describe(&self, inst: &Instance) -> String {
        let a = |x: &AgentId| inst.agent_name(*x).to_string();
        let c = |x: &CategoryId| inst.category(*x).name.clone();
        match self {
            Witness::Ineligible { agent, category } => {
                format!(
                    "{} is matched to {} without being eligible",
                    a(agent),
                    c(category)
                )
            }
            Witness::Envy {
                envier,
                envied,
                category,
            } => format!(
                "unmatched {} has priority over {} at {}",
                a(envier),
                a(envied),
                c(category)
            ),
            Witness::Waste { agent, category } => {
                format!(
                    "{} is unmatched while {} has a free unit",
                    a(agent),
                    c(category)
                )
            }
            Witness::SizeGap { found, optimal } => format!("size {found}, optimum {optimal}"),
            Witness::OrderPreservation {
                clause,
                higher,
                lower,
                higher_category,
                lower_category,
            } => format!(
                "clause {}: {}→{} and {}→{} should swap",
                if *clause == 1 { "i" } else { "ii" },
                a(higher),
                c(higher_category),
                a(lower),
                c(lower_category)
            ),
            Witness::Manipulation {
                agent,
                index,
                description,
                affected,
                matched_before,
                matched_after,
            } => {
                let status = |m: bool| if m { "matched" } else { "unmatched" };
                format!(
                    "{} reports #{index} ({description}): {} goes from {} to {}",
                    a(agent),
                    a(affected),
                    status(*matched_before),
                    status(*matched_after)
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub axiom: Axiom,
    pub holds: bool,
    /// The first [`WITNESS_CAP`] violations.
    pub witnesses: Vec<Witness>,
    /// Number of violations found.
    pub total: usize,
    /// For the manipulation axioms: manipulated instances evaluated, and
    /// those skipped because the rule refused them. The verdict only covers
    /// the evaluated ones.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tested: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<usize>,
}

impl AxiomReport {
    pub(crate) fn new(axiom: Axiom) -> Self {
        Self {
            axiom,
            holds: true,
            witnesses: Vec::new(),
            total: 0,
            tested: None,
            skipped: None,
        }
    }

    pub(crate) fn push(&mut self, w: Witness) {
        self.holds = false;
        self.total += 1;
        if self.witnesses.len() < WITNESS_CAP {
            self.witnesses.push(w);
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AxiomError {
    #[error("maximum size is only defined for matchings that comply with eligibility")]
    NotEligible,
    #[error("rule `{0}` is not supported by the manipulation harness")]
    UnsupportedRule(Rule),
    #[error(transparent)]
    Rule(#[from] RuleError),
}

pub fn check_eligibility(inst: &Instance, m: &Matching) -> AxiomReport {
    let mut r = AxiomReport::new(Axiom::Eligibility);
    for (agent, category) in m.pairs() {
        if !inst.eligible(agent, category) {
            r.push(Witness::Ineligible { agent, category });
        }
    }
    r
}

pub fn check_respect_priorities(inst: &Instance, m: &Matching) -> AxiomReport {
    let mut r = AxiomReport::new(Axiom::RespectPriorities);
    for (envied, category) in m.pairs() {
        for envier in inst.agents() {
            if !m.is_matched(envier) && inst.strictly_prefers(category, Some(envier), Some(envied))
            {
                r.push(Witness::Envy {
                    envier,
                    envied,
                    category,
                });
            }
        }
    }
    r
}

pub fn check_nonwasteful(inst: &Instance, m: &Matching) -> AxiomReport {
    let mut r = AxiomReport::new(Axiom::Nonwasteful);
    let loads = m.loads(inst.num_categories());
    for agent in inst.agents().filter(|&a| !m.is_matched(a)) {
        for category in inst.category_ids() {
            if inst.eligible(agent, category) && loads[category.0] < inst.quota(category) {
                r.push(Witness::Waste { agent, category });
            }
        }
    }
    r
}

pub fn check_max_size(inst: &Instance, m: &Matching) -> Result<AxiomReport, AxiomError> {
    if !check_eligibility(inst, m).holds {
        return Err(AxiomError::NotEligible);
    }
    let cats: Vec<CategoryId> = inst.category_ids().collect();
    let optimal = max_matching_size(&reservation_graph(inst, &cats));
    let mut r = AxiomReport::new(Axiom::MaxSize);
    if m.len() != optimal {
        r.push(Witness::SizeGap {
            found: m.len(),
            optimal,
        });
    }
    Ok(r)
}

pub fn check_max_beneficiary(inst: &Instance, m: &Matching) -> AxiomReport {
    let pref: Vec<CategoryId> = inst.preferential().collect();
    let optimal = max_matching_size(&reservation_graph(inst, &pref));
    let found = m
        .pairs()
        .filter(|&(_, c)| inst.category(c).kind == CategoryKind::Preferential)
        .count();
    let mut r = AxiomReport::new(Axiom::MaxBeneficiary);
    if found != optimal {
        r.push(Witness::SizeGap { found, optimal });
    }
    r
}

/// Order preservation with respect to the instance's early and late
/// unreserved categories; a missing pool counts as having no units.
pub fn check_order_preservation(inst: &Instance, m: &Matching) -> AxiomReport {
    let early = inst.category_of_kind(CategoryKind::UnreservedFirst);
    let late = inst.category_of_kind(CategoryKind::UnreservedLast);
    let mut r = AxiomReport::new(Axiom::OrderPreservation);
    for (i, ci) in m.pairs() {
        for (j, cj) in m.pairs() {
            if i == j {
                continue;
            }
            // (i): i sits in C_p or the late pool, j in the early pool below i
            if Some(ci) != early
                && Some(cj) == early
                && inst.strictly_prefers(cj, Some(i), Some(j))
                && inst.eligible(j, ci)
            {
                r.push(Witness::OrderPreservation {
                    clause: 1,
                    higher: i,
                    lower: j,
                    higher_category: ci,
                    lower_category: cj,
                });
            }
            // (ii): j sits in C_p or the early pool below i, i in the late pool
            if Some(cj) != late
                && Some(ci) == late
                && inst.strictly_prefers(cj, Some(i), Some(j))
                && inst.eligible(i, cj)
            {
                r.push(Witness::OrderPreservation {
                    clause: 2,
                    higher: i,
                    lower: j,
                    higher_category: ci,
                    lower_category: cj,
                });
            }
        }
    }
    r
}

/// Runs the per-matching checkers in `axioms` and skips the rest. Maximum
/// size on an ineligible matching reports a failure with no witness.
pub fn check_matching(inst: &Instance, m: &Matching, axioms: &[Axiom]) -> Vec<AxiomReport> {
    axioms
        .iter()
        .filter_map(|&axiom| {
            Some(match axiom {
                Axiom::Eligibility => check_eligibility(inst, m),
                Axiom::RespectPriorities => check_respect_priorities(inst, m),
                Axiom::Nonwasteful => check_nonwasteful(inst, m),
                Axiom::MaxSize => check_max_size(inst, m).unwrap_or_else(|_| {
                    let mut r = AxiomReport::new(Axiom::MaxSize);
                    r.holds = false;
                    r
                }),
                Axiom::MaxBeneficiary => check_max_beneficiary(inst, m),
                Axiom::OrderPreservation => check_order_preservation(inst, m),
                Axiom::Strategyproofness | Axiom::WeakNonbossiness => return None,
            })
        })
        .collect()
}
