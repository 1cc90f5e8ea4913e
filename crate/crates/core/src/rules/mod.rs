//! Allocation rules.

mod da;
mod reserves;
mod rr;
mod soft;
mod srr;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::model::{Instance, Matching, ModelError};

pub use da::{deferred_acceptance, uniform_preferences};
pub use reserves::{check_reserve_preconditions, minimum_guarantees, over_and_above};
pub use rr::{rr, rr_all, rr_excluding, RrDecision, RrTrace};
pub use soft::{check_soft_preconditions, soft_reserves};
pub use srr::{srr, srr_with_split};

pub use crate::model::UnreservedSplit;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleError {
    #[error("instance has no unreserved category")]
    MissingUnreserved,
    #[error("rule precondition violated: {0}")]
    Precondition(String),
    #[error("invalid preferences: {0}")]
    Preferences(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// The rules that map an instance alone to a matching. Rules that need a
/// split of the unreserved units read it from the instance's unreserved
/// categories (see [`Instance::with_unreserved_split`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    Rr,
    Srr,
    MinimumGuarantees,
    OverAndAbove,
    SoftReserves,
}

impl Rule {
    pub fn apply(self, inst: &Instance) -> Result<Matching, RuleError> {
        match self {
            Rule::Rr => Ok(rr_all(inst).0),
            Rule::Srr => srr(inst),
            Rule::MinimumGuarantees => minimum_guarantees(inst),
            Rule::OverAndAbove => over_and_above(inst),
            Rule::SoftReserves => soft_reserves(inst),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Rule::Rr => "rr",
            Rule::Srr => "srr",
            Rule::MinimumGuarantees => "mg",
            Rule::OverAndAbove => "oaa",
            Rule::SoftReserves => "soft",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "rr" => Rule::Rr,
            "srr" => Rule::Srr,
            "mg" => Rule::MinimumGuarantees,
            "oaa" => Rule::OverAndAbove,
            "soft" => Rule::SoftReserves,
            other => return Err(format!("unknown rule `{other}`")),
        })
    }
}
