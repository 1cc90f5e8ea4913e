//! Priority-respecting rationing.
//!
//! Agents are matched to categories with quotas. Every category ranks the
//! agents in tiers and marks where the empty outcome sits; only agents
//! strictly above it are eligible. A baseline ordering breaks the remaining
//! ties. [`rules::rr`] and [`rules::srr`] compute matchings that comply with
//! eligibility, respect priorities and have maximum size; [`axioms`] checks
//! those properties and [`oracle`] recomputes them by brute force.
//!
//! ```
//! use rationing::{fixtures, rules::rr_all};
//!
//! let inst = fixtures::running_example();
//! let (matching, _) = rr_all(&inst);
//! assert_eq!(matching.describe(&inst), "{2→c2, 3→c1}");
//! ```

pub mod axioms;
pub mod fixtures;
pub mod generate;
pub mod graph;
pub mod model;
pub mod oracle;
pub mod rules;

pub use axioms::{Axiom, AxiomReport, Witness};
pub use model::{
    parse_instance, AgentId, CategoryId, CategoryKind, Instance, InstanceDocument, Matching,
    ModelError, PriorityRanking, UnreservedSplit,
};
pub use rules::{Rule, RuleError};
