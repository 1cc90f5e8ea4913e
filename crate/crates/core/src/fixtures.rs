//! Small hand-built instances used throughout the tests and docs.
//!
//! Agents are named `"1"`, `"2"`, ... and the baseline is `1 ≻ 2 ≻ ...`.

use crate::model::{parse_instance, Instance};

pub const RUNNING_EXAMPLE: &str = include_str!("../fixtures/running_example.json");
pub const RR_WALKTHROUGH: &str = include_str!("../fixtures/rr_walkthrough.json");
pub const RESERVE_COMPARISON: &str = include_str!("../fixtures/reserve_comparison.json");
pub const OVER_AND_ABOVE_TIE: &str = include_str!("../fixtures/over_and_above_tie.json");

/// Three agents, `c1` and `c2` with one unit each.
/// `c1: 2 ≻ 3 ≻ ∅ ≻ 1`, `c2: 2 ≻ ∅ ≻ 1 ≻ 3`.
pub fn running_example() -> Instance {
    load(RUNNING_EXAMPLE)
}

/// Four agents, `c1: 1 ≻ 4 ≻ 2 ≻ ∅`, `c2: 1 ≻ 3 ≻ ∅`, one unit each.
pub fn rr_walkthrough() -> Instance {
    load(RR_WALKTHROUGH)
}

/// Four agents, preferential `c` with eligible agents `{1, 4}` and one
/// unreserved unit `c_u`.
pub fn reserve_comparison() -> Instance {
    load(RESERVE_COMPARISON)
}

/// Four agents, an early unreserved unit, `c1: 1 ≻ 3`, `c2: 2 ≻ 4`.
pub fn over_and_above_tie() -> Instance {
    load(OVER_AND_ABOVE_TIE)
}

fn load(text: &str) -> Instance {
    parse_instance(text.as_bytes()).expect("fixture is valid")
}
