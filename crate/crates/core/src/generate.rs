//! Seeded random instances.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{AgentId, Category, CategoryKind, Instance, ModelError, PriorityRanking};

#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub agents: usize,
    /// Preferential categories, named `c1`, `c2`, ...
    pub categories: usize,
    /// Quotas are drawn uniformly from `1..=max_quota`; zero gives empty
    /// categories.
    pub max_quota: usize,
    /// Probability that an agent is eligible for a category.
    pub density: f64,
    /// Probability that an eligible agent joins the tier of the one ranked
    /// just above it instead of starting a new tier.
    pub tie_prob: f64,
    pub seed: u64,
    /// Quota of an unreserved category `u`, processed last.
    pub unreserved: Option<usize>,
    /// Each agent eligible for at most one preferential category, with
    /// eligible agents ranked strictly by the baseline. Ignores `tie_prob`.
    pub consistent: bool,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            agents: 5,
            categories: 2,
            max_quota: 2,
            density: 0.5,
            tie_prob: 0.0,
            seed: 0,
            unreserved: None,
            consistent: false,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("{name} must lie in [0, 1], got {value}")]
    Probability { name: &'static str, value: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub fn generate(params: &GenParams) -> Result<Instance, GenError> {
    for (name, value) in [("density", params.density), ("tie_prob", params.tie_prob)] {
        if !(0.0..=1.0).contains(&value) {
            return Err(GenError::Probability { name, value });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n = params.agents;
    let mut baseline: Vec<AgentId> = (0..n).map(AgentId).collect();
    baseline.shuffle(&mut rng);

    let quotas: Vec<usize> = (0..params.categories)
        .map(|_| {
            if params.max_quota == 0 {
                0
            } else {
                rng.gen_range(1..=params.max_quota)
            }
        })
        .collect();

    let mut categories = Vec::with_capacity(params.categories + 1);
    if params.consistent {
        let mut members: Vec<Vec<AgentId>> = vec![Vec::new(); params.categories];
        if params.categories > 0 {
            for &a in &baseline {
                if rng.gen_bool(params.density) {
                    members[rng.gen_range(0..params.categories)].push(a);
                }
            }
        }
        for (k, m) in members.into_iter().enumerate() {
            let cutoff = m.len();
            let tiers = m.into_iter().map(|a| vec![a]).collect();
            categories.push(category(k, quotas[k], PriorityRanking::new(tiers, cutoff)?));
        }
    } else {
        for (k, &quota) in quotas.iter().enumerate() {
            let mut eligible: Vec<AgentId> = (0..n)
                .map(AgentId)
                .filter(|_| rng.gen_bool(params.density))
                .collect();
            eligible.shuffle(&mut rng);
            let mut tiers: Vec<Vec<AgentId>> = Vec::new();
            for a in eligible {
                match tiers.last_mut() {
                    Some(tier) if rng.gen_bool(params.tie_prob) => tier.push(a),
                    _ => tiers.push(vec![a]),
                }
            }
            let cutoff = tiers.len();
            categories.push(category(k, quota, PriorityRanking::new(tiers, cutoff)?));
        }
    }

    if let Some(quota) = params.unreserved {
        categories.push(Category {
            name: "u".into(),
            kind: CategoryKind::UnreservedLast,
            quota,
            priority: PriorityRanking::strict(&baseline),
        });
    }
    Ok(Instance::with_numbered_agents(n, categories, baseline)?)
}

fn category(k: usize, quota: usize, priority: PriorityRanking) -> Category {
    Category {
        name: format!("c{}", k + 1),
        kind: CategoryKind::Preferential,
        quota,
        priority,
    }
}
