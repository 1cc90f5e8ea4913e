//! Reservation graphs and maximum-size b-matching.

mod engine;

use std::collections::BTreeSet;

use crate::model::{AgentId, CategoryId, Instance, Matching};

pub(crate) use engine::ReducedMatcher;

/// Bipartite eligibility graph between agents and capacitated categories.
///
/// Agents are kept in the order given at construction, which for graphs built
/// from an instance is the baseline order. That order (and the category order)
/// is the tiebreak used by [`max_matching`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReservationGraph {
    agents: Vec<AgentId>,
    categories: Vec<(CategoryId, usize)>,
    /// Per agent slot, indices into `categories` in ascending order.
    adjacency: Vec<Vec<usize>>,
}

impl ReservationGraph {
    /// Builds a graph from explicit parts. Edges whose endpoints are not
    /// listed are dropped.
    pub fn from_parts(
        agents: Vec<AgentId>,
        categories: Vec<(CategoryId, usize)>,
        edges: impl IntoIterator<Item = (AgentId, CategoryId)>,
    ) -> Self {
        let mut adjacency = vec![Vec::new(); agents.len()];
        for (a, c) in edges {
            let (Some(i), Some(j)) = (
                agents.iter().position(|&x| x == a),
                categories.iter().position(|&(x, _)| x == c),
            ) else {
                continue;
            };
            adjacency[i].push(j);
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
            adj.dedup();
        }
        Self {
            agents,
            categories,
            adjacency,
        }
    }

    pub fn agents(&self) -> &[AgentId] {
        &self.agents
    }

    pub fn categories(&self) -> &[(CategoryId, usize)] {
        &self.categories
    }

    pub fn edges(&self) -> BTreeSet<(AgentId, CategoryId)> {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, adj)| adj.iter().map(move |&j| (i, j)))
            .map(|(i, j)| (self.agents[i], self.categories[j].0))
            .collect()
    }

    pub fn num_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }

    pub fn contains_edge(&self, a: AgentId, c: CategoryId) -> bool {
        let Some(i) = self.agents.iter().position(|&x| x == a) else {
            return false;
        };
        self.adjacency[i].iter().any(|&j| self.categories[j].0 == c)
    }

    /// Same graph with the given agents (and their edges) removed.
    pub fn without_agents(&self, removed: &BTreeSet<AgentId>) -> Self {
        let (agents, adjacency) = self
            .agents
            .iter()
            .zip(&self.adjacency)
            .filter(|(a, _)| !removed.contains(a))
            .map(|(&a, adj)| (a, adj.clone()))
            .unzip();
        Self {
            agents,
            categories: self.categories.clone(),
            adjacency,
        }
    }
}

/// Reservation graph over all agents and the given categories: an edge for
/// every eligible pair.
pub fn reservation_graph(inst: &Instance, cats: &[CategoryId]) -> ReservationGraph {
    reduced_graph(inst, cats, &BTreeSet::new())
}

/// Reservation graph with `rejected` agents removed and every edge `(j, c)`
/// dropped for which some rejected agent ranks strictly above `j` at `c`.
pub fn reduced_graph(
    inst: &Instance,
    cats: &[CategoryId],
    rejected: &BTreeSet<AgentId>,
) -> ReservationGraph {
    let categories: Vec<(CategoryId, usize)> = cats.iter().map(|&c| (c, inst.quota(c))).collect();
    // An edge survives iff its key is at most the best key among rejected agents.
    let bounds: Vec<u32> = cats
        .iter()
        .map(|&c| {
            rejected
                .iter()
                .map(|&r| inst.key(c, r))
                .min()
                .unwrap_or(u32::MAX)
        })
        .collect();
    let agents: Vec<AgentId> = inst
        .baseline()
        .iter()
        .copied()
        .filter(|a| !rejected.contains(a))
        .collect();
    let adjacency = agents
        .iter()
        .map(|&a| {
            cats.iter()
                .enumerate()
                .filter(|&(j, &c)| inst.eligible(a, c) && inst.key(c, a) <= bounds[j])
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    ReservationGraph {
        agents,
        categories,
        adjacency,
    }
}

/// Size of a maximum b-matching of `g`.
pub fn max_matching_size(g: &ReservationGraph) -> usize {
    max_matching(g).len()
}

/// A maximum b-matching of `g`, chosen deterministically: a greedy pass over
/// agents in graph order (categories in graph order), then one augmenting
/// search from each still-unmatched agent in graph order.
pub fn max_matching(g: &ReservationGraph) -> Matching {
    let n = g.agents.len();
    let m = g.categories.len();
    let mut assigned: Vec<Option<usize>> = vec![None; n];
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); m];

    for (i, slot) in assigned.iter_mut().enumerate() {
        if let Some(&j) = g.adjacency[i]
            .iter()
            .find(|&&j| members[j].len() < g.categories[j].1)
        {
            *slot = Some(j);
            members[j].push(i);
        }
    }

    let mut visited = vec![usize::MAX; m];
    for i in 0..n {
        if assigned[i].is_none() {
            augment(g, i, i, &mut assigned, &mut members, &mut visited);
        }
    }

    assigned
        .iter()
        .enumerate()
        .filter_map(|(i, &j)| j.map(|j| (g.agents[i], g.categories[j].0)))
        .collect()
}

// Depth is bounded by the number of categories, each visited once per search.
fn augment(
    g: &ReservationGraph,
    i: usize,
    stamp: usize,
    assigned: &mut [Option<usize>],
    members: &mut [Vec<usize>],
    visited: &mut [usize],
) -> bool {
    for &j in &g.adjacency[i] {
        if visited[j] == stamp {
            continue;
        }
        visited[j] = stamp;
        let found = if members[j].len() < g.categories[j].1 {
            true
        } else {
            // a successful recursive call moves `other` out of `j` itself
            let mut moved = false;
            for slot in 0..members[j].len() {
                let other = members[j][slot];
                if augment(g, other, stamp, assigned, members, visited) {
                    moved = true;
                    break;
                }
            }
            moved
        };
        if found {
            if let Some(old) = assigned[i] {
                let pos = members[old].iter().position(|&x| x == i).unwrap();
                members[old].swap_remove(pos);
            }
            assigned[i] = Some(j);
            members[j].push(i);
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn names(inst: &Instance, edges: &BTreeSet<(AgentId, CategoryId)>) -> Vec<(String, String)> {
        edges
            .iter()
            .map(|&(a, c)| (inst.agent_name(a).into(), inst.category(c).name.clone()))
            .collect()
    }

    fn pairs(v: &[(&str, &str)]) -> Vec<(String, String)> {
        v.iter()
            .map(|(a, c)| (a.to_string(), c.to_string()))
            .collect()
    }

    fn all_cats(inst: &Instance) -> Vec<CategoryId> {
        inst.category_ids().collect()
    }

    fn agents(inst: &Instance, names: &[&str]) -> BTreeSet<AgentId> {
        names
            .iter()
            .map(|n| inst.agent_by_name(n).unwrap())
            .collect()
    }

    #[test]
    fn running_example_graph() {
        let inst = fixtures::running_example();
        let g = reservation_graph(&inst, &all_cats(&inst));
        assert_eq!(
            names(&inst, &g.edges()),
            pairs(&[("2", "c1"), ("2", "c2"), ("3", "c1")])
        );
        assert_eq!(max_matching_size(&g), 2);
        assert_eq!(max_matching(&g).describe(&inst), "{2→c2, 3→c1}");
    }

    #[test]
    fn walkthrough_graphs() {
        let inst = fixtures::rr_walkthrough();
        let cats = all_cats(&inst);
        let g = reservation_graph(&inst, &cats);
        assert_eq!(
            names(&inst, &g.edges()),
            pairs(&[
                ("1", "c1"),
                ("1", "c2"),
                ("2", "c1"),
                ("3", "c2"),
                ("4", "c1")
            ])
        );
        let expected = pairs(&[("1", "c1"), ("1", "c2"), ("3", "c2")]);
        let g4 = reduced_graph(&inst, &cats, &agents(&inst, &["4"]));
        assert_eq!(names(&inst, &g4.edges()), expected);
        let g24 = reduced_graph(&inst, &cats, &agents(&inst, &["2", "4"]));
        assert_eq!(names(&inst, &g24.edges()), expected);
        let g34 = reduced_graph(&inst, &cats, &agents(&inst, &["3", "4"]));
        assert_eq!(max_matching_size(&g34), 1);
        assert_eq!(max_matching(&g24).describe(&inst), "{1→c1, 3→c2}");
    }

    #[test]
    fn empty_cases() {
        let inst = fixtures::running_example();
        let g = reservation_graph(&inst, &[]);
        assert!(g.categories().is_empty());
        assert_eq!(g.num_edges(), 0);
        assert_eq!(max_matching_size(&g), 0);
        let same = reduced_graph(&inst, &all_cats(&inst), &BTreeSet::new());
        assert_eq!(same, reservation_graph(&inst, &all_cats(&inst)));
    }

    #[test]
    fn single_forced_edge() {
        let g = ReservationGraph::from_parts(
            vec![AgentId(0)],
            vec![(CategoryId(0), 1)],
            [(AgentId(0), CategoryId(0))],
        );
        assert_eq!(
            max_matching(&g),
            Matching::from_pairs([(AgentId(0), CategoryId(0))])
        );
    }

    #[test]
    fn capacities_are_respected() {
        // three agents all adjacent to one category of capacity 2 and one of capacity 0
        let g = ReservationGraph::from_parts(
            (0..3).map(AgentId).collect(),
            vec![(CategoryId(0), 2), (CategoryId(1), 0)],
            (0..3).flat_map(|a| [(AgentId(a), CategoryId(0)), (AgentId(a), CategoryId(1))]),
        );
        let m = max_matching(&g);
        assert_eq!(m.len(), 2);
        assert_eq!(m.load(CategoryId(1)), 0);
    }

    #[test]
    fn augmenting_reroutes_greedy_choice() {
        // greedy puts a0 on c0, a1 only fits c0: augmenting must move a0 to c1
        let g = ReservationGraph::from_parts(
            vec![AgentId(0), AgentId(1)],
            vec![(CategoryId(0), 1), (CategoryId(1), 1)],
            [
                (AgentId(0), CategoryId(0)),
                (AgentId(0), CategoryId(1)),
                (AgentId(1), CategoryId(0)),
            ],
        );
        let m = max_matching(&g);
        assert_eq!(m.get(AgentId(0)), Some(CategoryId(1)));
        assert_eq!(m.get(AgentId(1)), Some(CategoryId(0)));
    }
}
