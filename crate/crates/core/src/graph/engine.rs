use std::collections::VecDeque;

use crate::model::{AgentId, CategoryId, Instance};

/// Maximum b-matching over a reduced reservation graph that supports
/// removing agents one at a time.
///
/// The reduced graph is kept implicitly: per category, the agents eligible
/// for it sorted by priority key, plus an inclusive key bound. Rejecting an
/// agent lowers the bound of every category to that agent's key, which drops
/// exactly the edges of agents it strictly outranks. Excluding an agent only
/// removes the agent itself.
///
/// A tentative removal frees the affected units and then repairs the matching
/// with augmenting paths searched backwards from categories with spare
/// capacity. Since an augmenting-path-free matching is maximum, the repaired
/// size is the exact maximum of the new graph.
#[derive(Debug, Clone)]
pub(crate) struct ReducedMatcher {
    cats: Vec<CategoryId>,
    cap: Vec<usize>,
    /// Per local category: eligible agents sorted by key, with their keys.
    ranked: Vec<Vec<(u32, usize)>>,
    /// Per agent: `(local category, key)` for every eligible category.
    adjacency: Vec<Vec<(usize, u32)>>,
    /// Per agent, in baseline order.
    order: Vec<usize>,
    state: State,
    scratch: Scratch,
}

#[derive(Debug, Clone)]
struct State {
    bound: Vec<u32>,
    removed: Vec<bool>,
    assigned: Vec<Option<usize>>,
    load: Vec<usize>,
    size: usize,
}

#[derive(Debug, Clone, Default)]
struct Scratch {
    stamp: u32,
    seen_agent: Vec<u32>,
    seen_cat: Vec<u32>,
    /// For a category reached during the search: the agent that would move
    /// out of it and the category that agent would move into.
    via: Vec<Option<(usize, usize)>>,
    queue: VecDeque<usize>,
}

impl ReducedMatcher {
    /// Starts from the full reservation graph over `cats` and computes a
    /// maximum matching.
    pub fn new(inst: &Instance, cats: &[CategoryId]) -> Self {
        let n = inst.num_agents();
        let m = cats.len();
        let mut ranked: Vec<Vec<(u32, usize)>> = vec![Vec::new(); m];
        let mut adjacency: Vec<Vec<(usize, u32)>> = vec![Vec::new(); n];
        for (j, &c) in cats.iter().enumerate() {
            for a in inst.eligible_agents(c) {
                let key = inst.key(c, a);
                ranked[j].push((key, a.0));
                adjacency[a.0].push((j, key));
            }
            ranked[j].sort_unstable();
        }
        let mut matcher = Self {
            cats: cats.to_vec(),
            cap: cats.iter().map(|&c| inst.quota(c)).collect(),
            ranked,
            adjacency,
            order: inst.baseline().iter().map(|a| a.0).collect(),
            state: State {
                bound: vec![u32::MAX; m],
                removed: vec![false; n],
                assigned: vec![None; n],
                load: vec![0; m],
                size: 0,
            },
            scratch: Scratch {
                stamp: 0,
                seen_agent: vec![0; n],
                seen_cat: vec![0; m],
                via: vec![None; m],
                queue: VecDeque::new(),
            },
        };
        matcher.greedy();
        while matcher.augment() {}
        matcher
    }

    pub fn size(&self) -> usize {
        self.state.size
    }

    #[cfg(test)]
    pub fn is_removed(&self, a: AgentId) -> bool {
        self.state.removed[a.0]
    }

    /// Current assignment as `(agent, category)` pairs.
    #[cfg(test)]
    pub fn pairs(&self) -> Vec<(AgentId, CategoryId)> {
        self.state
            .assigned
            .iter()
            .enumerate()
            .filter_map(|(a, &j)| j.map(|j| (AgentId(a), self.cats[j])))
            .collect()
    }

    /// Removes `agent` unconditionally (no edge reduction) and restores a
    /// maximum matching.
    pub fn exclude(&mut self, agent: AgentId) {
        self.remove(agent.0, false);
        while self.augment() {}
    }

    /// Tries to remove `agent` while keeping the maximum at `target`. With
    /// `reject` the removal also deletes the edges the agent outranks. Returns
    /// the maximum size of the candidate graph; the removal is kept iff that
    /// equals `target`.
    pub fn try_remove(&mut self, agent: AgentId, reject: bool, target: usize) -> usize {
        let saved = self.state.clone();
        self.remove(agent.0, reject);
        while self.state.size < target && self.augment() {}
        let reached = self.state.size;
        if reached != target {
            self.state = saved;
        }
        reached
    }

    fn allowed(&self, a: usize, j: usize, key: u32) -> bool {
        !self.state.removed[a] && key <= self.state.bound[j]
    }

    fn greedy(&mut self) {
        for idx in 0..self.order.len() {
            let a = self.order[idx];
            if self.state.removed[a] || self.state.assigned[a].is_some() {
                continue;
            }
            let pick = self.adjacency[a]
                .iter()
                .find(|&&(j, key)| self.allowed(a, j, key) && self.state.load[j] < self.cap[j])
                .map(|&(j, _)| j);
            if let Some(j) = pick {
                self.state.assigned[a] = Some(j);
                self.state.load[j] += 1;
                self.state.size += 1;
            }
        }
    }

    fn unassign(&mut self, a: usize) {
        if let Some(j) = self.state.assigned[a].take() {
            self.state.load[j] -= 1;
            self.state.size -= 1;
        }
    }

    fn remove(&mut self, a: usize, reject: bool) {
        self.state.removed[a] = true;
        self.unassign(a);
        if !reject {
            return;
        }
        for idx in 0..self.adjacency[a].len() {
            let (j, key) = self.adjacency[a][idx];
            if key >= self.state.bound[j] {
                continue;
            }
            self.state.bound[j] = key;
            // agents strictly below the new bound lose their edge to j
            let start = self.ranked[j].partition_point(|&(k, _)| k <= key);
            for pos in start..self.ranked[j].len() {
                let b = self.ranked[j][pos].1;
                if self.state.assigned[b] == Some(j) {
                    self.unassign(b);
                }
            }
        }
    }

    /// One augmenting path, searched backwards from every category with spare
    /// capacity at once. Returns whether the matching grew.
    fn augment(&mut self) -> bool {
        let s = &mut self.scratch;
        s.stamp = s.stamp.wrapping_add(1);
        if s.stamp == 0 {
            s.seen_agent.fill(0);
            s.seen_cat.fill(0);
            s.stamp = 1;
        }
        let stamp = s.stamp;
        s.queue.clear();
        for j in 0..self.cats.len() {
            if self.state.load[j] < self.cap[j] {
                s.seen_cat[j] = stamp;
                s.via[j] = None;
                s.queue.push_back(j);
            }
        }
        while let Some(j) = s.queue.pop_front() {
            let bound = self.state.bound[j];
            for &(key, b) in &self.ranked[j] {
                if key > bound {
                    break;
                }
                if self.state.removed[b] || s.seen_agent[b] == stamp {
                    continue;
                }
                s.seen_agent[b] = stamp;
                match self.state.assigned[b] {
                    None => {
                        // b takes a unit of j; unwind the chain of moves
                        self.state.assigned[b] = Some(j);
                        self.state.size += 1;
                        let mut cur = j;
                        while let Some((mover, into)) = s.via[cur] {
                            self.state.assigned[mover] = Some(into);
                            cur = into;
                        }
                        self.state.load[cur] += 1;
                        return true;
                    }
                    Some(home) if s.seen_cat[home] != stamp => {
                        s.seen_cat[home] = stamp;
                        s.via[home] = Some((b, j));
                        s.queue.push_back(home);
                    }
                    Some(_) => {}
                }
            }
        }
        false
    }
}
