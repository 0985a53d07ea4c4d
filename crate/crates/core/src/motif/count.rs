use std::sync::atomic::{AtomicU64, Ordering};

use super::classify::table;
use super::MotifCounts;
use crate::error::{Error, Result};
use crate::exec::{try_fold_reduce, Execution};
use crate::graph::{ItemIdx, TemporalBipartiteGraph, UserIdx};

/// Default cap on distinct candidate subsets per census.
pub const DEFAULT_BUDGET: u64 = 2_000_000_000;

#[derive(Clone, Copy, Debug)]
pub struct CountOptions {
    /// Abort with [`Error::BudgetExceeded`] once more than this many distinct
    /// subsets have been classified. `None` disables the guard.
    pub budget: Option<u64>,
    pub execution: Execution,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions { budget: Some(DEFAULT_BUDGET), execution: Execution::default() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MotifCensus {
    pub global: MotifCounts,
    /// Counts restricted to subsets containing each user, by user index.
    pub per_user: Vec<MotifCounts>,
    /// Distinct subsets with a spanning path that were classified.
    pub candidate_sets: u64,
}

struct Acc {
    global: MotifCounts,
    per_user: Vec<MotifCounts>,
    sets: u64,
}

impl Acc {
    fn new(users: usize) -> Self {
        Acc { global: MotifCounts::default(), per_user: vec![MotifCounts::default(); users], sets: 0 }
    }

    fn merge(mut self, other: Acc) -> Acc {
        self.global += other.global;
        for (a, b) in self.per_user.iter_mut().zip(other.per_user) {
            *a += b;
        }
        self.sets += other.sets;
        self
    }
}

/// Sorted positions of three distinct values.
fn ranks(x: [u32; 3]) -> [u8; 3] {
    let r = |i: usize| ((x[(i + 1) % 3] < x[i]) as u8) + ((x[(i + 2) % 3] < x[i]) as u8);
    [r(0), r(1), r(2)]
}

/// Exact census of all 3-user/3-item subsets of `graph`.
///
/// Enumerates every simple 5-path `v0 w0 v1 w1 v2 w2` starting at a user.
/// Each such path spans one subset; the subset is classified only when the
/// path is that subset's canonical spanning path, so every subset that has a
/// spanning path is classified exactly once, with no shared dedup state.
/// Subsets without a spanning path belong to no counted class and are never
/// visited.
pub fn count_motifs(graph: &TemporalBipartiteGraph, opts: &CountOptions) -> Result<MotifCensus> {
    let info = table();
    let users: Vec<UserIdx> = graph.users().collect();
    let seen = AtomicU64::new(0);
    let budget = opts.budget.unwrap_or(u64::MAX);

    let visit = |mut acc: Acc, &v0: &UserIdx| -> Result<Acc> {
        for a0 in graph.user_adjacency(v0) {
            let w0 = ItemIdx(a0.neighbor);
            for a1 in graph.item_adjacency(w0) {
                let v1 = UserIdx(a1.neighbor);
                if v1 == v0 {
                    continue;
                }
                for a2 in graph.user_adjacency(v1) {
                    let w1 = ItemIdx(a2.neighbor);
                    if w1 == w0 {
                        continue;
                    }
                    let v0w1 = graph.has_edge(v0, w1);
                    for a3 in graph.item_adjacency(w1) {
                        let v2 = UserIdx(a3.neighbor);
                        if v2 == v0 || v2 == v1 {
                            continue;
                        }
                        let v2w0 = graph.has_edge(v2, w0);
                        for a4 in graph.user_adjacency(v2) {
                            let w2 = ItemIdx(a4.neighbor);
                            if w2 == w0 || w2 == w1 {
                                continue;
                            }
                            let rv = ranks([v0.0, v1.0, v2.0]);
                            let rw = ranks([w0.0, w1.0, w2.0]);
                            let mut adjacent = [(0, 0), (1, 0), (1, 1), (2, 1), (2, 2)]
                                .iter()
                                .fold(0u16, |m, &(p, s)| m | 1 << (3 * rv[p] + rw[s]));
                            let mut set = |p: usize, s: usize, on: bool| {
                                if on {
                                    adjacent |= 1 << (3 * rv[p] + rw[s]);
                                }
                            };
                            set(0, 1, v0w1);
                            set(2, 0, v2w0);
                            set(0, 2, graph.has_edge(v0, w2));
                            set(1, 2, graph.has_edge(v1, w2));
                            let entry = &info[adjacent as usize];
                            if entry.canonical_path != Some((rv, rw)) {
                                continue;
                            }
                            if seen.fetch_add(1, Ordering::Relaxed) >= budget {
                                return Err(Error::BudgetExceeded { limit: budget });
                            }
                            acc.sets += 1;
                            acc.global.record(entry.class);
                            for v in [v0, v1, v2] {
                                acc.per_user[v.0 as usize].record(entry.class);
                            }
                        }
                    }
                }
            }
        }
        Ok(acc)
    };

    let n = graph.user_count();
    let acc = try_fold_reduce(opts.execution, &users, || Acc::new(n), visit, Acc::merge)?;
    Ok(MotifCensus { global: acc.global, per_user: acc.per_user, candidate_sets: acc.sets })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use crate::motif::icc_from_counts;

    fn bigraph(users: usize, items: usize, edges: &[(u32, u32)]) -> TemporalBipartiteGraph {
        let edges = edges
            .iter()
            .map(|&(u, i)| Edge { user: UserIdx(u), item: ItemIdx(i), rating: 1.0, timestamp: 0 })
            .collect();
        let ids = |p: &str, n: usize| (0..n).map(|k| format!("{p}{k}")).collect();
        TemporalBipartiteGraph::from_parts(ids("u", users), ids("i", items), edges, 0).unwrap()
    }

    fn census(g: &TemporalBipartiteGraph) -> MotifCensus {
        count_motifs(g, &CountOptions { budget: None, execution: Execution::Sequential }).unwrap()
    }

    #[test]
    fn ranks_of_triples() {
        assert_eq!(ranks([5, 1, 9]), [1, 0, 2]);
        assert_eq!(ranks([3, 2, 1]), [2, 1, 0]);
    }

    #[test]
    fn six_cycle() {
        let g = bigraph(3, 3, &[(0, 0), (1, 0), (1, 1), (2, 1), (2, 2), (0, 2)]);
        let c = census(&g);
        assert_eq!(c.global, MotifCounts { sigma: [1, 0, 0, 0], kappa: [0, 0, 0] });
        assert!(c.per_user.iter().all(|u| *u == c.global));
        assert_eq!(icc_from_counts(&c.global).icc[0], 1.0);
    }

    #[test]
    fn six_path() {
        let g = bigraph(3, 3, &[(0, 0), (1, 0), (1, 1), (2, 1), (2, 2)]);
        let c = census(&g);
        assert_eq!(c.global, MotifCounts { sigma: [0; 4], kappa: [1, 0, 0] });
        assert_eq!(icc_from_counts(&c.global).icc[0], 0.0);
    }

    #[test]
    fn biclique() {
        let all: Vec<_> = (0..3).flat_map(|u| (0..3).map(move |i| (u, i))).collect();
        let c = census(&bigraph(3, 3, &all));
        assert_eq!(c.global, MotifCounts { sigma: [0, 0, 0, 1], kappa: [0; 3] });
        assert_eq!(c.candidate_sets, 1);
    }

    #[test]
    fn empty_graph() {
        let c = census(&TemporalBipartiteGraph::empty());
        assert_eq!(c.global, MotifCounts::default());
        assert!(c.per_user.is_empty());
    }

    #[test]
    fn budget_guard() {
        // K4,4 has 16 subsets, all complete bicliques
        let all: Vec<_> = (0..4).flat_map(|u| (0..4).map(move |i| (u, i))).collect();
        let g = bigraph(4, 4, &all);
        assert_eq!(census(&g).global.sigma[3], 16);
        for execution in [Execution::Sequential, Execution::Parallel] {
            let exceeded = count_motifs(&g, &CountOptions { budget: Some(15), execution });
            assert!(matches!(exceeded, Err(Error::BudgetExceeded { limit: 15 })));
            let fits = count_motifs(&g, &CountOptions { budget: Some(16), execution });
            assert!(fits.is_ok());
        }
    }
}
