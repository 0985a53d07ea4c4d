use crate::graph::{ItemIdx, TemporalBipartiteGraph, UserIdx};

/// Opsahl's bipartite clustering coefficient: closed 4-paths over 4-paths.
///
/// A 4-path is `v0 w1 v2 w3 v4` with users at both ends, counted once up to
/// reversal. It is closed when some item other than `w1` and `w3` is
/// adjacent to both `v0` and `v4`. Returns 0 when there are no 4-paths.
pub fn opsahl_cstar(graph: &TemporalBipartiteGraph) -> f64 {
    let mut total = 0u64;
    let mut closed = 0u64;
    for v2 in graph.users() {
        let centre = graph.user_adjacency(v2);
        for a1 in centre {
            let w1 = ItemIdx(a1.neighbor);
            for a3 in centre {
                let w3 = ItemIdx(a3.neighbor);
                if w1 == w3 {
                    continue;
                }
                for b0 in graph.item_adjacency(w1) {
                    let v0 = UserIdx(b0.neighbor);
                    if v0 == v2 {
                        continue;
                    }
                    for b4 in graph.item_adjacency(w3) {
                        let v4 = UserIdx(b4.neighbor);
                        // v0 < v4 keeps one orientation of each path
                        if v4 == v2 || v4 <= v0 {
                            continue;
                        }
                        total += 1;
                        let common = common_items(graph, v0, v4);
                        let excluded = graph.has_edge(v4, w1) as usize + graph.has_edge(v0, w3) as usize;
                        if common > excluded {
                            closed += 1;
                        }
                    }
                }
            }
        }
    }
    if total == 0 {
        0.0
    } else {
        closed as f64 / total as f64
    }
}

fn common_items(graph: &TemporalBipartiteGraph, a: UserIdx, b: UserIdx) -> usize {
    let (mut x, mut y) = (graph.user_adjacency(a).iter().peekable(), graph.user_adjacency(b).iter().peekable());
    let mut n = 0;
    while let (Some(p), Some(q)) = (x.peek(), y.peek()) {
        match p.neighbor.cmp(&q.neighbor) {
            std::cmp::Ordering::Less => {
                x.next();
            }
            std::cmp::Ordering::Greater => {
                y.next();
            }
            std::cmp::Ordering::Equal => {
                n += 1;
                x.next();
                y.next();
            }
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    fn bigraph(users: usize, items: usize, edges: &[(u32, u32)]) -> TemporalBipartiteGraph {
        let edges = edges
            .iter()
            .map(|&(u, i)| Edge { user: UserIdx(u), item: ItemIdx(i), rating: 1.0, timestamp: 0 })
            .collect();
        let ids = |p: &str, n: usize| (0..n).map(|k| format!("{p}{k}")).collect();
        TemporalBipartiteGraph::from_parts(ids("u", users), ids("i", items), edges, 0).unwrap()
    }

    #[test]
    fn six_cycle_is_fully_closed() {
        let g = bigraph(3, 3, &[(0, 0), (1, 0), (1, 1), (2, 1), (2, 2), (0, 2)]);
        assert_eq!(opsahl_cstar(&g), 1.0);
    }

    #[test]
    fn six_path_is_open() {
        let g = bigraph(3, 3, &[(0, 0), (1, 0), (1, 1), (2, 1), (2, 2)]);
        assert_eq!(opsahl_cstar(&g), 0.0);
    }

    #[test]
    fn empty() {
        assert_eq!(opsahl_cstar(&TemporalBipartiteGraph::empty()), 0.0);
    }
}
