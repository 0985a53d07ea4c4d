#![allow(dead_code)]

pub mod oracle;

use popclust::graph::Edge;
use popclust::{ItemIdx, TemporalBipartiteGraph, UserIdx};

pub fn timed_graph(users: u32, items: u32, edges: &[(u32, u32, f64, i64)]) -> TemporalBipartiteGraph {
    let edges = edges
        .iter()
        .map(|&(u, i, rating, timestamp)| Edge { user: UserIdx(u), item: ItemIdx(i), rating, timestamp })
        .collect();
    let ids = |p: &str, n: u32| (0..n).map(|k| format!("{p}{k}")).collect();
    TemporalBipartiteGraph::from_parts(ids("u", users), ids("i", items), edges, 0).unwrap()
}

pub fn plain_graph(users: u32, items: u32, edges: &[(u32, u32)]) -> TemporalBipartiteGraph {
    let timed: Vec<_> = edges.iter().map(|&(u, i)| (u, i, 3.0, 0)).collect();
    timed_graph(users, items, &timed)
}
