//! Time-windowed ego networks of first raters.

use crate::error::Result;
use crate::graph::{ItemIdx, Node, TemporalBipartiteGraph, TimeWindow, UserIdx};

/// Hop limit of an ego network; three hops reach every 3+3 subset that
/// contains the ego.
pub const EGO_DEPTH: u32 = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct EgoNetwork {
    /// The first rater, as an index of the source graph.
    pub ego: UserIdx,
    /// The item whose first rating anchors the network; never part of it.
    pub target: ItemIdx,
    /// Time of the first rating.
    pub anchor_time: i64,
    /// Value of the first rating.
    pub first_rating: f64,
    pub window: TimeWindow,
    /// Induced, windowed subgraph. The ego is local user 0.
    pub graph: TemporalBipartiteGraph,
    /// Local user index to source user.
    pub users: Vec<UserIdx>,
    /// Local item index to source item.
    pub items: Vec<ItemIdx>,
}

impl EgoNetwork {
    pub fn ego_local(&self) -> UserIdx {
        UserIdx(0)
    }
}

/// Extracts the ego network of `item`'s first rater.
///
/// Only edges with `anchor - lookback <= t < anchor` are visible and the
/// target item is removed. The result is the subgraph induced on all nodes
/// within [`EGO_DEPTH`] hops of the ego.
pub fn extract_ego_network(
    graph: &TemporalBipartiteGraph,
    item: ItemIdx,
    lookback: i64,
) -> Result<EgoNetwork> {
    let first = graph.first_rating(item)?;
    let window = TimeWindow::before(first.timestamp, lookback);
    let visible = |e: &crate::graph::Edge| e.item != item && window.contains(e.timestamp);

    let reached = graph.bounded_bfs_filtered(Node::User(first.user), EGO_DEPTH, visible)?;
    let mut users = Vec::new();
    let mut items = Vec::new();
    for (node, _) in reached {
        match node {
            Node::User(u) => users.push(u),
            Node::Item(i) => items.push(i),
        }
    }
    let sub = graph.induced_subgraph(&users, &items, visible);
    Ok(EgoNetwork {
        ego: first.user,
        target: item,
        anchor_time: first.timestamp,
        first_rating: first.rating,
        window,
        graph: sub,
        users,
        items,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EgoStats {
    pub size: usize,
    /// `2 * edges / size`.
    pub mean_degree: f64,
    /// `edges / (users * items)`, 0 when either side is empty.
    pub density: f64,
}

pub fn ego_stats(ego: &EgoNetwork) -> EgoStats {
    let g = &ego.graph;
    let size = g.user_count() + g.item_count();
    let edges = g.edge_count() as f64;
    let mean_degree = if size == 0 { 0.0 } else { 2.0 * edges / size as f64 };
    let pairs = (g.user_count() * g.item_count()) as f64;
    let density = if pairs == 0.0 { 0.0 } else { edges / pairs };
    EgoStats { size, mean_degree, density }
}
