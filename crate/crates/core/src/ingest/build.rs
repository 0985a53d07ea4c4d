use std::collections::hash_map::Entry;
use std::collections::HashMap;

use super::RatingEvent;
use crate::graph::{Edge, ItemIdx, TemporalBipartiteGraph, UserIdx};

/// Builds the bipartite graph of an event stream.
///
/// Node indexes follow first appearance. A repeated `(user, item)` pair keeps
/// its earliest-timestamped event (the first one seen on ties); every other
/// occurrence is counted in [`TemporalBipartiteGraph::duplicates`].
pub fn build_graph(events: &[RatingEvent]) -> TemporalBipartiteGraph {
    let mut user_ids: Vec<String> = Vec::new();
    let mut item_ids: Vec<String> = Vec::new();
    let mut users: HashMap<&str, u32> = HashMap::new();
    let mut items: HashMap<&str, u32> = HashMap::new();
    let mut pairs: HashMap<(u32, u32), usize> = HashMap::new();
    let mut edges: Vec<Edge> = Vec::new();
    let mut duplicates = 0;

    for ev in events {
        let u = *users.entry(ev.user_id.as_str()).or_insert_with(|| {
            user_ids.push(ev.user_id.clone());
            (user_ids.len() - 1) as u32
        });
        let i = *items.entry(ev.item_id.as_str()).or_insert_with(|| {
            item_ids.push(ev.item_id.clone());
            (item_ids.len() - 1) as u32
        });
        let edge = Edge { user: UserIdx(u), item: ItemIdx(i), rating: ev.rating, timestamp: ev.timestamp };
        match pairs.entry((u, i)) {
            Entry::Vacant(slot) => {
                slot.insert(edges.len());
                edges.push(edge);
            }
            Entry::Occupied(slot) => {
                duplicates += 1;
                let kept = &mut edges[*slot.get()];
                if edge.timestamp < kept.timestamp {
                    *kept = edge;
                }
            }
        }
    }

    TemporalBipartiteGraph::from_parts(user_ids, item_ids, edges, duplicates)
        .expect("deduplicated edges form a valid graph")
}
