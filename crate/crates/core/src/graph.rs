//! Immutable temporal bipartite graph.
//!
//! Users are the primary partition, items the secondary one. Every edge is a
//! single rating with a timestamp. Adjacency is stored in CSR form: each
//! user's neighbours are sorted by item index, each item's neighbours by user
//! index, and every item additionally keeps its edges ordered by
//! `(timestamp, user)`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UserIdx(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ItemIdx(pub u32);

/// A node of either partition. Orders all users before all items.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    User(UserIdx),
    Item(ItemIdx),
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::User(u) => write!(f, "user#{}", u.0),
            Node::Item(i) => write!(f, "item#{}", i.0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub user: UserIdx,
    pub item: ItemIdx,
    pub rating: f64,
    pub timestamp: i64,
}

/// One adjacency entry: the neighbour's index in the other partition and the
/// id of the connecting edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Adj {
    pub neighbor: u32,
    pub edge: u32,
}

/// Half-open time interval `[start, end)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TimeWindow {
    start: i64,
    end: i64,
}

impl TimeWindow {
    pub fn new(start: i64, end: i64) -> Result<Self> {
        if start > end {
            return Err(Error::invalid(format!("window start {start} is after end {end}")));
        }
        Ok(TimeWindow { start, end })
    }

    pub fn all() -> Self {
        TimeWindow { start: i64::MIN, end: i64::MAX }
    }

    /// `[anchor - length, anchor)`, saturating at `i64::MIN`.
    pub fn before(anchor: i64, length: i64) -> Self {
        TimeWindow { start: anchor.saturating_sub(length), end: anchor }
    }

    /// `[anchor, anchor + length)`, saturating at `i64::MAX`.
    pub fn after(anchor: i64, length: i64) -> Self {
        TimeWindow { start: anchor, end: anchor.saturating_add(length) }
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn end(&self) -> i64 {
        self.end
    }

    pub fn contains(&self, t: i64) -> bool {
        self.start <= t && t < self.end
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn intersect(&self, other: &TimeWindow) -> TimeWindow {
        let start = self.start.max(other.start);
        let end = self.end.min(other.end).max(start);
        TimeWindow { start, end }
    }
}

/// The earliest rating of an item.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FirstRating {
    pub user: UserIdx,
    pub rating: f64,
    pub timestamp: i64,
    pub edge: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TemporalBipartiteGraph {
    user_ids: Vec<String>,
    item_ids: Vec<String>,
    user_lookup: HashMap<String, u32>,
    item_lookup: HashMap<String, u32>,
    edges: Vec<Edge>,
    user_offsets: Vec<usize>,
    user_adj: Vec<Adj>,
    item_offsets: Vec<usize>,
    item_adj: Vec<Adj>,
    /// Edge ids per item ordered by `(timestamp, user)`; shares `item_offsets`.
    item_timeline: Vec<u32>,
    duplicates: usize,
}

fn csr(len: usize, pairs: impl Iterator<Item = (u32, Adj)>, count: usize) -> (Vec<usize>, Vec<Adj>) {
    let pairs: Vec<(u32, Adj)> = pairs.collect();
    let mut offsets = vec![0usize; len + 1];
    for &(owner, _) in &pairs {
        offsets[owner as usize + 1] += 1;
    }
    for i in 0..len {
        offsets[i + 1] += offsets[i];
    }
    let mut fill = offsets.clone();
    let mut adj = vec![Adj { neighbor: 0, edge: 0 }; count];
    for (owner, a) in pairs {
        let slot = &mut fill[owner as usize];
        adj[*slot] = a;
        *slot += 1;
    }
    for i in 0..len {
        adj[offsets[i]..offsets[i + 1]].sort_unstable_by_key(|a| a.neighbor);
    }
    (offsets, adj)
}

impl TemporalBipartiteGraph {
    /// Assembles a graph from id tables and an edge list.
    ///
    /// Fails if an edge references a missing node, if two edges connect the
    /// same pair, or if an id occurs twice in a table.
    pub fn from_parts(
        user_ids: Vec<String>,
        item_ids: Vec<String>,
        edges: Vec<Edge>,
        duplicates: usize,
    ) -> Result<Self> {
        let users = user_ids.len();
        let items = item_ids.len();
        if users > u32::MAX as usize || items > u32::MAX as usize || edges.len() > u32::MAX as usize {
            return Err(Error::invalid("graph too large for 32-bit indexes"));
        }
        let user_lookup = lookup_table(&user_ids, "user")?;
        let item_lookup = lookup_table(&item_ids, "item")?;
        for e in &edges {
            if e.user.0 as usize >= users || e.item.0 as usize >= items {
                return Err(Error::invalid(format!(
                    "edge ({}, {}) references a missing node",
                    e.user.0, e.item.0
                )));
            }
        }
        let (user_offsets, user_adj) = csr(
            users,
            edges
                .iter()
                .enumerate()
                .map(|(id, e)| (e.user.0, Adj { neighbor: e.item.0, edge: id as u32 })),
            edges.len(),
        );
        for u in 0..users {
            let row = &user_adj[user_offsets[u]..user_offsets[u + 1]];
            if row.windows(2).any(|w| w[0].neighbor == w[1].neighbor) {
                return Err(Error::invalid(format!("parallel edges at user {}", user_ids[u])));
            }
        }
        let (item_offsets, item_adj) = csr(
            items,
            edges
                .iter()
                .enumerate()
                .map(|(id, e)| (e.item.0, Adj { neighbor: e.user.0, edge: id as u32 })),
            edges.len(),
        );
        let mut item_timeline: Vec<u32> = item_adj.iter().map(|a| a.edge).collect();
        for i in 0..items {
            item_timeline[item_offsets[i]..item_offsets[i + 1]].sort_unstable_by_key(|&id| {
                let e = &edges[id as usize];
                (e.timestamp, e.user.0)
            });
        }
        Ok(TemporalBipartiteGraph {
            user_ids,
            item_ids,
            user_lookup,
            item_lookup,
            edges,
            user_offsets,
            user_adj,
            item_offsets,
            item_adj,
            item_timeline,
            duplicates,
        })
    }

    pub fn empty() -> Self {
        Self::from_parts(Vec::new(), Vec::new(), Vec::new(), 0).expect("empty graph is valid")
    }

    pub fn user_count(&self) -> usize {
        self.user_ids.len()
    }

    pub fn item_count(&self) -> usize {
        self.item_ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Number of duplicate ratings dropped when the graph was built.
    pub fn duplicates(&self) -> usize {
        self.duplicates
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: u32) -> &Edge {
        &self.edges[id as usize]
    }

    pub fn user_ids(&self) -> &[String] {
        &self.user_ids
    }

    pub fn item_ids(&self) -> &[String] {
        &self.item_ids
    }

    pub fn user_id(&self, user: UserIdx) -> &str {
        &self.user_ids[user.0 as usize]
    }

    pub fn item_id(&self, item: ItemIdx) -> &str {
        &self.item_ids[item.0 as usize]
    }

    pub fn user_index(&self, id: &str) -> Option<UserIdx> {
        self.user_lookup.get(id).map(|&u| UserIdx(u))
    }

    pub fn item_index(&self, id: &str) -> Option<ItemIdx> {
        self.item_lookup.get(id).map(|&i| ItemIdx(i))
    }

    pub fn users(&self) -> impl Iterator<Item = UserIdx> {
        (0..self.user_ids.len() as u32).map(UserIdx)
    }

    pub fn items(&self) -> impl Iterator<Item = ItemIdx> {
        (0..self.item_ids.len() as u32).map(ItemIdx)
    }

    /// Items with at least one rating, in index order.
    pub fn rated_items(&self) -> Vec<ItemIdx> {
        self.items().filter(|&i| self.item_degree(i) > 0).collect()
    }

    /// Neighbours of a user, sorted by item index.
    pub fn user_adjacency(&self, user: UserIdx) -> &[Adj] {
        let u = user.0 as usize;
        &self.user_adj[self.user_offsets[u]..self.user_offsets[u + 1]]
    }

    /// Neighbours of an item, sorted by user index.
    pub fn item_adjacency(&self, item: ItemIdx) -> &[Adj] {
        let i = item.0 as usize;
        &self.item_adj[self.item_offsets[i]..self.item_offsets[i + 1]]
    }

    pub fn user_degree(&self, user: UserIdx) -> usize {
        let u = user.0 as usize;
        self.user_offsets[u + 1] - self.user_offsets[u]
    }

    pub fn item_degree(&self, item: ItemIdx) -> usize {
        let i = item.0 as usize;
        self.item_offsets[i + 1] - self.item_offsets[i]
    }

    /// The edges of an item in `(timestamp, user)` order.
    pub fn item_timeline(&self, item: ItemIdx) -> impl Iterator<Item = &Edge> + '_ {
        let i = item.0 as usize;
        self.item_timeline[self.item_offsets[i]..self.item_offsets[i + 1]]
            .iter()
            .map(move |&id| &self.edges[id as usize])
    }

    pub fn contains(&self, node: Node) -> bool {
        match node {
            Node::User(u) => (u.0 as usize) < self.user_count(),
            Node::Item(i) => (i.0 as usize) < self.item_count(),
        }
    }

    fn check(&self, node: Node) -> Result<()> {
        if self.contains(node) {
            Ok(())
        } else {
            Err(Error::UnknownNode(node.to_string()))
        }
    }

    pub fn degree(&self, node: Node) -> Result<usize> {
        self.check(node)?;
        Ok(match node {
            Node::User(u) => self.user_degree(u),
            Node::Item(i) => self.item_degree(i),
        })
    }

    /// Neighbours sorted ascending by index.
    pub fn neighbors(&self, node: Node) -> Result<Vec<Node>> {
        self.check(node)?;
        Ok(match node {
            Node::User(u) => self
                .user_adjacency(u)
                .iter()
                .map(|a| Node::Item(ItemIdx(a.neighbor)))
                .collect(),
            Node::Item(i) => self
                .item_adjacency(i)
                .iter()
                .map(|a| Node::User(UserIdx(a.neighbor)))
                .collect(),
        })
    }

    /// Id of the edge between `user` and `item`, if any.
    pub fn find_edge(&self, user: UserIdx, item: ItemIdx) -> Option<u32> {
        let (row, key) = if self.user_degree(user) <= self.item_degree(item) {
            (self.user_adjacency(user), item.0)
        } else {
            (self.item_adjacency(item), user.0)
        };
        row.binary_search_by_key(&key, |a| a.neighbor).ok().map(|pos| row[pos].edge)
    }

    pub fn has_edge(&self, user: UserIdx, item: ItemIdx) -> bool {
        self.find_edge(user, item).is_some()
    }

    /// Earliest and latest timestamps, `None` for an edgeless graph.
    pub fn time_span(&self) -> Option<(i64, i64)> {
        let min = self.edges.iter().map(|e| e.timestamp).min()?;
        let max = self.edges.iter().map(|e| e.timestamp).max()?;
        Some((min, max))
    }

    /// The subgraph holding exactly the edges inside `window`. Node tables are
    /// kept so indexes stay valid.
    pub fn windowed_view(&self, window: TimeWindow) -> Self {
        self.filter_edges(|e| window.contains(e.timestamp))
    }

    /// Same node set, only the edges accepted by `keep`.
    pub fn filter_edges(&self, keep: impl Fn(&Edge) -> bool) -> Self {
        let edges = self.edges.iter().filter(|e| keep(e)).copied().collect();
        Self::from_parts(self.user_ids.clone(), self.item_ids.clone(), edges, 0)
            .expect("a subset of a valid edge list is valid")
    }

    /// Induced subgraph on the given nodes, restricted to edges accepted by
    /// `keep`. Local index `k` of each partition maps to `users[k]` /
    /// `items[k]`.
    pub fn induced_subgraph(
        &self,
        users: &[UserIdx],
        items: &[ItemIdx],
        keep: impl Fn(&Edge) -> bool,
    ) -> Self {
        let item_local: HashMap<u32, u32> =
            items.iter().enumerate().map(|(k, i)| (i.0, k as u32)).collect();
        let mut edges = Vec::new();
        for (k, &u) in users.iter().enumerate() {
            for a in self.user_adjacency(u) {
                let e = self.edge(a.edge);
                if let Some(&local) = item_local.get(&a.neighbor) {
                    if keep(e) {
                        edges.push(Edge { user: UserIdx(k as u32), item: ItemIdx(local), ..*e });
                    }
                }
            }
        }
        let user_ids = users.iter().map(|&u| self.user_id(u).to_string()).collect();
        let item_ids = items.iter().map(|&i| self.item_id(i).to_string()).collect();
        Self::from_parts(user_ids, item_ids, edges, 0).expect("induced subgraph is valid")
    }

    /// The item's earliest rating; ties go to the smallest user index.
    pub fn first_rating(&self, item: ItemIdx) -> Result<FirstRating> {
        self.check(Node::Item(item))?;
        let i = item.0 as usize;
        let id = *self.item_timeline[self.item_offsets[i]..self.item_offsets[i + 1]]
            .first()
            .ok_or_else(|| Error::UnratedItem(self.item_id(item).to_string()))?;
        let e = &self.edges[id as usize];
        Ok(FirstRating { user: e.user, rating: e.rating, timestamp: e.timestamp, edge: id })
    }

    /// Rating count and mean rating of `item` inside `window`; the mean is 0
    /// when the count is 0.
    pub fn item_window_stats(&self, item: ItemIdx, window: TimeWindow) -> (usize, f64) {
        let (n, sum) = self
            .item_timeline(item)
            .skip_while(|e| e.timestamp < window.start())
            .take_while(|e| e.timestamp < window.end())
            .fold((0usize, 0.0f64), |(n, s), e| (n + 1, s + e.rating));
        if n == 0 {
            (0, 0.0)
        } else {
            (n, sum / n as f64)
        }
    }

    /// Breadth-first search up to `max_depth` hops. Returns nodes in BFS order
    /// (neighbours visited in index order) with their hop distance.
    pub fn bounded_bfs(&self, root: Node, max_depth: u32) -> Result<Vec<(Node, u32)>> {
        self.bounded_bfs_filtered(root, max_depth, |_| true)
    }

    /// [`bounded_bfs`](Self::bounded_bfs) that only traverses edges accepted by `keep`.
    pub fn bounded_bfs_filtered(
        &self,
        root: Node,
        max_depth: u32,
        keep: impl Fn(&Edge) -> bool,
    ) -> Result<Vec<(Node, u32)>> {
        self.check(root)?;
        let mut seen: HashSet<Node> = HashSet::from([root]);
        let mut order = vec![(root, 0)];
        let mut queue = VecDeque::from([(root, 0u32)]);
        while let Some((node, dist)) = queue.pop_front() {
            if dist == max_depth {
                continue;
            }
            let next: Box<dyn Iterator<Item = (Node, &Adj)>> = match node {
                Node::User(u) => Box::new(
                    self.user_adjacency(u).iter().map(|a| (Node::Item(ItemIdx(a.neighbor)), a)),
                ),
                Node::Item(i) => Box::new(
                    self.item_adjacency(i).iter().map(|a| (Node::User(UserIdx(a.neighbor)), a)),
                ),
            };
            for (nb, a) in next {
                if !keep(self.edge(a.edge)) || !seen.insert(nb) {
                    continue;
                }
                order.push((nb, dist + 1));
                queue.push_back((nb, dist + 1));
            }
        }
        Ok(order)
    }
}

fn lookup_table(ids: &[String], what: &str) -> Result<HashMap<String, u32>> {
    let mut map = HashMap::with_capacity(ids.len());
    for (k, id) in ids.iter().enumerate() {
        if map.insert(id.clone(), k as u32).is_some() {
            return Err(Error::invalid(format!("duplicate {what} id `{id}`")));
        }
    }
    Ok(map)
}
