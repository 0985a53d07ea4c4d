use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::graph::{ItemIdx, TemporalBipartiteGraph, UserIdx};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MotifClass {
    /// 6-cycle with `0..=3` chords.
    Sigma(u8),
    /// Spanning 5-path without spanning cycle, `0..=2` extra edges.
    Kappa(u8),
    None,
}

/// Induced edges of a 3+3 subset. Bit `3 * p + s` is set when local user `p`
/// is adjacent to local item `s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SubsetMask(pub u16);

impl SubsetMask {
    pub fn has(self, p: usize, s: usize) -> bool {
        self.0 >> (3 * p + s) & 1 == 1
    }

    pub fn edge_count(self) -> u32 {
        (self.0 & 0x1ff).count_ones()
    }
}

/// A bipartite graph on at most six nodes, used to ask spanning-path and
/// spanning-cycle questions about a single subset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmallBipartite {
    primary: usize,
    secondary: usize,
    edges: Vec<(usize, usize)>,
}

impl SmallBipartite {
    /// `edges` are `(primary, secondary)` local index pairs.
    pub fn new(primary: usize, secondary: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if primary + secondary > 6 {
            return Err(Error::SubsetShape { primary, secondary });
        }
        if let Some(&(p, s)) = edges.iter().find(|&&(p, s)| p >= primary || s >= secondary) {
            return Err(Error::invalid(format!("edge ({p}, {s}) is out of range")));
        }
        Ok(SmallBipartite { primary, secondary, edges: edges.to_vec() })
    }

    pub fn mask(&self) -> Result<SubsetMask> {
        if self.primary != 3 || self.secondary != 3 {
            return Err(Error::SubsetShape { primary: self.primary, secondary: self.secondary });
        }
        Ok(SubsetMask(self.edges.iter().fold(0u16, |m, &(p, s)| m | 1 << (3 * p + s))))
    }
}

pub fn hamiltonian_path_exists(g: &SmallBipartite) -> Result<bool> {
    Ok(table()[g.mask()?.0 as usize].canonical_path.is_some())
}

pub fn hamiltonian_cycle_exists(g: &SmallBipartite) -> Result<bool> {
    Ok(table()[g.mask()?.0 as usize].has_cycle)
}

pub fn classify_mask(mask: SubsetMask) -> MotifClass {
    table()[mask.0 as usize & 0x1ff].class
}

/// Classifies the subgraph induced by three distinct users and three
/// distinct items.
pub fn classify_subset(
    graph: &TemporalBipartiteGraph,
    users: [UserIdx; 3],
    items: [ItemIdx; 3],
) -> Result<MotifClass> {
    if users[0] == users[1] || users[0] == users[2] || users[1] == users[2] {
        return Err(Error::invalid("subset users must be distinct"));
    }
    if items[0] == items[1] || items[0] == items[2] || items[1] == items[2] {
        return Err(Error::invalid("subset items must be distinct"));
    }
    for &u in &users {
        if (u.0 as usize) >= graph.user_count() {
            return Err(Error::UnknownNode(format!("user#{}", u.0)));
        }
    }
    for &i in &items {
        if (i.0 as usize) >= graph.item_count() {
            return Err(Error::UnknownNode(format!("item#{}", i.0)));
        }
    }
    let mut mask = 0u16;
    for (p, &u) in users.iter().enumerate() {
        for (s, &i) in items.iter().enumerate() {
            if graph.has_edge(u, i) {
                mask |= 1 << (3 * p + s);
            }
        }
    }
    Ok(classify_mask(SubsetMask(mask)))
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct MaskInfo {
    pub class: MotifClass,
    pub has_cycle: bool,
    /// Lexicographically smallest spanning path, as the visiting order of
    /// local users and local items: `p[0] s[0] p[1] s[1] p[2] s[2]`.
    pub canonical_path: Option<([u8; 3], [u8; 3])>,
}

const PERMS: [[u8; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

fn build_info(mask: SubsetMask) -> MaskInfo {
    let mut canonical_path = None;
    let mut has_cycle = false;
    for p in PERMS {
        for s in PERMS {
            let [p0, p1, p2] = p.map(usize::from);
            let [s0, s1, s2] = s.map(usize::from);
            let path = mask.has(p0, s0)
                && mask.has(p1, s0)
                && mask.has(p1, s1)
                && mask.has(p2, s1)
                && mask.has(p2, s2);
            if path {
                canonical_path.get_or_insert((p, s));
                has_cycle |= mask.has(p0, s2);
            }
        }
    }
    let e = mask.edge_count() as u8;
    let class = if has_cycle {
        MotifClass::Sigma(e - 6)
    } else if canonical_path.is_some() && (5..=7).contains(&e) {
        MotifClass::Kappa(e - 5)
    } else {
        MotifClass::None
    };
    MaskInfo { class, has_cycle, canonical_path }
}

pub(crate) fn table() -> &'static [MaskInfo; 512] {
    static TABLE: OnceLock<[MaskInfo; 512]> = OnceLock::new();
    TABLE.get_or_init(|| std::array::from_fn(|m| build_info(SubsetMask(m as u16))))
}
