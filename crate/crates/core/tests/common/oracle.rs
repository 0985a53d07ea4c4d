//! Brute-force reference implementations, written without any of the
//! library's enumeration machinery. Graphs are plain edge lists over users
//! `0..users` and items `0..items`.

#![allow(dead_code)]

/// Class counts in the order sigma0..sigma3, kappa0..kappa2.
pub type Counts = [u64; 7];

fn hamiltonian(adj: &[[bool; 6]; 6], cycle: bool) -> bool {
    fn extend(adj: &[[bool; 6]; 6], path: &mut Vec<usize>, used: &mut [bool; 6], cycle: bool) -> bool {
        if path.len() == 6 {
            return !cycle || adj[path[5]][path[0]];
        }
        let last = *path.last().unwrap();
        for next in 0..6 {
            if !used[next] && adj[last][next] {
                used[next] = true;
                path.push(next);
                if extend(adj, path, used, cycle) {
                    return true;
                }
                path.pop();
                used[next] = false;
            }
        }
        false
    }
    // a cycle, if any, passes through node 0
    let starts = if cycle { 0..1 } else { 0..6 };
    for s in starts {
        let mut used = [false; 6];
        used[s] = true;
        if extend(adj, &mut vec![s], &mut used, cycle) {
            return true;
        }
    }
    false
}

/// Class slot of one subset, or `None`. Nodes 0..3 are users, 3..6 items.
pub fn classify(adj: &[[bool; 6]; 6]) -> Option<usize> {
    let mut edges = 0;
    for a in 0..6 {
        for b in a + 1..6 {
            edges += adj[a][b] as usize;
        }
    }
    if hamiltonian(adj, true) {
        Some(edges - 6)
    } else if hamiltonian(adj, false) && (5..=7).contains(&edges) {
        Some(4 + edges - 5)
    } else {
        None
    }
}

fn triples(n: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// Global counts and counts per user over every 3+3 subset.
pub fn census(users: u32, items: u32, edges: &[(u32, u32)]) -> (Counts, Vec<Counts>) {
    let has = |u: u32, i: u32| edges.contains(&(u, i));
    let mut global = [0u64; 7];
    let mut per_user = vec![[0u64; 7]; users as usize];
    let item_triples = triples(items);
    for us in triples(users) {
        for is in &item_triples {
            let mut adj = [[false; 6]; 6];
            for p in 0..3 {
                for s in 0..3 {
                    let e = has(us[p], is[s]);
                    adj[p][3 + s] = e;
                    adj[3 + s][p] = e;
                }
            }
            if let Some(slot) = classify(&adj) {
                global[slot] += 1;
                for &u in &us {
                    per_user[u as usize][slot] += 1;
                }
            }
        }
    }
    (global, per_user)
}

/// Share of user-item-user-item-user paths whose end users also share a
/// third item. Paths are counted once per direction pair.
pub fn cstar(users: u32, items: u32, edges: &[(u32, u32)]) -> f64 {
    let has = |u: u32, i: u32| edges.contains(&(u, i));
    let (mut paths, mut closed) = (0u64, 0u64);
    for a in 0..users {
        for c in a + 1..users {
            for b in 0..users {
                if b == a || b == c {
                    continue;
                }
                for i in 0..items {
                    for j in 0..items {
                        if i == j || !(has(a, i) && has(b, i) && has(b, j) && has(c, j)) {
                            continue;
                        }
                        paths += 1;
                        if (0..items).any(|k| k != i && k != j && has(a, k) && has(c, k)) {
                            closed += 1;
                        }
                    }
                }
            }
        }
    }
    if paths == 0 {
        0.0
    } else {
        closed as f64 / paths as f64
    }
}

/// Erdős–Rényi bipartite graph from a caller-supplied uniform source.
pub fn random_edges(users: u32, items: u32, p: f64, mut unit: impl FnMut() -> f64) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for u in 0..users {
        for i in 0..items {
            if unit() < p {
                out.push((u, i));
            }
        }
    }
    out
}
