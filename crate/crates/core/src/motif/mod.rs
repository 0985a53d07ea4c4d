//! Six-node motif census for bipartite graphs and the chord-class clustering
//! coefficients built on it.
//!
//! Every set of three users and three items falls into exactly one
//! [`MotifClass`]. Sets spanned by a 6-cycle are `Sigma(k)`, with `k` the
//! number of chords (induced edges beyond the six cycle edges). Sets without
//! a spanning cycle but with a spanning 5-path are `Kappa(k)`, with `k` the
//! number of induced edges beyond the five path edges. Everything else is
//! `None`.
//!
//! Counts are taken at node-set granularity: each 3+3 subset contributes
//! once, no matter how many spanning paths or cycles it contains.

mod classify;
mod count;
mod opsahl;

pub use classify::{
    classify_mask, classify_subset, hamiltonian_cycle_exists, hamiltonian_path_exists,
    MotifClass, SmallBipartite, SubsetMask,
};
pub use count::{count_motifs, CountOptions, MotifCensus, DEFAULT_BUDGET};
pub use opsahl::opsahl_cstar;

use std::ops::{Add, AddAssign};

/// Subset counts per class: `sigma[k]` for `k`-chord 6-cycles, `kappa[k]`
/// for 5-paths with `k` extra edges.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct MotifCounts {
    pub sigma: [u64; 4],
    pub kappa: [u64; 3],
}

impl MotifCounts {
    pub fn record(&mut self, class: MotifClass) {
        match class {
            MotifClass::Sigma(k) => self.sigma[k as usize] += 1,
            MotifClass::Kappa(k) => self.kappa[k as usize] += 1,
            MotifClass::None => {}
        }
    }

    pub fn total(&self) -> u64 {
        self.sigma.iter().sum::<u64>() + self.kappa.iter().sum::<u64>()
    }

    pub fn is_zero(&self) -> bool {
        self.total() == 0
    }
}

impl AddAssign for MotifCounts {
    fn add_assign(&mut self, rhs: Self) {
        for k in 0..4 {
            self.sigma[k] += rhs.sigma[k];
        }
        for k in 0..3 {
            self.kappa[k] += rhs.kappa[k];
        }
    }
}

impl Add for MotifCounts {
    type Output = Self;

    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

/// The four chord-class clustering coefficients, each in `[0, 1]`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ClusteringProfile {
    pub icc: [f64; 4],
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Chord-class clustering coefficients of a set of counts.
///
/// Each closed configuration is weighted by how many of its origin
/// configurations it contains: an induced 6-cycle holds six unconnected
/// 5-paths, a one-chord cycle holds six connected 5-paths and one induced
/// cycle, a two-chord cycle two completely connected 5-paths and two
/// one-chord cycles, and the full 3x3 biclique three two-chord cycles.
/// A coefficient with a zero denominator is 0.
pub fn icc_from_counts(counts: &MotifCounts) -> ClusteringProfile {
    let s = counts.sigma.map(|x| x as f64);
    let k = counts.kappa.map(|x| x as f64);
    ClusteringProfile {
        icc: [
            ratio(6.0 * s[0], 6.0 * s[0] + k[0]),
            ratio(7.0 * s[1], 7.0 * s[1] + s[0] + k[1]),
            ratio(4.0 * s[2], 4.0 * s[2] + s[1] + k[2]),
            ratio(3.0 * s[3], 3.0 * s[3] + s[2]),
        ],
    }
}
