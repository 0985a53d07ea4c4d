use std::collections::HashSet;

use super::actual_outcome;
use crate::error::{Error, Result};
use crate::exec::{try_map_collect, Execution};
use crate::graph::{ItemIdx, TemporalBipartiteGraph, TimeWindow, UserIdx};
use crate::profile::DatasetProfile;

/// One rating in an item's history, relative to its first rating.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayPoint {
    pub since_first: i64,
    /// Time since the previous rating; `None` for the first one.
    pub gap: Option<i64>,
    /// Mean rating over this and all earlier ratings.
    pub running_mean: f64,
}

/// The rating history of `item` in time order.
pub fn decay_profile(graph: &TemporalBipartiteGraph, item: ItemIdx) -> Result<Vec<DecayPoint>> {
    let t0 = graph.first_rating(item)?.timestamp;
    let mut prev = None;
    let mut sum = 0.0;
    Ok(graph
        .item_timeline(item)
        .enumerate()
        .map(|(k, e)| {
            sum += e.rating;
            let point = DecayPoint {
                since_first: e.timestamp - t0,
                gap: prev.map(|p| e.timestamp - p),
                running_mean: sum / (k + 1) as f64,
            };
            prev = Some(e.timestamp);
            point
        })
        .collect())
}

/// Pearson correlation coefficient. Zero when either side has no variance
/// or fewer than two samples are given.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().min(y.len());
    if n < 2 {
        return 0.0;
    }
    let (x, y) = (&x[..n], &y[..n]);
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)
}

/// Degree-based predictors of one item's first rater, one entry per lookback.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticRow {
    pub item_id: String,
    pub n_actual: usize,
    pub mu_actual: f64,
    /// Items the first rater rated in `[t0 - L, t0)`.
    pub ego_degree: Vec<usize>,
    /// Other users who rated, in the same window, an item the first rater
    /// rated in that window.
    pub second_neighbours: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    pub lookbacks: Vec<i64>,
    pub rows: Vec<DiagnosticRow>,
    /// Correlation of `ego_degree[k]` with `n_actual`.
    pub degree_correlation: Vec<f64>,
    pub second_neighbour_correlation: Vec<f64>,
    /// Critical-period mean rating against count, over every rated item.
    pub mu_n_correlation: f64,
}

impl Diagnostics {
    /// `(predictor, lookback, correlation)` rows, the last being `mu_vs_n`
    /// with lookback 0.
    pub fn correlation_rows(&self) -> Vec<(&'static str, i64, f64)> {
        let mut rows = Vec::new();
        for (k, &l) in self.lookbacks.iter().enumerate() {
            rows.push(("ego_degree", l, self.degree_correlation[k]));
        }
        for (k, &l) in self.lookbacks.iter().enumerate() {
            rows.push(("second_neighbours", l, self.second_neighbour_correlation[k]));
        }
        rows.push(("mu_vs_n", 0, self.mu_n_correlation));
        rows
    }
}

fn neighbourhood(graph: &TemporalBipartiteGraph, ego: UserIdx, window: TimeWindow) -> (usize, usize) {
    let mut degree = 0;
    let mut seconds = HashSet::new();
    for a in graph.user_adjacency(ego) {
        if !window.contains(graph.edge(a.edge).timestamp) {
            continue;
        }
        degree += 1;
        for b in graph.item_adjacency(ItemIdx(a.neighbor)) {
            if b.neighbor != ego.0 && window.contains(graph.edge(b.edge).timestamp) {
                seconds.insert(b.neighbor);
            }
        }
    }
    (degree, seconds.len())
}

/// Correlates simple first-rater activity measures with each item's
/// critical-period rating count, at each of the profile's diagnostic
/// lookbacks.
pub fn diagnostic_correlations(
    graph: &TemporalBipartiteGraph,
    items: &[ItemIdx],
    profile: &DatasetProfile,
    execution: Execution,
) -> Result<Diagnostics> {
    if items.len() < 2 {
        return Err(Error::TooFewItems(items.len()));
    }
    let lookbacks = profile.diagnostic_lookbacks.clone();
    let rows = try_map_collect(execution, items, |&item| -> Result<DiagnosticRow> {
        let first = graph.first_rating(item)?;
        let outcome = actual_outcome(graph, item, profile)?;
        let (ego_degree, second_neighbours) = lookbacks
            .iter()
            .map(|&l| neighbourhood(graph, first.user, TimeWindow::before(first.timestamp, l)))
            .unzip();
        Ok(DiagnosticRow {
            item_id: graph.item_id(item).to_string(),
            n_actual: outcome.n_actual,
            mu_actual: outcome.mu_actual,
            ego_degree,
            second_neighbours,
        })
    })?;

    let target: Vec<f64> = rows.iter().map(|r| r.n_actual as f64).collect();
    let column = |k: usize, second: bool| -> Vec<f64> {
        rows.iter()
            .map(|r| if second { r.second_neighbours[k] } else { r.ego_degree[k] } as f64)
            .collect()
    };
    let degree_correlation = (0..lookbacks.len()).map(|k| pearson(&column(k, false), &target)).collect();
    let second_neighbour_correlation =
        (0..lookbacks.len()).map(|k| pearson(&column(k, true), &target)).collect();

    let all = try_map_collect(execution, &graph.rated_items(), |&item| actual_outcome(graph, item, profile))?;
    let mu: Vec<f64> = all.iter().map(|o| o.mu_actual).collect();
    let n: Vec<f64> = all.iter().map(|o| o.n_actual as f64).collect();

    Ok(Diagnostics {
        lookbacks,
        rows,
        degree_correlation,
        second_neighbour_correlation,
        mu_n_correlation: pearson(&mu, &n),
    })
}
