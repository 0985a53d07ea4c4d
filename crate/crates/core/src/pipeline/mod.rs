//! Dataset-level analysis: critical-period statistics, per-item predictions,
//! evaluation reports and the diagnostics behind the supporting plots.

mod diagnostics;
mod eval;

pub use diagnostics::{
    decay_profile, diagnostic_correlations, pearson, DecayPoint, DiagnosticRow, Diagnostics,
};
pub use eval::{evaluate, EvalConfig, EvalReport, EvalRow, ItemSelection, Predictor};

use crate::ego::{ego_stats, extract_ego_network, EgoStats};
use crate::error::{Error, Result};
use crate::graph::{ItemIdx, TemporalBipartiteGraph, TimeWindow};
use crate::model::{
    delta_profile, popularity_score, predict_count, predict_mean_rating, DeltaProfile, Deviation,
    Prediction,
};
use crate::motif::{count_motifs, icc_from_counts, ClusteringProfile, CountOptions, MotifCounts};
use crate::profile::DatasetProfile;

/// Mean number of ratings items receive in `[t0, t0 + window)`, where `t0` is
/// each item's first rating.
pub fn critical_period_average(graph: &TemporalBipartiteGraph, window: i64) -> Result<f64> {
    let rated = graph.rated_items();
    if rated.is_empty() {
        return Err(Error::NoRatedItems);
    }
    let total: usize = rated
        .iter()
        .map(|&item| {
            let t0 = graph.first_rating(item).map(|f| f.timestamp)?;
            Ok(graph.item_window_stats(item, TimeWindow::after(t0, window)).0)
        })
        .sum::<Result<usize>>()?;
    Ok(total as f64 / rated.len() as f64)
}

/// What actually happened to an item during its critical period.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ItemOutcome {
    pub item: ItemIdx,
    pub anchor_time: i64,
    pub n_actual: usize,
    pub mu_actual: f64,
    pub rho_actual: f64,
}

pub fn actual_outcome(
    graph: &TemporalBipartiteGraph,
    item: ItemIdx,
    profile: &DatasetProfile,
) -> Result<ItemOutcome> {
    let t0 = graph.first_rating(item)?.timestamp;
    let (n, mu) = graph.item_window_stats(item, TimeWindow::after(t0, profile.critical_window));
    let params = profile.popularity_params()?;
    Ok(ItemOutcome {
        item,
        anchor_time: t0,
        n_actual: n,
        mu_actual: mu,
        rho_actual: popularity_score(mu, n as f64, &params),
    })
}

#[derive(Clone, Copy, Debug, Default)]
pub struct PredictOptions {
    pub count: CountOptions,
    pub deviation: Deviation,
}

/// A prediction together with the intermediate quantities it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct PredictionDetail {
    pub prediction: Prediction,
    pub deltas: DeltaProfile,
    pub ego_profile: ClusteringProfile,
    pub ego_stats: EgoStats,
    pub ego_counts: MotifCounts,
    /// Latest timestamp among the edges the prediction was computed from,
    /// `None` for an empty ego network.
    pub latest_input_time: Option<i64>,
}

/// Predicts the popularity of `item` from its first rating and the
/// clustering of its first rater. Only ratings made before the first rating
/// are consulted.
pub fn predict_item(
    graph: &TemporalBipartiteGraph,
    item: ItemIdx,
    profile: &DatasetProfile,
    opts: &PredictOptions,
) -> Result<Prediction> {
    predict_item_detailed(graph, item, profile, opts).map(|d| d.prediction)
}

pub fn predict_item_detailed(
    graph: &TemporalBipartiteGraph,
    item: ItemIdx,
    profile: &DatasetProfile,
    opts: &PredictOptions,
) -> Result<PredictionDetail> {
    let ego = extract_ego_network(graph, item, profile.lookback_window)?;
    let census = count_motifs(&ego.graph, &opts.count).map_err(|e| match e {
        Error::BudgetExceeded { limit } => {
            Error::ItemBudgetExceeded { item: graph.item_id(item).to_string(), limit }
        }
        other => other,
    })?;
    let profiles: Vec<ClusteringProfile> = census.per_user.iter().map(icc_from_counts).collect();
    let ego_profile = profiles[ego.ego_local().0 as usize];
    let deltas = delta_profile(&ego_profile, &profiles, opts.deviation)?;

    let n_hat = predict_count(ego.first_rating, &deltas);
    let mu_hat = predict_mean_rating(n_hat, ego.first_rating, &profile.rating_curve_params()?, profile);
    let prediction = Prediction::new(
        item,
        ego.ego,
        ego.first_rating,
        ego.anchor_time,
        n_hat,
        mu_hat,
        &profile.popularity_params()?,
    );
    Ok(PredictionDetail {
        prediction,
        deltas,
        ego_profile,
        ego_stats: ego_stats(&ego),
        ego_counts: census.per_user[0],
        latest_input_time: ego.graph.edges().iter().map(|e| e.timestamp).max(),
    })
}
