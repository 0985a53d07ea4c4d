use std::io::Write;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{actual_outcome, predict_item, ItemOutcome, PredictOptions};
use crate::error::{Error, Result};
use crate::exec::{try_map_collect, Execution};
use crate::graph::{ItemIdx, TemporalBipartiteGraph, TimeWindow};
use crate::model::{Deviation, Prediction};
use crate::motif::{CountOptions, DEFAULT_BUDGET};
use crate::profile::DatasetProfile;

/// Which rated items an evaluation covers. Filters combine; the optional
/// sample is drawn last, without replacement, and returned in index order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ItemSelection {
    /// Keep items whose first rating falls inside this window.
    pub first_rated: Option<TimeWindow>,
    pub ids: Option<Vec<ItemIdx>>,
    /// `(count, seed)`.
    pub sample: Option<(usize, u64)>,
}

impl ItemSelection {
    pub fn resolve(&self, graph: &TemporalBipartiteGraph) -> Result<Vec<ItemIdx>> {
        let mut items = match &self.ids {
            Some(ids) => {
                let mut ids = ids.clone();
                ids.sort_unstable();
                ids.dedup();
                ids
            }
            None => graph.rated_items(),
        };
        if let Some(window) = self.first_rated {
            let mut kept = Vec::with_capacity(items.len());
            for item in items {
                if graph.item_degree(item) > 0 && window.contains(graph.first_rating(item)?.timestamp) {
                    kept.push(item);
                }
            }
            items = kept;
        }
        if let Some((count, seed)) = self.sample {
            if count < items.len() {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut picked: Vec<usize> = sample(&mut rng, items.len(), count).into_vec();
                picked.sort_unstable();
                items = picked.into_iter().map(|k| items[k]).collect();
            }
        }
        Ok(items)
    }
}

/// Where predictions come from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Predictor {
    /// Ego-network clustering of the first rater.
    #[default]
    Clustering,
    /// Echoes each item's realised outcome. Scores 100% by construction and
    /// checks the evaluation accounting end to end.
    Oracle,
}

impl Predictor {
    pub fn name(self) -> &'static str {
        match self {
            Predictor::Clustering => "clustering",
            Predictor::Oracle => "oracle",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalConfig {
    /// Popularity success iff `|rho_hat - rho| < rho_tol`.
    pub rho_tol: f64,
    /// Count success iff `|n_hat - n| <= max(n_band_abs, n_band_rel * n)`.
    pub n_band_abs: f64,
    pub n_band_rel: f64,
    pub budget: Option<u64>,
    pub deviation: Deviation,
    pub predictor: Predictor,
    pub execution: Execution,
    /// Echoed into the report.
    pub seed: Option<u64>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            rho_tol: 0.05,
            n_band_abs: 5.0,
            n_band_rel: 0.5,
            budget: Some(DEFAULT_BUDGET),
            deviation: Deviation::Population,
            predictor: Predictor::Clustering,
            execution: Execution::Parallel,
            seed: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalRow {
    pub item_id: String,
    pub outcome: ItemOutcome,
    pub prediction: Prediction,
    pub abs_err: f64,
    pub pop_success: bool,
    pub n_success: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub rows: Vec<EvalRow>,
    pub pop_successes: usize,
    pub n_successes: usize,
    pub profile: DatasetProfile,
    pub config: EvalConfig,
}

fn rate(hits: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        hits as f64 / total as f64
    }
}

impl EvalReport {
    pub fn items(&self) -> usize {
        self.rows.len()
    }

    pub fn pop_success_rate(&self) -> f64 {
        rate(self.pop_successes, self.rows.len())
    }

    pub fn n_success_rate(&self) -> f64 {
        rate(self.n_successes, self.rows.len())
    }

    pub const CSV_HEADER: &'static str =
        "item_id,n,mu,rho,n_hat,mu_hat,rho_hat,abs_err,pop_success,n_success";

    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                csv_field(&r.item_id),
                r.outcome.n_actual,
                r.outcome.mu_actual,
                r.outcome.rho_actual,
                r.prediction.n_hat,
                r.prediction.mu_hat,
                r.prediction.rho_hat,
                r.abs_err,
                r.pop_success as u8,
                r.n_success as u8,
            )?;
        }
        Ok(())
    }

    /// Aggregates and the configuration that produced them, as `key=value`
    /// lines.
    pub fn write_summary(&self, mut out: impl Write) -> Result<()> {
        let p = &self.profile;
        let c = &self.config;
        let opt = |v: Option<String>| v.unwrap_or_else(|| "none".into());
        let lines = [
            ("items", self.items().to_string()),
            ("pop_successes", self.pop_successes.to_string()),
            ("pop_success_rate", self.pop_success_rate().to_string()),
            ("n_successes", self.n_successes.to_string()),
            ("n_success_rate", self.n_success_rate().to_string()),
            ("predictor", c.predictor.name().to_string()),
            ("rho_tol", c.rho_tol.to_string()),
            ("n_band_abs", c.n_band_abs.to_string()),
            ("n_band_rel", c.n_band_rel.to_string()),
            ("deviation", format!("{:?}", c.deviation).to_lowercase()),
            ("budget", opt(c.budget.map(|b| b.to_string()))),
            ("seed", opt(c.seed.map(|s| s.to_string()))),
            ("profile", p.name.clone()),
            ("rating_min", p.rating_min.to_string()),
            ("rating_max", p.rating_max.to_string()),
            ("implicit_rating", opt(p.implicit_rating.map(|r| r.to_string()))),
            ("critical_window", p.critical_window.to_string()),
            ("lookback_window", p.lookback_window.to_string()),
            ("popular_min_ratings", p.popular_min_ratings.to_string()),
            ("popular_min_avg", p.popular_min_avg.to_string()),
            ("baseline_score", p.baseline_score.to_string()),
        ];
        for (k, v) in lines {
            writeln!(out, "{k}={v}")?;
        }
        Ok(())
    }
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Predicts and scores every selected item. Rows are in item index order and
/// the report does not depend on the execution mode or worker count.
pub fn evaluate(
    graph: &TemporalBipartiteGraph,
    selection: &ItemSelection,
    profile: &DatasetProfile,
    config: &EvalConfig,
) -> Result<EvalReport> {
    if !(config.rho_tol > 0.0) {
        return Err(Error::invalid("rho_tol must be > 0"));
    }
    if !(config.n_band_abs >= 0.0 && config.n_band_rel >= 0.0) {
        return Err(Error::invalid("n-band tolerances must be >= 0"));
    }
    profile.validate()?;
    let popularity = profile.popularity_params()?;
    let items = selection.resolve(graph)?;
    let opts = PredictOptions {
        count: CountOptions { budget: config.budget, execution: Execution::Sequential },
        deviation: config.deviation,
    };

    let rows = try_map_collect(config.execution, &items, |&item| -> Result<EvalRow> {
        let outcome = actual_outcome(graph, item, profile)?;
        let prediction = match config.predictor {
            Predictor::Clustering => predict_item(graph, item, profile, &opts)?,
            Predictor::Oracle => {
                let first = graph.first_rating(item)?;
                Prediction::new(
                    item,
                    first.user,
                    first.rating,
                    first.timestamp,
                    outcome.n_actual as f64,
                    outcome.mu_actual,
                    &popularity,
                )
            }
        };
        let abs_err = (prediction.rho_hat - outcome.rho_actual).abs();
        let n = outcome.n_actual as f64;
        let band = config.n_band_abs.max(config.n_band_rel * n);
        Ok(EvalRow {
            item_id: graph.item_id(item).to_string(),
            outcome,
            prediction,
            abs_err,
            pop_success: abs_err < config.rho_tol,
            n_success: (prediction.n_hat - n).abs() <= band,
        })
    })?;

    Ok(EvalReport {
        pop_successes: rows.iter().filter(|r| r.pop_success).count(),
        n_successes: rows.iter().filter(|r| r.n_success).count(),
        rows,
        profile: profile.clone(),
        config: config.clone(),
    })
}
