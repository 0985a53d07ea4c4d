//! Dataset constants: rating scale, critical and lookback windows, and the
//! thresholds that define a popular item.

use crate::error::{Error, Result};
use crate::model::{calibrate_popularity, calibrate_rating_curve, LogisticParams};

pub const HOUR: i64 = 3600;
pub const DAY: i64 = 24 * HOUR;
pub const WEEK: i64 = 7 * DAY;

/// Default offset of both logistic curves from their lower bound at zero ratings.
pub const DEFAULT_BASELINE_SCORE: f64 = 5e-4;

#[derive(Clone, Debug, PartialEq)]
pub struct DatasetProfile {
    pub name: String,
    pub rating_min: f64,
    pub rating_max: f64,
    /// Rating assigned to every edge of a ratingless dataset.
    pub implicit_rating: Option<f64>,
    /// Length of the critical period after an item's first rating, seconds.
    pub critical_window: i64,
    /// How far before the first rating the ego network reaches, seconds.
    pub lookback_window: i64,
    pub popular_min_ratings: u32,
    pub popular_min_avg: f64,
    pub baseline_score: f64,
    /// Lookbacks used by the degree / second-neighbour diagnostics.
    pub diagnostic_lookbacks: Vec<i64>,
}

impl DatasetProfile {
    /// MovieLens 10M. The lower bound admits the half-star 0.5 ratings present
    /// in the distribution.
    pub fn movielens() -> Self {
        DatasetProfile {
            name: "movielens".into(),
            rating_min: 0.5,
            rating_max: 5.0,
            implicit_rating: None,
            critical_window: 30 * DAY,
            lookback_window: 10 * DAY,
            popular_min_ratings: 29,
            popular_min_avg: 4.0,
            baseline_score: DEFAULT_BASELINE_SCORE,
            diagnostic_lookbacks: vec![WEEK, 2 * WEEK, 3 * WEEK, 4 * WEEK],
        }
    }

    /// Digg votes: every vote counts as a rating of 5.
    pub fn digg() -> Self {
        DatasetProfile {
            name: "digg".into(),
            rating_min: 1.0,
            rating_max: 5.0,
            implicit_rating: Some(5.0),
            critical_window: 48 * HOUR,
            lookback_window: 6 * HOUR,
            popular_min_ratings: 6,
            popular_min_avg: 5.0,
            baseline_score: DEFAULT_BASELINE_SCORE,
            diagnostic_lookbacks: vec![6 * HOUR, 12 * HOUR, DAY, 2 * DAY],
        }
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "movielens" => Some(Self::movielens()),
            "digg" => Some(Self::digg()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rating_min.is_finite() && self.rating_max.is_finite())
            || self.rating_min > self.rating_max
        {
            return Err(Error::invalid(format!(
                "rating scale [{}, {}] is not an interval",
                self.rating_min, self.rating_max
            )));
        }
        if self.critical_window <= 0 {
            return Err(Error::invalid("critical_window must be > 0"));
        }
        if self.lookback_window <= 0 {
            return Err(Error::invalid("lookback_window must be > 0"));
        }
        if self.popular_min_ratings < 1 {
            return Err(Error::invalid("popular_min_ratings must be >= 1"));
        }
        if !self.in_scale(self.popular_min_avg) {
            return Err(Error::invalid("popular_min_avg must lie within the rating scale"));
        }
        if let Some(r) = self.implicit_rating {
            if !self.in_scale(r) {
                return Err(Error::invalid("implicit_rating must lie within the rating scale"));
            }
        }
        if !(self.baseline_score > 0.0 && self.baseline_score < 0.5) {
            return Err(Error::invalid("baseline_score must lie in (0, 0.5)"));
        }
        if self.diagnostic_lookbacks.iter().any(|&l| l <= 0) {
            return Err(Error::invalid("diagnostic lookbacks must be > 0"));
        }
        Ok(())
    }

    pub fn in_scale(&self, rating: f64) -> bool {
        rating >= self.rating_min && rating <= self.rating_max
    }

    pub fn clamp_rating(&self, rating: f64) -> f64 {
        rating.clamp(self.rating_min, self.rating_max)
    }

    /// Parameters of the popularity score.
    pub fn popularity_params(&self) -> Result<LogisticParams> {
        calibrate_popularity(self.popular_min_avg, self.popular_min_ratings, self.baseline_score)
    }

    /// Parameters of the rating curve used to predict average ratings.
    pub fn rating_curve_params(&self) -> Result<LogisticParams> {
        calibrate_rating_curve(self.popular_min_ratings, self.baseline_score)
    }
}
