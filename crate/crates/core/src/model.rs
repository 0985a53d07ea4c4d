//! Logistic calibration and the first-rater predictors.
//!
//! Two logistic curves are used. The popularity score maps the product of an
//! item's average rating and rating count to `(0, 1)`; the rating curve maps a
//! rating count to an expected average rating in `(1, 5)`. Both are
//! calibrated from the dataset's popularity thresholds.

use crate::error::{Error, Result};
use crate::graph::{ItemIdx, UserIdx};
use crate::motif::ClusteringProfile;
use crate::profile::DatasetProfile;

/// Midpoint `c` and steepness `k` of a logistic curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogisticParams {
    pub c: f64,
    pub k: f64,
}

impl LogisticParams {
    pub fn new(c: f64, k: f64) -> Result<Self> {
        if !(c.is_finite() && k.is_finite() && k > 0.0) {
            return Err(Error::invalid(format!("logistic parameters c={c}, k={k} need finite c and k > 0")));
        }
        Ok(LogisticParams { c, k })
    }
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Calibrates the popularity score so that an item with `n_star` ratings
/// averaging `mu_star` scores exactly 0.5 and an item without ratings scores
/// `epsilon`.
pub fn calibrate_popularity(mu_star: f64, n_star: u32, epsilon: f64) -> Result<LogisticParams> {
    let c = mu_star * f64::from(n_star);
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::invalid(format!("mu_star * n_star must be positive, got {c}")));
    }
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::invalid(format!("epsilon must lie in (0, 0.5), got {epsilon}")));
    }
    LogisticParams::new(c, (1.0 / epsilon - 1.0).ln() / c)
}

/// Popularity score of an item with `n` ratings averaging `mu`.
pub fn popularity_score(mu: f64, n: f64, params: &LogisticParams) -> f64 {
    logistic(params.k * (mu * n - params.c))
}

/// Calibrates the rating curve so that it sits `epsilon` above 1 at zero
/// ratings and reaches exactly 4 at `n_star` ratings.
pub fn calibrate_rating_curve(n_star: u32, epsilon: f64) -> Result<LogisticParams> {
    if n_star < 1 {
        return Err(Error::invalid("n_star must be >= 1"));
    }
    if !(epsilon > 0.0 && epsilon < 2.0) {
        return Err(Error::invalid(format!("epsilon must lie in (0, 2), got {epsilon}")));
    }
    let ck = (4.0 / epsilon - 1.0).ln();
    let k = (ck + 3f64.ln()) / f64::from(n_star);
    LogisticParams::new(ck / k, k)
}

/// Expected average rating for `n` ratings; ranges over `(1, 5)`.
pub fn rating_curve(n: f64, params: &LogisticParams) -> f64 {
    1.0 + 4.0 * logistic(params.k * (n - params.c))
}

/// Which standard deviation the deltas are measured in.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Deviation {
    #[default]
    Population,
    Sample,
}

/// How far the ego's coefficients lie from the ego-network mean, in standard
/// deviations, and on which side.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DeltaProfile {
    pub delta: [f64; 4],
    /// `true` when the ego's coefficient is at or below the mean.
    pub below_mean: [bool; 4],
}

/// Compares the ego's profile with the profiles of every user in its ego
/// network (the ego included). A coordinate with zero spread has delta 0.
pub fn delta_profile(
    ego: &ClusteringProfile,
    population: &[ClusteringProfile],
    deviation: Deviation,
) -> Result<DeltaProfile> {
    if population.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    let n = population.len() as f64;
    let mut out = DeltaProfile::default();
    for k in 0..4 {
        let mean = population.iter().map(|p| p.icc[k]).sum::<f64>() / n;
        let ss = population.iter().map(|p| (p.icc[k] - mean).powi(2)).sum::<f64>();
        let dof = match deviation {
            Deviation::Population => n,
            Deviation::Sample => n - 1.0,
        };
        let sd = if dof > 0.0 { (ss / dof).sqrt() } else { 0.0 };
        // coefficients live in [0, 1], so a smaller spread is rounding noise in the mean
        out.delta[k] = if sd > SPREAD_FLOOR { (ego.icc[k] - mean).abs() / sd } else { 0.0 };
        out.below_mean[k] = ego.icc[k] <= mean;
    }
    Ok(out)
}

const SPREAD_FLOOR: f64 = 1e-12;

/// Weights of the four coefficients, by increasing connectivity.
pub const DELTA_WEIGHTS: [f64; 4] = [2.0, 3.0, 4.0, 5.0];

/// Predicted number of ratings in the critical period.
///
/// A coefficient below the mean contributes `weight * delta`, one above the
/// mean `delta / weight`. The sum is scaled by `r / 3`, so a first rating of
/// 3 is neutral.
pub fn predict_count(first_rating: f64, deltas: &DeltaProfile) -> f64 {
    let sum: f64 = (0..4)
        .map(|k| {
            let (w, d) = (DELTA_WEIGHTS[k], deltas.delta[k]);
            if deltas.below_mean[k] {
                w * d
            } else {
                d / w
            }
        })
        .sum();
    (first_rating / 3.0 * sum).max(0.0)
}

/// Predicted average rating: the mean of the rating curve at `n_hat` and the
/// first rating, clamped to the rating scale. Ratingless datasets return
/// their implicit rating.
pub fn predict_mean_rating(
    n_hat: f64,
    first_rating: f64,
    curve: &LogisticParams,
    profile: &DatasetProfile,
) -> f64 {
    if let Some(r) = profile.implicit_rating {
        return r;
    }
    profile.clamp_rating((rating_curve(n_hat, curve) + first_rating) / 2.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Prediction {
    pub item: ItemIdx,
    pub ego: UserIdx,
    pub first_rating: f64,
    pub anchor_time: i64,
    pub n_hat: f64,
    pub mu_hat: f64,
    pub rho_hat: f64,
}

impl Prediction {
    /// Builds a prediction; `rho_hat` is always derived from `mu_hat` and
    /// `n_hat`.
    pub fn new(
        item: ItemIdx,
        ego: UserIdx,
        first_rating: f64,
        anchor_time: i64,
        n_hat: f64,
        mu_hat: f64,
        popularity: &LogisticParams,
    ) -> Self {
        Prediction {
            item,
            ego,
            first_rating,
            anchor_time,
            n_hat,
            mu_hat,
            rho_hat: popularity_score(mu_hat, n_hat, popularity),
        }
    }

    /// `n_hat` rounded half-up for display.
    pub fn n_hat_rounded(&self) -> u64 {
        (self.n_hat + 0.5).floor() as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const EPS: f64 = 5e-4;

    #[test]
    fn popularity_calibration_movielens() {
        let p = calibrate_popularity(4.0, 29, EPS).unwrap();
        assert_eq!(p.c, 116.0);
        assert!((p.k - 0.0655).abs() < 6e-4, "k = {}", p.k);
        assert!((popularity_score(4.0, 29.0, &p) - 0.5).abs() < 1e-12);
        // 1 / (1 + e^{k * 116}) = epsilon by construction
        let at_zero = popularity_score(0.0, 0.0, &p);
        assert!((at_zero - EPS).abs() < 1e-12, "{at_zero}");
    }

    #[test]
    fn popularity_calibration_digg() {
        let p = calibrate_popularity(5.0, 6, EPS).unwrap();
        assert_eq!(p.c, 30.0);
        assert!((p.k - 0.2533).abs() < 2e-3, "k = {}", p.k);
        assert!((popularity_score(5.0, 6.0, &p) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn popularity_calibration_closed_form() {
        let p = calibrate_popularity(1.0, 1, 0.25).unwrap();
        assert_eq!(p.c, 1.0);
        assert!((p.k - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn popularity_calibration_rejects_bad_input() {
        assert!(calibrate_popularity(0.0, 29, EPS).is_err());
        assert!(calibrate_popularity(4.0, 0, EPS).is_err());
        assert!(calibrate_popularity(4.0, 29, 0.5).is_err());
        assert!(calibrate_popularity(4.0, 29, 0.0).is_err());
    }

    #[test]
    fn low_volume_scores_movielens() {
        // the two-decimal k = 0.066 gives 1 / (1 + e^{0.066 * 116}) ~ 4.7e-4;
        // the exact k gives epsilon itself
        let rounded = LogisticParams::new(116.0, 0.066).unwrap();
        assert!((popularity_score(0.0, 0.0, &rounded) - 4.73e-4).abs() < 1e-6);
        let p = calibrate_popularity(4.0, 29, EPS).unwrap();
        assert!((popularity_score(0.0, 5.0, &p) - EPS).abs() < 1e-12);
        // a single rating of 5: mu * n = 5
        assert!((popularity_score(5.0, 1.0, &p) - 6.937e-4).abs() < 1e-6);
    }

    #[test]
    fn rating_curve_calibration() {
        let f = calibrate_rating_curve(29, EPS).unwrap();
        assert!((f.k - 0.3478).abs() < 1e-3, "k = {}", f.k);
        assert!((f.c - 25.84).abs() < 0.05, "c = {}", f.c);
        assert!((rating_curve(29.0, &f) - 4.0).abs() < 1e-6);
        assert!((rating_curve(0.0, &f) - 1.0005).abs() < 1e-9);
        assert_eq!(rating_curve(f.c, &f), 3.0);
        assert!(calibrate_rating_curve(0, EPS).is_err());
        assert!(calibrate_rating_curve(29, 2.0).is_err());
    }

    #[test]
    fn rating_curve_limits() {
        let f = calibrate_rating_curve(29, EPS).unwrap();
        assert!((rating_curve(-1e6, &f) - 1.0).abs() < 1e-12);
        assert!((rating_curve(1e6, &f) - 5.0).abs() < 1e-12);
    }

    fn profile(icc: [f64; 4]) -> ClusteringProfile {
        ClusteringProfile { icc }
    }

    #[test]
    fn identical_population_has_zero_delta() {
        let p = profile([0.3, 0.1, 0.0, 0.0]);
        let d = delta_profile(&p, &[p, p, p], Deviation::Population).unwrap();
        assert_eq!(d.delta, [0.0; 4]);
        assert_eq!(d.below_mean, [true; 4]);
    }

    #[test]
    fn delta_arithmetic() {
        // coordinate 0: ego 0.0, others 0.2 and 0.4 -> mean 0.2, sd = sqrt(0.08 / 3)
        let ego = profile([0.0, 0.0, 0.9, 0.0]);
        let pop = [ego, profile([0.2, 0.0, 0.1, 0.0]), profile([0.4, 0.0, 0.2, 0.0])];
        let d = delta_profile(&ego, &pop, Deviation::Population).unwrap();
        let sd = (0.08f64 / 3.0).sqrt();
        assert!((d.delta[0] - 0.2 / sd).abs() < 1e-12);
        assert!(d.below_mean[0]);
        assert!(!d.below_mean[2]);
        let sample = delta_profile(&ego, &pop, Deviation::Sample).unwrap();
        assert!((sample.delta[0] - 0.2 / (0.08f64 / 2.0).sqrt()).abs() < 1e-12);
        assert!(matches!(delta_profile(&ego, &[], Deviation::Population), Err(Error::EmptyPopulation)));
    }

    #[test]
    fn count_prediction_examples() {
        let all_below = DeltaProfile { delta: [1.0; 4], below_mean: [true; 4] };
        assert_eq!(predict_count(3.0, &all_below), 14.0);
        let mixed = DeltaProfile { delta: [1.0; 4], below_mean: [true, true, false, false] };
        assert!((predict_count(3.0, &mixed) - 5.45).abs() < 1e-12);
        assert_eq!(predict_count(5.0, &DeltaProfile::default()), 0.0);
    }

    #[test]
    fn mean_rating_prediction() {
        let ml = DatasetProfile::movielens();
        let f = ml.rating_curve_params().unwrap();
        assert!((predict_mean_rating(29.0, 4.0, &f, &ml) - 4.0).abs() < 1e-6);
        assert!((predict_mean_rating(0.0, 1.0, &f, &ml) - 1.00025).abs() < 1e-9);
        let digg = DatasetProfile::digg();
        assert_eq!(predict_mean_rating(0.0, 5.0, &f, &digg), 5.0);
        assert_eq!(predict_mean_rating(100.0, 1.0, &f, &digg), 5.0);
    }

    #[test]
    fn rounding_is_half_up() {
        let p = LogisticParams::new(1.0, 1.0).unwrap();
        let mk = |n| Prediction::new(ItemIdx(0), UserIdx(0), 3.0, 0, n, 3.0, &p);
        assert_eq!(mk(5.45).n_hat_rounded(), 5);
        assert_eq!(mk(2.5).n_hat_rounded(), 3);
    }

    proptest! {
        #[test]
        fn scores_monotone_and_bounded(a in 0.0f64..100.0, b in 0.0f64..100.0) {
            let p = calibrate_popularity(4.0, 29, EPS).unwrap();
            let f = calibrate_rating_curve(29, EPS).unwrap();
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assume!(hi - lo > 1e-6);
            prop_assert!(popularity_score(1.0, lo, &p) < popularity_score(1.0, hi, &p));
            prop_assert!(rating_curve(lo, &f) < rating_curve(hi, &f));
            let s = popularity_score(1.0, a, &p);
            prop_assert!(s > 0.0 && s < 1.0);
            let r = rating_curve(a / 10.0, &f);
            prop_assert!(r > 1.0 && r < 5.0);
        }

        #[test]
        fn calibration_inverts(mu in 0.5f64..5.0, n in 1u32..500, eps in 1e-6f64..0.49) {
            let p = calibrate_popularity(mu, n, eps).unwrap();
            prop_assert!((popularity_score(mu, f64::from(n), &p) - 0.5).abs() < 1e-12);
            prop_assert!((popularity_score(0.0, 0.0, &p) - eps).abs() < 1e-12);
        }

        #[test]
        fn count_is_linear(
            r in 0.0f64..5.0, lambda in 0.0f64..4.0,
            delta in prop::array::uniform4(0.0f64..10.0),
            below in prop::array::uniform4(any::<bool>()),
            k in 0usize..4, scale in 0.0f64..5.0,
        ) {
            let d = DeltaProfile { delta, below_mean: below };
            let base = predict_count(r, &d);
            prop_assert!((predict_count(lambda * r, &d) - lambda * base).abs() < 1e-12 * (1.0 + base.abs() * lambda));
            let mut scaled = d;
            scaled.delta[k] *= scale;
            let w = DELTA_WEIGHTS[k];
            let term = if below[k] { w * delta[k] } else { delta[k] / w };
            let expected = base + r / 3.0 * term * (scale - 1.0);
            prop_assert!((predict_count(r, &scaled) - expected).abs() < 1e-12 * (1.0 + expected.abs()));
        }
    }
}
