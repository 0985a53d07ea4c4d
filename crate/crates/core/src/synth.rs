//! Deterministic synthetic rating streams for tests, benches and demos.
//!
//! Item `j` is first rated at `start + j * item_spacing`. Later ratings arrive
//! as a Poisson process with exponential gaps of mean `mean_gap` seconds until
//! `horizon` seconds have passed or `max_ratings` users have rated it. Users
//! and items are split round-robin into communities. Raters of an item are
//! distinct and drawn with weight `activity * boost`, where activity falls off
//! as `1 / (1 + rank)^skew` with a user's rank inside its community and
//! `boost` is `community_boost` for members of the item's community and 1
//! otherwise. Heavier users tend to rate earlier. Each item has a latent
//! quality around which its integer ratings in `1..=5` scatter.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};

use crate::error::{Error, Result};
use crate::ingest::RatingEvent;

#[derive(Clone, Debug, PartialEq)]
pub struct SynthParams {
    pub users: usize,
    pub items: usize,
    pub seed: u64,
    pub start: i64,
    pub item_spacing: i64,
    pub mean_gap: f64,
    /// Each item's mean gap is `mean_gap * exp(z * gap_spread)` with `z`
    /// standard normal; 0 gives every item the same rate.
    pub gap_spread: f64,
    pub horizon: i64,
    /// Per-item cap on ratings, further capped by `users`.
    pub max_ratings: usize,
    /// Item qualities are drawn uniformly from this range.
    pub quality: (f64, f64),
    /// Standard deviation of individual ratings around the item quality.
    pub spread: f64,
    pub communities: usize,
    /// Weight multiplier for raters from the item's own community.
    pub community_boost: f64,
    /// Exponent of the activity fall-off; 0 makes all users equally active.
    pub skew: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            users: 200,
            items: 50,
            seed: 42,
            start: 1_000_000_000,
            item_spacing: 1800,
            mean_gap: 1800.0,
            gap_spread: 1.0,
            horizon: 72 * 3600,
            max_ratings: 40,
            quality: (2.0, 4.8),
            spread: 0.8,
            communities: 2,
            community_boost: 20.0,
            skew: 1.0,
        }
    }
}

impl SynthParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.to_string()));
        if self.items > 0 && self.users == 0 {
            return bad("users must be >= 1 when items > 0");
        }
        if !(self.mean_gap.is_finite() && self.mean_gap > 0.0) {
            return bad("mean_gap must be a positive number");
        }
        if !(self.gap_spread.is_finite() && self.gap_spread >= 0.0) {
            return bad("gap_spread must be >= 0");
        }
        if self.start < 0 || self.item_spacing < 0 {
            return bad("start and item_spacing must be >= 0");
        }
        if self.horizon <= 0 {
            return bad("horizon must be > 0");
        }
        if self.max_ratings == 0 {
            return bad("max_ratings must be >= 1");
        }
        let (lo, hi) = self.quality;
        if !(1.0..=5.0).contains(&lo) || !(lo..=5.0).contains(&hi) {
            return bad("quality range must satisfy 1 <= lo <= hi <= 5");
        }
        if !(self.spread.is_finite() && self.spread >= 0.0) {
            return bad("spread must be >= 0");
        }
        if self.communities == 0 {
            return bad("communities must be >= 1");
        }
        if !(self.community_boost.is_finite() && self.community_boost >= 1.0) {
            return bad("community_boost must be >= 1");
        }
        if !(self.skew.is_finite() && self.skew >= 0.0) {
            return bad("skew must be >= 0");
        }
        Ok(())
    }
}

/// Generates the rating events, ordered by timestamp, then item, then user.
pub fn generate(params: &SynthParams) -> Result<Vec<RatingEvent>> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let noise = Normal::new(0.0, params.spread).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let cap = params.max_ratings.min(params.users);

    let mut events = Vec::new();
    for j in 0..params.items {
        let t0 = params.start + j as i64 * params.item_spacing;
        let quality = rng.random_range(params.quality.0..=params.quality.1);
        let z: f64 = rng.sample(rand_distr::StandardNormal);
        let mean_gap = params.mean_gap * (z * params.gap_spread).exp();
        let gaps = Exp::new(1.0 / mean_gap).map_err(|e| Error::InvalidParameter(e.to_string()))?;

        let mut offsets = vec![0.0];
        let mut s = 0.0;
        while offsets.len() < cap {
            s += gaps.sample(&mut rng);
            if s >= params.horizon as f64 {
                break;
            }
            offsets.push(s);
        }
        let raters = pick_raters(&mut rng, params, j % params.communities, offsets.len());
        for (offset, user) in offsets.into_iter().zip(raters) {
            let rating = (quality + noise.sample(&mut rng)).round().clamp(1.0, 5.0);
            events.push(RatingEvent {
                user_id: format!("u{user}"),
                item_id: format!("m{j}"),
                rating,
                timestamp: t0 + offset.floor() as i64,
            });
        }
    }
    events.sort_by(|a, b| {
        let key = |e: &RatingEvent| (e.timestamp, item_number(&e.item_id), item_number(&e.user_id));
        key(a).cmp(&key(b))
    });
    Ok(events)
}

/// `count` distinct users in rating order. Uses exponential keys
/// `ln(u) / w`: the largest keys form a weighted sample without replacement,
/// and sorting by key puts heavier users first.
fn pick_raters(rng: &mut ChaCha8Rng, params: &SynthParams, community: usize, count: usize) -> Vec<usize> {
    let mut keyed: Vec<(f64, usize)> = (0..params.users)
        .map(|user| {
            let rank = (user / params.communities) as f64;
            let boost = if user % params.communities == community { params.community_boost } else { 1.0 };
            let weight = boost / (1.0 + rank).powf(params.skew);
            let u: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
            (u.ln() / weight, user)
        })
        .collect();
    keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    keyed.into_iter().take(count).map(|(_, user)| user).collect()
}

fn item_number(id: &str) -> u64 {
    id[1..].parse().unwrap_or(0)
}

/// Writes events as `user::item::rating::timestamp` lines.
pub fn write_movielens(events: &[RatingEvent], mut out: impl Write) -> Result<()> {
    for e in events {
        writeln!(out, "{}::{}::{}::{}", e.user_id, e.item_id, e.rating, e.timestamp)?;
    }
    Ok(())
}
