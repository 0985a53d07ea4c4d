//! Layered run configuration.
//!
//! Every setting has a `section.key` name. Values come from a TOML file,
//! then `POPCLUST_<SECTION>_<KEY>` environment variables, then the command
//! line (`--set section.key=value` and dedicated flags); later layers win.
//! Unknown sections or keys are rejected in every layer.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::CliError;

pub const ENV_PREFIX: &str = "POPCLUST_";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Text,
    Int,
    Float,
    Bool,
    Duration,
    /// Unix seconds or a `YYYY-MM-DD` date (UTC midnight).
    Instant,
    Choice(&'static [&'static str]),
}

use Kind::*;

const KEYS: &[(&str, Kind)] = &[
    ("profile.name", Choice(&["movielens", "digg"])),
    ("profile.rating_min", Float),
    ("profile.rating_max", Float),
    ("profile.implicit_rating", Float),
    ("profile.critical_window", Duration),
    ("profile.lookback_window", Duration),
    ("profile.popular_min_ratings", Int),
    ("profile.popular_min_avg", Float),
    ("profile.baseline_score", Float),
    ("profile.calibrate_n_star", Bool),
    ("io.input", Text),
    ("io.format", Choice(&["movielens", "konect", "csv"])),
    ("io.snapshot", Text),
    ("io.output_dir", Text),
    ("io.mode", Choice(&["strict", "lenient"])),
    ("io.csv_user", Text),
    ("io.csv_item", Text),
    ("io.csv_rating", Text),
    ("io.csv_timestamp", Text),
    ("io.csv_delimiter", Text),
    ("eval.rho_tol", Float),
    ("eval.n_band_abs", Float),
    ("eval.n_band_rel", Float),
    ("eval.budget", Int),
    ("eval.workers", Int),
    ("eval.deviation", Choice(&["population", "sample"])),
    ("eval.predictor", Choice(&["clustering", "oracle"])),
    ("eval.first_rated_from", Instant),
    ("eval.first_rated_to", Instant),
    ("eval.items", Text),
    ("eval.sample", Int),
    ("eval.seed", Int),
    ("eval.strict_items", Bool),
    ("synth.users", Int),
    ("synth.items", Int),
    ("synth.seed", Int),
    ("synth.start", Int),
    ("synth.item_spacing", Duration),
    ("synth.mean_gap", Duration),
    ("synth.horizon", Duration),
    ("synth.max_ratings", Int),
    ("synth.quality_min", Float),
    ("synth.quality_max", Float),
    ("synth.spread", Float),
    ("synth.gap_spread", Float),
    ("synth.communities", Int),
    ("synth.community_boost", Float),
    ("synth.skew", Float),
];

fn lookup(key: &str) -> Option<(&'static str, Kind)> {
    KEYS.iter().find(|(k, _)| *k == key).copied()
}

/// Seconds from a bare integer or a duration such as `30d`, `6h`, `90min`.
pub fn parse_duration(raw: &str) -> Result<i64, String> {
    let raw = raw.trim();
    if let Ok(secs) = raw.parse::<i64>() {
        return Ok(secs);
    }
    humantime::parse_duration(raw)
        .map_err(|e| format!("`{raw}` is not a duration: {e}"))
        .and_then(|d| i64::try_from(d.as_secs()).map_err(|_| format!("`{raw}` is too long")))
}

pub fn parse_instant(raw: &str) -> Result<i64, String> {
    let raw = raw.trim();
    if let Ok(secs) = raw.parse::<i64>() {
        return Ok(secs);
    }
    chrono::NaiveDate::parse_from_str(raw, "%Y-%m-%d")
        .map(|d| d.and_hms_opt(0, 0, 0).expect("midnight exists").and_utc().timestamp())
        .map_err(|_| format!("`{raw}` is neither unix seconds nor YYYY-MM-DD"))
}

fn check(kind: Kind, raw: &str) -> Result<(), String> {
    match kind {
        Text => Ok(()),
        Int => raw.trim().parse::<i64>().map(drop).map_err(|_| format!("`{raw}` is not an integer")),
        Float => raw.trim().parse::<f64>().map(drop).map_err(|_| format!("`{raw}` is not a number")),
        Bool => raw.trim().parse::<bool>().map(drop).map_err(|_| format!("`{raw}` is not true/false")),
        Duration => parse_duration(raw).map(drop),
        Instant => parse_instant(raw).map(drop),
        Choice(options) => {
            if options.contains(&raw.trim()) {
                Ok(())
            } else {
                Err(format!("`{raw}` is not one of {}", options.join(", ")))
            }
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Config {
    values: BTreeMap<&'static str, String>,
}

impl Config {
    pub fn set(&mut self, key: &str, raw: impl Into<String>, origin: &str) -> Result<(), CliError> {
        let raw = raw.into();
        let (key, kind) =
            lookup(key).ok_or_else(|| CliError::Config(format!("{origin}: unknown setting `{key}`")))?;
        check(kind, &raw).map_err(|e| CliError::Config(format!("{origin}: {key}: {e}")))?;
        self.values.insert(key, raw);
        Ok(())
    }

    pub fn merge_toml(&mut self, text: &str, origin: &str) -> Result<(), CliError> {
        let table: toml::Table =
            text.parse().map_err(|e| CliError::Config(format!("{origin}: {e}")))?;
        for (section, body) in table {
            let toml::Value::Table(body) = body else {
                return Err(CliError::Config(format!("{origin}: `{section}` must be a section")));
            };
            for (key, value) in body {
                let raw = match value {
                    toml::Value::String(s) => s,
                    toml::Value::Integer(i) => i.to_string(),
                    toml::Value::Float(f) => f.to_string(),
                    toml::Value::Boolean(b) => b.to_string(),
                    toml::Value::Array(items) => items
                        .iter()
                        .map(|v| match v {
                            toml::Value::String(s) => s.clone(),
                            other => other.to_string(),
                        })
                        .collect::<Vec<_>>()
                        .join(","),
                    other => {
                        return Err(CliError::Config(format!(
                            "{origin}: {section}.{key}: unsupported value {other}"
                        )))
                    }
                };
                self.set(&format!("{section}.{key}"), raw, origin)?;
            }
        }
        Ok(())
    }

    pub fn merge_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        self.merge_toml(&text, &path.display().to_string())
    }

    /// Applies `POPCLUST_<SECTION>_<KEY>` variables.
    pub fn merge_env(&mut self, vars: impl IntoIterator<Item = (String, String)>) -> Result<(), CliError> {
        let mut vars: Vec<_> = vars.into_iter().filter(|(k, _)| k.starts_with(ENV_PREFIX)).collect();
        vars.sort();
        for (name, value) in vars {
            let rest = name[ENV_PREFIX.len()..].to_ascii_lowercase();
            let key = match rest.split_once('_') {
                Some((section, key)) => format!("{section}.{key}"),
                None => rest,
            };
            self.set(&key, value, &name)?;
        }
        Ok(())
    }

    /// Applies one `section.key=value` assignment.
    pub fn merge_assignment(&mut self, assignment: &str) -> Result<(), CliError> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("--set {assignment}: expected section.key=value")))?;
        self.set(key.trim(), value, "--set")
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        debug_assert!(lookup(key).is_some(), "unregistered key {key}");
        self.values.get(key).map(|s| s.trim())
    }

    pub fn text(&self, key: &str) -> Option<String> {
        self.raw(key).map(str::to_string)
    }

    /// Typed value; the value was validated on entry, so only range checks
    /// of the target type can fail here.
    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.raw(key)
            .map(|raw| raw.parse::<T>().map_err(|_| CliError::Config(format!("{key}: `{raw}` is out of range"))))
            .transpose()
    }

    pub fn duration(&self, key: &str) -> Option<i64> {
        self.raw(key).map(|raw| parse_duration(raw).expect("validated on entry"))
    }

    pub fn instant(&self, key: &str) -> Option<i64> {
        self.raw(key).map(|raw| parse_instant(raw).expect("validated on entry"))
    }

    pub fn flag(&self, key: &str) -> bool {
        self.raw(key) == Some("true")
    }
}
