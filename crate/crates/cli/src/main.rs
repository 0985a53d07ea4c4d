//! `popclust`: batch front end for ingesting rating data, counting motifs,
//! predicting item popularity and exporting evaluation and plot data.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::Config;
use error::CliError;

#[derive(Parser)]
#[command(name = "popclust", version, about = "Predict item popularity from bipartite clustering")]
struct Cli {
    /// TOML file with [profile], [io], [eval] and [synth] sections.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Override one setting; repeatable. Beats the file and the environment.
    #[arg(long = "set", global = true, value_name = "SECTION.KEY=VALUE")]
    sets: Vec<String>,

    /// Built-in dataset profile.
    #[arg(long, global = true, value_name = "NAME")]
    profile: Option<String>,

    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Set the popularity threshold n* to the data's mean critical-period count.
    #[arg(long, global = true)]
    calibrate_n_star: bool,

    /// Motif enumeration budget per census; 0 disables it.
    #[arg(long, global = true)]
    budget: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct Source {
    /// Raw rating file.
    #[arg(long)]
    input: Option<PathBuf>,
    /// movielens, konect or csv.
    #[arg(long)]
    format: Option<String>,
    /// Graph snapshot; read before `--input` when both are given.
    #[arg(long)]
    snapshot: Option<PathBuf>,
    /// Skip malformed records instead of failing.
    #[arg(long)]
    lenient: bool,
}

#[derive(Args, Default)]
struct Selection {
    /// Only items first rated at or after this time (unix seconds or YYYY-MM-DD).
    #[arg(long)]
    from: Option<String>,
    /// Only items first rated before this time.
    #[arg(long)]
    to: Option<String>,
    /// Evaluate a seeded random sample of this many items.
    #[arg(long)]
    sample: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Popularity success tolerance on |rho_hat - rho|.
    #[arg(long)]
    rho_tol: Option<f64>,
    /// Replay each item's realised outcome instead of predicting it.
    #[arg(long)]
    oracle: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a rating file, print a summary and save a snapshot to `--snapshot`.
    Ingest {
        #[command(flatten)]
        source: Source,
    },
    /// Whole-graph motif counts, clustering coefficients and C*.
    Motifs {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Also write per-user counts here.
        #[arg(long)]
        per_user: Option<PathBuf>,
    },
    /// Predict popularity for the given items (all rated items by default).
    Predict {
        #[command(flatten)]
        source: Source,
        /// Item id; repeatable.
        #[arg(long = "item")]
        items: Vec<String>,
        /// Fail on unknown item ids instead of reporting them per row.
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Predict and score a selection of items.
    Evaluate {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        selection: Selection,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Per-item CSV; stdout when neither this nor --output-dir is given.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Write two-column CSV series for the standard figures.
    Plotdata {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        selection: Selection,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Generate a synthetic rating file in MovieLens format.
    Synth {
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        users: Option<usize>,
        #[arg(long)]
        items: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Mean gap between ratings of an item, e.g. `1h`.
        #[arg(long)]
        mean_gap: Option<String>,
        #[arg(long)]
        item_spacing: Option<String>,
        #[arg(long)]
        horizon: Option<String>,
        #[arg(long)]
        max_ratings: Option<usize>,
    },
}

fn path(p: &std::path::Path) -> String {
    p.display().to_string()
}

/// Dedicated flags as `section.key` assignments, applied after `--set`.
fn flag_settings(cli: &Cli) -> Vec<(&'static str, String)> {
    let mut out = Vec::new();
    let mut put = |key: &'static str, v: Option<String>| {
        if let Some(v) = v {
            out.push((key, v));
        }
    };
    put("profile.name", cli.profile.clone());
    put("eval.workers", cli.workers.map(|w| w.to_string()));
    put("eval.budget", cli.budget.map(|b| b.to_string()));
    put("profile.calibrate_n_star", cli.calibrate_n_star.then(|| "true".into()));

    let source = match &cli.command {
        Command::Ingest { source, .. }
        | Command::Motifs { source, .. }
        | Command::Predict { source, .. }
        | Command::Evaluate { source, .. }
        | Command::Plotdata { source, .. } => Some(source),
        Command::Synth { .. } => None,
    };
    if let Some(s) = source {
        put("io.input", s.input.as_deref().map(path));
        put("io.format", s.format.clone());
        put("io.snapshot", s.snapshot.as_deref().map(path));
        put("io.mode", s.lenient.then(|| "lenient".into()));
    }
    let selection = match &cli.command {
        Command::Evaluate { selection, output_dir, .. } | Command::Plotdata { selection, output_dir, .. } => {
            put("io.output_dir", output_dir.as_deref().map(path));
            Some(selection)
        }
        _ => None,
    };
    if let Some(s) = selection {
        put("eval.first_rated_from", s.from.clone());
        put("eval.first_rated_to", s.to.clone());
        put("eval.sample", s.sample.map(|v| v.to_string()));
        put("eval.seed", s.seed.map(|v| v.to_string()));
        put("eval.rho_tol", s.rho_tol.map(|v| v.to_string()));
        put("eval.predictor", s.oracle.then(|| "oracle".into()));
    }
    match &cli.command {
        Command::Predict { items, strict, .. } => {
            put("eval.items", (!items.is_empty()).then(|| items.join(",")));
            put("eval.strict_items", strict.then(|| "true".into()));
        }
        Command::Synth { users, items, seed, mean_gap, item_spacing, horizon, max_ratings, .. } => {
            put("synth.users", users.map(|v| v.to_string()));
            put("synth.items", items.map(|v| v.to_string()));
            put("synth.seed", seed.map(|v| v.to_string()));
            put("synth.mean_gap", mean_gap.clone());
            put("synth.item_spacing", item_spacing.clone());
            put("synth.horizon", horizon.clone());
            put("synth.max_ratings", max_ratings.map(|v| v.to_string()));
        }
        _ => {}
    }
    out
}

fn configure(cli: &Cli) -> Result<Config, CliError> {
    let mut cfg = Config::default();
    if let Some(file) = &cli.config {
        cfg.merge_file(file)?;
    }
    cfg.merge_env(std::env::vars())?;
    for s in &cli.sets {
        cfg.merge_assignment(s)?;
    }
    for (key, value) in flag_settings(cli) {
        cfg.set(key, value, "command line")?;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = configure(&cli)?;
    let workers = cfg.get::<usize>("eval.workers")?;
    popclust::exec::with_workers(workers, || match &cli.command {
        Command::Ingest { .. } => commands::ingest(&cfg),
        Command::Motifs { output, per_user, .. } => commands::motifs(&cfg, output.as_deref(), per_user.as_deref()),
        Command::Predict { output, .. } => commands::predict(&cfg, output.as_deref()),
        Command::Evaluate { report, summary, .. } => {
            commands::evaluate_cmd(&cfg, report.as_deref(), summary.as_deref())
        }
        Command::Plotdata { .. } => commands::plotdata(&cfg),
        Command::Synth { output, .. } => commands::synth(&cfg, output.as_deref()),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("popclust: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
