use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use popclust::ingest::{
    build_graph, load_snapshot, parse_generic_csv, parse_konect, parse_movielens, save_snapshot, ColumnMap,
    ParseMode, ParseOptions, ParseOutcome,
};
use popclust::model::Deviation;
use popclust::motif::{count_motifs, icc_from_counts, opsahl_cstar, CountOptions, MotifCounts, DEFAULT_BUDGET};
use popclust::pipeline::{
    critical_period_average, decay_profile, diagnostic_correlations, evaluate, predict_item, EvalConfig,
    EvalReport, ItemSelection, PredictOptions, Predictor,
};
use popclust::synth::{generate, write_movielens, SynthParams};
use popclust::{DatasetProfile, Execution, ItemIdx, TemporalBipartiteGraph, TimeWindow};

use crate::config::Config;
use crate::error::CliError;

type Result<T> = std::result::Result<T, CliError>;

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Writes to `path`, or to stdout when there is none.
fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn ensure<T>(value: Option<T>, what: &str) -> Result<T> {
    value.ok_or_else(|| CliError::Config(format!("{what} is not set")))
}

pub fn profile(cfg: &Config) -> Result<DatasetProfile> {
    let name = cfg.text("profile.name").unwrap_or_else(|| "movielens".into());
    let mut p = DatasetProfile::builtin(&name).expect("profile names are validated");
    if let Some(v) = cfg.get("profile.rating_min")? {
        p.rating_min = v;
    }
    if let Some(v) = cfg.get("profile.rating_max")? {
        p.rating_max = v;
    }
    if let Some(v) = cfg.get("profile.implicit_rating")? {
        p.implicit_rating = Some(v);
    }
    if let Some(v) = cfg.duration("profile.critical_window") {
        p.critical_window = v;
    }
    if let Some(v) = cfg.duration("profile.lookback_window") {
        p.lookback_window = v;
    }
    if let Some(v) = cfg.get("profile.popular_min_ratings")? {
        p.popular_min_ratings = v;
    }
    if let Some(v) = cfg.get("profile.popular_min_avg")? {
        p.popular_min_avg = v;
    }
    if let Some(v) = cfg.get("profile.baseline_score")? {
        p.baseline_score = v;
    }
    p.validate()?;
    Ok(p)
}

/// Replaces the popularity threshold with the dataset's own mean
/// critical-period rating count when asked to.
fn calibrated(cfg: &Config, graph: &TemporalBipartiteGraph, mut p: DatasetProfile) -> Result<DatasetProfile> {
    if cfg.flag("profile.calibrate_n_star") {
        let avg = critical_period_average(graph, p.critical_window)?;
        p.popular_min_ratings = (avg.round() as u32).max(1);
        eprintln!("calibrated popular_min_ratings={} from critical_period_average={avg}", p.popular_min_ratings);
    }
    Ok(p)
}

fn parse_input(cfg: &Config, profile: &DatasetProfile) -> Result<ParseOutcome> {
    let path = PathBuf::from(ensure(cfg.text("io.input"), "io.input (--input)")?);
    let mode = match cfg.raw("io.mode") {
        Some("lenient") => ParseMode::Lenient,
        _ => ParseMode::Strict,
    };
    let opts = ParseOptions::from_profile(profile, mode);
    let format = cfg.text("io.format").unwrap_or_else(|| "movielens".into());
    let reader = open(&path)?;
    let outcome = match format.as_str() {
        "movielens" => parse_movielens(reader, &opts),
        "konect" => parse_konect(reader, &opts),
        _ => {
            let mut map = ColumnMap::default();
            if let Some(v) = cfg.text("io.csv_user") {
                map.user = v;
            }
            if let Some(v) = cfg.text("io.csv_item") {
                map.item = v;
            }
            if let Some(v) = cfg.text("io.csv_rating") {
                map.rating = if v.is_empty() || v == "none" { None } else { Some(v) };
            }
            if let Some(v) = cfg.text("io.csv_timestamp") {
                map.timestamp = v;
            }
            if let Some(v) = cfg.raw("io.csv_delimiter") {
                map.delimiter = match v {
                    "tab" | "\\t" => b'\t',
                    d if d.len() == 1 => d.as_bytes()[0],
                    d => return Err(CliError::Config(format!("io.csv_delimiter: `{d}` is not one byte"))),
                };
            }
            parse_generic_csv(reader, &map, &opts)
        }
    };
    outcome.map_err(|e| match e {
        popclust::Error::Io(_) => CliError::Input(format!("{}: {e}", path.display())),
        other => CliError::from(other),
    })
}

/// The graph from `io.snapshot` if set, otherwise parsed from `io.input`.
fn load_graph(cfg: &Config, profile: &DatasetProfile) -> Result<TemporalBipartiteGraph> {
    match cfg.text("io.snapshot") {
        Some(path) => Ok(load_snapshot(open(Path::new(&path))?)?),
        None if cfg.raw("io.input").is_some() => Ok(build_graph(&parse_input(cfg, profile)?.events)),
        None => Err(CliError::Config("neither io.snapshot (--snapshot) nor io.input (--input) is set".into())),
    }
}

fn budget(cfg: &Config) -> Result<Option<u64>> {
    Ok(match cfg.get::<u64>("eval.budget")? {
        Some(0) => None,
        Some(b) => Some(b),
        None => Some(DEFAULT_BUDGET),
    })
}

pub fn ingest(cfg: &Config) -> Result<()> {
    let profile = profile(cfg)?;
    let outcome = parse_input(cfg, &profile)?;
    let graph = build_graph(&outcome.events);
    if let Some(path) = cfg.text("io.snapshot") {
        let mut out = create(Path::new(&path))?;
        save_snapshot(&graph, &mut out)?;
        out.flush()?;
    }
    let mut out = sink(None)?;
    writeln!(out, "primary={}", graph.user_count())?;
    writeln!(out, "secondary={}", graph.item_count())?;
    writeln!(out, "edges={}", graph.edge_count())?;
    writeln!(out, "duplicates={}", graph.duplicates())?;
    writeln!(out, "skipped={}", outcome.skipped)?;
    match graph.time_span() {
        Some((a, b)) => writeln!(out, "time_start={a}\ntime_end={b}")?,
        None => writeln!(out, "time_start=none\ntime_end=none")?,
    }
    out.flush()?;
    Ok(())
}

fn counts_fields(c: &MotifCounts) -> String {
    let icc = icc_from_counts(c).icc;
    let mut fields: Vec<String> = c.sigma.iter().chain(&c.kappa).map(u64::to_string).collect();
    fields.extend(icc.iter().map(f64::to_string));
    fields.join(",")
}

const COUNT_HEADER: &str = "sigma0,sigma1,sigma2,sigma3,kappa0,kappa1,kappa2,icc0,icc1,icc2,icc3";

pub fn motifs(cfg: &Config, output: Option<&Path>, per_user: Option<&Path>) -> Result<()> {
    let profile = profile(cfg)?;
    let graph = load_graph(cfg, &profile)?;
    let census = count_motifs(&graph, &CountOptions { budget: budget(cfg)?, execution: Execution::Parallel })?;
    let mut out = sink(output)?;
    writeln!(out, "{COUNT_HEADER},cstar")?;
    writeln!(out, "{},{}", counts_fields(&census.global), opsahl_cstar(&graph))?;
    out.flush()?;
    if let Some(path) = per_user {
        let mut out = create(path)?;
        writeln!(out, "user_id,{COUNT_HEADER}")?;
        for u in graph.users() {
            let id = csv_field(graph.user_id(u));
            writeln!(out, "{id},{}", counts_fields(&census.per_user[u.0 as usize]))?;
        }
        out.flush()?;
    }
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn deviation(cfg: &Config) -> Deviation {
    match cfg.raw("eval.deviation") {
        Some("sample") => Deviation::Sample,
        _ => Deviation::Population,
    }
}

fn item_list(cfg: &Config) -> Vec<String> {
    cfg.raw("eval.items")
        .map(|s| s.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect())
        .unwrap_or_default()
}

pub fn predict(cfg: &Config, output: Option<&Path>) -> Result<()> {
    let graph = load_graph(cfg, &profile(cfg)?)?;
    let profile = calibrated(cfg, &graph, profile(cfg)?)?;
    let strict = cfg.flag("eval.strict_items");
    let mut ids = item_list(cfg);
    if ids.is_empty() {
        ids = graph.rated_items().into_iter().map(|i| graph.item_id(i).to_string()).collect();
    }
    let opts = PredictOptions {
        count: CountOptions { budget: budget(cfg)?, execution: Execution::Sequential },
        deviation: deviation(cfg),
    };

    let mut rows = Vec::with_capacity(ids.len());
    for id in &ids {
        let Some(item) = graph.item_index(id) else {
            if strict {
                return Err(CliError::Data(format!("unknown item `{id}`")));
            }
            rows.push(format!("{},,,,,,,unknown item", csv_field(id)));
            continue;
        };
        let p = predict_item(&graph, item, &profile, &opts)?;
        rows.push(format!(
            "{},{},{},{},{},{},{},",
            csv_field(id),
            csv_field(graph.user_id(p.ego)),
            p.first_rating,
            p.anchor_time,
            p.n_hat,
            p.mu_hat,
            p.rho_hat
        ));
    }
    let mut out = sink(output)?;
    writeln!(out, "item_id,ego_id,r,t0,n_hat,mu_hat,rho_hat,error")?;
    for r in rows {
        writeln!(out, "{r}")?;
    }
    out.flush()?;
    Ok(())
}

fn selection(cfg: &Config, graph: &TemporalBipartiteGraph) -> Result<ItemSelection> {
    let from = cfg.instant("eval.first_rated_from");
    let to = cfg.instant("eval.first_rated_to");
    let first_rated = match (from, to) {
        (None, None) => None,
        (a, b) => Some(TimeWindow::new(a.unwrap_or(i64::MIN), b.unwrap_or(i64::MAX))?),
    };
    let ids = item_list(cfg);
    let ids = if ids.is_empty() {
        None
    } else {
        let mut idx = Vec::with_capacity(ids.len());
        for id in ids {
            match graph.item_index(&id) {
                Some(i) => idx.push(i),
                None => return Err(CliError::Data(format!("unknown item `{id}`"))),
            }
        }
        Some(idx)
    };
    let sample = match cfg.get::<usize>("eval.sample")? {
        Some(n) => Some((n, cfg.get::<u64>("eval.seed")?.unwrap_or(0))),
        None => None,
    };
    Ok(ItemSelection { first_rated, ids, sample })
}

fn eval_config(cfg: &Config) -> Result<EvalConfig> {
    let mut c = EvalConfig { budget: budget(cfg)?, deviation: deviation(cfg), ..EvalConfig::default() };
    if let Some(v) = cfg.get("eval.rho_tol")? {
        c.rho_tol = v;
    }
    if let Some(v) = cfg.get("eval.n_band_abs")? {
        c.n_band_abs = v;
    }
    if let Some(v) = cfg.get("eval.n_band_rel")? {
        c.n_band_rel = v;
    }
    if cfg.raw("eval.predictor") == Some("oracle") {
        c.predictor = Predictor::Oracle;
    }
    c.seed = cfg.get("eval.seed")?;
    Ok(c)
}

fn run_evaluation(cfg: &Config) -> Result<(TemporalBipartiteGraph, DatasetProfile, Vec<ItemIdx>, EvalReport)> {
    let graph = load_graph(cfg, &profile(cfg)?)?;
    let profile = calibrated(cfg, &graph, profile(cfg)?)?;
    let selection = selection(cfg, &graph)?;
    let items = selection.resolve(&graph)?;
    let report = evaluate(&graph, &selection, &profile, &eval_config(cfg)?)?;
    Ok((graph, profile, items, report))
}

pub fn evaluate_cmd(cfg: &Config, report_path: Option<&Path>, summary_path: Option<&Path>) -> Result<()> {
    let (_, _, _, report) = run_evaluation(cfg)?;
    let dir = cfg.text("io.output_dir").map(PathBuf::from);
    let report_path = report_path.map(Path::to_path_buf).or_else(|| dir.as_ref().map(|d| d.join("evaluation.csv")));
    let summary_path = summary_path.map(Path::to_path_buf).or_else(|| dir.as_ref().map(|d| d.join("summary.txt")));

    match report_path {
        Some(p) => {
            let mut out = create(&p)?;
            report.write_csv(&mut out)?;
            out.flush()?;
        }
        None => {
            let mut out = sink(None)?;
            report.write_csv(&mut out)?;
            out.flush()?;
        }
    }
    if let Some(p) = summary_path {
        let mut out = create(&p)?;
        report.write_summary(&mut out)?;
        out.flush()?;
    }
    // the summary always reaches the terminal, on stderr when stdout holds the CSV
    let mut buf = Vec::new();
    report.write_summary(&mut buf)?;
    if cfg.raw("io.output_dir").is_some() {
        io::stdout().write_all(&buf)?;
    } else {
        io::stderr().write_all(&buf)?;
    }
    Ok(())
}

fn write_pairs(dir: &Path, name: &str, header: (&str, &str), rows: impl IntoIterator<Item = (f64, f64)>) -> Result<()> {
    let mut out = create(&dir.join(name))?;
    writeln!(out, "{},{}", header.0, header.1)?;
    for (x, y) in rows {
        writeln!(out, "{x},{y}")?;
    }
    out.flush()?;
    Ok(())
}

const HOURS: f64 = 3600.0;

pub fn plotdata(cfg: &Config) -> Result<()> {
    let dir = PathBuf::from(ensure(cfg.text("io.output_dir"), "io.output_dir (--output-dir)")?);
    let (graph, profile, items, report) = run_evaluation(cfg)?;

    // average rating against rating count over every rated item
    let mut mu_n = Vec::new();
    for item in graph.rated_items() {
        let o = popclust::pipeline::actual_outcome(&graph, item, &profile)?;
        mu_n.push((o.n_actual as f64, o.mu_actual));
    }
    write_pairs(&dir, "fig2_mu_vs_n.csv", ("n", "mu"), mu_n)?;
    write_pairs(
        &dir,
        "fig4_rho_vs_rho_hat.csv",
        ("rho_hat", "rho"),
        report.rows.iter().map(|r| (r.prediction.rho_hat, r.outcome.rho_actual)),
    )?;
    write_pairs(
        &dir,
        "figS6_n_vs_n_hat.csv",
        ("n_hat", "n"),
        report.rows.iter().map(|r| (r.prediction.n_hat, r.outcome.n_actual as f64)),
    )?;

    let mut running = Vec::new();
    let mut gaps = Vec::new();
    for &item in &items {
        for p in decay_profile(&graph, item)? {
            let h = p.since_first as f64 / HOURS;
            running.push((h, p.running_mean));
            if let Some(g) = p.gap {
                gaps.push((h, g as f64 / HOURS));
            }
        }
    }
    write_pairs(&dir, "figS1_running_mean.csv", ("hours_since_first", "running_mean"), running)?;
    write_pairs(&dir, "figS2_gaps.csv", ("hours_since_first", "gap_hours"), gaps)?;

    if items.len() >= 2 {
        let d = diagnostic_correlations(&graph, &items, &profile, Execution::Parallel)?;
        for (k, l) in d.lookbacks.iter().enumerate() {
            let h = l / 3600;
            write_pairs(
                &dir,
                &format!("figS4_degree_{h}h.csv"),
                ("ego_degree", "n"),
                d.rows.iter().map(|r| (r.ego_degree[k] as f64, r.n_actual as f64)),
            )?;
            write_pairs(
                &dir,
                &format!("figS5_second_neighbours_{h}h.csv"),
                ("second_neighbours", "n"),
                d.rows.iter().map(|r| (r.second_neighbours[k] as f64, r.n_actual as f64)),
            )?;
        }
        let mut out = create(&dir.join("correlations.csv"))?;
        writeln!(out, "predictor,lookback,correlation")?;
        for (name, l, c) in d.correlation_rows() {
            writeln!(out, "{name},{l},{c}")?;
        }
        out.flush()?;
    } else {
        eprintln!("fewer than 2 selected items; skipping degree diagnostics");
    }
    println!("items={}", report.items());
    println!("output_dir={}", dir.display());
    Ok(())
}

pub fn synth(cfg: &Config, output: Option<&Path>) -> Result<()> {
    let mut p = SynthParams::default();
    let int = |key: &str| cfg.get::<usize>(key);
    if let Some(v) = int("synth.users")? {
        p.users = v;
    }
    if let Some(v) = int("synth.items")? {
        p.items = v;
    }
    if let Some(v) = cfg.get("synth.seed")? {
        p.seed = v;
    }
    if let Some(v) = cfg.get("synth.start")? {
        p.start = v;
    }
    if let Some(v) = cfg.duration("synth.item_spacing") {
        p.item_spacing = v;
    }
    if let Some(v) = cfg.duration("synth.mean_gap") {
        p.mean_gap = v as f64;
    }
    if let Some(v) = cfg.duration("synth.horizon") {
        p.horizon = v;
    }
    if let Some(v) = int("synth.max_ratings")? {
        p.max_ratings = v;
    }
    if let Some(v) = cfg.get("synth.quality_min")? {
        p.quality.0 = v;
    }
    if let Some(v) = cfg.get("synth.quality_max")? {
        p.quality.1 = v;
    }
    if let Some(v) = cfg.get("synth.spread")? {
        p.spread = v;
    }
    if let Some(v) = cfg.get("synth.gap_spread")? {
        p.gap_spread = v;
    }
    if let Some(v) = int("synth.communities")? {
        p.communities = v;
    }
    if let Some(v) = cfg.get("synth.community_boost")? {
        p.community_boost = v;
    }
    if let Some(v) = cfg.get("synth.skew")? {
        p.skew = v;
    }
    let events = generate(&p)?;
    let mut out = sink(output)?;
    write_movielens(&events, &mut out)?;
    out.flush()?;
    Ok(())
}
