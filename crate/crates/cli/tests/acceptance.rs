//! End-to-end acceptance checks. Prints one PASS/FAIL/SKIP line per criterion
//! and exits non-zero if a required criterion fails.
//!
//! The full-data criterion runs only when `ACCEPT_MOVIELENS_PATH` (a
//! MovieLens 10M `ratings.dat`) and/or `ACCEPT_DIGG_PATH` (a KONECT Digg
//! votes file) are set.

#[path = "../../core/tests/common/oracle.rs"]
mod oracle;

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use popclust::graph::Edge;
use popclust::ingest::{build_graph, parse_konect, parse_movielens, ParseMode, ParseOptions};
use popclust::model::{
    calibrate_popularity, calibrate_rating_curve, popularity_score, predict_count, rating_curve, DeltaProfile,
};
use popclust::motif::{classify_subset, count_motifs, icc_from_counts, opsahl_cstar, CountOptions, MotifClass, MotifCounts};
use popclust::pipeline::{
    critical_period_average, diagnostic_correlations, evaluate, predict_item, EvalConfig, ItemSelection,
    PredictOptions,
};
use popclust::synth::{generate, SynthParams};
use popclust::{DatasetProfile, Execution, ItemIdx, TemporalBipartiteGraph, TimeWindow, UserIdx};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn plain_graph(users: u32, items: u32, edges: &[(u32, u32)]) -> TemporalBipartiteGraph {
    let edges = edges
        .iter()
        .map(|&(u, i)| Edge { user: UserIdx(u), item: ItemIdx(i), rating: 3.0, timestamp: 0 })
        .collect();
    let ids = |p: &str, n: u32| (0..n).map(|k| format!("{p}{k}")).collect();
    TemporalBipartiteGraph::from_parts(ids("u", users), ids("i", items), edges, 0).unwrap()
}

fn flatten(c: &MotifCounts) -> oracle::Counts {
    [c.sigma[0], c.sigma[1], c.sigma[2], c.sigma[3], c.kappa[0], c.kappa[1], c.kappa[2]]
}

struct RandomGraph {
    users: u32,
    items: u32,
    edges: Vec<(u32, u32)>,
}

fn random_graphs() -> Vec<RandomGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..200)
        .map(|_| {
            let users = rng.random_range(1..=8);
            let items = rng.random_range(1..=8);
            let p = rng.random_range(0.2..=0.6);
            let edges = oracle::random_edges(users, items, p, || rng.random::<f64>());
            RandomGraph { users, items, edges }
        })
        .collect()
}

fn criterion_1(graphs: &[RandomGraph]) -> Check {
    let start = Instant::now();
    for (k, g) in graphs.iter().enumerate() {
        let graph = plain_graph(g.users, g.items, &g.edges);
        let (global, per_user) = oracle::census(g.users, g.items, &g.edges);
        for execution in [Execution::Sequential, Execution::Parallel] {
            let c = count_motifs(&graph, &CountOptions { budget: None, execution }).map_err(|e| e.to_string())?;
            ensure(flatten(&c.global) == global, || format!("graph {k}: global {:?} != oracle {global:?}", c.global))?;
            let mine: Vec<_> = c.per_user.iter().map(flatten).collect();
            ensure(mine == per_user, || format!("graph {k}: per-user counts differ from the oracle"))?;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("200 graphs, global and per-user counts exact, {elapsed:.2?}"))
}

fn criterion_2(graphs: &[RandomGraph]) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut classes = [0usize; 8];
    let mut n = 0;
    while n < 1000 {
        let g = &graphs[rng.random_range(0..graphs.len())];
        if g.users < 3 || g.items < 3 {
            continue;
        }
        let pick = |rng: &mut ChaCha8Rng, m: u32| {
            let v = rand::seq::index::sample(rng, m as usize, 3).into_vec();
            [v[0] as u32, v[1] as u32, v[2] as u32]
        };
        let us = pick(&mut rng, g.users);
        let is = pick(&mut rng, g.items);
        let graph = plain_graph(g.users, g.items, &g.edges);
        let class = classify_subset(&graph, us.map(UserIdx), is.map(ItemIdx)).map_err(|e| e.to_string())?;
        let mut adj = [[false; 6]; 6];
        for p in 0..3 {
            for s in 0..3 {
                let e = g.edges.contains(&(us[p], is[s]));
                adj[p][3 + s] = e;
                adj[3 + s][p] = e;
            }
        }
        let expected = match oracle::classify(&adj) {
            Some(k) if k < 4 => MotifClass::Sigma(k as u8),
            Some(k) => MotifClass::Kappa((k - 4) as u8),
            None => MotifClass::None,
        };
        ensure(class == expected, || format!("subset {us:?}/{is:?}: {class:?} != {expected:?}"))?;
        let slot = match class {
            MotifClass::Sigma(k) => k as usize,
            MotifClass::Kappa(k) => 4 + k as usize,
            MotifClass::None => 7,
        };
        classes[slot] += 1;
        n += 1;
    }
    for (k, g) in graphs.iter().enumerate() {
        let c = count_motifs(&plain_graph(g.users, g.items, &g.edges), &CountOptions { budget: None, execution: Execution::Sequential })
            .map_err(|e| e.to_string())?;
        let sum = c.per_user.iter().fold(MotifCounts::default(), |a, b| a + *b);
        let ok = (0..4).all(|i| sum.sigma[i] == 3 * c.global.sigma[i]) && (0..3).all(|i| sum.kappa[i] == 3 * c.global.kappa[i]);
        ensure(ok, || format!("graph {k}: per-user sums are not 3x global"))?;
    }
    Ok(format!("1000 subsets classified once each (class histogram {classes:?}); per-user sums = 3x global on 200 graphs"))
}

const CYCLE: [(u32, u32); 6] = [(0, 0), (1, 0), (1, 1), (2, 1), (2, 2), (0, 2)];
const PATH: [(u32, u32); 5] = [(0, 0), (1, 0), (1, 1), (2, 1), (2, 2)];

fn census(edges: &[(u32, u32)]) -> Result<MotifCounts, String> {
    count_motifs(&plain_graph(3, 3, edges), &CountOptions::default()).map(|c| c.global).map_err(|e| e.to_string())
}

fn criterion_3(bin: &Path, dir: &Path) -> Check {
    let c = census(&CYCLE)?;
    let icc = icc_from_counts(&c).icc;
    let cstar = opsahl_cstar(&plain_graph(3, 3, &CYCLE));
    ensure(c.sigma == [1, 0, 0, 0] && icc[0] == 1.0 && cstar == 1.0, || format!("6-cycle: {c:?} icc {icc:?} C* {cstar}"))?;

    let c = census(&PATH)?;
    let icc = icc_from_counts(&c).icc;
    ensure(c.kappa == [1, 0, 0] && c.sigma == [0; 4] && icc[0] == 0.0, || format!("6-path: {c:?} icc {icc:?}"))?;

    let all: Vec<_> = (0..3).flat_map(|u| (0..3).map(move |i| (u, i))).collect();
    let c = census(&all)?;
    let icc = icc_from_counts(&c).icc;
    ensure(c.sigma == [0, 0, 0, 1] && icc[3] == 1.0, || format!("K3,3: {c:?} icc {icc:?}"))?;

    let mut chord = CYCLE.to_vec();
    chord.push((0, 1));
    let c = census(&chord)?;
    let icc = icc_from_counts(&c).icc;
    ensure(c.sigma == [0, 1, 0, 0] && icc[1] == 1.0, || format!("6-cycle + chord: {c:?} icc {icc:?}"))?;

    // the same 6-cycle through the command line
    let input = dir.join("cycle.dat");
    let text: String = CYCLE.iter().map(|(u, i)| format!("u{u}::i{i}::4::{}\n", 10 * (u + i))).collect();
    fs::write(&input, text).map_err(|e| e.to_string())?;
    let out = Command::new(bin)
        .args(["motifs", "--input"])
        .arg(&input)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("motifs exited with {}", out.status))?;
    let stdout = String::from_utf8_lossy(&out.stdout);
    let row: Vec<f64> = stdout.lines().nth(1).unwrap_or("").split(',').filter_map(|v| v.parse().ok()).collect();
    let expected = [1., 0., 0., 0., 0., 0., 0., 1., 0., 0., 0., 1.0];
    ensure(row == expected, || format!("motifs row {row:?}"))?;
    Ok("6-cycle, 6-path, K3,3 and one-chord cycle exact; CLI row equals 1,0,0,0,0,0,0,1,0,0,0,1.0".into())
}

fn criterion_4() -> Check {
    let eps = 5e-4;
    let ml = calibrate_popularity(4.0, 29, eps).map_err(|e| e.to_string())?;
    ensure(ml.c == 116.0 && (ml.k - 0.0655).abs() <= 6e-4, || format!("movielens rho: {ml:?}"))?;
    let digg = calibrate_popularity(5.0, 6, eps).map_err(|e| e.to_string())?;
    ensure(digg.c == 30.0 && (digg.k - 0.2533).abs() <= 2e-3, || format!("digg rho: {digg:?}"))?;
    let f = calibrate_rating_curve(29, eps).map_err(|e| e.to_string())?;
    ensure((f.k - 0.3478).abs() <= 1e-3 && (f.c - 25.84).abs() <= 0.05, || format!("rating curve: {f:?}"))?;
    let half = popularity_score(4.0, 29.0, &ml);
    ensure((half - 0.5).abs() <= 1e-12, || format!("rho(4, 29) = {half}"))?;
    let four = rating_curve(29.0, &f);
    ensure((four - 4.0).abs() <= 1e-6, || format!("f(29) = {four}"))?;
    Ok(format!("c=116 k={:.5}; c=30 k={:.5}; f: k={:.5} c={:.4}; rho(4,29)=0.5; f(29)={four:.7}", ml.k, digg.k, f.k, f.c))
}

fn criterion_5() -> Check {
    let d = |delta: [f64; 4], below: [bool; 4]| DeltaProfile { delta, below_mean: below };
    let mixed = predict_count(3.0, &d([1.0; 4], [true, true, false, false]));
    ensure((mixed - 5.45).abs() < 1e-12, || format!("mixed example gives {mixed}"))?;
    let all = predict_count(3.0, &d([1.0; 4], [true; 4]));
    ensure(all == 14.0, || format!("all-below example gives {all}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let delta: [f64; 4] = std::array::from_fn(|_| rng.random_range(0.0..3.0));
        let below: [bool; 4] = std::array::from_fn(|_| rng.random_bool(0.5));
        let (r1, r2) = (rng.random_range(0.5..5.0), rng.random_range(0.5..5.0));
        let base = d(delta, below);
        let lhs = predict_count(r1 + r2, &base);
        let rhs = predict_count(r1, &base) + predict_count(r2, &base);
        ensure((lhs - rhs).abs() <= 1e-12, || format!("not linear in r: {lhs} vs {rhs}"))?;
        for k in 0..4 {
            let (x, y) = (rng.random_range(0.0..3.0), rng.random_range(0.0..3.0));
            let with = |v: f64| {
                let mut p = base;
                p.delta[k] = v;
                predict_count(r1, &p)
            };
            let lhs = with(x + y);
            let rhs = with(x) + with(y) - with(0.0);
            ensure((lhs - rhs).abs() <= 1e-12, || format!("not linear in delta {k}: {lhs} vs {rhs}"))?;
        }
    }
    Ok("mixed example 5.45, all-below 14; linear in r and each delta on 100 inputs to 1e-12".into())
}

fn synth_graph() -> TemporalBipartiteGraph {
    build_graph(&generate(&SynthParams::default()).expect("default parameters are valid"))
}

/// Rewrites every rating at or after the item's first rating, except that
/// first rating, and adds fresh later ratings from new users.
fn rewrite_future(g: &TemporalBipartiteGraph, item: ItemIdx, t0: i64, first_user: UserIdx) -> TemporalBipartiteGraph {
    let mut edges: Vec<Edge> = g
        .edges()
        .iter()
        .map(|e| {
            let is_first = e.item == item && e.user == first_user;
            if e.timestamp >= t0 && !is_first {
                Edge { rating: 6.0 - e.rating, timestamp: e.timestamp + 86_400, ..*e }
            } else {
                *e
            }
        })
        .collect();
    let extra = 20u32;
    let base = g.user_count() as u32;
    for k in 0..extra {
        for i in [item.0, (item.0 + k) % g.item_count() as u32] {
            let user = UserIdx(base + k);
            if !edges.iter().any(|e| e.user == user && e.item.0 == i) {
                edges.push(Edge { user, item: ItemIdx(i), rating: 5.0, timestamp: t0 + 1 + k as i64 });
            }
        }
    }
    let mut users: Vec<String> = g.user_ids().to_vec();
    users.extend((0..extra).map(|k| format!("late{k}")));
    TemporalBipartiteGraph::from_parts(users, g.item_ids().to_vec(), edges, 0).expect("valid rewrite")
}

fn criterion_6(bin: &Path, dir: &Path) -> Check {
    let g = synth_graph();
    let profile = DatasetProfile::digg();
    let opts = PredictOptions::default();
    let mut nontrivial = 0;
    for item in g.rated_items() {
        let detail = popclust::pipeline::predict_item_detailed(&g, item, &profile, &opts).map_err(|e| e.to_string())?;
        let p = detail.prediction;
        if let Some(t) = detail.latest_input_time {
            ensure(t < p.anchor_time, || format!("item {}: input at {t} >= t0 {}", item.0, p.anchor_time))?;
        }
        nontrivial += (p.n_hat > 0.0) as usize;
        let rewritten = rewrite_future(&g, item, p.anchor_time, p.ego);
        let again = predict_item(&rewritten, item, &profile, &opts).map_err(|e| e.to_string())?;
        ensure(again == p, || format!("item {}: prediction changed after rewriting the future", item.0))?;
    }

    // reports from the library and the binary do not depend on workers
    let render = |execution| -> Result<Vec<u8>, String> {
        let r = evaluate(&g, &ItemSelection::default(), &profile, &EvalConfig { execution, ..Default::default() })
            .map_err(|e| e.to_string())?;
        let mut buf = Vec::new();
        r.write_csv(&mut buf).map_err(|e| e.to_string())?;
        r.write_summary(&mut buf).map_err(|e| e.to_string())?;
        Ok(buf)
    };
    ensure(render(Execution::Sequential)? == render(Execution::Parallel)?, || "sequential and parallel reports differ".into())?;

    let data = dir.join("det.dat");
    run(bin, &["synth", "--seed", "42", "--output", path_str(&data)])?;
    let mut reports = Vec::new();
    for workers in ["1", "2", "8"] {
        let out = dir.join(format!("det_{workers}"));
        run(bin, &["evaluate", "--profile", "digg", "--workers", workers, "--input", path_str(&data), "--output-dir", path_str(&out)])?;
        reports.push((read(&out.join("evaluation.csv"))?, read(&out.join("summary.txt"))?));
    }
    ensure(reports.windows(2).all(|w| w[0] == w[1]), || "reports differ across worker counts".into())?;
    Ok(format!(
        "{} items: inputs all before t0, predictions unchanged by rewriting the future ({nontrivial} with n_hat > 0); reports identical for 1/2/8 workers",
        g.rated_items().len()
    ))
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

fn read(p: &Path) -> Result<Vec<u8>, String> {
    fs::read(p).map_err(|e| format!("{}: {e}", p.display()))
}

fn run(bin: &Path, args: &[&str]) -> Result<String, String> {
    let out = Command::new(bin).args(args).output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("`popclust {}` exited with {}: {}", args.join(" "), out.status, String::from_utf8_lossy(&out.stderr)));
    }
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

fn criterion_7(bin: &Path, dir: &Path) -> Check {
    let start = Instant::now();
    let mut outputs = Vec::new();
    for pass in 0..2 {
        let base = dir.join(format!("e2e_{pass}"));
        let data = base.join("ratings.dat");
        let snap = base.join("graph.snap");
        let out = base.join("out");
        fs::create_dir_all(&base).map_err(|e| e.to_string())?;
        run(bin, &["synth", "--seed", "42", "--users", "200", "--items", "50", "--output", path_str(&data)])?;
        let summary = run(bin, &["ingest", "--input", path_str(&data), "--snapshot", path_str(&snap)])?;
        ensure(summary.contains("primary=") && summary.contains("secondary=50"), || format!("ingest summary: {summary}"))?;
        run(bin, &["evaluate", "--profile", "digg", "--snapshot", path_str(&snap), "--output-dir", path_str(&out)])?;
        outputs.push((read(&data)?, read(&out.join("evaluation.csv"))?, read(&out.join("summary.txt"))?));
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(120), || format!("took {elapsed:?}"))?;
    ensure(outputs[0] == outputs[1], || "rerun is not byte-identical".into())?;

    let csv = String::from_utf8_lossy(&outputs[0].1).into_owned();
    let mut lines = csv.lines();
    ensure(lines.next() == Some("item_id,n,mu,rho,n_hat,mu_hat,rho_hat,abs_err,pop_success,n_success"), || "bad header".into())?;
    let rows: Vec<&str> = lines.collect();
    ensure(rows.len() == 50, || format!("{} rows", rows.len()))?;
    let mut flagged = 0;
    for row in &rows {
        let f: Vec<&str> = row.split(',').collect();
        ensure(f.len() == 10, || format!("row `{row}`"))?;
        ensure(f[1..8].iter().all(|v| v.parse::<f64>().is_ok_and(f64::is_finite)), || format!("row `{row}`"))?;
        ensure(matches!(f[8], "0" | "1") && matches!(f[9], "0" | "1"), || format!("row `{row}`"))?;
        flagged += (f[8] == "1") as usize;
    }
    let summary = String::from_utf8_lossy(&outputs[0].2).into_owned();
    ensure(summary.contains(&format!("pop_successes={flagged}\n")), || "summary count disagrees with rows".into())?;
    let rate = summary.lines().find_map(|l| l.strip_prefix("pop_success_rate=")).unwrap_or("?").to_string();
    Ok(format!("synth -> ingest -> evaluate twice in {elapsed:.2?}, byte-identical; 50 rows, pop_success_rate={rate}"))
}

enum Full {
    Skipped,
    Ran(Check),
}

fn criterion_8() -> Full {
    let ml = std::env::var_os("ACCEPT_MOVIELENS_PATH").map(PathBuf::from);
    let digg = std::env::var_os("ACCEPT_DIGG_PATH").map(PathBuf::from);
    if ml.is_none() && digg.is_none() {
        return Full::Skipped;
    }
    let within = |name: &str, got: f64, want: f64, tol: f64| {
        ensure((got - want).abs() <= tol, || format!("{name} = {got}, want {want} +- {tol}"))
    };
    let check = || -> Check {
        let mut notes = Vec::new();
        if let Some(path) = ml {
            let start = Instant::now();
            let p = DatasetProfile::movielens();
            let file = fs::File::open(&path).map_err(|e| e.to_string())?;
            let events = parse_movielens(BufReader::new(file), &ParseOptions::from_profile(&p, ParseMode::Strict))
                .map_err(|e| e.to_string())?
                .events;
            let g = build_graph(&events);
            let from = 1_072_915_200; // 2004-01-01
            let to = 1_199_145_600; // 2008-01-01
            let sel = ItemSelection { first_rated: Some(TimeWindow::new(from, to).unwrap()), ..Default::default() };
            let r = evaluate(&g, &sel, &p, &EvalConfig { budget: None, ..Default::default() }).map_err(|e| e.to_string())?;
            within("movielens pop_success_rate", r.pop_success_rate(), 0.66, 0.05)?;
            within("movielens n_success_rate", r.n_success_rate(), 0.53, 0.05)?;
            let avg = critical_period_average(&g, p.critical_window).map_err(|e| e.to_string())?;
            within("movielens critical_period_average", avg, 29.0, 1.5)?;
            let d = diagnostic_correlations(&g, &sel.resolve(&g).unwrap(), &p, Execution::Parallel).map_err(|e| e.to_string())?;
            within("movielens mu-vs-n correlation", d.mu_n_correlation, 0.183, 0.02)?;
            notes.push(format!("movielens {} items in {:.0?}", r.items(), start.elapsed()));
        }
        if let Some(path) = digg {
            let start = Instant::now();
            let p = DatasetProfile::digg();
            let file = fs::File::open(&path).map_err(|e| e.to_string())?;
            let events = parse_konect(BufReader::new(file), &ParseOptions::from_profile(&p, ParseMode::Lenient))
                .map_err(|e| e.to_string())?
                .events;
            let g = build_graph(&events);
            let sel = ItemSelection { sample: Some((350, 42)), ..Default::default() };
            let r = evaluate(&g, &sel, &p, &EvalConfig { budget: None, ..Default::default() }).map_err(|e| e.to_string())?;
            within("digg pop_success_rate", r.pop_success_rate(), 0.51, 0.05)?;
            let avg = critical_period_average(&g, p.critical_window).map_err(|e| e.to_string())?;
            within("digg critical_period_average", avg, 6.0, 1.0)?;
            notes.push(format!("digg {} items in {:.0?}", r.items(), start.elapsed()));
        }
        Ok(notes.join("; "))
    };
    Full::Ran(check())
}

fn main() {
    // `cargo test` forwards harness flags such as `--list`; nothing to list here
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let bin = PathBuf::from(env!("CARGO_BIN_EXE_popclust"));
    let dir = std::env::temp_dir().join(format!("popclust-acceptance-{}", std::process::id()));
    fs::create_dir_all(&dir).expect("temp dir");

    let graphs = random_graphs();
    let results: Vec<(&str, Check)> = vec![
        ("1 motif oracle equivalence", criterion_1(&graphs)),
        ("2 partition and consistency", criterion_2(&graphs)),
        ("3 named fixtures", criterion_3(&bin, &dir)),
        ("4 calibration closed forms", criterion_4()),
        ("5 count arithmetic", criterion_5()),
        ("6 pre-knowledge and determinism", criterion_6(&bin, &dir)),
        ("7 end-to-end desk pipeline", criterion_7(&bin, &dir)),
    ];
    let mut failed = 0;
    for (name, result) in &results {
        match result {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    match criterion_8() {
        Full::Skipped => println!("SKIP  8 full-data reproduction (optional): set ACCEPT_MOVIELENS_PATH and/or ACCEPT_DIGG_PATH"),
        Full::Ran(Ok(detail)) => println!("PASS  8 full-data reproduction (optional): {detail}"),
        Full::Ran(Err(why)) => println!("FAIL  8 full-data reproduction (optional): {why}"),
    }
    let _ = fs::remove_dir_all(&dir);
    if failed > 0 {
        eprintln!("{failed} required acceptance criteria failed");
        std::process::exit(1);
    }
}
