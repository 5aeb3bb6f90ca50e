use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fairshare_core::trace::{read_trace, EntityKind};
use fairshare_core::valuation::ingest_scores;
use sha2::{Digest, Sha256};
use tempfile::TempDir;

fn fairshare(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fairshare")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn simulate(dir: &TempDir, config: &Path, name: &str) -> PathBuf {
    let out = dir.path().join(name);
    stdout(&fairshare(&["simulate", "--config", arg(config), "--out", arg(&out)]));
    out
}

#[test]
fn bundled_scenario_writes_full_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = simulate(&dir, &configs().join("fairshare-medqa-synthetic.toml"), "run");
    let lines = read_trace(out.join("trace.jsonl")).unwrap();
    let present = lines.iter().filter(|l| l.entity_kind == EntityKind::Seller && l.metric == "present").count();
    assert_eq!(present, 100 * 10);
    assert!(out.join("summary.csv").exists());
}

#[test]
fn manifest_digest_matches_stored_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let config = configs().join("reduced-medqa-synthetic.toml");
    stdout(&fairshare(&["simulate", "--config", arg(&config), "--out", arg(&out), "--seed", "77"]));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let stored = std::fs::read(out.join("config.toml")).unwrap();
    let digest: String = Sha256::digest(&stored).iter().map(|b| format!("{b:02x}")).collect();
    assert_eq!(manifest["config_digest"], digest.as_str());
    assert_eq!(manifest["seed"], 77);
    // the stored config reproduces the run
    let again = simulate(&dir, &out.join("config.toml"), "again");
    assert_eq!(std::fs::read(out.join("trace.jsonl")).unwrap(), std::fs::read(again.join("trace.jsonl")).unwrap());
}

#[test]
fn missing_config_is_an_input_error() {
    let out = fairshare(&["simulate", "--config", "/nonexistent/config.toml", "--out", "/tmp/unused"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = write(&dir, "file", "");
    let config = configs().join("fairshare-medqa-synthetic.toml");
    let out = fairshare(&["simulate", "--config", arg(&config), "--out", arg(&blocker.join("sub"))]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn zero_horizon_gives_empty_trace() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(configs().join("fairshare-medqa-synthetic.toml")).unwrap();
    let config = write(&dir, "zero.toml", &text.replace("horizon = 100", "horizon = 0"));
    let out = simulate(&dir, &config, "run");
    assert!(std::fs::read_to_string(out.join("trace.jsonl")).unwrap().is_empty());
}

#[test]
fn flat_price_for_two_buyers() {
    let snapshot = configs().join("snapshots/two-buyers.toml");
    let text = stdout(&fairshare(&["price", "--snapshot", arg(&snapshot)]));
    assert!(text.starts_with("price 0.8 profit 1.4"), "{text}");
}

#[test]
fn royalty_modes() {
    let snapshot = configs().join("snapshots/royalty.toml");
    let text = stdout(&fairshare(&["price", "--snapshot", arg(&snapshot), "--mode", "royalty"]));
    assert!(text.starts_with("rate 0.3 revenue 3"), "{text}");
    let dir = tempfile::tempdir().unwrap();
    let capped = write(&dir, "cap.toml", "[[buyers]]\nid = \"b\"\ncap = 0.0\nutilities = [10.0]\n");
    let text = stdout(&fairshare(&["price", "--snapshot", arg(&capped), "--mode", "royalty"]));
    assert!(text.starts_with("no-profitable-rate"), "{text}");
}

#[test]
fn empty_grid_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let snap = write(&dir, "g.toml", "grid = []\n[[buyers]]\nid = \"b\"\nbudget = 1.0\nutilities = [2.0]\n");
    assert_eq!(fairshare(&["price", "--snapshot", arg(&snap), "--mode", "grid"]).status.code(), Some(2));
}

#[test]
fn constant_valuation() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scores.jsonl");
    stdout(&fairshare(&["value", "constant", "--datasets", "a,b,c", "--out", arg(&out)]));
    let scores = ingest_scores(&out).unwrap();
    assert_eq!(scores.len(), 3);
    assert!(scores.iter().all(|s| s.raw == 1.0 && s.normalized == 1.0));
}

#[test]
fn bm25_needs_representatives() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write(&dir, "corpus.jsonl", "{\"id\":\"q\",\"text\":\"chest pain dosage\"}\n");
    let texts = write(&dir, "texts.jsonl", "{\"id\":\"d\",\"text\":\"pain relief\"}\n");
    let out = dir.path().join("s.jsonl");
    let args = ["value", "bm25", "--corpus", arg(&corpus), "--texts", arg(&texts), "--out", arg(&out)];
    assert_eq!(fairshare(&args).status.code(), Some(2));
    let mut with_rep = args.to_vec();
    with_rep.extend(["--representatives", "q"]);
    stdout(&fairshare(&with_rep));
    assert_eq!(ingest_scores(&out).unwrap().len(), 1);
}

#[test]
fn unknown_method_is_a_usage_error() {
    assert_eq!(fairshare(&["value", "shapley", "--out", "/tmp/x"]).status.code(), Some(2));
}

#[test]
fn toy_influence_tracks_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let infl = dir.path().join("infl.jsonl");
    let oracle = dir.path().join("oracle.jsonl");
    stdout(&fairshare(&["value", "toy-influence", "--seed", "5", "--out", arg(&infl)]));
    stdout(&fairshare(&["value", "toy-oracle", "--seed", "5", "--out", arg(&oracle)]));
    let rho: f64 = stdout(&fairshare(&["analyze", "spearman", "--x", arg(&infl), "--y", arg(&oracle)]))
        .trim()
        .parse()
        .unwrap();
    assert!(rho >= 0.95, "{rho}");
    let same: f64 = stdout(&fairshare(&["analyze", "spearman", "--x", arg(&infl), "--y", arg(&infl)]))
        .trim()
        .parse()
        .unwrap();
    assert_eq!(same, 1.0);
}

#[test]
fn compare_strategies_orders_fairshare_first() {
    let dir = tempfile::tempdir().unwrap();
    let fair = simulate(&dir, &configs().join("fairshare-medqa-synthetic.toml"), "fair");
    let exploit = simulate(&dir, &configs().join("exploitative-medqa-synthetic.toml"), "exploit");
    let text = stdout(&fairshare(&[
        "analyze",
        "compare-strategies",
        "--run",
        arg(&fair),
        "--run",
        arg(&exploit),
        "--checkpoints",
        "100",
    ]));
    let row = text.lines().find(|l| l.starts_with("100,active_sellers,")).unwrap();
    assert!(row.split(',').nth(2).unwrap().starts_with("fairshare >"), "{row}");

    let text = std::fs::read_to_string(configs().join("fairshare-medqa-synthetic.toml")).unwrap();
    let other = write(&dir, "other.toml", &text.replace("seed = 2024", "seed = 1"));
    let mismatched = simulate(&dir, &other, "other");
    let out = fairshare(&["analyze", "compare-strategies", "--run", arg(&exploit), "--run", arg(&mismatched)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn summarize_averages_traces() {
    let dir = tempfile::tempdir().unwrap();
    let run = simulate(&dir, &configs().join("reduced-medqa-synthetic.toml"), "run");
    let trace = run.join("trace.jsonl");
    let text = stdout(&fairshare(&["analyze", "summarize", "--trace", arg(&trace), "--trace", arg(&trace)]));
    let single = std::fs::read_to_string(run.join("summary.csv")).unwrap();
    assert_eq!(text, single);
}

#[test]
fn threshold_commands() {
    let text = stdout(&fairshare(&["threshold", "--u", "2", "--p-star", "1", "--price", "0.5", "--delta", "0.95"]));
    assert_eq!(text.lines().next(), Some("t* 1"));
    let text = stdout(&fairshare(&[
        "analyze",
        "threshold-sweep",
        "--u",
        "2",
        "--p-star",
        "1",
        "--price",
        "0.5",
        "--deltas",
        "0.9,0.95,0.999",
    ]));
    assert_eq!(text, "delta,t_star\n0.9,1\n0.95,1\n0.999,1\n");
    let bad = fairshare(&["threshold", "--u", "2", "--p-star", "1", "--price", "1.5", "--delta", "0.95"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn assumption_report() {
    let text = stdout(&fairshare(&["check-assumptions", "--utilities", "2", "--budgets", "1", "--delta", "0.95"]));
    assert_eq!(text, "lipschitz 1\nmin_gap 1\ndelta_bound 0.5\nok\n");
    let text = stdout(&fairshare(&["check-assumptions", "--utilities", "2", "--budgets", "1", "--delta", "0.3"]));
    assert!(text.contains("violation: discount factor 0.3 is below the required 0.5"), "{text}");
}
