use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lgigen::neural::load_checkpoint;
use lgigen::GraphFormat;
use tempfile::TempDir;

fn lgigen(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lgigen")).current_dir(dir).args(args).output().expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = lgigen(dir, args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn lines(path: impl AsRef<Path>) -> Vec<String> {
    fs::read_to_string(path).unwrap().lines().map(String::from).collect()
}

/// `metric,value` rows as pairs.
fn report(path: impl AsRef<Path>) -> Vec<(String, String)> {
    let rows = lines(path);
    assert_eq!(rows[0], "metric,value");
    rows[1..]
        .iter()
        .map(|r| {
            let (k, v) = r.split_once(',').unwrap();
            (k.to_string(), v.to_string())
        })
        .collect()
}

fn value<'a>(rows: &'a [(String, String)], key: &str) -> &'a str {
    &rows.iter().find(|(k, _)| k == key).unwrap_or_else(|| panic!("no row {key}")).1
}

/// The 50 graphs on 1, 3, 4 and 5 vertices as canonical LGI strings.
fn toy_corpus(dir: &Path) -> PathBuf {
    let mut text = String::new();
    for n in ["1", "3", "4", "5"] {
        text.push_str(&ok(dir, &["oracle", "--n", n]));
    }
    let path = dir.join("toy.txt");
    fs::write(&path, text).unwrap();
    assert_eq!(lines(&path).len(), 50);
    path
}

const SMALL_MODEL: &[&str] = &["--embedding-hidden", "32", "--encoder-hidden", "16", "--batch-size", "16"];

#[test]
fn oracle_counts_and_validity() {
    let dir = TempDir::new().unwrap();
    assert_eq!(ok(dir.path(), &["oracle", "--n", "1"]), "@\n");
    for (n, count) in [(2, 2), (3, 4), (4, 11), (5, 34), (6, 156)] {
        let lgi = ok(dir.path(), &["oracle", "--n", &n.to_string()]);
        let g6 = ok(dir.path(), &["oracle", "--n", &n.to_string(), "--format", "g6"]);
        assert_eq!(lgi.lines().count(), count);
        assert_eq!(g6.lines().count(), count);
        assert!(lgi.lines().all(|l| GraphFormat::Lgi.is_valid(l)));
        assert!(g6.lines().all(|l| lgigen::g6::decode_g6(l).is_ok()));
    }
    assert_eq!(code(&lgigen(dir.path(), &["oracle", "--n", "7"])), 2);
    assert_eq!(code(&lgigen(dir.path(), &["oracle", "--n", "0"])), 2);
}

#[test]
fn oracle_to_file_records_config() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["oracle", "--n", "4", "--out", "four.txt"]);
    assert_eq!(lines(dir.path().join("four.txt")).len(), 11);
    let config = fs::read_to_string(dir.path().join("four.txt.config")).unwrap();
    assert!(config.contains("n = 4"));
}

#[test]
fn prep_synthetic_augmented_bounds() {
    let dir = TempDir::new().unwrap();
    let common = ["prep", "--synthetic-count", "100", "--min-vertices", "9", "--max-vertices", "12", "--seed", "5"];
    ok(dir.path(), &[&common[..], &["--mode", "augmented", "--k", "5", "--out", "aug"]].concat());
    ok(dir.path(), &[&common[..], &["--out", "can"]].concat());
    let summary = lines(dir.path().join("aug/summary.csv"));
    assert_eq!(summary[0], "graphs_read,duplicates_removed,invalid_skipped,graphs,strings,alphabet");
    let fields: Vec<&str> = summary[1].split(',').collect();
    let graphs: usize = fields[3].parse().unwrap();
    assert_eq!(graphs, 100);
    let strings = lines(dir.path().join("aug/corpus.txt")).len();
    assert!((100..=500).contains(&strings), "{strings}");
    assert_eq!(fields[4].parse::<usize>().unwrap(), strings);
    assert_eq!(lines(dir.path().join("can/corpus.txt")).len(), 100);
    assert_eq!(lines(dir.path().join("can/canonical.txt")), lines(dir.path().join("aug/canonical.txt")));
    let sidecar = lines(dir.path().join("aug/corpus_graphs.csv"));
    assert_eq!(sidecar.len(), strings + 1);
}

#[test]
fn prep_collapses_isomorphic_inputs() {
    let dir = TempDir::new().unwrap();
    // Two writings of the 3-star, then a path.
    fs::write(dir.path().join("in.txt"), "C(A)(A)A\nAC(A)A\nABBA\n").unwrap();
    ok(dir.path(), &["prep", "--input", "in.txt", "--out", "p"]);
    assert_eq!(lines(dir.path().join("p/canonical.txt")).len(), 2);
    let summary = lines(dir.path().join("p/summary.csv"));
    assert!(summary[1].starts_with("3,1,0,2,2,"), "{}", summary[1]);
}

#[test]
fn prep_reports_bad_lines() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("in.txt"), "B1BB1\nB1B\nABBA\nA(\n").unwrap();
    let out = lgigen(dir.path(), &["prep", "--input", "in.txt", "--out", "p"]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2") && err.contains("line 4") && !err.contains("line 3"), "{err}");
    assert!(!dir.path().join("p").exists());
    ok(dir.path(), &["prep", "--input", "in.txt", "--out", "p", "--skip-invalid"]);
    assert_eq!(lines(dir.path().join("p/canonical.txt")).len(), 2);
}

#[test]
fn prep_rerun_from_config_is_identical() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["prep", "--synthetic-count", "30", "--mode", "augmented", "--k", "3", "--seed", "9", "--out", "a"]);
    fs::copy(dir.path().join("a/prep.config"), dir.path().join("run.config")).unwrap();
    ok(dir.path(), &["prep", "--config", "run.config", "--out", "b"]);
    for f in ["canonical.txt", "corpus.txt", "corpus_graphs.csv", "summary.csv"] {
        assert_eq!(fs::read(dir.path().join("a").join(f)).unwrap(), fs::read(dir.path().join("b").join(f)).unwrap(), "{f}");
    }
}

#[test]
fn config_typos_are_input_errors() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("run.config"), "n = 3\nformt = g6\n").unwrap();
    let out = lgigen(dir.path(), &["oracle", "--config", "run.config"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("formt"));
}

#[test]
fn train_toy_corpus_converges() {
    let dir = TempDir::new().unwrap();
    let corpus = toy_corpus(dir.path());
    let corpus = corpus.to_str().unwrap();
    let args =
        [&["train", "--corpus", corpus, "--out", "run", "--learning-rate", "0.01", "--target", "0.9"][..], SMALL_MODEL]
            .concat();
    let stdout = ok(dir.path(), &args);
    assert!(stdout.contains("epoch 1 loss"));
    let summary = lines(dir.path().join("run/train_summary.csv"));
    let fields: Vec<&str> = summary[1].split(',').collect();
    let stopped: usize = fields[0].parse().unwrap();
    assert!(stopped <= 100);
    assert_eq!(fields[2], "true");
    let ck = load_checkpoint(dir.path().join("run/model.ckpt")).unwrap();
    assert!(ck.converged);
    assert_eq!(ck.epoch, fields[1].parse::<usize>().unwrap());
    assert_eq!(ck.exam_history.len(), stopped);
    assert_eq!(lines(dir.path().join("run/train_log.csv")).len(), stopped + 1);

    // Sampling from the converged model.
    ok(dir.path(), &["sample", "--checkpoint", "run/model.ckpt", "--count", "1000", "--seed", "1", "--out", "a.txt"]);
    ok(dir.path(), &["sample", "--checkpoint", "run/model.ckpt", "--count", "1000", "--seed", "1", "--out", "b.txt"]);
    ok(dir.path(), &["sample", "--checkpoint", "run/model.ckpt", "--count", "1000", "--seed", "2", "--out", "c.txt"]);
    assert_eq!(lines(dir.path().join("a.txt")).len(), 1000);
    assert_eq!(fs::read(dir.path().join("a.txt")).unwrap(), fs::read(dir.path().join("b.txt")).unwrap());
    assert_ne!(fs::read(dir.path().join("a.txt")).unwrap(), fs::read(dir.path().join("c.txt")).unwrap());
    assert!(dir.path().join("a.txt.config").exists());
}

#[test]
fn train_without_convergence_exits_3_with_flag() {
    let dir = TempDir::new().unwrap();
    let corpus = toy_corpus(dir.path());
    let corpus = corpus.to_str().unwrap();
    let args = [&["train", "--corpus", corpus, "--out", "run", "--max-epochs", "2"][..], SMALL_MODEL].concat();
    let out = lgigen(dir.path(), &args);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
    let ck = load_checkpoint(dir.path().join("run/model.ckpt")).unwrap();
    assert!(!ck.converged);
    assert!(lines(dir.path().join("run/train_summary.csv"))[1].contains(",false,"));
    assert!(dir.path().join("run/latest.ckpt").exists());
}

#[test]
fn shorter_run_is_a_log_prefix() {
    let dir = TempDir::new().unwrap();
    let corpus = toy_corpus(dir.path());
    let corpus = corpus.to_str().unwrap();
    for (out, epochs) in [("short", "2"), ("long", "4")] {
        let args = [&["train", "--corpus", corpus, "--out", out, "--max-epochs", epochs, "--seed", "3"][..], SMALL_MODEL]
            .concat();
        assert_eq!(code(&lgigen(dir.path(), &args)), 3);
    }
    let short = lines(dir.path().join("short/train_log.csv"));
    let long = lines(dir.path().join("long/train_log.csv"));
    assert_eq!(short.len(), 3);
    assert_eq!(short[..], long[..3]);
}

#[test]
fn bad_checkpoint_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("x.ckpt"), "not a checkpoint").unwrap();
    let out = lgigen(dir.path(), &["sample", "--checkpoint", "x.ckpt", "--count", "3", "--out", "s.txt"]);
    assert_eq!(code(&out), 2);
    assert!(!dir.path().join("s.txt").exists());
}

const REPORT_SCHEMA: &[&str] = &[
    "generated",
    "valid",
    "unique",
    "unknown",
    "validity_pct",
    "uniqueness_pct",
    "novelty_pct",
    "tanimoto_lgi_length",
    "jsd_lgi_length",
    "tanimoto_node_count",
    "jsd_node_count",
    "tanimoto_graph_energy",
    "jsd_graph_energy",
    "training_unique_graphs",
    "training_unique_scaffolds",
    "training_unique_ring_systems",
    "generated_unique_graphs",
    "generated_unique_scaffolds",
    "generated_unique_ring_systems",
];

#[test]
fn evaluate_self_comparison() {
    let dir = TempDir::new().unwrap();
    toy_corpus(dir.path());
    ok(dir.path(), &["evaluate", "--generated", "toy.txt", "--training", "toy.txt", "--out", "ev", "--svg"]);
    let rows = report(dir.path().join("ev/report.csv"));
    let keys: Vec<&str> = rows.iter().map(|(k, _)| k.as_str()).collect();
    assert_eq!(keys, REPORT_SCHEMA);
    assert_eq!(value(&rows, "validity_pct"), "100");
    assert_eq!(value(&rows, "uniqueness_pct"), "100");
    assert_eq!(value(&rows, "novelty_pct"), "0");
    for p in ["lgi_length", "node_count", "graph_energy"] {
        assert_eq!(value(&rows, &format!("tanimoto_{p}")), "100");
        assert_eq!(value(&rows, &format!("jsd_{p}")), "0");
        let svg = fs::read_to_string(dir.path().join(format!("ev/{p}.svg"))).unwrap();
        assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    }
    assert_eq!(value(&rows, "training_unique_graphs"), "50");
    assert_eq!(value(&rows, "generated_unique_graphs"), "50");
}

#[test]
fn evaluate_all_invalid() {
    let dir = TempDir::new().unwrap();
    toy_corpus(dir.path());
    fs::write(dir.path().join("gen.txt"), "B1B\n\n((\n").unwrap();
    ok(dir.path(), &["evaluate", "--generated", "gen.txt", "--training", "toy.txt", "--out", "ev"]);
    let rows = report(dir.path().join("ev/report.csv"));
    assert_eq!(value(&rows, "generated"), "3");
    assert_eq!(value(&rows, "validity_pct"), "0");
    for key in ["uniqueness_pct", "novelty_pct", "tanimoto_lgi_length", "jsd_graph_energy"] {
        assert_eq!(value(&rows, key), "NA", "{key}");
    }
    assert_eq!(value(&rows, "generated_unique_graphs"), "0");
}

#[test]
fn evaluate_and_intersect_reject_empty_files() {
    let dir = TempDir::new().unwrap();
    toy_corpus(dir.path());
    fs::write(dir.path().join("empty.txt"), "").unwrap();
    for cmd in ["evaluate", "intersect"] {
        let a = lgigen(dir.path(), &[cmd, "--generated", "empty.txt", "--training", "toy.txt", "--out", "o"]);
        let b = lgigen(dir.path(), &[cmd, "--generated", "toy.txt", "--training", "empty.txt", "--out", "o"]);
        assert_eq!((code(&a), code(&b)), (2, 2), "{cmd}");
    }
}

fn intersect_rows(path: impl AsRef<Path>) -> Vec<Vec<String>> {
    let rows = lines(path);
    assert_eq!(rows[0], "kind,mode,target,position,distinct_found");
    rows[1..].iter().map(|r| r.split(',').map(String::from).collect()).collect()
}

#[test]
fn intersect_shuffled_training_set() {
    let dir = TempDir::new().unwrap();
    let four = ok(dir.path(), &["oracle", "--n", "4"]);
    fs::write(dir.path().join("train.txt"), &four).unwrap();
    // Reversed, with every graph repeated once.
    let mut gen: Vec<&str> = four.lines().rev().collect();
    gen.extend(four.lines());
    fs::write(dir.path().join("gen.txt"), gen.join("\n")).unwrap();
    ok(dir.path(), &["intersect", "--generated", "gen.txt", "--training", "train.txt", "--out", "i.csv"]);
    let rows = intersect_rows(dir.path().join("i.csv"));
    assert_eq!(rows.len(), 6);
    let kinds: Vec<(&str, &str)> = rows.iter().map(|r| (r[0].as_str(), r[1].as_str())).collect();
    assert_eq!(
        kinds,
        [
            ("graphs", "unique"),
            ("graphs", "new"),
            ("scaffolds", "unique"),
            ("scaffolds", "new"),
            ("ring_systems", "unique"),
            ("ring_systems", "new")
        ]
    );
    assert_eq!(rows[0][2], "11");
    assert!(rows[0][3].parse::<usize>().unwrap() >= 11);
    // Nothing in the training set is new.
    assert_eq!(rows[1][3], "exhausted");
    assert_eq!(rows[1][4], "0");
}

#[test]
fn intersect_all_novel_stream() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("train.txt"), ok(dir.path(), &["oracle", "--n", "4"])).unwrap();
    fs::write(dir.path().join("gen.txt"), ok(dir.path(), &["oracle", "--n", "5"])).unwrap();
    ok(dir.path(), &["intersect", "--generated", "gen.txt", "--training", "train.txt", "--out", "i.csv"]);
    let rows = intersect_rows(dir.path().join("i.csv"));
    assert_eq!(rows[1][..4], ["graphs", "new", "11", "11"]);
}

#[test]
fn g6_pipeline() {
    let dir = TempDir::new().unwrap();
    let g6 = ok(dir.path(), &["oracle", "--n", "5", "--format", "g6"]);
    fs::write(dir.path().join("g6.txt"), &g6).unwrap();
    ok(dir.path(), &["prep", "--input", "g6.txt", "--format", "g6", "--mode", "augmented", "--k", "3", "--out", "p"]);
    assert_eq!(lines(dir.path().join("p/canonical.txt")).len(), 34);
    ok(dir.path(), &["evaluate", "--generated", "g6.txt", "--training", "p/canonical.txt", "--format", "g6", "--out", "ev"]);
    let rows = report(dir.path().join("ev/report.csv"));
    assert_eq!(value(&rows, "validity_pct"), "100");
    assert_eq!(value(&rows, "novelty_pct"), "0");
}
