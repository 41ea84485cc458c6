use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use lgigen::augment::{build_corpus, CorpusMode};
use lgigen::exam::{gen_train_loop_observed, ExamConfig, GeneratorTrainee, Interval};
use lgigen::g6::canonical_g6;
use lgigen::graph::{enumerate_graphs, random_graph, RandomGraphSpec};
use lgigen::lgi::canonical_lgi;
use lgigen::metrics::{
    generation_report, intersection_point, jsd, property_histogram, property_profile, tanimoto, Intersection,
    Property, PropertyProfile,
};
use lgigen::neural::{load_checkpoint, save_checkpoint, Checkpoint, ModelConfig, TrainConfig};
use lgigen::scaffold::{ring_system_of, scaffold_of, unique_counts, UniqueCounts};
use lgigen::seed::derive_seed;
use lgigen::validity::FormatKind;
use lgigen::{CanonicalKey, Graph, GraphFormat};

use crate::config::Resolver;
use crate::io::{ensure_dir, parse_all, parse_graph, read_lines, read_nonempty, write_file};
use crate::{Common, Internal, Outcome};

/// Samples are drawn in chunks of this size, each with its own derived seed.
const SAMPLE_CHUNK: usize = 1000;

fn path_str(p: Option<PathBuf>) -> Option<String> {
    p.map(|p| p.to_string_lossy().into_owned())
}

fn checker_for(format: FormatKind, training: &[Graph]) -> GraphFormat {
    match format {
        FormatKind::Lgi => GraphFormat::Lgi,
        FormatKind::G6 => GraphFormat::g6_for(training),
    }
}

fn write_text(format: FormatKind, g: &Graph) -> Result<String> {
    match format {
        FormatKind::Lgi => canonical_lgi(g).map_err(|e| anyhow!("{e}")),
        FormatKind::G6 => canonical_g6(g).map_err(|e| anyhow!("{e}")),
    }
}

#[derive(Args)]
pub struct PrepArgs {
    /// Graph file, one string per line in --format
    #[arg(long)]
    input: Option<PathBuf>,
    /// Generate this many random graphs instead of reading --input
    #[arg(long)]
    synthetic_count: Option<usize>,
    #[arg(long)]
    min_vertices: Option<usize>,
    #[arg(long)]
    max_vertices: Option<usize>,
    #[arg(long)]
    max_degree: Option<usize>,
    /// lgi or g6
    #[arg(long)]
    format: Option<FormatKind>,
    /// canonical or augmented
    #[arg(long)]
    mode: Option<String>,
    /// Serializations per graph in augmented mode
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Drop unparseable input lines instead of failing
    #[arg(long)]
    skip_invalid: bool,
    #[command(flatten)]
    common: Common,
}

pub fn prep(args: PrepArgs) -> Result<Outcome> {
    let mut r = Resolver::new(args.common.config.as_deref())?;
    let format: FormatKind = r.get("format", args.format, FormatKind::Lgi)?;
    let mode_name: String = r.get("mode", args.mode, "canonical".to_string())?;
    let seed: u64 = r.get("seed", args.seed, 0)?;
    let out = PathBuf::from(r.require::<String>("out", path_str(args.out))?);
    let skip_invalid: bool = r.get("skip_invalid", args.skip_invalid.then_some(true), false)?;
    let mode = match mode_name.as_str() {
        "canonical" => CorpusMode::Canonical,
        "augmented" => {
            let k: usize = r.get("k", args.k, 5)?;
            if k == 0 {
                bail!("k must be at least 1");
            }
            CorpusMode::Augmented(k)
        }
        other => bail!("mode must be canonical or augmented, not {other:?}"),
    };
    let input: Option<String> = r.optional("input", path_str(args.input))?;
    let mut skipped = 0;
    let graphs: Vec<Graph> = match input {
        Some(path) => {
            let lines = read_lines(Path::new(&path), false)?;
            if skip_invalid {
                let mut graphs = Vec::new();
                for (i, line) in lines.iter().enumerate() {
                    match parse_graph(line, format) {
                        Ok(g) => graphs.push(g),
                        Err(e) => {
                            eprintln!("skipping line {}: {e}", i + 1);
                            skipped += 1;
                        }
                    }
                }
                graphs
            } else {
                parse_all(&lines, format, "input")?
            }
        }
        None => {
            let count: usize = r
                .optional("synthetic_count", args.synthetic_count)?
                .ok_or_else(|| anyhow!("give either --input or --synthetic-count"))?;
            let spec = RandomGraphSpec {
                min_vertices: r.get("min_vertices", args.min_vertices, 6)?,
                max_vertices: r.get("max_vertices", args.max_vertices, 12)?,
                max_degree: r.get("max_degree", args.max_degree, 4)?,
                connected: true,
            };
            (0..count)
                .map(|i| random_graph(spec, derive_seed(seed, "graph", i as u64)))
                .collect::<Result<_, _>>()
                .map_err(|e| anyhow!("{e}"))?
        }
    };
    r.finish()?;
    let read = graphs.len();
    let mut seen = BTreeSet::new();
    let graphs: Vec<Graph> = graphs.into_iter().filter(|g| seen.insert(g.canonical_key())).collect();
    if graphs.is_empty() {
        bail!("no graphs to prepare");
    }

    ensure_dir(&out)?;
    let canonical = build_corpus(&graphs, CorpusMode::Canonical, seed, format).map_err(|e| anyhow!("{e}"))?;
    let corpus = match mode {
        CorpusMode::Canonical => canonical.clone(),
        m => build_corpus(&graphs, m, seed, format).map_err(|e| anyhow!("{e}"))?,
    };
    let mut buf = Vec::new();
    canonical.write_strings(&mut buf)?;
    write_file(&out.join("canonical.txt"), &buf)?;
    buf.clear();
    corpus.write_strings(&mut buf)?;
    write_file(&out.join("corpus.txt"), &buf)?;
    buf.clear();
    corpus.write_sidecar(&mut buf)?;
    write_file(&out.join("corpus_graphs.csv"), &buf)?;

    let alphabet: BTreeSet<char> = corpus.strings().flat_map(str::chars).collect();
    let summary = format!(
        "graphs_read,duplicates_removed,invalid_skipped,graphs,strings,alphabet\n{read},{},{skipped},{},{},{}\n",
        read - graphs.len(),
        graphs.len(),
        corpus.len(),
        alphabet.iter().collect::<String>(),
    );
    write_file(&out.join("summary.csv"), summary)?;
    r.write(&out.join("prep.config"))?;
    println!("{} graphs, {} strings -> {}", graphs.len(), corpus.len(), out.display());
    Ok(Outcome::Done)
}

#[derive(Args)]
pub struct TrainArgs {
    /// Training strings, one per line
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    format: Option<FormatKind>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    embedding_hidden: Option<usize>,
    #[arg(long)]
    encoder_hidden: Option<usize>,
    #[arg(long)]
    encoders: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    batch_size: Option<usize>,
    /// Global gradient norm limit; 0 disables clipping
    #[arg(long)]
    clip_norm: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Target validity fraction for the exams
    #[arg(long)]
    target: Option<f64>,
    /// Strings sampled per exam
    #[arg(long)]
    n_sample: Option<usize>,
    /// Consecutive passing exams needed to stop
    #[arg(long)]
    patience: Option<usize>,
    #[arg(long)]
    max_epochs: Option<usize>,
    /// wald or wilson
    #[arg(long)]
    interval: Option<String>,
    #[arg(long)]
    max_len: Option<usize>,
    #[arg(long)]
    temperature: Option<f64>,
    #[command(flatten)]
    common: Common,
}

pub fn train(args: TrainArgs) -> Result<Outcome> {
    let mut r = Resolver::new(args.common.config.as_deref())?;
    let corpus_path = PathBuf::from(r.require::<String>("corpus", path_str(args.corpus))?);
    let out = PathBuf::from(r.require::<String>("out", path_str(args.out))?);
    let format: FormatKind = r.get("format", args.format, FormatKind::Lgi)?;
    let dm = ModelConfig::default();
    let model = ModelConfig {
        embedding_hidden: r.get("embedding_hidden", args.embedding_hidden, dm.embedding_hidden)?,
        encoder_hidden: r.get("encoder_hidden", args.encoder_hidden, dm.encoder_hidden)?,
        encoders: r.get("encoders", args.encoders, dm.encoders)?,
    };
    let dt = TrainConfig::default();
    let seed: u64 = r.get("seed", args.seed, 0)?;
    let clip: f64 = r.get("clip_norm", args.clip_norm, dt.clip_norm.unwrap_or(0.0))?;
    let train = TrainConfig {
        learning_rate: r.get("learning_rate", args.learning_rate, dt.learning_rate)?,
        batch_size: r.get("batch_size", args.batch_size, dt.batch_size)?,
        clip_norm: (clip > 0.0).then_some(clip),
        seed,
    };
    let de = ExamConfig::default();
    let interval = match r.get("interval", args.interval, "wald".to_string())?.as_str() {
        "wald" => Interval::Wald,
        "wilson" => Interval::Wilson,
        other => bail!("interval must be wald or wilson, not {other:?}"),
    };
    let exam = ExamConfig {
        target_validity: r.get("target", args.target, de.target_validity)?,
        n_sample: r.get("n_sample", args.n_sample, de.n_sample)?,
        patience: r.get("patience", args.patience, de.patience)?,
        max_epochs: r.get("max_epochs", args.max_epochs, de.max_epochs)?,
        seed,
        interval,
        max_len: r.get("max_len", args.max_len, de.max_len)?,
        temperature: r.get("temperature", args.temperature, de.temperature)?,
    };
    r.finish()?;
    if model.embedding_hidden == 0 || model.encoder_hidden == 0 || model.encoders == 0 {
        bail!("model sizes must be positive");
    }
    if train.batch_size == 0 || train.learning_rate.is_nan() || train.learning_rate < 0.0 {
        bail!("batch_size must be positive and learning_rate non-negative");
    }
    if exam.temperature.is_nan() || exam.temperature <= 0.0 {
        bail!("temperature must be positive");
    }
    exam.validate()?;

    let corpus = read_nonempty(&corpus_path, false)?;
    let graphs = parse_all(&corpus, format, "corpus")?;
    let checker = checker_for(format, &graphs);
    let (lower, upper) = exam.margins()?;
    println!("exam margins [{lower:.4}, {upper:.4}] over {} samples", exam.n_sample);

    ensure_dir(&out)?;
    r.write(&out.join("train.config"))?;
    let mut trainee = GeneratorTrainee::new(&corpus, model, train, &exam)?;
    let outcome = gen_train_loop_observed(&mut trainee, &checker, &exam, |rec, loss| {
        println!(
            "epoch {} loss {loss:.4} valid {}/{} ({:.3}) {} streak {}",
            rec.epoch,
            rec.valid_count,
            rec.sampled,
            rec.validity_fraction,
            if rec.passed { "pass" } else { "fail" },
            rec.streak_after
        );
    })?;
    let log = outcome.log;

    let selected =
        Checkpoint::new(outcome.selected, log.selected_epoch, log.records.clone()).with_converged(log.converged);
    save_checkpoint(out.join("model.ckpt"), &selected).map_err(|e| Internal(format!("saving model.ckpt: {e}")))?;
    let latest =
        Checkpoint::new(trainee.model.clone(), log.stopped_at_epoch, log.records.clone()).with_converged(log.converged);
    save_checkpoint(out.join("latest.ckpt"), &latest).map_err(|e| Internal(format!("saving latest.ckpt: {e}")))?;
    let mut buf = Vec::new();
    log.write_csv(&mut buf)?;
    write_file(&out.join("train_log.csv"), &buf)?;
    let summary = format!(
        "stopped_at_epoch,selected_epoch,converged,lower_margin,upper_margin\n{},{},{},{},{}\n",
        log.stopped_at_epoch, log.selected_epoch, log.converged, log.lower_margin, log.upper_margin
    );
    write_file(&out.join("train_summary.csv"), summary)?;
    println!(
        "stopped at epoch {}, selected epoch {}, converged {}",
        log.stopped_at_epoch, log.selected_epoch, log.converged
    );
    Ok(if log.converged { Outcome::Done } else { Outcome::NotConverged })
}

#[derive(Args)]
pub struct SampleArgs {
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file, one string per line
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    max_len: Option<usize>,
    #[arg(long)]
    temperature: Option<f64>,
    #[command(flatten)]
    common: Common,
}

pub fn sample(args: SampleArgs) -> Result<Outcome> {
    let mut r = Resolver::new(args.common.config.as_deref())?;
    let ck_path = PathBuf::from(r.require::<String>("checkpoint", path_str(args.checkpoint))?);
    let out = PathBuf::from(r.require::<String>("out", path_str(args.out))?);
    let count: usize = r.require("count", args.count)?;
    let seed: u64 = r.get("seed", args.seed, 0)?;
    let de = ExamConfig::default();
    let max_len: usize = r.get("max_len", args.max_len, de.max_len)?;
    let temperature: f64 = r.get("temperature", args.temperature, de.temperature)?;
    r.finish()?;
    if temperature.is_nan() || temperature <= 0.0 || max_len == 0 {
        bail!("temperature and max_len must be positive");
    }
    let ck = load_checkpoint(&ck_path).with_context(|| format!("loading {}", ck_path.display()))?;
    let mut text = String::new();
    for (c, start) in (0..count).step_by(SAMPLE_CHUNK).enumerate() {
        let n = SAMPLE_CHUNK.min(count - start);
        for s in ck.model.sample(n, max_len, derive_seed(seed, "chunk", c as u64), temperature) {
            text.push_str(&s);
            text.push('\n');
        }
    }
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(parent)?;
    }
    write_file(&out, text)?;
    r.write(&config_beside(&out))?;
    Ok(Outcome::Done)
}

fn config_beside(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".config");
    out.with_file_name(name)
}

/// Training strings and graphs, and the valid generated graphs with their strings.
struct Loaded {
    checker: GraphFormat,
    generated: Vec<String>,
    training_text: Vec<String>,
    training: Vec<Graph>,
    valid: Vec<(String, Graph)>,
}

fn load_pair(generated: &Path, training: &Path, format: FormatKind) -> Result<Loaded> {
    let training_text = read_nonempty(training, false)?;
    let training_graphs = parse_all(&training_text, format, "training")?;
    let generated = read_lines(generated, true)?;
    if generated.is_empty() {
        bail!("no generated strings");
    }
    let checker = checker_for(format, &training_graphs);
    let valid = generated
        .iter()
        .filter_map(|s| checker.parse_valid(s).map(|g| (s.clone(), g)))
        .collect();
    Ok(Loaded { checker, generated, training_text, training: training_graphs, valid })
}

#[derive(Args)]
pub struct EvaluateArgs {
    /// Generated strings, one per line; blank lines count as invalid samples
    #[arg(long)]
    generated: Option<PathBuf>,
    /// Training strings
    #[arg(long)]
    training: Option<PathBuf>,
    #[arg(long)]
    format: Option<FormatKind>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write histogram overlays as SVG
    #[arg(long)]
    svg: bool,
    #[command(flatten)]
    common: Common,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |v| format!("{v}"))
}

pub fn evaluate(args: EvaluateArgs) -> Result<Outcome> {
    let mut r = Resolver::new(args.common.config.as_deref())?;
    let generated = PathBuf::from(r.require::<String>("generated", path_str(args.generated))?);
    let training = PathBuf::from(r.require::<String>("training", path_str(args.training))?);
    let out = PathBuf::from(r.require::<String>("out", path_str(args.out))?);
    let format: FormatKind = r.get("format", args.format, FormatKind::Lgi)?;
    let svg: bool = r.get("svg", args.svg.then_some(true), false)?;
    r.finish()?;
    let data = load_pair(&generated, &training, format)?;

    let training_keys: BTreeSet<CanonicalKey> = data.training.iter().map(Graph::canonical_key).collect();
    let report = generation_report(&data.generated, &training_keys, &data.checker).map_err(|e| anyhow!("{e}"))?;
    let mut rows: Vec<(String, String)> = vec![
        ("generated".into(), report.generated.to_string()),
        ("valid".into(), report.valid.to_string()),
        ("unique".into(), report.unique.to_string()),
        ("unknown".into(), report.unknown.to_string()),
        ("validity_pct".into(), format!("{}", report.validity_pct)),
        ("uniqueness_pct".into(), fmt_opt(report.uniqueness_pct)),
        ("novelty_pct".into(), fmt_opt(report.novelty_pct)),
    ];

    ensure_dir(&out)?;
    let train_profiles: Vec<PropertyProfile> =
        data.training_text.iter().zip(&data.training).map(|(s, g)| property_profile(s, g)).collect();
    let gen_profiles: Vec<PropertyProfile> = data.valid.iter().map(|(s, g)| property_profile(s, g)).collect();
    for property in Property::ALL {
        let (t, j) = if gen_profiles.is_empty() {
            (None, None)
        } else {
            let a = property_histogram(&train_profiles, property).map_err(|e| anyhow!("{e}"))?;
            let b = property_histogram(&gen_profiles, property).map_err(|e| anyhow!("{e}"))?;
            if svg {
                let plot = a.overlay_svg(&b, property.name()).map_err(|e| anyhow!("{e}"))?;
                write_file(&out.join(format!("{}.svg", property.name())), plot)?;
            }
            (
                Some(tanimoto(&a, &b).map_err(|e| anyhow!("{e}"))?),
                Some(jsd(&a, &b).map_err(|e| anyhow!("{e}"))?),
            )
        };
        rows.push((format!("tanimoto_{}", property.name()), fmt_opt(t)));
        rows.push((format!("jsd_{}", property.name()), fmt_opt(j)));
    }

    let train_counts = unique_counts(&data.training);
    let gen_counts = unique_counts(data.valid.iter().map(|(_, g)| g));
    for (who, c) in [("training", &train_counts), ("generated", &gen_counts)] {
        rows.push((format!("{who}_unique_graphs"), c.graph_keys.len().to_string()));
        rows.push((format!("{who}_unique_scaffolds"), c.scaffold_keys.len().to_string()));
        rows.push((format!("{who}_unique_ring_systems"), c.ring_keys.len().to_string()));
    }

    let mut csv = String::from("metric,value\n");
    for (k, v) in &rows {
        csv.push_str(&format!("{k},{v}\n"));
    }
    write_file(&out.join("report.csv"), &csv)?;
    r.write(&out.join("evaluate.config"))?;
    print!("{csv}");
    Ok(Outcome::Done)
}

#[derive(Args)]
pub struct IntersectArgs {
    #[arg(long)]
    generated: Option<PathBuf>,
    #[arg(long)]
    training: Option<PathBuf>,
    #[arg(long)]
    format: Option<FormatKind>,
    /// Output CSV file
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

type KeyFn = fn(&Graph) -> Vec<CanonicalKey>;

fn graph_keys(g: &Graph) -> Vec<CanonicalKey> {
    vec![g.canonical_key()]
}

fn scaffold_keys(g: &Graph) -> Vec<CanonicalKey> {
    scaffold_of(g).iter().map(Graph::canonical_key).collect()
}

fn ring_keys(g: &Graph) -> Vec<CanonicalKey> {
    ring_system_of(g).iter().map(Graph::canonical_key).collect()
}

pub fn intersect(args: IntersectArgs) -> Result<Outcome> {
    let mut r = Resolver::new(args.common.config.as_deref())?;
    let generated = PathBuf::from(r.require::<String>("generated", path_str(args.generated))?);
    let training = PathBuf::from(r.require::<String>("training", path_str(args.training))?);
    let out = PathBuf::from(r.require::<String>("out", path_str(args.out))?);
    let format: FormatKind = r.get("format", args.format, FormatKind::Lgi)?;
    r.finish()?;
    let data = load_pair(&generated, &training, format)?;
    let UniqueCounts { graph_keys: tg, scaffold_keys: ts, ring_keys: tr } = unique_counts(&data.training);
    let kinds: [(&str, &BTreeSet<CanonicalKey>, KeyFn); 3] =
        [("graphs", &tg, graph_keys), ("scaffolds", &ts, scaffold_keys), ("ring_systems", &tr, ring_keys)];

    let mut csv = String::from("kind,mode,target,position,distinct_found\n");
    for (kind, keys, key_fn) in kinds {
        for (mode, novelty_only) in [("unique", false), ("new", true)] {
            let stream = data.valid.iter().map(|(_, g)| g.clone());
            let result = intersection_point(stream, keys.len(), key_fn, novelty_only, keys);
            let (position, distinct) = match result {
                Intersection::Reached(p) => (p.to_string(), keys.len().to_string()),
                Intersection::Exhausted { distinct, .. } => ("exhausted".to_string(), distinct.to_string()),
            };
            csv.push_str(&format!("{kind},{mode},{},{position},{distinct}\n", keys.len()));
        }
    }
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(parent)?;
    }
    write_file(&out, &csv)?;
    r.write(&config_beside(&out))?;
    print!("{csv}");
    Ok(Outcome::Done)
}

#[derive(Args)]
pub struct OracleArgs {
    /// Vertex count, 1 to 6
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    format: Option<FormatKind>,
    /// Output file; standard output when absent
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

pub fn oracle(args: OracleArgs) -> Result<Outcome> {
    let mut r = Resolver::new(args.common.config.as_deref())?;
    let n: usize = r.require("n", args.n)?;
    let format: FormatKind = r.get("format", args.format, FormatKind::Lgi)?;
    let out: Option<String> = r.optional("out", path_str(args.out))?;
    r.finish()?;
    if !(1..=6).contains(&n) {
        bail!("n must be between 1 and 6");
    }
    let mut text = String::new();
    for g in enumerate_graphs(n).map_err(|e| anyhow!("{e}"))? {
        text.push_str(&write_text(format, &g)?);
        text.push('\n');
    }
    match out {
        Some(path) => {
            let path = PathBuf::from(path);
            write_file(&path, &text)?;
            r.write(&config_beside(&path))?;
        }
        None => print!("{text}"),
    }
    Ok(Outcome::Done)
}
