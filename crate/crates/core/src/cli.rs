//! The `tgtc` command line: `build`, `embed`, `train`, `eval`, `ablate`,
//! `baseline` and `synth`.
//!
//! Every subcommand accepts `--config <file>` with flat `key = value` lines
//! using the long flag names; flags given on the command line win.
//! Exit codes: 0 success, 1 usage, 2 data/format, 3 numerical failure.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::baselines::{logreg_fit, logreg_predict, nb_fit, nb_predict, tfidf_features, LogRegConfig};
use crate::corpus::{
    assign_splits, fallback_embed, load_corpus, load_embeddings, write_corpus, write_embeddings, CorpusBundle,
    Document, EmbeddingMatrix, Split, SplitRatios, TokenizerConfig,
};
use crate::error::{Error, Result};
use crate::graph::{build_graph, normalize_adjacency, read_graph, write_graph, EdgeStats, GraphMeta, HeteroGraph};
use crate::metrics::{evaluate, roc_auc, write_report, write_roc_csv, EvalReport, RocCurve};
use crate::model::{build_feature_matrix, predict, FeatureMatrix, ModelMode, ModelParams};
use crate::synthetic::{generate, SyntheticConfig};
use crate::trainer::{load_checkpoint, save_checkpoint, train, TrainConfig, TrainOutcome};

pub const DOCUMENTS_FILE: &str = "documents.jsonl";
pub const VOCAB_FILE: &str = "vocab.tsv";
pub const STATS_FILE: &str = "stats.json";
pub const CHECKPOINT_FILE: &str = "checkpoint.json";
pub const HISTORY_FILE: &str = "history.csv";
pub const METRICS_FILE: &str = "metrics.json";
pub const FINAL_METRICS_FILE: &str = "metrics_final.json";
pub const ROC_FILE: &str = "roc.csv";
pub const ABLATION_FILE: &str = "ablation.csv";

#[derive(Parser, Debug)]
#[command(
    name = "tgtc",
    version,
    about = "Transductive text classification over word-document graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build the corpus graph, vocabulary and split-assigned documents.
    Build(BuildArgs),
    /// Write fallback document embeddings (TF-IDF + seeded projection).
    Embed(EmbedArgs),
    /// Train the interpolated model and evaluate it on the test split.
    Train(TrainArgs),
    /// Evaluate a checkpoint on the test split.
    Eval(EvalArgs),
    /// Train once per lambda and tabulate test metrics.
    Ablate(AblateArgs),
    /// Naive Bayes and logistic regression over TF-IDF features.
    Baseline(BaselineArgs),
    /// Write the seeded two-class benchmark corpus.
    Synth(SynthArgs),
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct SynthArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 300)]
    pub documents: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Output corpus JSONL file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct SplitFlags {
    /// Seed for the split shuffle.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fraction of labeled documents held out for testing.
    #[arg(long, default_value_t = 0.3)]
    pub test_ratio: f64,
    /// Fraction of the remaining training pool reserved for validation.
    #[arg(long, default_value_t = 0.1)]
    pub val_ratio: f64,
}

impl SplitFlags {
    fn ratios(&self) -> SplitRatios {
        SplitRatios {
            test: self.test_ratio,
            val_of_train: self.val_ratio,
        }
    }
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct BuildArgs {
    /// Flat key = value file with defaults for these flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Corpus JSONL file.
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, default_value_t = 20)]
    pub window_size: usize,
    #[arg(long, default_value_t = 1)]
    pub min_df: usize,
    #[command(flatten)]
    pub split: SplitFlags,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct EmbedArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Corpus JSONL file (or a graph directory's documents.jsonl).
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, default_value_t = 128)]
    pub dim: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub min_df: usize,
    /// Output embedding file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct TrainFlags {
    #[arg(long, default_value_t = 50)]
    pub epochs: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub lr_gcn: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub lr_head: f64,
    #[arg(long, default_value_t = 200)]
    pub hidden: usize,
    #[arg(long, default_value_t = 0.0)]
    pub dropout: f64,
    /// Epochs without validation improvement before stopping (0 disables).
    #[arg(long, default_value_t = 10)]
    pub patience: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// interpolated, head-only or gcn-only.
    #[arg(long, default_value = "interpolated")]
    pub mode: ModelMode,
}

impl TrainFlags {
    pub fn config(&self, lambda: f64) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs,
            lr_gcn: self.lr_gcn,
            lr_head: self.lr_head,
            lambda,
            hidden: self.hidden,
            dropout: self.dropout,
            patience: self.patience,
            seed: self.seed,
            mode: self.mode,
            ..TrainConfig::default()
        }
    }
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct TrainArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Graph directory written by `build`.
    #[arg(long)]
    pub graph: PathBuf,
    /// Embedding interchange file.
    #[arg(long)]
    pub embeddings: PathBuf,
    /// Weight of the GCN prediction in the interpolation.
    #[arg(long, default_value_t = 0.2)]
    pub lambda: f64,
    #[command(flatten)]
    pub train: TrainFlags,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct EvalArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub embeddings: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct AblateArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub embeddings: PathBuf,
    /// `start:end:step` range or comma-separated list.
    #[arg(long, default_value = "0:1:0.1")]
    pub lambdas: String,
    #[command(flatten)]
    pub train: TrainFlags,
    /// Run the sweep on one thread per lambda.
    #[arg(long)]
    pub parallel: bool,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct BaselineArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Corpus JSONL file; unsplit labeled documents are split as in `build`.
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub min_df: usize,
    #[command(flatten)]
    pub split: SplitFlags,
    /// Naive Bayes additive smoothing.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Logistic regression L2 strength.
    #[arg(long, default_value_t = 1.0)]
    pub l2: f64,
    /// Logistic regression step size.
    #[arg(long, default_value_t = 1.0)]
    pub lr: f64,
    /// Logistic regression epochs.
    #[arg(long, default_value_t = 300)]
    pub epochs: usize,
    /// Output metrics JSON file.
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `key = value` lines into flags. `true` yields a bare switch and
/// `false` omits it.
fn config_to_args(path: &Path) -> Result<Vec<OsString>> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let mut args = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| Error::Config(format!("{}:{}: expected `key = value`", path.display(), i + 1)))?;
        if key.is_empty() || key == "config" {
            return Err(Error::Config(format!(
                "{}:{}: invalid key `{key}`",
                path.display(),
                i + 1
            )));
        }
        let flag = format!("--{}", key.replace('_', "-"));
        match value {
            "true" => args.push(flag.into()),
            "false" => {}
            _ => {
                args.push(flag.into());
                args.push(value.into());
            }
        }
    }
    Ok(args)
}

/// Splices config-file flags in front of the command-line flags so that the
/// latter override them.
fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut config = None;
    let mut rest = Vec::with_capacity(args.len());
    let mut iter = args.into_iter();
    while let Some(arg) = iter.next() {
        match arg.to_str() {
            Some("--config") => {
                let path = iter
                    .next()
                    .ok_or_else(|| Error::Config("--config needs a path".into()))?;
                config = Some(PathBuf::from(path));
            }
            Some(s) if s.starts_with("--config=") => config = Some(PathBuf::from(&s["--config=".len()..])),
            _ => rest.push(arg),
        }
    }
    let Some(path) = config else {
        return Ok(rest);
    };
    // program name and subcommand come first
    if rest.len() < 2 {
        return Err(Error::Config("--config needs a subcommand".into()));
    }
    let mut out: Vec<OsString> = rest.drain(..2).collect();
    out.extend(config_to_args(&path)?);
    out.extend(rest);
    Ok(out)
}

/// Runs the CLI on `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command) -> Result<()> {
    match command {
        Command::Build(a) => cmd_build(&a),
        Command::Embed(a) => cmd_embed(&a),
        Command::Train(a) => cmd_train(&a),
        Command::Eval(a) => cmd_eval(&a),
        Command::Ablate(a) => cmd_ablate(&a),
        Command::Baseline(a) => cmd_baseline(&a),
        Command::Synth(a) => {
            let cfg = SyntheticConfig {
                documents: a.documents,
                seed: a.seed,
                ..SyntheticConfig::default()
            };
            write_corpus(&a.out, &generate(&cfg))
        }
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

#[derive(Debug, Serialize)]
pub struct BuildStats {
    pub n_doc: usize,
    pub n_word: usize,
    pub nodes: usize,
    /// Undirected edges including self-loops.
    pub edges: usize,
    pub edge_breakdown: EdgeStats,
    pub window_size: usize,
    pub min_df: usize,
    pub train: usize,
    pub val: usize,
    pub test: usize,
    pub unassigned: usize,
}

fn cmd_build(a: &BuildArgs) -> Result<()> {
    let mut documents = load_corpus(&a.corpus)?;
    assign_splits(&mut documents, a.split.ratios(), a.split.seed)?;
    let bundle = CorpusBundle::build(documents, &TokenizerConfig::default(), a.min_df)?;
    let graph = build_graph(&bundle, a.window_size)?;
    let meta = GraphMeta::for_graph(&graph, a.window_size, a.min_df, bundle.content_hash());

    create_dir(&a.out)?;
    write_graph(&a.out, &graph, &meta)?;
    write_corpus(a.out.join(DOCUMENTS_FILE), &bundle.documents)?;
    let mut vocab = String::from("index\ttoken\tdf\tcorpus_freq\n");
    for (i, t) in bundle.vocab.tokens().iter().enumerate() {
        vocab.push_str(&format!(
            "{i}\t{t}\t{}\t{}\n",
            bundle.vocab.df(i),
            bundle.vocab.corpus_freq(i)
        ));
    }
    let vocab_path = a.out.join(VOCAB_FILE);
    fs::write(&vocab_path, vocab).map_err(|e| Error::io(&vocab_path, e))?;

    let count = |s| bundle.documents.iter().filter(|d| d.split == s).count();
    let stats = BuildStats {
        n_doc: graph.n_doc,
        n_word: graph.n_word,
        nodes: graph.n_nodes(),
        edges: graph.edge_count(),
        edge_breakdown: graph.edge_stats(),
        window_size: a.window_size,
        min_df: a.min_df,
        train: count(Split::Train),
        val: count(Split::Val),
        test: count(Split::Test),
        unassigned: count(Split::Unassigned),
    };
    write_report(a.out.join(STATS_FILE), &stats)?;
    eprintln!(
        "graph: {} nodes ({} documents, {} words), {} edges",
        stats.nodes, stats.n_doc, stats.n_word, stats.edges
    );
    Ok(())
}

fn cmd_embed(a: &EmbedArgs) -> Result<()> {
    let documents = load_corpus(&a.corpus)?;
    let bundle = CorpusBundle::build(documents, &TokenizerConfig::default(), a.min_df)?;
    let emb = fallback_embed(&bundle, a.dim, a.seed)?;
    write_embeddings(&a.out, &emb)
}

/// A graph directory loaded for training: normalized adjacency, metadata
/// and the split-assigned documents in node order.
#[derive(Clone, Debug)]
pub struct GraphArtifact {
    pub graph: HeteroGraph,
    pub meta: GraphMeta,
    pub documents: Vec<Document>,
}

impl GraphArtifact {
    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let (graph, meta) = read_graph(dir)?;
        let graph = if graph.normalized {
            graph
        } else {
            normalize_adjacency(&graph)?
        };
        let documents = load_corpus(dir.join(DOCUMENTS_FILE))?;
        if documents.len() != graph.n_doc {
            return Err(Error::Format(format!(
                "{} documents but the graph has {} document nodes",
                documents.len(),
                graph.n_doc
            )));
        }
        Ok(Self { graph, meta, documents })
    }

    pub fn features(&self, embeddings: &Path) -> Result<FeatureMatrix> {
        let emb: EmbeddingMatrix = load_embeddings(embeddings, &self.documents)?;
        Ok(build_feature_matrix(&emb, self.graph.n_word))
    }

    pub fn test_subset(&self) -> Vec<usize> {
        self.documents
            .iter()
            .enumerate()
            .filter(|(_, d)| d.split == Split::Test && d.label.is_some())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn labels(&self) -> Vec<Option<usize>> {
        self.documents.iter().map(|d| d.label).collect()
    }
}

/// Test-split evaluation of `params`, plus the ROC curve for binary tasks
/// with both classes present. `None` when no labeled test documents exist.
pub fn evaluate_test(
    artifact: &GraphArtifact,
    features: &FeatureMatrix,
    params: &ModelParams,
    mode: ModelMode,
) -> Result<Option<(EvalReport, Option<RocCurve>)>> {
    let subset = artifact.test_subset();
    if subset.is_empty() {
        return Ok(None);
    }
    let probs = predict(features, &artifact.graph, params, mode)?;
    let labels = artifact.labels();
    let report = evaluate(&probs.argmax_rows(), Some(&probs), &labels, &subset, params.classes())?;
    let roc = if probs.cols() == 2 {
        let scores: Vec<f64> = (0..probs.rows()).map(|r| probs.get(r, 1)).collect();
        match roc_auc(&scores, &labels, &subset) {
            Ok(curve) => Some(curve),
            Err(Error::UndefinedAuc) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    Ok(Some((report, roc)))
}

#[derive(Clone, Debug)]
pub struct TrainedRun {
    pub outcome: TrainOutcome,
    pub test: Option<EvalReport>,
    pub test_final: Option<EvalReport>,
    pub roc: Option<RocCurve>,
}

pub fn train_and_evaluate(
    artifact: &GraphArtifact,
    features: &FeatureMatrix,
    config: &TrainConfig,
) -> Result<TrainedRun> {
    let outcome = train(&artifact.graph, features, &artifact.documents, config)?;
    let best = evaluate_test(artifact, features, &outcome.checkpoint.params, config.mode)?;
    let last = evaluate_test(artifact, features, &outcome.final_params, config.mode)?;
    let (test, roc) = match best {
        Some((r, roc)) => (Some(r), roc),
        None => (None, None),
    };
    Ok(TrainedRun {
        outcome,
        test,
        test_final: last.map(|(r, _)| r),
        roc,
    })
}

fn cmd_train(a: &TrainArgs) -> Result<()> {
    let config = a.train.config(a.lambda);
    config.validate()?;
    let artifact = GraphArtifact::load(&a.graph)?;
    let features = artifact.features(&a.embeddings)?;
    let run = train_and_evaluate(&artifact, &features, &config)?;

    create_dir(&a.out)?;
    save_checkpoint(&run.outcome.checkpoint, a.out.join(CHECKPOINT_FILE))?;
    run.outcome.history.write_csv(a.out.join(HISTORY_FILE))?;
    match (&run.test, &run.test_final) {
        (Some(best), Some(last)) => {
            write_report(a.out.join(METRICS_FILE), best)?;
            write_report(a.out.join(FINAL_METRICS_FILE), last)?;
            if let Some(roc) = &run.roc {
                write_roc_csv(a.out.join(ROC_FILE), roc)?;
            }
            eprintln!(
                "best epoch {} of {}: test accuracy {:.4}, weighted F1 {:.4}",
                run.outcome.checkpoint.epoch, run.outcome.checkpoint.epochs_run, best.accuracy, best.weighted_f1
            );
        }
        _ => eprintln!("no labeled test documents; metrics skipped"),
    }
    Ok(())
}

fn cmd_eval(a: &EvalArgs) -> Result<()> {
    let ckpt = load_checkpoint(&a.checkpoint)?;
    let artifact = GraphArtifact::load(&a.graph)?;
    for w in ckpt.hash_warnings(&artifact.meta.corpus_hash, &artifact.graph.content_hash()) {
        eprintln!("warning: {w}");
    }
    let features = artifact.features(&a.embeddings)?;
    let (report, roc) = evaluate_test(&artifact, &features, &ckpt.params, ckpt.config.mode)?.ok_or(Error::EmptyEval)?;
    create_dir(&a.out)?;
    write_report(a.out.join(METRICS_FILE), &report)?;
    if let Some(roc) = roc {
        write_roc_csv(a.out.join(ROC_FILE), &roc)?;
    }
    Ok(())
}

/// Parses `start:end:step` (inclusive) or a comma-separated list. Range
/// values are rounded to 12 decimals so `0:1:0.1` yields exactly 0.3, 1.0.
pub fn parse_lambdas(list: &str) -> Result<Vec<f64>> {
    let bad = || Error::Config(format!("invalid lambda list `{list}`"));
    let values: Vec<f64> = if list.contains(':') {
        let parts: Vec<f64> = list
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let [start, end, step] = parts[..] else {
            return Err(bad());
        };
        if !step.is_finite() || step <= 0.0 || end < start {
            return Err(bad());
        }
        let n = ((end - start) / step + 1e-9).floor() as usize;
        (0..=n)
            .map(|k| ((start + k as f64 * step) * 1e12).round() / 1e12)
            .collect()
    } else {
        list.split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?
    };
    if values.is_empty() || values.iter().any(|l| !(0.0..=1.0).contains(l)) {
        return Err(bad());
    }
    Ok(values)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AblationRow {
    pub lambda: f64,
    pub accuracy: f64,
    pub weighted_f1: f64,
    pub roc_auc: Option<f64>,
}

pub fn ablation_csv(rows: &[AblationRow]) -> String {
    let mut out = String::from("lambda,accuracy,weighted_f1,roc_auc\n");
    for r in rows {
        let auc = r.roc_auc.map(|v| v.to_string()).unwrap_or_default();
        out.push_str(&format!("{},{},{},{}\n", r.lambda, r.accuracy, r.weighted_f1, auc));
    }
    out
}

/// One training run per lambda with otherwise identical settings.
pub fn run_ablation(
    artifact: &GraphArtifact,
    features: &FeatureMatrix,
    flags: &TrainFlags,
    lambdas: &[f64],
    parallel: bool,
) -> Result<Vec<AblationRow>> {
    let one = |lambda: f64| -> Result<AblationRow> {
        let run = train_and_evaluate(artifact, features, &flags.config(lambda))?;
        let test = run.test.ok_or(Error::EmptyEval)?;
        Ok(AblationRow {
            lambda,
            accuracy: test.accuracy,
            weighted_f1: test.weighted_f1,
            roc_auc: test.roc_auc,
        })
    };
    if parallel {
        std::thread::scope(|s| {
            let handles: Vec<_> = lambdas.iter().map(|&l| s.spawn(move || one(l))).collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("ablation worker panicked"))
                .collect()
        })
    } else {
        lambdas.iter().map(|&l| one(l)).collect()
    }
}

fn cmd_ablate(a: &AblateArgs) -> Result<()> {
    let lambdas = parse_lambdas(&a.lambdas)?;
    a.train.config(lambdas[0]).validate()?;
    let artifact = GraphArtifact::load(&a.graph)?;
    let features = artifact.features(&a.embeddings)?;
    let rows = run_ablation(&artifact, &features, &a.train, &lambdas, a.parallel)?;
    create_dir(&a.out)?;
    let path = a.out.join(ABLATION_FILE);
    fs::write(&path, ablation_csv(&rows)).map_err(|e| Error::io(&path, e))
}

#[derive(Debug, Serialize)]
pub struct BaselineReport {
    pub naive_bayes: EvalReport,
    pub logistic_regression: EvalReport,
}

pub fn run_baselines(bundle: &CorpusBundle, alpha: f64, logreg: &LogRegConfig) -> Result<BaselineReport> {
    let features = tfidf_features(bundle, true);
    let train_idx = bundle.indices_in(Split::Train);
    let test_idx: Vec<usize> = bundle
        .indices_in(Split::Test)
        .into_iter()
        .filter(|&i| bundle.documents[i].label.is_some())
        .collect();
    // training labels only; test labels are read back solely for scoring
    let train_labels: Vec<Option<usize>> = bundle
        .documents
        .iter()
        .map(|d| if d.split == Split::Train { d.label } else { None })
        .collect();
    let classes = train_labels.iter().flatten().max().map_or(0, |m| m + 1).max(2);
    let labels = bundle.labels();

    let nb = nb_fit(&features, &train_labels, &train_idx, classes, alpha)?;
    let (pred, probs) = nb_predict(&nb, &features);
    let naive_bayes = evaluate(&pred, Some(&probs), &labels, &test_idx, classes)?;

    let lr = logreg_fit(&features, &train_labels, &train_idx, classes, logreg)?;
    let (pred, probs) = logreg_predict(&lr, &features);
    let logistic_regression = evaluate(&pred, Some(&probs), &labels, &test_idx, classes)?;
    Ok(BaselineReport {
        naive_bayes,
        logistic_regression,
    })
}

fn cmd_baseline(a: &BaselineArgs) -> Result<()> {
    let mut documents = load_corpus(&a.corpus)?;
    assign_splits(&mut documents, a.split.ratios(), a.split.seed)?;
    let bundle = CorpusBundle::build(documents, &TokenizerConfig::default(), a.min_df)?;
    let cfg = LogRegConfig {
        l2: a.l2,
        lr: a.lr,
        epochs: a.epochs,
    };
    let report = run_baselines(&bundle, a.alpha, &cfg)?;
    write_report(&a.out, &report)
}
