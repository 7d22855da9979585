#![allow(dead_code)]

use std::path::{Path, PathBuf};

use textgraph::corpus::{assign_splits, write_corpus, CorpusBundle, Document, SplitRatios, TokenizerConfig};
use textgraph::synthetic::{generate, SyntheticConfig};

pub const BENCH_SEED: u64 = 42;

/// The 300-document benchmark with the default split protocol applied.
pub fn benchmark_documents() -> Vec<Document> {
    let mut docs = generate(&SyntheticConfig::default());
    assign_splits(&mut docs, SplitRatios::default(), BENCH_SEED).unwrap();
    docs
}

pub fn benchmark_bundle() -> CorpusBundle {
    CorpusBundle::build(benchmark_documents(), &TokenizerConfig::default(), 1).unwrap()
}

/// Unsplit benchmark corpus written as JSONL.
pub fn write_benchmark_corpus(dir: &Path) -> PathBuf {
    let path = dir.join("bench.jsonl");
    write_corpus(&path, &generate(&SyntheticConfig::default())).unwrap();
    path
}

pub fn tgtc(args: &[&str]) -> i32 {
    let mut full = vec!["tgtc"];
    full.extend_from_slice(args);
    textgraph::cli::run(full)
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Runs `build` and `embed` (d = 64) on the benchmark; returns (graph dir, embeddings).
pub fn prepare_benchmark(dir: &Path) -> (PathBuf, PathBuf) {
    let corpus = write_benchmark_corpus(dir);
    let graph = dir.join("graph");
    let emb = dir.join("emb.txt");
    let seed = BENCH_SEED.to_string();
    assert_eq!(
        tgtc(&["build", "--corpus", s(&corpus), "--seed", &seed, "--out", s(&graph)]),
        0
    );
    assert_eq!(
        tgtc(&[
            "embed",
            "--corpus",
            s(&corpus),
            "--dim",
            "64",
            "--seed",
            &seed,
            "--out",
            s(&emb)
        ]),
        0
    );
    (graph, emb)
}
