//! Acceptance criteria. Runs every criterion, prints one PASS/FAIL line each
//! and exits non-zero if any fails.

mod common;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{benchmark_bundle, prepare_benchmark, s, tgtc, BENCH_SEED};
use textgraph::baselines::{
    logreg_fit, logreg_objective, logreg_predict, nb_fit, nb_predict, tfidf_features, LogRegConfig,
};
use textgraph::cli::GraphArtifact;
use textgraph::corpus::{fallback_embed, CorpusBundle, Document, EmbeddingMatrix, Provenance, Split, TokenizerConfig};
use textgraph::graph::{build_graph, compute_ppmi, compute_tf_idf, count_windows, normalize_adjacency};
use textgraph::linalg::{grad_check, DenseMatrix};
use textgraph::metrics::{evaluate, roc_auc};
use textgraph::model::{build_feature_matrix, loss_and_grads, predict, FeatureMatrix, ModelMode, ModelParams};
use textgraph::trainer::{checkpoint_to_json, train, TrainConfig};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: f64, what: &str) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_s, || {
        format!("{what} took {:.2}s, limit {limit_s}s", elapsed.as_secs_f64())
    })
}

// ---------------------------------------------------------------------------
// 1. graph construction against a dense brute-force oracle

struct DenseOracle {
    tokens: Vec<String>,
    tfidf: Vec<Vec<f64>>,
    windows: u64,
    word_windows: Vec<u64>,
    pair_windows: Vec<Vec<u64>>,
    ppmi: Vec<Vec<f64>>,
    adjacency: Vec<Vec<f64>>,
    normalized: Vec<Vec<f64>>,
}

fn dense_oracle(docs: &[Vec<String>], window: usize) -> DenseOracle {
    let mut tokens: Vec<String> = Vec::new();
    for d in docs {
        for t in d {
            if !tokens.contains(t) {
                tokens.push(t.clone());
            }
        }
    }
    let v = tokens.len();
    let n_doc = docs.len();
    let idx = |t: &String| tokens.iter().position(|x| x == t).unwrap();

    let df: Vec<usize> = tokens
        .iter()
        .map(|t| docs.iter().filter(|d| d.contains(t)).count())
        .collect();
    let mut tfidf = vec![vec![0.0; v]; n_doc];
    for (i, d) in docs.iter().enumerate() {
        for (j, t) in tokens.iter().enumerate() {
            let tf = d.iter().filter(|x| *x == t).count() as f64;
            tfidf[i][j] = tf * (n_doc as f64 / df[j] as f64).ln();
        }
    }

    let mut all_windows: Vec<HashSet<usize>> = Vec::new();
    for d in docs {
        if d.is_empty() {
            continue;
        }
        if d.len() <= window {
            all_windows.push(d.iter().map(idx).collect());
        } else {
            for start in 0..=d.len() - window {
                all_windows.push(d[start..start + window].iter().map(idx).collect());
            }
        }
    }
    let windows = all_windows.len() as u64;
    let word_windows: Vec<u64> = (0..v)
        .map(|i| all_windows.iter().filter(|w| w.contains(&i)).count() as u64)
        .collect();
    let mut pair_windows = vec![vec![0u64; v]; v];
    let mut ppmi = vec![vec![0.0; v]; v];
    for i in 0..v {
        for j in 0..v {
            pair_windows[i][j] = all_windows.iter().filter(|w| w.contains(&i) && w.contains(&j)).count() as u64;
            if i != j && pair_windows[i][j] > 0 {
                let total = windows as f64;
                let val = ((pair_windows[i][j] as f64 / total)
                    / ((word_windows[i] as f64 / total) * (word_windows[j] as f64 / total)))
                    .ln();
                if val > 0.0 {
                    ppmi[i][j] = val;
                }
            }
        }
    }

    let n = n_doc + v;
    let mut a = vec![vec![0.0; n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for i in 0..n_doc {
        for j in 0..v {
            a[i][n_doc + j] = tfidf[i][j];
            a[n_doc + j][i] = tfidf[i][j];
        }
    }
    for i in 0..v {
        for j in 0..v {
            if i != j {
                a[n_doc + i][n_doc + j] = ppmi[i][j];
            }
        }
    }
    let deg: Vec<f64> = a.iter().map(|r| r.iter().sum()).collect();
    let normalized = (0..n)
        .map(|i| (0..n).map(|j| a[i][j] / (deg[i].sqrt() * deg[j].sqrt())).collect())
        .collect();

    DenseOracle {
        tokens,
        tfidf,
        windows,
        word_windows,
        pair_windows,
        ppmi,
        adjacency: a,
        normalized,
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn check_graph_instance(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let n_doc = rng.random_range(1..=8);
    let alphabet = rng.random_range(1..=6);
    let window = rng.random_range(1..=3);
    let docs: Vec<Vec<String>> = (0..n_doc)
        .map(|_| {
            let len = rng.random_range(0..=7);
            (0..len)
                .map(|_| format!("w{}", rng.random_range(0..alphabet)))
                .collect()
        })
        .collect();
    if docs.iter().all(Vec::is_empty) {
        return Ok(());
    }
    let documents = docs
        .iter()
        .enumerate()
        .map(|(i, d)| Document::new(format!("d{i}"), d.join(" ")))
        .collect();
    let bundle = CorpusBundle::build(documents, &TokenizerConfig::default(), 1).map_err(|e| e.to_string())?;
    let oracle = dense_oracle(&docs, window);
    let tol = 1e-12;

    // the implementation's vocabulary index for each oracle token
    let vmap: Vec<usize> = oracle.tokens.iter().map(|t| bundle.vocab.get(t).unwrap()).collect();
    ensure(bundle.n_word() == oracle.tokens.len(), || "vocabulary size".into())?;
    let inv: HashMap<usize, usize> = vmap.iter().enumerate().map(|(o, &i)| (i, o)).collect();

    let mut tf = vec![vec![0.0; oracle.tokens.len()]; n_doc];
    for (d, w, v) in compute_tf_idf(&bundle) {
        tf[d][inv[&w]] = v;
    }
    for (i, (row, orow)) in tf.iter().zip(&oracle.tfidf).enumerate() {
        for (j, (a, b)) in row.iter().zip(orow).enumerate() {
            ensure(close(*a, *b, tol), || format!("tf-idf ({i},{j})"))?;
        }
    }

    let counts = count_windows(&bundle, window).map_err(|e| e.to_string())?;
    ensure(counts.total == oracle.windows, || "window total".into())?;
    for (o, &i) in vmap.iter().enumerate() {
        ensure(counts.word[i] == oracle.word_windows[o], || "word windows".into())?;
        for (p, &j) in vmap.iter().enumerate() {
            ensure(counts.pair_count(i, j) == oracle.pair_windows[o][p], || {
                "pair windows".into()
            })?;
        }
    }

    let mut ppmi = vec![vec![0.0; oracle.tokens.len()]; oracle.tokens.len()];
    for (i, j, v) in compute_ppmi(&counts) {
        ppmi[inv[&i]][inv[&j]] = v;
        ppmi[inv[&j]][inv[&i]] = v;
    }
    for (row, orow) in ppmi.iter().zip(&oracle.ppmi) {
        for (a, b) in row.iter().zip(orow) {
            ensure(close(*a, *b, tol), || "ppmi".into())?;
        }
    }

    let graph = build_graph(&bundle, window).map_err(|e| e.to_string())?;
    let norm = normalize_adjacency(&graph).map_err(|e| e.to_string())?;
    let node = |o: usize| if o < n_doc { o } else { n_doc + vmap[o - n_doc] };
    let n = n_doc + oracle.tokens.len();
    for r in 0..n {
        for c in 0..n {
            let (ir, ic) = (node(r), node(c));
            ensure(close(graph.adjacency.get(ir, ic), oracle.adjacency[r][c], tol), || {
                format!("adjacency ({r},{c})")
            })?;
            ensure(close(norm.adjacency.get(ir, ic), oracle.normalized[r][c], tol), || {
                format!("normalized ({r},{c})")
            })?;
        }
    }
    Ok(())
}

fn ac1_graph_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20240101);
    for k in 0..100 {
        check_graph_instance(&mut rng).map_err(|e| format!("instance {k}: {e}"))?;
    }
    within(start.elapsed(), 10.0, "graph oracle")?;
    Ok(format!(
        "100 mini-corpora match within 1e-12 in {:.2}s",
        start.elapsed().as_secs_f64()
    ))
}

// ---------------------------------------------------------------------------
// 2. composite gradient check

fn random_small_problem(seed: u64) -> (FeatureMatrix, textgraph::graph::HeteroGraph, Vec<Option<usize>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words: Vec<String> = (0..10).map(|i| format!("w{i}")).collect();
    let docs: Vec<Document> = (0..12)
        .map(|i| {
            // each word appears at least once across the corpus
            let mut toks = vec![words[i % 10].clone()];
            toks.extend((0..rng.random_range(3..8)).map(|_| words[rng.random_range(0..10)].clone()));
            Document::new(format!("d{i}"), toks.join(" "))
        })
        .collect();
    let bundle = CorpusBundle::build(docs, &TokenizerConfig::default(), 1).unwrap();
    assert_eq!(bundle.n_word(), 10);
    let graph = normalize_adjacency(&build_graph(&bundle, 3).unwrap()).unwrap();
    let d = 6;
    let values = DenseMatrix::from_vec(12, d, (0..12 * d).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
    let emb = EmbeddingMatrix {
        ids: bundle.documents.iter().map(|d| d.id.clone()).collect(),
        values,
        provenance: Provenance::Fallback { seed },
    };
    let labels = (0..12).map(|_| Some(rng.random_range(0..3))).collect();
    (build_feature_matrix(&emb, 10), graph, labels)
}

fn ac2_gradient_check() -> Outcome {
    let start = Instant::now();
    let (features, graph, labels) = random_small_problem(7);
    let mask: Vec<usize> = (0..8).collect();
    let mut worst: f64 = 0.0;
    for lambda in [0.0, 0.2, 1.0] {
        let params = ModelParams::init(6, 8, 3, lambda, 11).unwrap();
        let (_, grads) = loss_and_grads(&features, &graph, &params, &labels, &mask).map_err(|e| e.to_string())?;
        let err = grad_check(
            |theta| {
                loss_and_grads(&features, &graph, &params.with_flat(theta), &labels, &mask)
                    .unwrap()
                    .0
            },
            &grads.to_flat(),
            &params.to_flat(),
            1e-5,
        );
        ensure(err < 1e-4, || format!("lambda {lambda}: max relative error {err:e}"))?;
        worst = worst.max(err);
    }
    within(start.elapsed(), 5.0, "gradient check")?;
    Ok(format!("max relative error {worst:.2e} over lambda in {{0, 0.2, 1}}"))
}

// ---------------------------------------------------------------------------
// 3. endpoint reductions

fn max_abs_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    a.data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn ac3_endpoints() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let (graph_dir, emb) = prepare_benchmark(dir.path());
    let artifact = GraphArtifact::load(&graph_dir).map_err(|e| e.to_string())?;
    let features = artifact.features(&emb).map_err(|e| e.to_string())?;

    let mut diffs = Vec::new();
    for (lambda, mode) in [(0.0, ModelMode::HeadOnly), (1.0, ModelMode::GcnOnly)] {
        let cfg = TrainConfig {
            lambda,
            seed: BENCH_SEED,
            ..TrainConfig::default()
        };
        let mixed = train(&artifact.graph, &features, &artifact.documents, &cfg).map_err(|e| e.to_string())?;
        let single = train(
            &artifact.graph,
            &features,
            &artifact.documents,
            &TrainConfig { mode, ..cfg.clone() },
        )
        .map_err(|e| e.to_string())?;
        let p_mixed = predict(
            &features,
            &artifact.graph,
            &mixed.checkpoint.params,
            ModelMode::Interpolated,
        )
        .unwrap();
        let p_single = predict(&features, &artifact.graph, &single.checkpoint.params, mode).unwrap();
        let diff = max_abs_diff(&p_mixed, &p_single);
        ensure(diff <= 1e-12, || {
            format!("lambda {lambda}: predictions differ by {diff:e}")
        })?;
        diffs.push(diff);
    }

    // CLI: ablation endpoint rows equal standalone train runs
    let seed = BENCH_SEED.to_string();
    let common = ["--graph", s(&graph_dir), "--embeddings", s(&emb), "--seed", &seed];
    let out = dir.path().join("ablate");
    let mut args = vec!["ablate"];
    args.extend_from_slice(&common);
    args.extend_from_slice(&["--out", s(&out)]);
    ensure(tgtc(&args) == 0, || "ablate failed".into())?;
    let csv = fs::read_to_string(out.join("ablation.csv")).unwrap();
    let rows: Vec<Vec<String>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect();

    for (row, lambda, mode) in [(&rows[0], "0", "head-only"), (&rows[10], "1", "gcn-only")] {
        for (tag, extra) in [("lambda", vec!["--lambda", lambda]), ("mode", vec!["--mode", mode])] {
            let run_dir = dir.path().join(format!("train-{lambda}-{tag}"));
            let mut args = vec!["train"];
            args.extend_from_slice(&common);
            args.extend(extra.iter().copied());
            args.extend_from_slice(&["--out", s(&run_dir)]);
            ensure(tgtc(&args) == 0, || format!("train {tag} {lambda} failed"))?;
            let metrics: serde_json::Value =
                serde_json::from_str(&fs::read_to_string(run_dir.join("metrics.json")).unwrap()).unwrap();
            let expect = [
                metrics["accuracy"].as_f64().unwrap().to_string(),
                metrics["weighted_f1"].as_f64().unwrap().to_string(),
                metrics["roc_auc"].as_f64().unwrap().to_string(),
            ];
            ensure(row[0] == lambda && row[1..] == expect, || {
                format!("ablation row {row:?} differs from {tag} run {expect:?}")
            })?;
        }
    }
    Ok(format!(
        "max prediction gap {:.1e} (lambda=0 vs head-only), {:.1e} (lambda=1 vs GCN-only); ablation endpoint rows match",
        diffs[0], diffs[1]
    ))
}

// ---------------------------------------------------------------------------
// 4. synthetic benchmark end to end

fn ac4_benchmark() -> Outcome {
    let start = Instant::now();
    let bundle = benchmark_bundle();
    let graph = normalize_adjacency(&build_graph(&bundle, 20).unwrap()).unwrap();
    let emb = fallback_embed(&bundle, 64, BENCH_SEED).unwrap();
    let features = build_feature_matrix(&emb, bundle.n_word());
    let cfg = TrainConfig {
        seed: BENCH_SEED,
        ..TrainConfig::default()
    };
    let outcome = train(&graph, &features, &bundle.documents, &cfg).map_err(|e| e.to_string())?;
    let probs = predict(&features, &graph, &outcome.checkpoint.params, ModelMode::Interpolated).unwrap();
    let test = bundle.indices_in(Split::Test);
    let report = evaluate(&probs.argmax_rows(), Some(&probs), &bundle.labels(), &test, 2).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(outcome.checkpoint.epochs_run <= 200, || "more than 200 epochs".into())?;
    let losses: Vec<f64> = outcome.history.records.iter().map(|r| r.train_loss).collect();
    ensure(losses.last() < losses.first(), || {
        format!("train loss did not decrease: {losses:?}")
    })?;
    ensure(report.accuracy >= 0.95, || {
        format!("test accuracy {:.4} < 0.95", report.accuracy)
    })?;
    ensure(report.weighted_f1 >= 0.95, || {
        format!("weighted F1 {:.4} < 0.95", report.weighted_f1)
    })?;
    within(elapsed, 60.0, "benchmark")?;
    Ok(format!(
        "test accuracy {:.4}, weighted F1 {:.4}, {} epochs, train loss {:.4} -> {:.4}, {:.2}s",
        report.accuracy,
        report.weighted_f1,
        outcome.checkpoint.epochs_run,
        losses[0],
        losses[losses.len() - 1],
        elapsed.as_secs_f64()
    ))
}

// ---------------------------------------------------------------------------
// 5. metrics against brute force

fn brute_force_auc(scores: &[f64], labels: &[usize]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for (i, &yi) in labels.iter().enumerate() {
        for (j, &yj) in labels.iter().enumerate() {
            if yi == 1 && yj != 1 {
                pairs += 1.0;
                if scores[i] > scores[j] {
                    wins += 1.0;
                } else if scores[i] == scores[j] {
                    wins += 0.5;
                }
            }
        }
    }
    wins / pairs
}

fn ac5_metrics_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let tol = 1e-9;
    let mut auc_checked = 0;
    for k in 0..200 {
        let n = rng.random_range(1..=50);
        let c = rng.random_range(2..=4);
        let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..c)).collect();
        let preds: Vec<usize> = (0..n).map(|_| rng.random_range(0..c)).collect();
        // coarse scores force ties
        let scores: Vec<f64> = (0..n).map(|_| rng.random_range(0..6) as f64 / 5.0).collect();
        let opt: Vec<Option<usize>> = labels.iter().copied().map(Some).collect();
        let subset: Vec<usize> = (0..n).collect();
        let r = evaluate(&preds, None, &opt, &subset, c).map_err(|e| e.to_string())?;

        let correct = labels.iter().zip(&preds).filter(|(a, b)| a == b).count();
        ensure(close(r.accuracy, correct as f64 / n as f64, tol), || {
            format!("instance {k}: accuracy")
        })?;
        let mut wf1 = 0.0;
        for cls in 0..c {
            let tp = (0..n).filter(|&i| labels[i] == cls && preds[i] == cls).count() as f64;
            let fp = (0..n).filter(|&i| labels[i] != cls && preds[i] == cls).count() as f64;
            let fnn = (0..n).filter(|&i| labels[i] == cls && preds[i] != cls).count() as f64;
            let p = if tp + fp == 0.0 { 0.0 } else { tp / (tp + fp) };
            let rc = if tp + fnn == 0.0 { 0.0 } else { tp / (tp + fnn) };
            let f = if p + rc == 0.0 { 0.0 } else { 2.0 * p * rc / (p + rc) };
            ensure(
                close(r.precision[cls], p, tol) && close(r.recall[cls], rc, tol) && close(r.f1[cls], f, tol),
                || format!("instance {k}: class {cls} P/R/F1"),
            )?;
            wf1 += f * (tp + fnn) / n as f64;
        }
        ensure(close(r.weighted_f1, wf1, tol), || format!("instance {k}: weighted F1"))?;

        let has_pos = labels.contains(&1);
        let has_neg = labels.iter().any(|&y| y != 1);
        match roc_auc(&scores, &opt, &subset) {
            Ok(curve) => {
                ensure(has_pos && has_neg, || format!("instance {k}: AUC on one class"))?;
                let want = brute_force_auc(&scores, &labels);
                ensure(close(curve.auc, want, tol), || {
                    format!("instance {k}: AUC {} vs {want}", curve.auc)
                })?;
                auc_checked += 1;
            }
            Err(_) => ensure(!(has_pos && has_neg), || format!("instance {k}: AUC refused"))?,
        }
    }

    // degenerate conventions
    let opt = vec![Some(0), Some(1), Some(1), Some(0)];
    let r = evaluate(&[0, 0, 0, 0], None, &opt, &[0, 1, 2, 3], 2).map_err(|e| e.to_string())?;
    ensure(r.f1[1] == 0.0 && r.precision[1] == 0.0 && r.recall[1] == 0.0, || {
        "absent class convention".into()
    })?;
    let tied = roc_auc(&[0.3; 4], &opt, &[0, 1, 2, 3]).map_err(|e| e.to_string())?;
    ensure(tied.auc == 0.5, || format!("all-tied AUC {}", tied.auc))?;
    Ok(format!(
        "200 instances within 1e-9 ({auc_checked} AUC checks); degenerate conventions hold"
    ))
}

// ---------------------------------------------------------------------------
// 6. transductive hygiene

fn ac6_hygiene() -> Outcome {
    let bundle = benchmark_bundle();
    let graph = normalize_adjacency(&build_graph(&bundle, 20).unwrap()).unwrap();
    ensure(graph.n_nodes() == bundle.n_doc() + bundle.n_word(), || {
        "node count law".into()
    })?;
    let test = bundle.indices_in(Split::Test);
    ensure(!test.is_empty(), || "no test documents".into())?;
    ensure(test.iter().all(|&i| graph.adjacency.row_entries(i).count() > 1), || {
        "a test document has no edges".into()
    })?;

    let emb = fallback_embed(&bundle, 64, BENCH_SEED).unwrap();
    let features = build_feature_matrix(&emb, bundle.n_word());
    let cfg = TrainConfig {
        seed: BENCH_SEED,
        epochs: 20,
        ..TrainConfig::default()
    };
    let run = |docs: &[Document]| {
        let o = train(&graph, &features, docs, &cfg).unwrap();
        (o.history.to_csv(), checkpoint_to_json(&o.checkpoint))
    };
    let base = run(&bundle.documents);

    let mut permuted = bundle.documents.clone();
    let mut test_labels: Vec<Option<usize>> = test.iter().map(|&i| permuted[i].label).collect();
    test_labels.shuffle(&mut ChaCha8Rng::seed_from_u64(3));
    test_labels.reverse();
    for (&i, l) in test.iter().zip(test_labels) {
        permuted[i].label = l.map(|y| 1 - y);
    }
    ensure(run(&permuted) == base, || {
        "permuted test labels changed training".into()
    })?;

    let mut deleted = bundle.documents.clone();
    for &i in &test {
        deleted[i].label = None;
    }
    ensure(run(&deleted) == base, || "deleted test labels changed training".into())?;
    Ok(format!(
        "{} nodes = {} docs + {} words; history and checkpoint identical under test-label changes",
        graph.n_nodes(),
        bundle.n_doc(),
        bundle.n_word()
    ))
}

// ---------------------------------------------------------------------------
// 7. determinism

fn ac7_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let (graph_dir, emb) = prepare_benchmark(dir.path());
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let code = tgtc(&[
            "train",
            "--graph",
            s(&graph_dir),
            "--embeddings",
            s(&emb),
            "--lambda",
            "0.2",
            "--seed",
            "42",
            "--out",
            s(&out),
        ]);
        ensure(code == 0, || format!("train exited with {code}"))?;
        let read = |f: &str| fs::read(out.join(f)).unwrap();
        outputs.push((read("checkpoint.json"), read("history.csv"), read("metrics.json")));
    }
    ensure(outputs[0].0 == outputs[1].0, || "checkpoint bytes differ".into())?;
    ensure(outputs[0].1 == outputs[1].1, || "history bytes differ".into())?;
    ensure(outputs[0].2 == outputs[1].2, || "metrics bytes differ".into())?;
    Ok("checkpoint, history CSV and metrics JSON byte-identical across two runs".into())
}

// ---------------------------------------------------------------------------
// 8. baselines

fn ac8_baselines() -> Outcome {
    let start = Instant::now();
    let bundle = benchmark_bundle();
    let features = tfidf_features(&bundle, true);
    let train_idx = bundle.indices_in(Split::Train);
    let test = bundle.indices_in(Split::Test);
    let labels = bundle.labels();
    let train_labels: Vec<Option<usize>> = bundle
        .documents
        .iter()
        .map(|d| if d.split == Split::Train { d.label } else { None })
        .collect();

    let nb = nb_fit(&features, &train_labels, &train_idx, 2, 1.0).map_err(|e| e.to_string())?;
    let (pred, _) = nb_predict(&nb, &features);
    let nb_acc = evaluate(&pred, None, &labels, &test, 2).unwrap().accuracy;
    let lr =
        logreg_fit(&features, &train_labels, &train_idx, 2, &LogRegConfig::default()).map_err(|e| e.to_string())?;
    let (pred, _) = logreg_predict(&lr, &features);
    let lr_acc = evaluate(&pred, None, &labels, &test, 2).unwrap().accuracy;
    let elapsed = start.elapsed();
    ensure(nb_acc >= 0.90, || format!("NB accuracy {nb_acc:.4}"))?;
    ensure(lr_acc >= 0.90, || format!("LR accuracy {lr_acc:.4}"))?;
    within(elapsed, 10.0, "baselines")?;

    // gradient check of the regularized objective on a slice of the benchmark
    let subset: Vec<usize> = train_idx.iter().copied().take(20).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let v = features.n_features;
    let w = DenseMatrix::from_vec(v, 2, (0..v * 2).map(|_| rng.random_range(-0.5..0.5)).collect()).unwrap();
    let b = vec![0.1, -0.1];
    let (_, grad) = logreg_objective(&w, &b, &features, &train_labels, &subset, 1.0).unwrap();
    let theta = [w.data(), &b[..]].concat();
    let err = grad_check(
        |t| {
            let w = DenseMatrix::from_vec(v, 2, t[..v * 2].to_vec()).unwrap();
            logreg_objective(&w, &t[v * 2..], &features, &train_labels, &subset, 1.0)
                .unwrap()
                .0
        },
        &grad,
        &theta,
        1e-5,
    );
    ensure(err < 1e-4, || format!("logistic gradient check {err:e}"))?;
    Ok(format!(
        "NB accuracy {nb_acc:.4}, LR accuracy {lr_acc:.4} in {:.2}s; LR gradient error {err:.1e}",
        elapsed.as_secs_f64()
    ))
}

// ---------------------------------------------------------------------------
// 9. ablation harness

fn ac9_ablation() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let (graph_dir, emb) = prepare_benchmark(dir.path());
    let out = dir.path().join("sweep");
    let code = tgtc(&[
        "ablate",
        "--graph",
        s(&graph_dir),
        "--embeddings",
        s(&emb),
        "--seed",
        "42",
        "--out",
        s(&out),
    ]);
    ensure(code == 0, || format!("ablate exited with {code}"))?;
    let csv = fs::read_to_string(out.join("ablation.csv")).unwrap();
    let mut lines = csv.lines();
    ensure(lines.next() == Some("lambda,accuracy,weighted_f1,roc_auc"), || {
        "header".into()
    })?;
    let mut rows = BTreeMap::new();
    for line in lines {
        let vals: Vec<f64> = line.split(',').map(|v| v.parse::<f64>().unwrap_or(f64::NAN)).collect();
        ensure(vals.len() == 4 && vals.iter().all(|v| v.is_finite()), || {
            format!("bad row `{line}`")
        })?;
        rows.insert((vals[0] * 10.0).round() as i64, vals);
    }
    ensure(rows.len() == 11 && rows.keys().copied().eq(0..=10), || {
        format!("{} distinct lambda rows", rows.len())
    })?;
    let best = rows.values().max_by(|a, b| a[2].total_cmp(&b[2])).unwrap();
    Ok(format!(
        "11 finite rows for lambda 0.0..1.0; best weighted F1 {:.4} at lambda {}",
        best[2], best[0]
    ))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("AC1 graph-construction oracle", ac1_graph_oracle),
        ("AC2 composite gradient check", ac2_gradient_check),
        ("AC3 lambda endpoint reductions", ac3_endpoints),
        ("AC4 synthetic benchmark", ac4_benchmark),
        ("AC5 metrics oracle", ac5_metrics_oracle),
        ("AC6 transductive hygiene", ac6_hygiene),
        ("AC7 determinism", ac7_determinism),
        ("AC8 baselines", ac8_baselines),
        ("AC9 lambda-ablation harness", ac9_ablation),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {name}: {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
