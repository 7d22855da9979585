//! Full-batch transductive training with Adam, per-group learning rates and
//! validation-based early stopping.

use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{content_hash, Document, Split};
use crate::error::{Error, Result};
use crate::graph::HeteroGraph;
use crate::linalg::DenseMatrix;
use crate::metrics::evaluate;
use crate::model::{
    loss_and_grads_with, predict, DropoutMasks, FeatureMatrix, Gradients, ModelMode, ModelParams, DEFAULT_LAMBDA,
};

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub lr_gcn: f64,
    pub lr_head: f64,
    pub lambda: f64,
    pub hidden: usize,
    pub dropout: f64,
    /// Epochs without validation improvement before stopping; 0 disables.
    pub patience: usize,
    pub seed: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    #[serde(default)]
    pub mode: ModelMode,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 50,
            lr_gcn: 1e-3,
            lr_head: 1e-3,
            lambda: DEFAULT_LAMBDA,
            hidden: 200,
            dropout: 0.0,
            patience: 10,
            seed: 0,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            mode: ModelMode::Interpolated,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.epochs == 0 {
            return fail("epochs must be at least 1".into());
        }
        // a zero rate is accepted so that frozen runs are expressible
        for (name, lr) in [("lr-gcn", self.lr_gcn), ("lr-head", self.lr_head)] {
            if !lr.is_finite() || lr < 0.0 {
                return fail(format!("{name} must be a non-negative finite number, got {lr}"));
            }
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return fail(format!("lambda {} outside [0, 1]", self.lambda));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return fail(format!("dropout {} outside [0, 1)", self.dropout));
        }
        if self.hidden == 0 {
            return fail("hidden must be at least 1".into());
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) || self.eps <= 0.0 {
            return fail("invalid Adam hyper-parameters".into());
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
struct Moments {
    m: Vec<f64>,
    v: Vec<f64>,
}

impl Moments {
    fn zeros(n: usize) -> Self {
        Self {
            m: vec![0.0; n],
            v: vec![0.0; n],
        }
    }
}

/// Adam moment estimates for the three weight matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState {
    pub step: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    head: Moments,
    w0: Moments,
    w1: Moments,
}

impl AdamState {
    pub fn new(params: &ModelParams, beta1: f64, beta2: f64, eps: f64) -> Self {
        Self {
            step: 0,
            beta1,
            beta2,
            eps,
            head: Moments::zeros(params.w_head.data().len()),
            w0: Moments::zeros(params.w0.data().len()),
            w1: Moments::zeros(params.w1.data().len()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LearningRates {
    pub head: f64,
    pub gcn: f64,
}

/// One bias-corrected Adam update; `W0` and `W1` use the GCN rate, `W_head`
/// the head rate.
pub fn adam_step(
    params: &mut ModelParams,
    grads: &Gradients,
    state: &mut AdamState,
    rates: LearningRates,
) -> Result<()> {
    for (name, g) in [("W_head", &grads.w_head), ("W0", &grads.w0), ("W1", &grads.w1)] {
        if !g.is_finite() {
            return Err(Error::NonFiniteGradient(name));
        }
    }
    state.step += 1;
    let t = state.step as i32;
    let (b1, b2, eps) = (state.beta1, state.beta2, state.eps);
    let c1 = 1.0 - b1.powi(t);
    let c2 = 1.0 - b2.powi(t);
    let update = |theta: &mut DenseMatrix, g: &DenseMatrix, mom: &mut Moments, lr: f64| {
        for (((p, &g), m), v) in theta
            .data_mut()
            .iter_mut()
            .zip(g.data())
            .zip(&mut mom.m)
            .zip(&mut mom.v)
        {
            *m = b1 * *m + (1.0 - b1) * g;
            *v = b2 * *v + (1.0 - b2) * g * g;
            *p -= lr * (*m / c1) / ((*v / c2).sqrt() + eps);
        }
    };
    update(&mut params.w_head, &grads.w_head, &mut state.head, rates.head);
    update(&mut params.w0, &grads.w0, &mut state.w0, rates.gcn);
    update(&mut params.w1, &grads.w1, &mut state.w1, rates.gcn);
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_accuracy: f64,
    pub val_weighted_f1: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainHistory {
    pub records: Vec<EpochRecord>,
}

impl TrainHistory {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,train_loss,val_accuracy,val_weighted_f1\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.epoch, r.train_loss, r.val_accuracy, r.val_weighted_f1
            ));
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub params: ModelParams,
    pub config: TrainConfig,
    /// Epoch whose parameters are stored (best validation weighted F1).
    pub epoch: usize,
    pub epochs_run: usize,
    pub best_val_weighted_f1: f64,
    pub corpus_hash: String,
    pub graph_hash: String,
}

impl Checkpoint {
    /// Warnings for artifacts that differ from the ones used in training.
    pub fn hash_warnings(&self, corpus_hash: &str, graph_hash: &str) -> Vec<String> {
        let mut out = Vec::new();
        if self.corpus_hash != corpus_hash {
            out.push(format!(
                "checkpoint corpus hash {} differs from current corpus {}",
                self.corpus_hash, corpus_hash
            ));
        }
        if self.graph_hash != graph_hash {
            out.push(format!(
                "checkpoint graph hash {} differs from current graph {}",
                self.graph_hash, graph_hash
            ));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainOutcome {
    pub checkpoint: Checkpoint,
    pub history: TrainHistory,
    /// Parameters after the last epoch run, which may differ from the best.
    pub final_params: ModelParams,
}

/// Training labels with everything outside train and val erased, so test
/// labels cannot reach the optimizer or model selection.
pub fn supervised_labels(documents: &[Document]) -> Vec<Option<usize>> {
    documents
        .iter()
        .map(|d| match d.split {
            Split::Train | Split::Val => d.label,
            _ => None,
        })
        .collect()
}

fn split_mask(documents: &[Document], split: Split) -> Vec<usize> {
    documents
        .iter()
        .enumerate()
        .filter(|(_, d)| d.split == split && d.label.is_some())
        .map(|(i, _)| i)
        .collect()
}

pub fn train(
    graph: &HeteroGraph,
    features: &FeatureMatrix,
    documents: &[Document],
    config: &TrainConfig,
) -> Result<TrainOutcome> {
    config.validate()?;
    if documents.len() != graph.n_doc {
        return Err(Error::Shape(format!(
            "{} documents for a graph with {} document nodes",
            documents.len(),
            graph.n_doc
        )));
    }
    let labels = supervised_labels(documents);
    let train_mask = split_mask(documents, Split::Train);
    let val_mask = split_mask(documents, Split::Val);
    if train_mask.is_empty() {
        return Err(Error::DegenerateSplit("no labeled training documents".into()));
    }
    if val_mask.is_empty() {
        return Err(Error::DegenerateSplit("no labeled validation documents".into()));
    }
    let classes = labels.iter().flatten().max().map_or(0, |m| m + 1).max(2);

    let mut params = ModelParams::init(features.x.cols(), config.hidden, classes, config.lambda, config.seed)?;
    let mut adam = AdamState::new(&params, config.beta1, config.beta2, config.eps);
    let rates = LearningRates {
        head: config.lr_head,
        gcn: config.lr_gcn,
    };
    let mut dropout_rng = ChaCha8Rng::seed_from_u64(config.seed);
    dropout_rng.set_stream(1);

    let mut history = TrainHistory::default();
    let mut best: Option<(f64, usize, ModelParams)> = None;
    let mut stale = 0;
    for epoch in 1..=config.epochs {
        let masks = (config.dropout > 0.0).then(|| {
            DropoutMasks::sample(
                &mut dropout_rng,
                config.dropout,
                features.x.shape(),
                (graph.n_nodes(), config.hidden),
            )
        });
        let (loss, grads) = loss_and_grads_with(
            features,
            graph,
            &params,
            &labels,
            &train_mask,
            config.mode,
            masks.as_ref(),
        )?;
        if !loss.is_finite() {
            return Err(Error::Diverged(format!("training loss {loss} at epoch {epoch}")));
        }
        adam_step(&mut params, &grads, &mut adam, rates)?;

        let probs = predict(features, graph, &params, config.mode)?;
        let report = evaluate(&probs.argmax_rows(), Some(&probs), &labels, &val_mask, classes)?;
        history.records.push(EpochRecord {
            epoch,
            train_loss: loss,
            val_accuracy: report.accuracy,
            val_weighted_f1: report.weighted_f1,
        });

        // strict improvement keeps the earlier epoch on ties
        if best.as_ref().is_none_or(|(f1, _, _)| report.weighted_f1 > *f1) {
            best = Some((report.weighted_f1, epoch, params.clone()));
            stale = 0;
        } else {
            stale += 1;
            if config.patience > 0 && stale >= config.patience {
                break;
            }
        }
    }

    let (best_f1, best_epoch, best_params) = best.expect("at least one epoch");
    let checkpoint = Checkpoint {
        params: best_params,
        config: config.clone(),
        epoch: best_epoch,
        epochs_run: history.records.len(),
        best_val_weighted_f1: best_f1,
        corpus_hash: content_hash(documents),
        graph_hash: graph.content_hash(),
    };
    Ok(TrainOutcome {
        checkpoint,
        history,
        final_params: params,
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsFile {
    lambda: f64,
    w_head: Vec<Vec<f64>>,
    w0: Vec<Vec<f64>>,
    w1: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CheckpointFile {
    format_version: u32,
    epoch: usize,
    epochs_run: usize,
    best_val_weighted_f1: f64,
    corpus_hash: String,
    graph_hash: String,
    config: TrainConfig,
    params: ParamsFile,
}

pub fn checkpoint_to_json(ckpt: &Checkpoint) -> String {
    let file = CheckpointFile {
        format_version: CHECKPOINT_VERSION,
        epoch: ckpt.epoch,
        epochs_run: ckpt.epochs_run,
        best_val_weighted_f1: ckpt.best_val_weighted_f1,
        corpus_hash: ckpt.corpus_hash.clone(),
        graph_hash: ckpt.graph_hash.clone(),
        config: ckpt.config.clone(),
        params: ParamsFile {
            lambda: ckpt.params.lambda,
            w_head: ckpt.params.w_head.to_rows(),
            w0: ckpt.params.w0.to_rows(),
            w1: ckpt.params.w1.to_rows(),
        },
    };
    serde_json::to_string_pretty(&file).expect("checkpoint serializes") + "\n"
}

pub fn save_checkpoint(ckpt: &Checkpoint, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    ckpt.params.validate()?;
    fs::write(path, checkpoint_to_json(ckpt)).map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<Checkpoint> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    checkpoint_from_json(&text)
}

pub fn checkpoint_from_json(text: &str) -> Result<Checkpoint> {
    let parse_err = |e: serde_json::Error| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    };
    let value: serde_json::Value = serde_json::from_str(text).map_err(parse_err)?;
    match value.get("format_version").and_then(|v| v.as_u64()) {
        Some(v) if v == CHECKPOINT_VERSION as u64 => {}
        Some(v) => return Err(Error::Version(format!("checkpoint format {v}"))),
        None => return Err(Error::Version("checkpoint has no format_version".into())),
    }
    let file: CheckpointFile = serde_json::from_value(value).map_err(parse_err)?;
    let params = ModelParams {
        w_head: DenseMatrix::from_rows(&file.params.w_head)?,
        w0: DenseMatrix::from_rows(&file.params.w0)?,
        w1: DenseMatrix::from_rows(&file.params.w1)?,
        lambda: file.params.lambda,
    };
    params.validate()?;
    file.config.validate()?;
    Ok(Checkpoint {
        params,
        config: file.config,
        epoch: file.epoch,
        epochs_run: file.epochs_run,
        best_val_weighted_f1: file.best_val_weighted_f1,
        corpus_hash: file.corpus_hash,
        graph_hash: file.graph_hash,
    })
}
