//! Classical comparators over TF-IDF features: multinomial Naive Bayes and
//! L2-regularized multinomial logistic regression.

use serde::{Deserialize, Serialize};

use crate::corpus::CorpusBundle;
use crate::error::{Error, Result};
use crate::graph::compute_tf_idf;
use crate::linalg::{row_softmax, DenseMatrix};

/// Sparse document rows over the vocabulary.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseFeatures {
    pub rows: Vec<Vec<(usize, f64)>>,
    pub n_features: usize,
}

impl SparseFeatures {
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|&(j, v)| (j, v * k)).collect())
                .collect(),
            n_features: self.n_features,
        }
    }
}

/// Per-document TF-IDF rows (same weighting as the graph), each scaled to
/// unit L2 norm when `normalize` is set. Empty documents stay empty.
pub fn tfidf_features(bundle: &CorpusBundle, normalize: bool) -> SparseFeatures {
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); bundle.n_doc()];
    for (doc, word, w) in compute_tf_idf(bundle) {
        rows[doc].push((word, w));
    }
    if normalize {
        for row in &mut rows {
            let norm = row.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                row.iter_mut().for_each(|(_, v)| *v /= norm);
            }
        }
    }
    SparseFeatures {
        rows,
        n_features: bundle.n_word(),
    }
}

fn check_training(labels: &[Option<usize>], train: &[usize], classes: usize) -> Result<Vec<usize>> {
    if train.is_empty() {
        return Err(Error::EmptyMask);
    }
    train
        .iter()
        .map(|&i| match labels.get(i).copied().flatten() {
            Some(y) if y < classes => Ok(y),
            Some(y) => Err(Error::Index(format!(
                "label {y} of document {i} exceeds {classes} classes"
            ))),
            None => Err(Error::Index(format!("training document {i} has no label"))),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct NBModel {
    pub log_prior: Vec<f64>,
    /// `C × V`; each row exponentiates to a distribution over the vocabulary.
    pub log_likelihood: DenseMatrix,
    pub alpha: f64,
}

/// Multinomial NB treating feature values as fractional counts. Priors are
/// Laplace-smoothed so a class missing from training keeps finite scores.
pub fn nb_fit(
    features: &SparseFeatures,
    labels: &[Option<usize>],
    train: &[usize],
    classes: usize,
    alpha: f64,
) -> Result<NBModel> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::Config(format!("smoothing alpha must be positive, got {alpha}")));
    }
    let ys = check_training(labels, train, classes)?;
    let v = features.n_features;
    let mut class_docs = vec![0usize; classes];
    let mut counts = DenseMatrix::zeros(classes, v);
    for (&i, &y) in train.iter().zip(&ys) {
        class_docs[y] += 1;
        for &(j, x) in &features.rows[i] {
            counts.set(y, j, counts.get(y, j) + x);
        }
    }
    let n = train.len() as f64;
    let log_prior = class_docs
        .iter()
        .map(|&c| ((c as f64 + 1.0) / (n + classes as f64)).ln())
        .collect();
    let mut log_likelihood = DenseMatrix::zeros(classes, v);
    for c in 0..classes {
        let total: f64 = counts.row(c).iter().sum::<f64>() + alpha * v as f64;
        for j in 0..v {
            log_likelihood.set(c, j, ((counts.get(c, j) + alpha) / total).ln());
        }
    }
    Ok(NBModel {
        log_prior,
        log_likelihood,
        alpha,
    })
}

/// Class predictions and posterior probabilities for every row.
pub fn nb_predict(model: &NBModel, features: &SparseFeatures) -> (Vec<usize>, DenseMatrix) {
    let classes = model.log_prior.len();
    let mut scores = DenseMatrix::zeros(features.rows.len(), classes);
    for (i, row) in features.rows.iter().enumerate() {
        for c in 0..classes {
            let s = model.log_prior[c]
                + row
                    .iter()
                    .map(|&(j, x)| x * model.log_likelihood.get(c, j))
                    .sum::<f64>();
            scores.set(i, c, s);
        }
    }
    let probs = row_softmax(&scores);
    (scores.argmax_rows(), probs)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogRegConfig {
    pub l2: f64,
    pub lr: f64,
    pub epochs: usize,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        Self {
            l2: 1.0,
            lr: 1.0,
            epochs: 300,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LogRegModel {
    /// `V × C`
    pub weights: DenseMatrix,
    pub bias: Vec<f64>,
    pub l2: f64,
    /// Objective value after each epoch.
    pub losses: Vec<f64>,
}

fn logits(weights: &DenseMatrix, bias: &[f64], features: &SparseFeatures) -> DenseMatrix {
    let classes = bias.len();
    let mut out = DenseMatrix::zeros(features.rows.len(), classes);
    for (i, row) in features.rows.iter().enumerate() {
        let dst = out.row_mut(i);
        dst.copy_from_slice(bias);
        for &(j, x) in row {
            for (d, w) in dst.iter_mut().zip(weights.row(j)) {
                *d += x * w;
            }
        }
    }
    out
}

/// `(1/n) [Σ cross-entropy + (l2/2) ‖W‖²]` over the training rows; the bias is
/// not penalized. Returns the value and the cross-entropy part's gradients
/// `(∂W, ∂b)` excluding the penalty.
fn data_term(
    weights: &DenseMatrix,
    bias: &[f64],
    features: &SparseFeatures,
    train: &[usize],
    ys: &[usize],
) -> (f64, DenseMatrix, Vec<f64>) {
    let classes = bias.len();
    let n = train.len() as f64;
    let mut grad_w = DenseMatrix::zeros(weights.rows(), classes);
    let mut grad_b = vec![0.0; classes];
    let mut loss = 0.0;
    for (&i, &y) in train.iter().zip(ys) {
        let row = &features.rows[i];
        let mut z: Vec<f64> = bias.to_vec();
        for &(j, x) in row {
            for (d, w) in z.iter_mut().zip(weights.row(j)) {
                *d += x * w;
            }
        }
        let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + z.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
        loss += lse - z[y];
        for c in 0..classes {
            let delta = ((z[c] - lse).exp() - if c == y { 1.0 } else { 0.0 }) / n;
            grad_b[c] += delta;
            for &(j, x) in row {
                grad_w.set(j, c, grad_w.get(j, c) + delta * x);
            }
        }
    }
    (loss / n, grad_w, grad_b)
}

/// Regularized objective and its full gradient, flattened as `[W, b]`.
pub fn logreg_objective(
    weights: &DenseMatrix,
    bias: &[f64],
    features: &SparseFeatures,
    labels: &[Option<usize>],
    train: &[usize],
    l2: f64,
) -> Result<(f64, Vec<f64>)> {
    let ys = check_training(labels, train, bias.len())?;
    let (loss, mut grad_w, grad_b) = data_term(weights, bias, features, train, &ys);
    let n = train.len() as f64;
    let penalty = 0.5 * l2 * weights.data().iter().map(|w| w * w).sum::<f64>() / n;
    for (g, w) in grad_w.data_mut().iter_mut().zip(weights.data()) {
        *g += l2 * w / n;
    }
    Ok((loss + penalty, [grad_w.data(), &grad_b[..]].concat()))
}

/// Full-batch proximal gradient descent from zero weights: a gradient step
/// on the cross-entropy followed by the closed-form shrink of the L2 term,
/// which stays stable for any penalty strength.
pub fn logreg_fit(
    features: &SparseFeatures,
    labels: &[Option<usize>],
    train: &[usize],
    classes: usize,
    config: &LogRegConfig,
) -> Result<LogRegModel> {
    if config.l2.is_nan() || config.l2 < 0.0 || !config.lr.is_finite() || config.lr <= 0.0 {
        return Err(Error::Config(format!(
            "invalid logistic regression settings {config:?}"
        )));
    }
    let ys = check_training(labels, train, classes)?;
    let n = train.len() as f64;
    let mut weights = DenseMatrix::zeros(features.n_features, classes);
    let mut bias = vec![0.0; classes];
    let shrink = 1.0 / (1.0 + config.lr * config.l2 / n);
    let mut losses = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        let (_, grad_w, grad_b) = data_term(&weights, &bias, features, train, &ys);
        for (w, g) in weights.data_mut().iter_mut().zip(grad_w.data()) {
            *w = (*w - config.lr * g) * shrink;
        }
        for (b, g) in bias.iter_mut().zip(&grad_b) {
            *b -= config.lr * g;
        }
        let (loss, _, _) = data_term(&weights, &bias, features, train, &ys);
        let objective = loss + 0.5 * config.l2 * weights.data().iter().map(|w| w * w).sum::<f64>() / n;
        if !objective.is_finite() {
            return Err(Error::Diverged(format!(
                "logistic regression objective {objective} at epoch {}",
                epoch + 1
            )));
        }
        losses.push(objective);
    }
    Ok(LogRegModel {
        weights,
        bias,
        l2: config.l2,
        losses,
    })
}

pub fn logreg_predict(model: &LogRegModel, features: &SparseFeatures) -> (Vec<usize>, DenseMatrix) {
    let z = logits(&model.weights, &model.bias, features);
    (z.argmax_rows(), row_softmax(&z))
}
