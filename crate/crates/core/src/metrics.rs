//! Accuracy, per-class precision/recall/F1, support-weighted F1, confusion
//! matrix and rank-based ROC-AUC.
//!
//! Any precision, recall or F1 whose denominator is zero is reported as 0.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub total: usize,
    pub accuracy: f64,
    pub precision: Vec<f64>,
    pub recall: Vec<f64>,
    pub f1: Vec<f64>,
    pub support: Vec<usize>,
    pub weighted_f1: f64,
    /// Binary tasks only.
    pub roc_auc: Option<f64>,
    /// `confusion[true][predicted]`.
    pub confusion: Vec<Vec<usize>>,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

fn label_of(labels: &[Option<usize>], v: usize) -> Result<usize> {
    labels
        .get(v)
        .copied()
        .flatten()
        .ok_or_else(|| Error::Index(format!("node {v} has no label")))
}

/// Scores `predictions[v]` against `labels[v]` for every `v` in `subset`.
/// When `probabilities` is given and the task is binary with both classes
/// present, column 1 is used as the positive score for ROC-AUC.
pub fn evaluate(
    predictions: &[usize],
    probabilities: Option<&DenseMatrix>,
    labels: &[Option<usize>],
    subset: &[usize],
    class_count: usize,
) -> Result<EvalReport> {
    if subset.is_empty() {
        return Err(Error::EmptyEval);
    }
    let mut classes = class_count;
    for &v in subset {
        let y = label_of(labels, v)?;
        let p = *predictions
            .get(v)
            .ok_or_else(|| Error::Index(format!("node {v} has no prediction")))?;
        classes = classes.max(y + 1).max(p + 1);
    }

    let mut confusion = vec![vec![0usize; classes]; classes];
    for &v in subset {
        confusion[label_of(labels, v)?][predictions[v]] += 1;
    }
    let total = subset.len();
    let correct: usize = (0..classes).map(|c| confusion[c][c]).sum();

    let mut precision = Vec::with_capacity(classes);
    let mut recall = Vec::with_capacity(classes);
    let mut f1 = Vec::with_capacity(classes);
    let mut support = Vec::with_capacity(classes);
    for (c, row) in confusion.iter().enumerate() {
        let tp = row[c] as f64;
        let predicted: usize = confusion.iter().map(|r| r[c]).sum();
        let actual: usize = row.iter().sum();
        let p = ratio(tp, predicted as f64);
        let r = ratio(tp, actual as f64);
        precision.push(p);
        recall.push(r);
        f1.push(ratio(2.0 * p * r, p + r));
        support.push(actual);
    }
    let weighted_f1 = f1.iter().zip(&support).map(|(f, &s)| f * s as f64 / total as f64).sum();

    let roc = match probabilities {
        Some(probs) if classes == 2 && probs.cols() == 2 => {
            let scores: Vec<f64> = (0..probs.rows()).map(|r| probs.get(r, 1)).collect();
            match roc_auc(&scores, labels, subset) {
                Ok(curve) => Some(curve.auc),
                Err(Error::UndefinedAuc) => None,
                Err(e) => return Err(e),
            }
        }
        _ => None,
    };

    Ok(EvalReport {
        total,
        accuracy: correct as f64 / total as f64,
        precision,
        recall,
        f1,
        support,
        weighted_f1,
        roc_auc: roc,
        confusion,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    pub threshold: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub auc: f64,
    /// One point per distinct score, thresholds descending, starting at
    /// `(0, 0)` with an infinite threshold.
    pub points: Vec<RocPoint>,
}

/// Mann-Whitney AUC with average ranks for ties. Label 1 is positive.
pub fn roc_auc(scores: &[f64], labels: &[Option<usize>], subset: &[usize]) -> Result<RocCurve> {
    let mut items = Vec::with_capacity(subset.len());
    for &v in subset {
        let score = *scores
            .get(v)
            .ok_or_else(|| Error::Index(format!("node {v} has no score")))?;
        items.push((score, label_of(labels, v)? == 1));
    }
    let n_pos = items.iter().filter(|(_, p)| *p).count();
    let n_neg = items.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::UndefinedAuc);
    }
    items.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < items.len() {
        let mut j = i;
        while j + 1 < items.len() && items[j + 1].0 == items[i].0 {
            j += 1;
        }
        // ranks i+1 ..= j+1 share their average
        let avg = (i + j + 2) as f64 / 2.0;
        rank_sum += avg * items[i..=j].iter().filter(|(_, p)| *p).count() as f64;
        i = j + 1;
    }
    let (p, n) = (n_pos as f64, n_neg as f64);
    let auc = (rank_sum - p * (p + 1.0) / 2.0) / (p * n);

    let mut points = vec![RocPoint {
        fpr: 0.0,
        tpr: 0.0,
        threshold: f64::INFINITY,
    }];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut k = items.len();
    while k > 0 {
        let threshold = items[k - 1].0;
        while k > 0 && items[k - 1].0 == threshold {
            if items[k - 1].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            k -= 1;
        }
        points.push(RocPoint {
            fpr: fp as f64 / n,
            tpr: tp as f64 / p,
            threshold,
        });
    }
    Ok(RocCurve { auc, points })
}

pub fn write_roc_csv(path: impl AsRef<Path>, curve: &RocCurve) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::from("fpr,tpr,threshold\n");
    for p in &curve.points {
        out.push_str(&format!("{},{},{}\n", p.fpr, p.tpr, p.threshold));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn write_report(path: impl AsRef<Path>, report: &impl Serialize) -> Result<()> {
    let path = path.as_ref();
    let json = serde_json::to_string_pretty(report).expect("report serializes");
    fs::write(path, json + "\n").map_err(|e| Error::io(path, e))
}
