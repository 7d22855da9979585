//! The interpolated head + GCN composite.
//!
//! Document rows of the feature matrix hold the document embeddings, word
//! rows are zero. The head path is `softmax(X_doc · W_head)`; the GCN path is
//! `softmax((Ã · relu(Ã · X · W0) · W1)_doc)`; the final prediction is
//! `λ · Z_G + (1 − λ) · Z_B`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::graph::HeteroGraph;
use crate::linalg::{masked_nll, masked_nll_grad, relu, row_softmax, row_softmax_backward, spmm, DenseMatrix};

pub const DEFAULT_LAMBDA: f64 = 0.2;

/// Which prediction path(s) the model uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelMode {
    /// `λ · Z_G + (1 − λ) · Z_B`.
    #[default]
    Interpolated,
    /// Linear head only; the GCN weights are never touched.
    HeadOnly,
    /// GCN only; the head weights are never touched.
    GcnOnly,
}

impl std::str::FromStr for ModelMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "interpolated" => Ok(Self::Interpolated),
            "head-only" => Ok(Self::HeadOnly),
            "gcn-only" => Ok(Self::GcnOnly),
            _ => Err(format!("unknown mode `{s}` (interpolated, head-only, gcn-only)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    /// `d × C`
    pub w_head: DenseMatrix,
    /// `d × h`
    pub w0: DenseMatrix,
    /// `h × C`
    pub w1: DenseMatrix,
    pub lambda: f64,
}

fn glorot(rng: &mut ChaCha8Rng, fan_in: usize, fan_out: usize) -> DenseMatrix {
    let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
    let data = (0..fan_in * fan_out)
        .map(|_| rng.random_range(-limit..=limit))
        .collect();
    DenseMatrix::from_vec(fan_in, fan_out, data).expect("glorot shape")
}

impl ModelParams {
    /// Zero head (a convex linear classifier needs no symmetry breaking);
    /// Glorot-uniform `W0` then `W1`.
    pub fn init(dim: usize, hidden: usize, classes: usize, lambda: f64, seed: u64) -> Result<Self> {
        if dim == 0 || hidden == 0 || classes == 0 {
            return Err(Error::Config(format!(
                "model dimensions must be positive (d={dim}, h={hidden}, C={classes})"
            )));
        }
        check_lambda(lambda)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w_head = DenseMatrix::zeros(dim, classes);
        let w0 = glorot(&mut rng, dim, hidden);
        let w1 = glorot(&mut rng, hidden, classes);
        Ok(Self { w_head, w0, w1, lambda })
    }

    pub fn dim(&self) -> usize {
        self.w_head.rows()
    }

    pub fn hidden(&self) -> usize {
        self.w0.cols()
    }

    pub fn classes(&self) -> usize {
        self.w_head.cols()
    }

    pub fn validate(&self) -> Result<()> {
        check_lambda(self.lambda)?;
        let (d, c) = self.w_head.shape();
        let h = self.w0.cols();
        if self.w0.rows() != d || self.w1.shape() != (h, c) {
            return Err(Error::Shape(format!(
                "inconsistent parameters: W_head {:?}, W0 {:?}, W1 {:?}",
                self.w_head.shape(),
                self.w0.shape(),
                self.w1.shape()
            )));
        }
        if !(self.w_head.is_finite() && self.w0.is_finite() && self.w1.is_finite()) {
            return Err(Error::Format("non-finite model parameters".into()));
        }
        Ok(())
    }

    pub fn to_flat(&self) -> Vec<f64> {
        [self.w_head.data(), self.w0.data(), self.w1.data()].concat()
    }

    pub fn with_flat(&self, flat: &[f64]) -> Self {
        let mut out = self.clone();
        let (a, rest) = flat.split_at(self.w_head.data().len());
        let (b, c) = rest.split_at(self.w0.data().len());
        out.w_head.data_mut().copy_from_slice(a);
        out.w0.data_mut().copy_from_slice(b);
        out.w1.data_mut().copy_from_slice(c);
        out
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(Error::Config(format!("lambda {lambda} outside [0, 1]")))
    }
}

/// Node features: document embeddings stacked over a zero block for words.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    pub x: DenseMatrix,
    pub n_doc: usize,
}

pub fn build_feature_matrix(emb: &EmbeddingMatrix, n_word: usize) -> FeatureMatrix {
    let n_doc = emb.n_doc();
    let dim = emb.dim();
    let mut data = Vec::with_capacity((n_doc + n_word) * dim);
    data.extend_from_slice(emb.values.data());
    data.resize((n_doc + n_word) * dim, 0.0);
    FeatureMatrix {
        x: DenseMatrix::from_vec(n_doc + n_word, dim, data).expect("feature shape"),
        n_doc,
    }
}

/// Inverted-dropout multipliers (0 or `1/(1-p)`) for the training pass.
#[derive(Clone, Debug, Default)]
pub struct DropoutMasks {
    pub x: Option<DenseMatrix>,
    pub hidden: Option<DenseMatrix>,
}

impl DropoutMasks {
    pub fn sample(rng: &mut impl Rng, rate: f64, x_shape: (usize, usize), hidden_shape: (usize, usize)) -> Self {
        if rate <= 0.0 {
            return Self::default();
        }
        let keep = 1.0 / (1.0 - rate);
        let mut draw = |(r, c): (usize, usize)| {
            let data = (0..r * c)
                .map(|_| if rng.random::<f64>() < rate { 0.0 } else { keep })
                .collect();
            DenseMatrix::from_vec(r, c, data).expect("mask shape")
        };
        Self {
            x: Some(draw(x_shape)),
            hidden: Some(draw(hidden_shape)),
        }
    }
}

fn hadamard(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let data = a.data().iter().zip(b.data()).map(|(x, y)| x * y).collect();
    DenseMatrix::from_vec(a.rows(), a.cols(), data).expect("same shape")
}

#[derive(Clone, Debug, PartialEq)]
pub struct ForwardOutputs {
    /// Head probabilities, `n_doc × C`.
    pub z_b: DenseMatrix,
    /// GCN probabilities, `n_doc × C`.
    pub z_g: DenseMatrix,
    pub z_final: DenseMatrix,
}

impl ForwardOutputs {
    pub fn predictions(&self) -> Vec<usize> {
        self.z_final.argmax_rows()
    }
}

/// Intermediate activations kept for the backward pass.
struct Trace {
    x_doc: DenseMatrix,
    ax: DenseMatrix,
    pre_hidden: DenseMatrix,
    ah_doc: DenseMatrix,
    z_b: Option<DenseMatrix>,
    z_g: Option<DenseMatrix>,
    z_final: DenseMatrix,
}

fn check_inputs(features: &FeatureMatrix, graph: &HeteroGraph, params: &ModelParams) -> Result<()> {
    if !graph.normalized {
        return Err(Error::NotNormalized);
    }
    params.validate()?;
    if features.x.rows() != graph.n_nodes() || features.n_doc != graph.n_doc {
        return Err(Error::Shape(format!(
            "features have {} rows ({} documents), graph has {} nodes ({} documents)",
            features.x.rows(),
            features.n_doc,
            graph.n_nodes(),
            graph.n_doc
        )));
    }
    if features.x.cols() != params.dim() {
        return Err(Error::Shape(format!(
            "feature dim {} but parameters expect {}",
            features.x.cols(),
            params.dim()
        )));
    }
    Ok(())
}

fn run_forward(
    features: &FeatureMatrix,
    graph: &HeteroGraph,
    params: &ModelParams,
    mode: ModelMode,
    dropout: Option<&DropoutMasks>,
) -> Result<Trace> {
    check_inputs(features, graph, params)?;
    let n_doc = features.n_doc;
    let x = match dropout.and_then(|d| d.x.as_ref()) {
        Some(mask) => hadamard(&features.x, mask),
        None => features.x.clone(),
    };
    let x_doc = x.top_rows(n_doc);

    let z_b = (mode != ModelMode::GcnOnly)
        .then(|| x_doc.matmul(&params.w_head).map(|l| row_softmax(&l)))
        .transpose()?;

    let (ax, pre_hidden, ah_doc, z_g) = if mode != ModelMode::HeadOnly {
        let ax = spmm(&graph.adjacency, &x)?;
        let pre_hidden = ax.matmul(&params.w0)?;
        let mut hidden = relu(&pre_hidden);
        if let Some(mask) = dropout.and_then(|d| d.hidden.as_ref()) {
            hidden = hadamard(&hidden, mask);
        }
        let ah_doc = spmm(&graph.adjacency, &hidden)?.top_rows(n_doc);
        let z_g = row_softmax(&ah_doc.matmul(&params.w1)?);
        (ax, pre_hidden, ah_doc, Some(z_g))
    } else {
        let empty = DenseMatrix::zeros(0, 0);
        (empty.clone(), empty.clone(), empty, None)
    };

    let z_final = match (&z_b, &z_g) {
        (Some(b), Some(g)) => {
            let lambda = params.lambda;
            let data = g
                .data()
                .iter()
                .zip(b.data())
                .map(|(g, b)| lambda * g + (1.0 - lambda) * b)
                .collect();
            DenseMatrix::from_vec(b.rows(), b.cols(), data)?
        }
        (Some(b), None) => b.clone(),
        (None, Some(g)) => g.clone(),
        (None, None) => unreachable!("at least one path is active"),
    };

    Ok(Trace {
        x_doc,
        ax,
        pre_hidden,
        ah_doc,
        z_b,
        z_g,
        z_final,
    })
}

/// Evaluation-mode forward pass of the interpolated model.
pub fn forward(features: &FeatureMatrix, graph: &HeteroGraph, params: &ModelParams) -> Result<ForwardOutputs> {
    let t = run_forward(features, graph, params, ModelMode::Interpolated, None)?;
    Ok(ForwardOutputs {
        z_b: t.z_b.expect("head path"),
        z_g: t.z_g.expect("gcn path"),
        z_final: t.z_final,
    })
}

/// Final probabilities for `mode`, evaluation mode (no dropout).
pub fn predict(
    features: &FeatureMatrix,
    graph: &HeteroGraph,
    params: &ModelParams,
    mode: ModelMode,
) -> Result<DenseMatrix> {
    Ok(run_forward(features, graph, params, mode, None)?.z_final)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gradients {
    pub w_head: DenseMatrix,
    pub w0: DenseMatrix,
    pub w1: DenseMatrix,
}

impl Gradients {
    pub fn to_flat(&self) -> Vec<f64> {
        [self.w_head.data(), self.w0.data(), self.w1.data()].concat()
    }
}

/// Mean NLL of the interpolated prediction over `mask` and its exact
/// gradients. `λ` is a fixed hyper-parameter and receives no gradient.
pub fn loss_and_grads(
    features: &FeatureMatrix,
    graph: &HeteroGraph,
    params: &ModelParams,
    labels: &[Option<usize>],
    mask: &[usize],
) -> Result<(f64, Gradients)> {
    loss_and_grads_with(features, graph, params, labels, mask, ModelMode::Interpolated, None)
}

pub fn loss_and_grads_with(
    features: &FeatureMatrix,
    graph: &HeteroGraph,
    params: &ModelParams,
    labels: &[Option<usize>],
    mask: &[usize],
    mode: ModelMode,
    dropout: Option<&DropoutMasks>,
) -> Result<(f64, Gradients)> {
    if mask.is_empty() {
        return Err(Error::EmptyMask);
    }
    if let Some(&v) = mask.iter().find(|&&v| v >= features.n_doc) {
        return Err(Error::Index(format!("mask node {v} is not a document")));
    }
    let t = run_forward(features, graph, params, mode, dropout)?;
    let loss = masked_nll(&t.z_final, labels, mask)?;
    let d_final = masked_nll_grad(&t.z_final, labels, mask)?;

    let (head_weight, gcn_weight) = match mode {
        ModelMode::Interpolated => (1.0 - params.lambda, params.lambda),
        ModelMode::HeadOnly => (1.0, 0.0),
        ModelMode::GcnOnly => (0.0, 1.0),
    };

    let w_head = match &t.z_b {
        Some(z_b) => {
            let d_zb = d_final.map(|g| head_weight * g);
            t.x_doc.t_matmul(&row_softmax_backward(z_b, &d_zb))?
        }
        None => DenseMatrix::zeros(params.w_head.rows(), params.w_head.cols()),
    };

    let (w0, w1) = match &t.z_g {
        Some(z_g) => {
            let d_zg = d_final.map(|g| gcn_weight * g);
            let d_logits = row_softmax_backward(z_g, &d_zg);
            let w1 = t.ah_doc.t_matmul(&d_logits)?;

            // word rows of Ã·H do not reach the output, so their gradient is zero
            let n_nodes = graph.n_nodes();
            let d_ah_doc = d_logits.matmul_t(&params.w1)?;
            let mut d_ah = d_ah_doc.data().to_vec();
            d_ah.resize(n_nodes * params.hidden(), 0.0);
            let d_ah = DenseMatrix::from_vec(n_nodes, params.hidden(), d_ah)?;

            // Ã is symmetric, so Ãᵀ·G = Ã·G
            let mut d_hidden = spmm(&graph.adjacency, &d_ah)?;
            if let Some(mask) = dropout.and_then(|d| d.hidden.as_ref()) {
                d_hidden = hadamard(&d_hidden, mask);
            }
            for (g, &p) in d_hidden.data_mut().iter_mut().zip(t.pre_hidden.data()) {
                if p <= 0.0 {
                    *g = 0.0;
                }
            }
            let w0 = t.ax.t_matmul(&d_hidden)?;
            (w0, w1)
        }
        None => (
            DenseMatrix::zeros(params.w0.rows(), params.w0.cols()),
            DenseMatrix::zeros(params.w1.rows(), params.w1.cols()),
        ),
    };

    Ok((loss, Gradients { w_head, w0, w1 }))
}
