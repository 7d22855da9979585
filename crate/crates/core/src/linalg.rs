//! Dense and sparse kernels in 64-bit precision.
//!
//! Every kernel accumulates in a fixed order so identical inputs produce
//! bit-identical outputs.

use crate::error::{Error, Result};

/// Floor applied to probabilities before taking logs in [`masked_nll`].
pub const NLL_EPS: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} values for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// First `n` rows as a new matrix.
    pub fn top_rows(&self, n: usize) -> DenseMatrix {
        Self {
            rows: n,
            cols: self.cols,
            data: self.data[..n * self.cols].to_vec(),
        }
    }

    /// `self * other`.
    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(shape_err("matmul", self, other));
        }
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (d, &b) in dst.iter_mut().zip(other.row(k)) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `selfᵀ * other`.
    pub fn t_matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.rows != other.rows {
            return Err(shape_err("t_matmul", self, other));
        }
        let mut out = DenseMatrix::zeros(self.cols, other.cols);
        for k in 0..self.rows {
            let b_row = other.row(k);
            for (i, &a) in self.row(k).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(b_row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self * otherᵀ`.
    pub fn matmul_t(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.cols {
            return Err(shape_err("matmul_t", self, other));
        }
        let mut out = DenseMatrix::zeros(self.rows, other.rows);
        for i in 0..self.rows {
            let a = self.row(i);
            for j in 0..other.rows {
                out.data[i * other.rows + j] = a.iter().zip(other.row(j)).map(|(x, y)| x * y).sum();
            }
        }
        Ok(out)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> DenseMatrix {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn argmax_rows(&self) -> Vec<usize> {
        (0..self.rows)
            .map(|r| {
                let row = self.row(r);
                let mut best = 0;
                for (c, &v) in row.iter().enumerate() {
                    if v > row[best] {
                        best = c;
                    }
                }
                best
            })
            .collect()
    }
}

fn shape_err(op: &str, a: &DenseMatrix, b: &DenseMatrix) -> Error {
    Error::Shape(format!("{op}: {}x{} with {}x{}", a.rows, a.cols, b.rows, b.cols))
}

/// Compressed sparse rows built from canonical (row, col)-sorted triplets.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Zero values are dropped; duplicate coordinates are rejected.
    pub fn from_triplets(rows: usize, cols: usize, mut triplets: Vec<(usize, usize, f64)>) -> Result<Self> {
        triplets.retain(|t| t.2 != 0.0);
        triplets.sort_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0; rows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        for (k, &(r, c, v)) in triplets.iter().enumerate() {
            if r >= rows || c >= cols {
                return Err(Error::Index(format!("({r}, {c}) outside {rows}x{cols}")));
            }
            if k > 0 && triplets[k - 1].0 == r && triplets[k - 1].1 == c {
                return Err(Error::Index(format!("duplicate coordinate ({r}, {c})")));
            }
            row_ptr[r + 1] += 1;
            col_idx.push(c);
            values.push(v);
        }
        for r in 0..rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(Self {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_entries(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    /// Triplets in canonical row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |r| self.row_entries(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[span.clone()].binary_search(&c) {
            Ok(k) => self.values[span.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.rows, self.cols);
        for (r, c, v) in self.triplets() {
            out.set(r, c, v);
        }
        out
    }

    /// Entries rescaled in place by `f(row, col, value)`; the pattern is kept.
    pub fn map_entries(&self, f: impl Fn(usize, usize, f64) -> f64) -> SparseMatrix {
        let mut out = self.clone();
        for r in 0..self.rows {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                out.values[k] = f(r, self.col_idx[k], self.values[k]);
            }
        }
        out
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows)
            .map(|r| self.row_entries(r).map(|(_, v)| v).sum())
            .collect()
    }
}

/// Sparse-dense product `s * m`.
pub fn spmm(s: &SparseMatrix, m: &DenseMatrix) -> Result<DenseMatrix> {
    if s.cols != m.rows() {
        return Err(Error::Shape(format!(
            "spmm: {}x{} with {}x{}",
            s.rows,
            s.cols,
            m.rows(),
            m.cols()
        )));
    }
    let k = m.cols();
    let mut out = DenseMatrix::zeros(s.rows, k);
    for r in 0..s.rows {
        let dst = out.row_mut(r);
        for (c, v) in s.row_entries(r) {
            for (d, &x) in dst.iter_mut().zip(m.row(c)) {
                *d += v * x;
            }
        }
    }
    Ok(out)
}

/// Row-wise softmax with max subtraction.
pub fn row_softmax(m: &DenseMatrix) -> DenseMatrix {
    let mut out = m.clone();
    for r in 0..out.rows() {
        let row = out.row_mut(r);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            sum += *v;
        }
        for v in row.iter_mut() {
            *v /= sum;
        }
    }
    out
}

/// Backward pass of [`row_softmax`]: given the softmax output and the
/// upstream gradient, returns the gradient with respect to the logits.
pub fn row_softmax_backward(probs: &DenseMatrix, upstream: &DenseMatrix) -> DenseMatrix {
    let mut out = DenseMatrix::zeros(probs.rows(), probs.cols());
    for r in 0..probs.rows() {
        let p = probs.row(r);
        let g = upstream.row(r);
        let dot: f64 = p.iter().zip(g).map(|(a, b)| a * b).sum();
        for ((o, &pi), &gi) in out.row_mut(r).iter_mut().zip(p).zip(g) {
            *o = pi * (gi - dot);
        }
    }
    out
}

pub fn relu(m: &DenseMatrix) -> DenseMatrix {
    m.map(|v| v.max(0.0))
}

/// Mean negative log-likelihood of `labels[v]` under `probs` over `mask`.
pub fn masked_nll(probs: &DenseMatrix, labels: &[Option<usize>], mask: &[usize]) -> Result<f64> {
    if mask.is_empty() {
        return Err(Error::EmptyMask);
    }
    let mut total = 0.0;
    for &v in mask {
        let y = label_at(labels, v)?;
        total -= probs.get(v, y).max(NLL_EPS).ln();
    }
    Ok(total / mask.len() as f64)
}

/// Gradient of [`masked_nll`] with respect to `probs`.
pub fn masked_nll_grad(probs: &DenseMatrix, labels: &[Option<usize>], mask: &[usize]) -> Result<DenseMatrix> {
    if mask.is_empty() {
        return Err(Error::EmptyMask);
    }
    let scale = 1.0 / mask.len() as f64;
    let mut grad = DenseMatrix::zeros(probs.rows(), probs.cols());
    for &v in mask {
        let y = label_at(labels, v)?;
        let p = probs.get(v, y);
        // the clamp is flat below NLL_EPS
        if p > NLL_EPS {
            grad.set(v, y, grad.get(v, y) - scale / p);
        }
    }
    Ok(grad)
}

fn label_at(labels: &[Option<usize>], v: usize) -> Result<usize> {
    labels
        .get(v)
        .copied()
        .flatten()
        .ok_or_else(|| Error::Index(format!("node {v} in mask has no label")))
}

/// Largest relative discrepancy between `analytic` and central differences
/// of `f` around `params`, over all coordinates:
/// `|g_a - g_n| / max(1e-8, |g_a| + |g_n|)`.
pub fn grad_check(f: impl Fn(&[f64]) -> f64, analytic: &[f64], params: &[f64], h: f64) -> f64 {
    assert_eq!(analytic.len(), params.len(), "gradient length mismatch");
    let mut theta = params.to_vec();
    let mut worst: f64 = 0.0;
    for i in 0..theta.len() {
        let orig = theta[i];
        theta[i] = orig + h;
        let plus = f(&theta);
        theta[i] = orig - h;
        let minus = f(&theta);
        theta[i] = orig;
        let numeric = (plus - minus) / (2.0 * h);
        let err = (analytic[i] - numeric).abs() / (analytic[i].abs() + numeric.abs()).max(1e-8);
        worst = worst.max(err);
    }
    worst
}
