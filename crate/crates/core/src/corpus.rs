//! Corpus ingestion: JSONL loading, tokenization, vocabulary, transductive
//! splits and document embeddings.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::compute_tf_idf;
use crate::linalg::DenseMatrix;

const EMBEDDING_MAGIC: &str = "tgtc-emb";
const EMBEDDING_VERSION: &str = "v1";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
    #[default]
    Unassigned,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
            Split::Unassigned => "unassigned",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub label: Option<usize>,
    #[serde(default, skip_serializing_if = "is_unassigned")]
    pub split: Split,
}

fn is_unassigned(split: &Split) -> bool {
    *split == Split::Unassigned
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            text: text.into(),
            label: None,
            split: Split::Unassigned,
        }
    }

    pub fn with_label(mut self, label: usize) -> Self {
        self.label = Some(label);
        self
    }

    pub fn with_split(mut self, split: Split) -> Self {
        self.split = split;
        self
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    id: String,
    text: String,
    #[serde(default)]
    label: Option<i64>,
    #[serde(default)]
    split: Option<Split>,
}

/// Loads a JSONL corpus, one document object per line.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<Document>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_corpus(&text)
}

pub fn parse_corpus(text: &str) -> Result<Vec<Document>> {
    let mut documents = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord = serde_json::from_str(line).map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if raw.id.is_empty() {
            return Err(Error::Parse {
                line: line_no,
                message: "empty document id".into(),
            });
        }
        let label = match raw.label {
            None => None,
            Some(l) if l >= 0 => Some(l as usize),
            Some(l) => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("negative label {l}"),
                })
            }
        };
        if !seen.insert(raw.id.clone()) {
            return Err(Error::DuplicateId(raw.id));
        }
        documents.push(Document {
            id: raw.id,
            text: raw.text,
            label,
            split: raw.split.unwrap_or_default(),
        });
    }
    if documents.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    Ok(documents)
}

pub fn write_corpus(path: impl AsRef<Path>, documents: &[Document]) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for doc in documents {
        out.push_str(&serde_json::to_string(doc).expect("document serializes"));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizerConfig {
    pub lowercase: bool,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        Self { lowercase: true }
    }
}

/// Splits on every non-alphanumeric character and drops empty pieces.
pub fn tokenize(text: &str, config: &TokenizerConfig) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| {
            if config.lowercase {
                t.to_lowercase()
            } else {
                t.to_string()
            }
        })
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vocab {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    doc_freq: Vec<usize>,
    corpus_freq: Vec<usize>,
}

impl Vocab {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn token(&self, index: usize) -> &str {
        &self.tokens[index]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn df(&self, index: usize) -> usize {
        self.doc_freq[index]
    }

    pub fn corpus_freq(&self, index: usize) -> usize {
        self.corpus_freq[index]
    }
}

/// Builds the vocabulary over every document (all splits). Indices follow
/// first occurrence among the tokens that survive the `min_df` filter.
pub fn build_vocab(token_lists: &[Vec<String>], min_df: usize) -> Result<Vocab> {
    let mut order: Vec<&str> = Vec::new();
    let mut counts: HashMap<&str, (usize, usize)> = HashMap::new();
    for tokens in token_lists {
        let mut in_doc: HashSet<&str> = HashSet::new();
        for t in tokens {
            let entry = counts.entry(t.as_str()).or_insert_with(|| {
                order.push(t.as_str());
                (0, 0)
            });
            entry.1 += 1;
            if in_doc.insert(t.as_str()) {
                entry.0 += 1;
            }
        }
    }

    let mut vocab = Vocab::default();
    for t in order {
        let (df, cf) = counts[t];
        if df >= min_df.max(1) {
            vocab.index.insert(t.to_string(), vocab.tokens.len());
            vocab.tokens.push(t.to_string());
            vocab.doc_freq.push(df);
            vocab.corpus_freq.push(cf);
        }
    }
    if vocab.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    Ok(vocab)
}

/// Documents plus their vocabulary and token-index sequences. Document order
/// is the canonical node order of the corpus graph.
#[derive(Clone, Debug)]
pub struct CorpusBundle {
    pub documents: Vec<Document>,
    pub vocab: Vocab,
    /// Per-document token indices; tokens filtered out of the vocabulary are dropped.
    pub tokenized: Vec<Vec<usize>>,
    pub class_count: usize,
}

impl CorpusBundle {
    pub fn build(documents: Vec<Document>, tokenizer: &TokenizerConfig, min_df: usize) -> Result<Self> {
        if documents.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let token_lists: Vec<Vec<String>> = documents.iter().map(|d| tokenize(&d.text, tokenizer)).collect();
        let vocab = build_vocab(&token_lists, min_df)?;
        let tokenized = token_lists
            .iter()
            .map(|tokens| tokens.iter().filter_map(|t| vocab.get(t)).collect())
            .collect();
        let class_count = documents.iter().filter_map(|d| d.label).max().map_or(0, |m| m + 1);
        Ok(Self {
            documents,
            vocab,
            tokenized,
            class_count,
        })
    }

    pub fn n_doc(&self) -> usize {
        self.documents.len()
    }

    pub fn n_word(&self) -> usize {
        self.vocab.len()
    }

    pub fn indices_in(&self, split: Split) -> Vec<usize> {
        self.documents
            .iter()
            .enumerate()
            .filter(|(_, d)| d.split == split)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn labels(&self) -> Vec<Option<usize>> {
        self.documents.iter().map(|d| d.label).collect()
    }

    /// Number of classes seen in supervised (train and val) labels.
    pub fn supervised_class_count(&self) -> usize {
        self.documents
            .iter()
            .filter(|d| matches!(d.split, Split::Train | Split::Val))
            .filter_map(|d| d.label)
            .max()
            .map_or(0, |m| m + 1)
    }

    /// Hash over document ids and texts. Labels and splits are excluded so
    /// that relabelling evaluation documents cannot change training artifacts.
    pub fn content_hash(&self) -> String {
        content_hash(&self.documents)
    }
}

pub fn content_hash(documents: &[Document]) -> String {
    let mut hasher = Sha256::new();
    for d in documents {
        hasher.update((d.id.len() as u64).to_le_bytes());
        hasher.update(d.id.as_bytes());
        hasher.update((d.text.len() as u64).to_le_bytes());
        hasher.update(d.text.as_bytes());
    }
    hex::encode(hasher.finalize())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitRatios {
    /// Fraction of the labeled pool held out for testing.
    pub test: f64,
    /// Fraction of the remaining training pool reserved for validation.
    pub val_of_train: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        Self {
            test: 0.3,
            val_of_train: 0.1,
        }
    }
}

fn floor_count(n: usize, ratio: f64) -> usize {
    // tolerate representation error such as 0.3 * 100 = 30.000000000000004
    ((n as f64) * ratio + 1e-9).floor() as usize
}

/// Assigns train/val/test to labeled documents that carry no split yet.
/// Documents with a preassigned split and unlabeled documents are left alone.
pub fn assign_splits(documents: &mut [Document], ratios: SplitRatios, seed: u64) -> Result<()> {
    if !(0.0..1.0).contains(&ratios.test) || !(0.0..1.0).contains(&ratios.val_of_train) {
        return Err(Error::Config(format!("split ratios out of range: {ratios:?}")));
    }
    let mut pool: Vec<usize> = documents
        .iter()
        .enumerate()
        .filter(|(_, d)| d.split == Split::Unassigned && d.label.is_some())
        .map(|(i, _)| i)
        .collect();
    if pool.is_empty() {
        return Ok(());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pool.shuffle(&mut rng);

    let n_test = floor_count(pool.len(), ratios.test);
    let n_val = floor_count(pool.len() - n_test, ratios.val_of_train);
    for (k, &i) in pool.iter().enumerate() {
        documents[i].split = if k < n_test {
            Split::Test
        } else if k < n_test + n_val {
            Split::Val
        } else {
            Split::Train
        };
    }

    let count = |s: Split| documents.iter().filter(|d| d.split == s).count();
    if count(Split::Train) == 0 {
        return Err(Error::DegenerateSplit("no training documents".into()));
    }
    if count(Split::Val) == 0 {
        return Err(Error::DegenerateSplit("no validation documents".into()));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Provenance {
    External { source: String },
    Fallback { seed: u64 },
}

/// Per-document embeddings, rows in corpus document order.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingMatrix {
    pub ids: Vec<String>,
    pub values: DenseMatrix,
    pub provenance: Provenance,
}

impl EmbeddingMatrix {
    pub fn n_doc(&self) -> usize {
        self.values.rows()
    }

    pub fn dim(&self) -> usize {
        self.values.cols()
    }
}

/// TF-IDF rows, L2-normalized, projected through a seeded Gaussian matrix
/// with entries drawn from N(0, 1/d).
pub fn fallback_embed(bundle: &CorpusBundle, dim: usize, seed: u64) -> Result<EmbeddingMatrix> {
    if dim == 0 {
        return Err(Error::InvalidDim(dim));
    }
    let n_word = bundle.n_word();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, (1.0 / dim as f64).sqrt()).expect("valid std");
    let projection: Vec<f64> = (0..n_word * dim).map(|_| normal.sample(&mut rng)).collect();

    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); bundle.n_doc()];
    for (doc, word, w) in compute_tf_idf(bundle) {
        rows[doc].push((word, w));
    }

    let mut values = DenseMatrix::zeros(bundle.n_doc(), dim);
    for (doc, row) in rows.iter().enumerate() {
        let norm = row.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let out = values.row_mut(doc);
        for &(word, w) in row {
            let scale = w / norm;
            let proj = &projection[word * dim..(word + 1) * dim];
            for (o, p) in out.iter_mut().zip(proj) {
                *o += scale * p;
            }
        }
    }

    Ok(EmbeddingMatrix {
        ids: bundle.documents.iter().map(|d| d.id.clone()).collect(),
        values,
        provenance: Provenance::Fallback { seed },
    })
}

pub fn write_embeddings(path: impl AsRef<Path>, emb: &EmbeddingMatrix) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        writeln!(
            out,
            "{EMBEDDING_MAGIC} {EMBEDDING_VERSION} {} {}",
            emb.n_doc(),
            emb.dim()
        )?;
        for (i, id) in emb.ids.iter().enumerate() {
            write!(out, "{id}\t")?;
            for (k, v) in emb.values.row(i).iter().enumerate() {
                if k > 0 {
                    out.write_all(b" ")?;
                }
                write!(out, "{v:e}")?;
            }
            out.write_all(b"\n")?;
        }
        out.flush()
    };
    write().map_err(|e| Error::io(path, e))
}

/// Reads an embedding interchange file and reorders its rows to match
/// `documents` by id.
pub fn load_embeddings(path: impl AsRef<Path>, documents: &[Document]) -> Result<EmbeddingMatrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut emb = parse_embeddings(&text, documents)?;
    emb.provenance = Provenance::External {
        source: path.display().to_string(),
    };
    Ok(emb)
}

pub fn parse_embeddings(text: &str, documents: &[Document]) -> Result<EmbeddingMatrix> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Format("missing header".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (n, dim) = match fields.as_slice() {
        [magic, version, n, dim] if *magic == EMBEDDING_MAGIC => {
            if *version != EMBEDDING_VERSION {
                return Err(Error::Format(format!("unsupported version `{version}`")));
            }
            let n: usize = n.parse().map_err(|_| Error::Format(format!("bad count `{n}`")))?;
            let dim: usize = dim.parse().map_err(|_| Error::Format(format!("bad dim `{dim}`")))?;
            (n, dim)
        }
        _ => return Err(Error::Format(format!("bad header `{header}`"))),
    };
    if dim == 0 {
        return Err(Error::Format("dimension must be positive".into()));
    }

    let mut by_id: HashMap<&str, Vec<f64>> = HashMap::with_capacity(n);
    let mut rows = 0;
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = i + 2;
        let (id, rest) = line
            .split_once('\t')
            .ok_or_else(|| Error::Format(format!("line {line_no}: missing tab after id")))?;
        let values = rest
            .split_whitespace()
            .map(|v| {
                v.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::Format(format!("line {line_no}: bad value `{v}`")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if values.len() != dim {
            return Err(Error::Format(format!(
                "line {line_no}: expected {dim} values, found {}",
                values.len()
            )));
        }
        if by_id.insert(id, values).is_some() {
            return Err(Error::Format(format!("line {line_no}: duplicate id `{id}`")));
        }
        rows += 1;
    }
    if rows != n {
        return Err(Error::Format(format!("header declares {n} rows, found {rows}")));
    }

    let mut values = DenseMatrix::zeros(documents.len(), dim);
    for (i, doc) in documents.iter().enumerate() {
        let row = by_id
            .get(doc.id.as_str())
            .ok_or_else(|| Error::MissingEmbedding(doc.id.clone()))?;
        values.row_mut(i).copy_from_slice(row);
    }
    Ok(EmbeddingMatrix {
        ids: documents.iter().map(|d| d.id.clone()).collect(),
        values,
        provenance: Provenance::External { source: String::new() },
    })
}
