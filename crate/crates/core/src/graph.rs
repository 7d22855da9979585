//! Heterogeneous corpus graph: TF-IDF document-word edges, positive-PPMI
//! word-word edges and unit self-loops, followed by symmetric normalization.
//!
//! Node order is documents first (`0..n_doc`) then words
//! (`n_doc..n_doc + n_word`).

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::CorpusBundle;
use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;

pub const DEFAULT_WINDOW: usize = 20;
pub const GRAPH_FORMAT_VERSION: u32 = 1;
pub const META_FILE: &str = "graph.json";
pub const EDGES_FILE: &str = "edges.tsv";

/// `(document, word, weight)` sorted by document then word.
pub type DocWordWeights = Vec<(usize, usize, f64)>;
/// `(word, word, weight)` with the first index strictly smaller.
pub type WordWordWeights = Vec<(usize, usize, f64)>;

/// `tf(d, w) · ln(N_doc / df(w))` with raw counts; zero weights omitted.
pub fn compute_tf_idf(bundle: &CorpusBundle) -> DocWordWeights {
    let n_doc = bundle.n_doc() as f64;
    let mut out = Vec::new();
    for (doc, tokens) in bundle.tokenized.iter().enumerate() {
        let mut tf: BTreeMap<usize, usize> = BTreeMap::new();
        for &t in tokens {
            *tf.entry(t).or_default() += 1;
        }
        for (word, count) in tf {
            let idf = (n_doc / bundle.vocab.df(word) as f64).ln();
            let w = count as f64 * idf;
            if w != 0.0 {
                out.push((doc, word, w));
            }
        }
    }
    out
}

/// Sliding-window occurrence counts. Each word or pair counts once per
/// window no matter how often it repeats inside it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WindowCounts {
    pub total: u64,
    pub word: Vec<u64>,
    /// Keyed by `(i, j)` with `i < j`.
    pub pair: BTreeMap<(usize, usize), u64>,
}

impl WindowCounts {
    pub fn pair_count(&self, i: usize, j: usize) -> u64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => self.word[i],
            std::cmp::Ordering::Less => self.pair.get(&(i, j)).copied().unwrap_or(0),
            std::cmp::Ordering::Greater => self.pair.get(&(j, i)).copied().unwrap_or(0),
        }
    }
}

pub fn count_windows(bundle: &CorpusBundle, window: usize) -> Result<WindowCounts> {
    count_windows_in(&bundle.tokenized, bundle.n_word(), window)
}

/// Windows are the spans `[k, k + window)` of each document; a document no
/// longer than the window is one window, an empty document contributes none.
pub fn count_windows_in(tokenized: &[Vec<usize>], n_word: usize, window: usize) -> Result<WindowCounts> {
    if window == 0 {
        return Err(Error::InvalidWindow(window));
    }
    let mut counts = WindowCounts {
        total: 0,
        word: vec![0; n_word],
        pair: BTreeMap::new(),
    };
    let mut members = Vec::with_capacity(window);
    for tokens in tokenized {
        if tokens.is_empty() {
            continue;
        }
        let n_windows = tokens.len().saturating_sub(window) + 1;
        for start in 0..n_windows {
            let end = (start + window).min(tokens.len());
            members.clear();
            members.extend_from_slice(&tokens[start..end]);
            members.sort_unstable();
            members.dedup();
            counts.total += 1;
            for (a, &i) in members.iter().enumerate() {
                if i >= n_word {
                    return Err(Error::Index(format!("token {i} outside vocabulary of {n_word}")));
                }
                counts.word[i] += 1;
                for &j in &members[a + 1..] {
                    *counts.pair.entry((i, j)).or_default() += 1;
                }
            }
        }
    }
    Ok(counts)
}

/// Positive PPMI over window counts, `ln(p(i,j) / (p(i) p(j)))`, keeping only
/// strictly positive values for distinct words.
pub fn compute_ppmi(counts: &WindowCounts) -> WordWordWeights {
    if counts.total == 0 {
        return Vec::new();
    }
    let total = counts.total as f64;
    counts
        .pair
        .iter()
        .filter(|(&(i, j), &c)| i != j && c > 0)
        .filter_map(|(&(i, j), &c)| {
            let p_ij = c as f64 / total;
            let p_i = counts.word[i] as f64 / total;
            let p_j = counts.word[j] as f64 / total;
            let pmi = (p_ij / (p_i * p_j)).ln();
            (pmi > 0.0).then_some((i, j, pmi))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeteroGraph {
    pub n_doc: usize,
    pub n_word: usize,
    /// Symmetric, both triangles stored.
    pub adjacency: SparseMatrix,
    pub normalized: bool,
}

impl HeteroGraph {
    pub fn n_nodes(&self) -> usize {
        self.n_doc + self.n_word
    }

    /// Undirected edge count: upper-triangle entries including self-loops.
    pub fn edge_count(&self) -> usize {
        self.adjacency.triplets().filter(|&(r, c, _)| r <= c).count()
    }

    pub fn edge_stats(&self) -> EdgeStats {
        let mut stats = EdgeStats::default();
        for (r, c, _) in self.adjacency.triplets().filter(|&(r, c, _)| r <= c) {
            if r == c {
                stats.self_loops += 1;
            } else if r < self.n_doc {
                stats.doc_word += 1;
            } else {
                stats.word_word += 1;
            }
        }
        stats
    }

    pub fn degrees(&self) -> Vec<f64> {
        self.adjacency.row_sums()
    }

    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update((self.n_doc as u64).to_le_bytes());
        hasher.update((self.n_word as u64).to_le_bytes());
        hasher.update([self.normalized as u8]);
        for (r, c, v) in self.adjacency.triplets() {
            hasher.update((r as u64).to_le_bytes());
            hasher.update((c as u64).to_le_bytes());
            hasher.update(v.to_bits().to_le_bytes());
        }
        hex::encode(hasher.finalize())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeStats {
    pub self_loops: usize,
    pub doc_word: usize,
    pub word_word: usize,
}

/// Raw adjacency: unit diagonal, mirrored TF-IDF blocks and the PPMI block.
pub fn assemble_adjacency(
    tfidf: &[(usize, usize, f64)],
    ppmi: &[(usize, usize, f64)],
    n_doc: usize,
    n_word: usize,
) -> Result<HeteroGraph> {
    let n = n_doc + n_word;
    let mut triplets = Vec::with_capacity(n + 2 * (tfidf.len() + ppmi.len()));
    triplets.extend((0..n).map(|i| (i, i, 1.0)));
    for &(doc, word, w) in tfidf {
        if doc >= n_doc || word >= n_word {
            return Err(Error::Index(format!(
                "tf-idf entry ({doc}, {word}) outside {n_doc}x{n_word}"
            )));
        }
        triplets.push((doc, n_doc + word, w));
        triplets.push((n_doc + word, doc, w));
    }
    for &(i, j, w) in ppmi {
        if i >= n_word || j >= n_word || i == j {
            return Err(Error::Index(format!(
                "ppmi entry ({i}, {j}) invalid for {n_word} words"
            )));
        }
        triplets.push((n_doc + i, n_doc + j, w));
        triplets.push((n_doc + j, n_doc + i, w));
    }
    Ok(HeteroGraph {
        n_doc,
        n_word,
        adjacency: SparseMatrix::from_triplets(n, n, triplets)?,
        normalized: false,
    })
}

/// `D^{-1/2} A D^{-1/2}` with `D_ii = Σ_j A_ij`.
pub fn normalize_adjacency(graph: &HeteroGraph) -> Result<HeteroGraph> {
    if graph.normalized {
        return Err(Error::Format("adjacency is already normalized".into()));
    }
    let degrees = graph.degrees();
    if let Some(i) = degrees.iter().position(|&d| d <= 0.0) {
        return Err(Error::ZeroDegree(i));
    }
    let adjacency = graph
        .adjacency
        .map_entries(|r, c, v| v / (degrees[r] * degrees[c]).sqrt());
    Ok(HeteroGraph {
        adjacency,
        normalized: true,
        ..graph.clone()
    })
}

/// Full raw graph for a corpus.
pub fn build_graph(bundle: &CorpusBundle, window: usize) -> Result<HeteroGraph> {
    let tfidf = compute_tf_idf(bundle);
    let counts = count_windows(bundle, window)?;
    let ppmi = compute_ppmi(&counts);
    assemble_adjacency(&tfidf, &ppmi, bundle.n_doc(), bundle.n_word())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphMeta {
    pub format_version: u32,
    pub n_doc: usize,
    pub n_word: usize,
    pub window_size: usize,
    pub min_df: usize,
    pub edge_count: usize,
    pub normalized: bool,
    pub corpus_hash: String,
}

impl GraphMeta {
    pub fn for_graph(graph: &HeteroGraph, window_size: usize, min_df: usize, corpus_hash: String) -> Self {
        Self {
            format_version: GRAPH_FORMAT_VERSION,
            n_doc: graph.n_doc,
            n_word: graph.n_word,
            window_size,
            min_df,
            edge_count: graph.edge_count(),
            normalized: graph.normalized,
            corpus_hash,
        }
    }
}

/// Writes `graph.json` and `edges.tsv` (upper triangle, one edge per line,
/// 17 significant digits) into `dir`.
pub fn write_graph(dir: impl AsRef<Path>, graph: &HeteroGraph, meta: &GraphMeta) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let meta_path = dir.join(META_FILE);
    let json = serde_json::to_string_pretty(meta).expect("meta serializes");
    fs::write(&meta_path, json + "\n").map_err(|e| Error::io(&meta_path, e))?;

    let edges_path = dir.join(EDGES_FILE);
    let file = fs::File::create(&edges_path).map_err(|e| Error::io(&edges_path, e))?;
    let mut out = std::io::BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        for (r, c, v) in graph.adjacency.triplets().filter(|&(r, c, _)| r <= c) {
            writeln!(out, "{r}\t{c}\t{v:.16e}")?;
        }
        out.flush()
    };
    write().map_err(|e| Error::io(&edges_path, e))
}

pub fn read_graph(dir: impl AsRef<Path>) -> Result<(HeteroGraph, GraphMeta)> {
    let dir = dir.as_ref();
    let meta_path = dir.join(META_FILE);
    let text = fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
    let meta: GraphMeta =
        serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", meta_path.display())))?;
    if meta.format_version != GRAPH_FORMAT_VERSION {
        return Err(Error::Version(format!("graph format {}", meta.format_version)));
    }

    let edges_path = dir.join(EDGES_FILE);
    let text = fs::read_to_string(&edges_path).map_err(|e| Error::io(&edges_path, e))?;
    let n = meta.n_doc + meta.n_word;
    let mut triplets = Vec::new();
    let mut edges = 0;
    for (i, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let bad = || Error::Format(format!("{}:{}: malformed edge `{line}`", edges_path.display(), i + 1));
        let mut parts = line.split('\t');
        let (Some(r), Some(c), Some(v), None) = (parts.next(), parts.next(), parts.next(), parts.next()) else {
            return Err(bad());
        };
        let r: usize = r.parse().map_err(|_| bad())?;
        let c: usize = c.parse().map_err(|_| bad())?;
        let v: f64 = v.parse().map_err(|_| bad())?;
        if r > c || !v.is_finite() || v <= 0.0 {
            return Err(bad());
        }
        triplets.push((r, c, v));
        if r != c {
            triplets.push((c, r, v));
        }
        edges += 1;
    }
    if edges != meta.edge_count {
        return Err(Error::Format(format!(
            "metadata declares {} edges, file has {edges}",
            meta.edge_count
        )));
    }
    let graph = HeteroGraph {
        n_doc: meta.n_doc,
        n_word: meta.n_word,
        adjacency: SparseMatrix::from_triplets(n, n, triplets)?,
        normalized: meta.normalized,
    };
    Ok((graph, meta))
}
