//! Transductive text classification over a heterogeneous word-document graph.
//!
//! The pipeline builds a corpus graph (TF-IDF document-word edges, windowed
//! PPMI word-word edges), initializes document nodes from fixed embeddings,
//! and trains a two-layer GCN whose predictions are interpolated with a
//! linear head over the same embeddings.
//!
//! ```text
//! corpus ──► graph ──► normalized adjacency ─┐
//!    │                                       ├──► model ──► trainer ──► metrics
//!    └────► embeddings ──► feature matrix ───┘
//! ```

pub mod baselines;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod metrics;
pub mod model;
pub mod synthetic;
pub mod trainer;

pub use error::{Error, Result};
