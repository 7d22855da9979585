//! Seeded generator for a separable benchmark corpus: every class owns a set
//! of exclusive tokens and all classes share a pool of noise tokens.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::Document;

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticConfig {
    pub documents: usize,
    pub classes: usize,
    pub exclusive_per_class: usize,
    pub shared: usize,
    pub min_len: usize,
    pub max_len: usize,
    /// Probability that a token is drawn from the document's class tokens
    /// rather than the shared pool.
    pub class_token_prob: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            documents: 300,
            classes: 2,
            exclusive_per_class: 15,
            shared: 10,
            min_len: 10,
            max_len: 30,
            class_token_prob: 0.5,
            seed: 42,
        }
    }
}

/// Labeled documents with no split assigned.
pub fn generate(config: &SyntheticConfig) -> Vec<Document> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    (0..config.documents)
        .map(|i| {
            let label = rng.random_range(0..config.classes);
            let len = rng.random_range(config.min_len..=config.max_len);
            let tokens: Vec<String> = (0..len)
                .map(|_| {
                    if rng.random::<f64>() < config.class_token_prob {
                        format!("c{label}t{}", rng.random_range(0..config.exclusive_per_class))
                    } else {
                        format!("noise{}", rng.random_range(0..config.shared))
                    }
                })
                .collect();
            Document::new(format!("syn{i:04}"), tokens.join(" ")).with_label(label)
        })
        .collect()
}
