//! Training corpora: one canonical string per graph, or k randomized
//! serializations per graph deduplicated per source graph.

use std::collections::BTreeSet;
use std::io::{self, Write};

use crate::g6;
use crate::graph::Graph;
use crate::lgi::{self, Order};
use crate::seed::derive_seed;
use crate::validity::FormatKind;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AugmentError {
    #[error("no graphs to build a corpus from")]
    Empty,
    #[error("augmentation factor must be at least 1")]
    ZeroFactor,
    #[error("graph {graph_id}: {source}")]
    Lgi { graph_id: usize, source: lgi::WriteError },
    #[error("graph {graph_id}: {source}")]
    G6 { graph_id: usize, source: g6::TooLarge },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusMode {
    Canonical,
    /// `k` randomization attempts per graph, then deduplication.
    Augmented(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub text: String,
    pub graph_id: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub entries: Vec<CorpusEntry>,
    pub mode: CorpusMode,
    pub format: FormatKind,
}

impl Corpus {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn strings(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.text.as_str())
    }

    /// One string per line.
    pub fn write_strings(&self, mut out: impl Write) -> io::Result<()> {
        for e in &self.entries {
            writeln!(out, "{}", e.text)?;
        }
        Ok(())
    }

    /// CSV mapping 1-based line numbers of [`Corpus::write_strings`] output
    /// to source graph ids.
    pub fn write_sidecar(&self, mut out: impl Write) -> io::Result<()> {
        writeln!(out, "line,graph_id")?;
        for (i, e) in self.entries.iter().enumerate() {
            writeln!(out, "{},{}", i + 1, e.graph_id)?;
        }
        Ok(())
    }
}

fn serialize(g: &Graph, graph_id: usize, format: FormatKind, order: Order) -> Result<String, AugmentError> {
    match (format, order) {
        (FormatKind::Lgi, order) => {
            lgi::write_lgi(g, order).map_err(|source| AugmentError::Lgi { graph_id, source })
        }
        (FormatKind::G6, Order::Canonical) => {
            g6::canonical_g6(g).map_err(|source| AugmentError::G6 { graph_id, source })
        }
        (FormatKind::G6, Order::Randomized(seed)) => {
            g6::randomize_graph_g6(g, seed).map_err(|source| AugmentError::G6 { graph_id, source })
        }
    }
}

/// The distinct strings produced by `k` randomized serializations of `g`.
pub fn augment_graph(g: &Graph, k: usize, seed: u64, format: FormatKind) -> Result<BTreeSet<String>, AugmentError> {
    augment_one(g, 0, k, seed, format)
}

fn augment_one(g: &Graph, graph_id: usize, k: usize, seed: u64, format: FormatKind) -> Result<BTreeSet<String>, AugmentError> {
    if k == 0 {
        return Err(AugmentError::ZeroFactor);
    }
    (0..k as u64)
        .map(|attempt| serialize(g, graph_id, format, Order::Randomized(derive_seed(seed, "attempt", attempt))))
        .collect()
}

/// Builds a corpus ordered by graph id, then by string.
pub fn build_corpus(graphs: &[Graph], mode: CorpusMode, seed: u64, format: FormatKind) -> Result<Corpus, AugmentError> {
    if graphs.is_empty() {
        return Err(AugmentError::Empty);
    }
    let mut entries = Vec::new();
    for (graph_id, g) in graphs.iter().enumerate() {
        match mode {
            CorpusMode::Canonical => entries.push(CorpusEntry {
                text: serialize(g, graph_id, format, Order::Canonical)?,
                graph_id,
            }),
            CorpusMode::Augmented(k) => {
                let graph_seed = derive_seed(seed, "augment", graph_id as u64);
                for text in augment_one(g, graph_id, k, graph_seed, format)? {
                    entries.push(CorpusEntry { text, graph_id });
                }
            }
        }
    }
    Ok(Corpus { entries, mode, format })
}
