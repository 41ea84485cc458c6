//! Scaffolds and ring systems.
//!
//! A scaffold keeps every cyclic vertex plus the acyclic vertices directly
//! adjacent to one; a ring system keeps the cyclic vertices only. Both are
//! induced subgraphs split into connected components, and a fully acyclic
//! graph has neither.

use std::collections::BTreeSet;

use crate::graph::{CanonicalKey, Graph};

pub fn scaffold_of(g: &Graph) -> Vec<Graph> {
    let cyclic = g.cyclic_vertices();
    let mut keep = cyclic.clone();
    for &v in &cyclic {
        keep.extend(g.neighbors(v).iter().copied());
    }
    split(g, &keep)
}

pub fn ring_system_of(g: &Graph) -> Vec<Graph> {
    split(g, &g.cyclic_vertices())
}

fn split(g: &Graph, keep: &BTreeSet<usize>) -> Vec<Graph> {
    if keep.is_empty() {
        return Vec::new();
    }
    let kept: Vec<usize> = keep.iter().copied().collect();
    let sub = g.induced_subgraph(&kept);
    sub.connected_components()
        .into_iter()
        .map(|comp| sub.induced_subgraph(&comp))
        .collect()
}

/// Distinct canonical keys of graphs, scaffolds and ring systems.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UniqueCounts {
    pub graph_keys: BTreeSet<CanonicalKey>,
    pub scaffold_keys: BTreeSet<CanonicalKey>,
    pub ring_keys: BTreeSet<CanonicalKey>,
}

pub fn unique_counts<'a>(graphs: impl IntoIterator<Item = &'a Graph>) -> UniqueCounts {
    let mut out = UniqueCounts::default();
    for g in graphs {
        out.graph_keys.insert(g.canonical_key());
        out.scaffold_keys.extend(scaffold_of(g).iter().map(Graph::canonical_key));
        out.ring_keys.extend(ring_system_of(g).iter().map(Graph::canonical_key));
    }
    out
}
