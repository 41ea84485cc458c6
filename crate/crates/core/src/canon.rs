//! Canonical labeling by partition refinement and individualization.
//!
//! Each connected component is labeled separately: vertices are split into
//! cells by iterated degree refinement, the first smallest non-singleton cell
//! is individualized one vertex at a time, and the leaf whose relabeled upper
//! triangle is lexicographically smallest wins. Twin vertices (identical
//! neighborhoods apart from each other) are interchangeable by an
//! automorphism, so only one member of each twin class is branched on.

use std::fmt;

use crate::graph::Graph;

/// Bytes that identify an isomorphism class.
///
/// The encoding is a sequence of components sorted by their own key, each
/// written as a two-byte big-endian length followed by its vertex count and
/// packed adjacency bits. The empty graph maps to the empty byte string.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Debug for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalKey(")?;
        for b in &self.0 {
            write!(f, "{b:02x}")?;
        }
        write!(f, ")")
    }
}

/// Returns the key and the canonical vertex order of `g`.
pub(crate) fn canonical_form(g: &Graph) -> (CanonicalKey, Vec<usize>) {
    let mut parts: Vec<(Vec<u8>, Vec<usize>)> = g
        .connected_components()
        .into_iter()
        .map(|comp| {
            let sub = g.induced_subgraph(&comp);
            let (bytes, order) = canonical_connected(&sub);
            (bytes, order.into_iter().map(|i| comp[i]).collect())
        })
        .collect();
    parts.sort_by(|a, b| a.0.cmp(&b.0));
    let mut key = Vec::new();
    let mut order = Vec::with_capacity(g.vertex_count());
    for (bytes, o) in parts {
        key.extend_from_slice(&(bytes.len() as u16).to_be_bytes());
        key.extend_from_slice(&bytes);
        order.extend(o);
    }
    (CanonicalKey(key), order)
}

struct Search<'a> {
    n: usize,
    rows: &'a [u64],
    best: Option<(Vec<u8>, Vec<usize>)>,
}

fn canonical_connected(g: &Graph) -> (Vec<u8>, Vec<usize>) {
    let n = g.vertex_count();
    assert!(n <= 64, "canonical labeling supports at most 64 vertices per component");
    let rows: Vec<u64> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u64, |m, &w| m | 1 << w))
        .collect();
    let mut search = Search { n, rows: &rows, best: None };
    search.descend(vec![(0..n).collect()]);
    search.best.expect("search visits at least one leaf")
}

impl Search<'_> {
    fn adjacent(&self, u: usize, v: usize) -> bool {
        self.rows[u] >> v & 1 == 1
    }

    fn twins(&self, u: usize, v: usize) -> bool {
        (self.rows[u] & !(1 << v)) == (self.rows[v] & !(1 << u))
    }

    fn descend(&mut self, partition: Vec<Vec<usize>>) {
        let partition = self.refine(partition);
        let target = partition
            .iter()
            .enumerate()
            .filter(|(_, c)| c.len() > 1)
            .min_by_key(|(i, c)| (c.len(), *i))
            .map(|(i, _)| i);
        let Some(target) = target else {
            self.leaf(partition.into_iter().map(|c| c[0]).collect());
            return;
        };
        let cell = &partition[target];
        let mut tried: Vec<usize> = Vec::new();
        for &v in cell {
            if tried.iter().any(|&u| self.twins(u, v)) {
                continue;
            }
            tried.push(v);
            let rest: Vec<usize> = cell.iter().copied().filter(|&w| w != v).collect();
            let mut next = Vec::with_capacity(partition.len() + 1);
            next.extend_from_slice(&partition[..target]);
            next.push(vec![v]);
            next.push(rest);
            next.extend_from_slice(&partition[target + 1..]);
            self.descend(next);
        }
    }

    /// Splits cells by neighbor counts into every cell until stable.
    fn refine(&self, mut partition: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
        let mut cell_of = vec![0usize; self.n];
        loop {
            for (i, cell) in partition.iter().enumerate() {
                for &v in cell {
                    cell_of[v] = i;
                }
            }
            let cells = partition.len();
            let mut next = Vec::with_capacity(cells);
            for cell in &partition {
                if cell.len() == 1 {
                    next.push(cell.clone());
                    continue;
                }
                let mut keyed: Vec<(Vec<u8>, usize)> = cell
                    .iter()
                    .map(|&v| {
                        let mut counts = vec![0u8; cells];
                        for w in 0..self.n {
                            if self.adjacent(v, w) {
                                counts[cell_of[w]] += 1;
                            }
                        }
                        (counts, v)
                    })
                    .collect();
                keyed.sort();
                let mut start = 0;
                for i in 1..=keyed.len() {
                    if i == keyed.len() || keyed[i].0 != keyed[start].0 {
                        next.push(keyed[start..i].iter().map(|(_, v)| *v).collect());
                        start = i;
                    }
                }
            }
            if next.len() == cells {
                return next;
            }
            partition = next;
        }
    }

    fn leaf(&mut self, order: Vec<usize>) {
        let n = self.n;
        let mut bytes = vec![n as u8];
        let mut acc = 0u8;
        let mut filled = 0;
        for j in 1..n {
            for i in 0..j {
                acc = acc << 1 | self.adjacent(order[i], order[j]) as u8;
                filled += 1;
                if filled == 8 {
                    bytes.push(acc);
                    acc = 0;
                    filled = 0;
                }
            }
        }
        if filled > 0 {
            bytes.push(acc << (8 - filled));
        }
        match &self.best {
            Some((b, _)) if *b <= bytes => {}
            _ => self.best = Some((bytes, order)),
        }
    }
}
