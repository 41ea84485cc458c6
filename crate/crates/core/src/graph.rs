//! Simple undirected graphs and the structural queries every other module
//! builds on.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::canon;
pub use crate::canon::CanonicalKey;

/// Largest vertex count handled by the codecs (single-byte graph6 header).
pub const MAX_VERTICES: usize = 62;

/// Largest `n` accepted by [`enumerate_graphs`].
pub const MAX_ENUMERATION_ORDER: usize = 6;

const RANDOM_GRAPH_RETRIES: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("edge ({u}, {v}) has an endpoint outside 0..{n}")]
    OutOfRange { u: usize, v: usize, n: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("not a permutation of 0..{0}")]
    NotAPermutation(usize),
    #[error("cannot enumerate graphs on {0} vertices (limit {MAX_ENUMERATION_ORDER})")]
    TooLarge(usize),
    #[error("no graph satisfies the constraints after {RANDOM_GRAPH_RETRIES} attempts")]
    Infeasible,
}

/// An undirected, unweighted simple graph on vertices `0..vertex_count`.
///
/// Adjacency lists are kept sorted, so two graphs compare equal exactly when
/// their labeled edge sets are equal.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// A graph with `n` vertices and no edges.
    pub fn empty(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n] }
    }

    pub fn from_edge_list(n: usize, pairs: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Graph::empty(n);
        for &(u, v) in pairs {
            if u >= n || v >= n {
                return Err(GraphError::OutOfRange { u, v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Adds a vertex and returns its index.
    pub fn add_vertex(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    /// Inserts `{u, v}`; returns false if the edge was already present.
    ///
    /// Panics on self-loops or out-of-range endpoints, which are programming
    /// errors for internal callers; use [`Graph::from_edge_list`] for
    /// untrusted input.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        assert!(u != v, "self-loop on vertex {u}");
        match self.adj[u].binary_search(&v) {
            Ok(_) => false,
            Err(pos) => {
                self.adj[u].insert(pos, v);
                let pos = self.adj[v].binary_search(&u).unwrap_err();
                self.adj[v].insert(pos, u);
                true
            }
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.adj.len() && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Graph, GraphError> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        if perm.len() != n {
            return Err(GraphError::NotAPermutation(n));
        }
        for &p in perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(GraphError::NotAPermutation(n));
            }
        }
        let mut out = Graph::empty(n);
        for (u, v) in self.edges() {
            out.add_edge(perm[u], perm[v]);
        }
        Ok(out)
    }

    /// The subgraph induced by `vertices`, relabeled `0..k` in the given order.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.vertex_count()];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let mut out = Graph::empty(vertices.len());
        for (i, &v) in vertices.iter().enumerate() {
            for &w in &self.adj[v] {
                let j = index[w];
                if j != usize::MAX && i < j {
                    out.add_edge(i, j);
                }
            }
        }
        out
    }

    pub fn canonical_key(&self) -> CanonicalKey {
        canon::canonical_form(self).0
    }

    /// Vertex order of the canonical labeling: entry `i` is the original
    /// vertex that receives canonical label `i`.
    pub fn canonical_order(&self) -> Vec<usize> {
        canon::canonical_form(self).1
    }

    pub fn is_isomorphic(&self, other: &Graph) -> bool {
        if self.vertex_count() != other.vertex_count() || self.edge_count() != other.edge_count() {
            return false;
        }
        let mut a = self.degree_sequence();
        let mut b = other.degree_sequence();
        a.sort_unstable();
        b.sort_unstable();
        a == b && self.canonical_key() == other.canonical_key()
    }

    /// Maximal connected vertex sets, each sorted, ordered by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![start];
            comp[start] = id;
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for &w in &self.adj[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        members.push(w);
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() <= 1
    }

    /// Vertices lying on at least one cycle.
    ///
    /// An edge lies on a cycle iff it is not a bridge, so the cyclic vertices
    /// are the endpoints of non-bridge edges.
    pub fn cyclic_vertices(&self) -> BTreeSet<usize> {
        let bridges = self.bridges();
        self.edges()
            .filter(|e| !bridges.contains(e))
            .flat_map(|(u, v)| [u, v])
            .collect()
    }

    /// Bridges as `(u, v)` with `u < v` (iterative lowlink DFS).
    pub fn bridges(&self) -> BTreeSet<(usize, usize)> {
        let n = self.vertex_count();
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut out = BTreeSet::new();
        let mut timer = 0;
        for root in 0..n {
            if disc[root] != usize::MAX {
                continue;
            }
            // (vertex, parent, next neighbor position)
            let mut stack = vec![(root, usize::MAX, 0usize)];
            disc[root] = timer;
            low[root] = timer;
            timer += 1;
            while let Some(&mut (v, parent, ref mut pos)) = stack.last_mut() {
                if let Some(&w) = self.adj[v].get(*pos) {
                    *pos += 1;
                    if w == parent {
                        continue;
                    }
                    if disc[w] == usize::MAX {
                        disc[w] = timer;
                        low[w] = timer;
                        timer += 1;
                        stack.push((w, v, 0));
                    } else {
                        low[v] = low[v].min(disc[w]);
                    }
                } else {
                    stack.pop();
                    if parent != usize::MAX {
                        low[parent] = low[parent].min(low[v]);
                        if low[v] > disc[parent] {
                            out.insert((parent.min(v), parent.max(v)));
                        }
                    }
                }
            }
        }
        out
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges=", self.vertex_count())?;
        f.debug_list().entries(self.edges()).finish()?;
        write!(f, ")")
    }
}

/// One representative per isomorphism class of graphs on `n` vertices,
/// ordered by edge count and then canonical key.
pub fn enumerate_graphs(n: usize) -> Result<Vec<Graph>, GraphError> {
    if n > MAX_ENUMERATION_ORDER {
        return Err(GraphError::TooLarge(n));
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|v| (0..v).map(move |u| (u, v))).collect();
    let mut classes = std::collections::BTreeMap::new();
    for mask in 0u32..(1u32 << pairs.len()) {
        let mut g = Graph::empty(n);
        for (bit, &(u, v)) in pairs.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                g.add_edge(u, v);
            }
        }
        classes
            .entry((g.edge_count(), g.canonical_key()))
            .or_insert(g);
    }
    Ok(classes.into_values().collect())
}

/// Parameters for [`random_graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomGraphSpec {
    pub min_vertices: usize,
    pub max_vertices: usize,
    pub max_degree: usize,
    pub connected: bool,
}

/// A seeded random simple graph with every degree at most `max_degree`.
///
/// Connected graphs start from a uniform labeled spanning tree (Prüfer code,
/// rejected while it violates the degree cap); up to `n / 3` further edges
/// are then attempted between random vertex pairs with spare degree.
pub fn random_graph(spec: RandomGraphSpec, seed: u64) -> Result<Graph, GraphError> {
    let RandomGraphSpec { min_vertices, max_vertices, max_degree, connected } = spec;
    if max_degree == 0 || min_vertices > max_vertices || max_vertices > MAX_VERTICES {
        return Err(GraphError::Infeasible);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(min_vertices..=max_vertices);
    if connected && n > 2 && max_degree < 2 {
        return Err(GraphError::Infeasible);
    }
    let mut g = None;
    if connected {
        for _ in 0..RANDOM_GRAPH_RETRIES {
            let tree = random_tree(n, &mut rng);
            if tree.max_degree() <= max_degree {
                g = Some(tree);
                break;
            }
        }
    } else {
        g = Some(Graph::empty(n));
    }
    let mut g = g.ok_or(GraphError::Infeasible)?;
    let extra = if connected {
        rng.gen_range(0..=n / 3)
    } else {
        rng.gen_range(0..=n + n / 3)
    };
    let mut added = 0;
    let mut attempts = 0;
    while added < extra && attempts < RANDOM_GRAPH_RETRIES && n >= 2 {
        attempts += 1;
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v || g.has_edge(u, v) || g.degree(u) >= max_degree || g.degree(v) >= max_degree {
            continue;
        }
        g.add_edge(u, v);
        added += 1;
    }
    Ok(g)
}

fn random_tree(n: usize, rng: &mut impl Rng) -> Graph {
    let mut g = Graph::empty(n);
    if n < 2 {
        return g;
    }
    if n == 2 {
        g.add_edge(0, 1);
        return g;
    }
    let code: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &c in &code {
        degree[c] += 1;
    }
    let mut leaves: BTreeSet<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    for &c in &code {
        let leaf = leaves.pop_first().expect("a Prüfer code always leaves a leaf");
        g.add_edge(leaf, c);
        degree[c] -= 1;
        if degree[c] == 1 {
            leaves.insert(c);
        }
    }
    let last: Vec<usize> = leaves.into_iter().collect();
    g.add_edge(last[0], last[1]);
    g
}

/// A uniformly random permutation of `0..n`.
pub fn random_permutation(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    perm
}
