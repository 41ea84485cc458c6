//! Linear graph input (LGI): a SMILES-style depth-first notation for
//! unweighted undirected graphs.
//!
//! | characters          | meaning                                   |
//! |---------------------|-------------------------------------------|
//! | `@ A B C D E F`     | a vertex of degree 0 through 6            |
//! | `1`..`9`, `%10`..`%99` | ring-closure index, always paired      |
//! | `(` `)`             | branch open / close                       |
//! | `.`                 | separator between connected components    |
//!
//! Every vertex character bonds to the vertex written before it on the
//! current branch. Ring indices follow their vertex character directly and
//! join the two vertices that carry the same index; an index is free for
//! reuse as soon as it has been closed.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;
use crate::validity::{Failure, ValidityReport};

/// Degree characters, indexed by degree.
pub const DEGREE_CHARS: [char; 7] = ['@', 'A', 'B', 'C', 'D', 'E', 'F'];

pub const MAX_DEGREE: usize = 6;

pub const MAX_RING_INDEX: u8 = 99;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LgiToken {
    Degree(u8),
    RingRef(u8),
    BranchOpen,
    BranchClose,
    Dot,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WriteError {
    #[error("vertex {vertex} has degree {degree}; LGI encodes at most {MAX_DEGREE}")]
    DegreeOverflow { vertex: usize, degree: usize },
    #[error("more than {MAX_RING_INDEX} ring closures open at once")]
    RingIndexOverflow,
}

/// Vertex visiting order used by [`write_lgi`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    /// Depth-first from the lowest canonical label, lowest label first.
    Canonical,
    /// Random component order, random root per component, and a freshly
    /// shuffled neighbor order at every vertex.
    Randomized(u64),
}

pub fn degree_of(ch: char) -> Option<u8> {
    DEGREE_CHARS.iter().position(|&c| c == ch).map(|d| d as u8)
}

/// Splits `text` into positioned tokens, stopping at the first lexical error.
pub fn tokenize(text: &str) -> Result<Vec<(usize, LgiToken)>, Failure> {
    let (tokens, failures) = tokenize_lenient(text);
    match failures.into_iter().next() {
        Some(f) => Err(f),
        None => Ok(tokens),
    }
}

fn tokenize_lenient(text: &str) -> (Vec<(usize, LgiToken)>, Vec<Failure>) {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::with_capacity(chars.len());
    let mut failures = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        let token = match ch {
            '(' => Some(LgiToken::BranchOpen),
            ')' => Some(LgiToken::BranchClose),
            '.' => Some(LgiToken::Dot),
            '1'..='9' => Some(LgiToken::RingRef(ch as u8 - b'0')),
            '%' => {
                let digits: Option<u8> = match (chars.get(i + 1), chars.get(i + 2)) {
                    (Some(a), Some(b)) if a.is_ascii_digit() && b.is_ascii_digit() => {
                        Some((*a as u8 - b'0') * 10 + (*b as u8 - b'0'))
                    }
                    _ => None,
                };
                match digits {
                    Some(index) if index > 0 => {
                        tokens.push((i, LgiToken::RingRef(index)));
                        i += 3;
                        continue;
                    }
                    _ => None,
                }
            }
            _ => degree_of(ch).map(LgiToken::Degree),
        };
        match token {
            Some(t) => tokens.push((i, t)),
            None => failures.push(Failure::LexicalError { position: i, ch }),
        }
        i += 1;
    }
    (tokens, failures)
}

/// Result of the tolerant depth-first reconstruction shared by the parser
/// and the validity checker.
pub(crate) struct Reconstruction {
    pub graph: Graph,
    pub declared: Vec<usize>,
    /// Structural failures followed by degree mismatches.
    pub failures: Vec<Failure>,
    structural: usize,
}

pub(crate) fn reconstruct(text: &str) -> Reconstruction {
    let (tokens, mut failures) = tokenize_lenient(text);
    let mut graph = Graph::empty(0);
    let mut declared = Vec::new();
    if text.is_empty() {
        failures.push(Failure::Syntax { position: 0, reason: "empty string" });
    }

    let mut current: Option<usize> = None;
    let mut branches: Vec<(usize, Option<usize>)> = Vec::new();
    let mut open_rings: BTreeMap<u8, usize> = BTreeMap::new();
    let mut previous: Option<LgiToken> = None;

    for &(position, token) in &tokens {
        match token {
            LgiToken::Degree(d) => {
                let v = graph.add_vertex();
                declared.push(d as usize);
                if let Some(c) = current {
                    graph.add_edge(c, v);
                }
                current = Some(v);
            }
            LgiToken::RingRef(index) => {
                let Some(v) = current.filter(|_| {
                    matches!(previous, Some(LgiToken::Degree(_) | LgiToken::RingRef(_)))
                }) else {
                    failures.push(Failure::Syntax {
                        position,
                        reason: "ring index must follow a vertex character",
                    });
                    previous = Some(token);
                    continue;
                };
                match open_rings.remove(&index) {
                    None => {
                        open_rings.insert(index, v);
                    }
                    Some(u) if u == v => failures.push(Failure::SelfLoop { position, index }),
                    Some(u) => {
                        if !graph.add_edge(u, v) {
                            failures.push(Failure::DuplicateEdge { position, u, v });
                        }
                    }
                }
            }
            LgiToken::BranchOpen => {
                if current.is_none() || matches!(previous, Some(LgiToken::BranchOpen)) {
                    failures.push(Failure::Syntax {
                        position,
                        reason: "branch must follow a vertex",
                    });
                }
                branches.push((position, current));
            }
            LgiToken::BranchClose => {
                if matches!(previous, Some(LgiToken::BranchOpen)) {
                    failures.push(Failure::Syntax { position, reason: "empty branch" });
                }
                match branches.pop() {
                    Some((_, back)) => current = back,
                    None => failures.push(Failure::UnmatchedBracket { position }),
                }
            }
            LgiToken::Dot => {
                if !matches!(previous, Some(LgiToken::Degree(_) | LgiToken::RingRef(_) | LgiToken::BranchClose)) {
                    failures.push(Failure::Syntax {
                        position,
                        reason: "component separator must follow a component",
                    });
                }
                for (open, _) in branches.drain(..) {
                    failures.push(Failure::UnmatchedBracket { position: open });
                }
                for (index, _) in std::mem::take(&mut open_rings) {
                    failures.push(Failure::UnmatchedRingIndex { index });
                }
                current = None;
            }
        }
        previous = Some(token);
    }
    if matches!(previous, Some(LgiToken::Dot)) {
        failures.push(Failure::Syntax {
            position: text.chars().count() - 1,
            reason: "trailing component separator",
        });
    }
    for (open, _) in branches {
        failures.push(Failure::UnmatchedBracket { position: open });
    }
    for index in open_rings.into_keys() {
        failures.push(Failure::UnmatchedRingIndex { index });
    }

    let structural = failures.len();
    for (vertex, &d) in declared.iter().enumerate() {
        let actual = graph.degree(vertex);
        if actual != d {
            failures.push(Failure::DegreeMismatch { vertex, declared: d, actual });
        }
    }
    Reconstruction { graph, declared, failures, structural }
}

/// Rebuilds the graph described by an LGI string.
///
/// Declared degrees are not enforced here; see [`check_lgi_validity`].
pub fn parse_lgi(text: &str) -> Result<Graph, Failure> {
    let r = reconstruct(text);
    match r.failures.into_iter().take(r.structural).next() {
        Some(f) => Err(f),
        None => Ok(r.graph),
    }
}

/// Reports every problem with `text`: lexical, bracket and ring pairing,
/// duplicate edges, and vertices whose character disagrees with their
/// reconstructed degree.
pub fn check_lgi_validity(text: &str) -> ValidityReport {
    ValidityReport { failures: reconstruct(text).failures }
}

/// The degree declared by each vertex character, in string order.
pub fn declared_degrees(text: &str) -> Vec<usize> {
    reconstruct(text).declared
}

/// Serializes `g` in the requested order. The graph with no vertices
/// serializes to the empty string, which the parser rejects.
pub fn write_lgi(g: &Graph, order: Order) -> Result<String, WriteError> {
    for v in 0..g.vertex_count() {
        if g.degree(v) > MAX_DEGREE {
            return Err(WriteError::DegreeOverflow { vertex: v, degree: g.degree(v) });
        }
    }
    match order {
        Order::Canonical => {
            let order = g.canonical_order();
            let mut label = vec![0; order.len()];
            for (l, &v) in order.iter().enumerate() {
                label[v] = l;
            }
            // The canonical order lists components contiguously.
            let mut roots = Vec::new();
            let mut seen = vec![false; g.vertex_count()];
            for &v in &order {
                if !seen[v] {
                    roots.push(v);
                    mark_component(g, v, &mut seen);
                }
            }
            emit(g, &roots, |_, ns: &mut Vec<usize>| ns.sort_by_key(|&w| label[w]))
        }
        Order::Randomized(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut components = g.connected_components();
            components.shuffle(&mut rng);
            let roots: Vec<usize> = components
                .iter()
                .map(|c| c[rng.gen_range(0..c.len())])
                .collect();
            emit(g, &roots, |_, ns: &mut Vec<usize>| ns.shuffle(&mut rng))
        }
    }
}

pub fn canonical_lgi(g: &Graph) -> Result<String, WriteError> {
    write_lgi(g, Order::Canonical)
}

fn mark_component(g: &Graph, start: usize, seen: &mut [bool]) {
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(v) = stack.pop() {
        for &w in g.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
}

/// Depth-first serialization of the components rooted at `roots`, with
/// `arrange` fixing the neighbor order of each vertex when it is entered.
fn emit(
    g: &Graph,
    roots: &[usize],
    mut arrange: impl FnMut(usize, &mut Vec<usize>),
) -> Result<String, WriteError> {
    let n = g.vertex_count();
    let mut preorder = Vec::with_capacity(n);
    let mut position = vec![usize::MAX; n];
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut on_path = vec![false; n];
    // ring bonds as (ancestor, descendant)
    let mut rings: Vec<(usize, usize)> = Vec::new();

    for &root in roots {
        let mut stack: Vec<(usize, usize, Vec<usize>, usize)> = Vec::new();
        let enter = |v: usize, parent: usize, stack: &mut Vec<_>, preorder: &mut Vec<usize>,
                     position: &mut Vec<usize>, on_path: &mut Vec<bool>,
                     arrange: &mut dyn FnMut(usize, &mut Vec<usize>)| {
            position[v] = preorder.len();
            preorder.push(v);
            on_path[v] = true;
            let mut ns = g.neighbors(v).to_vec();
            arrange(v, &mut ns);
            stack.push((v, parent, ns, 0));
        };
        enter(root, usize::MAX, &mut stack, &mut preorder, &mut position, &mut on_path, &mut arrange);
        while let Some(top) = stack.last_mut() {
            let (v, parent) = (top.0, top.1);
            if top.3 == top.2.len() {
                on_path[v] = false;
                stack.pop();
                continue;
            }
            let w = top.2[top.3];
            top.3 += 1;
            if w == parent {
                continue;
            }
            if position[w] == usize::MAX {
                children[v].push(w);
                enter(w, v, &mut stack, &mut preorder, &mut position, &mut on_path, &mut arrange);
            } else if on_path[w] {
                rings.push((w, v));
            }
        }
    }

    // Ring labels, allocated in string order: lowest free index per opening,
    // closings freed only after the vertex's own openings are assigned.
    let mut openings: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut closings: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (bond, &(a, d)) in rings.iter().enumerate() {
        openings[a].push(bond);
        closings[d].push(bond);
    }
    let mut bond_label = vec![0u8; rings.len()];
    let mut in_use = [false; MAX_RING_INDEX as usize + 1];
    let mut labels: Vec<Vec<u8>> = vec![Vec::new(); n];
    for &v in &preorder {
        openings[v].sort_by_key(|&b| position[rings[b].1]);
        for &b in &openings[v] {
            let free = (1..=MAX_RING_INDEX)
                .find(|&i| !in_use[i as usize])
                .ok_or(WriteError::RingIndexOverflow)?;
            in_use[free as usize] = true;
            bond_label[b] = free;
            labels[v].push(free);
        }
        for &b in &closings[v] {
            in_use[bond_label[b] as usize] = false;
            labels[v].push(bond_label[b]);
        }
        labels[v].sort_unstable();
    }

    enum Work {
        Enter(usize),
        Text(char),
    }
    let mut out = String::with_capacity(2 * n);
    for (i, &root) in roots.iter().enumerate() {
        if i > 0 {
            out.push('.');
        }
        let mut work = vec![Work::Enter(root)];
        while let Some(item) = work.pop() {
            let v = match item {
                Work::Text(c) => {
                    out.push(c);
                    continue;
                }
                Work::Enter(v) => v,
            };
            out.push(DEGREE_CHARS[g.degree(v)]);
            for &l in &labels[v] {
                if l < 10 {
                    out.push((b'0' + l) as char);
                } else {
                    out.push('%');
                    out.push((b'0' + l / 10) as char);
                    out.push((b'0' + l % 10) as char);
                }
            }
            if let Some((&last, rest)) = children[v].split_last() {
                work.push(Work::Enter(last));
                for &c in rest.iter().rev() {
                    work.push(Work::Text(')'));
                    work.push(Work::Enter(c));
                    work.push(Work::Text('('));
                }
            }
        }
    }
    Ok(out)
}

/// Every distinct string reachable by [`write_lgi`] with randomized order,
/// found by exhaustive search over roots and neighbor orders. Intended for
/// small graphs only; the search is factorial in the degrees.
pub fn all_serializations(g: &Graph) -> std::collections::BTreeSet<String> {
    fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
        if items.len() <= 1 {
            return vec![items.to_vec()];
        }
        let mut out = Vec::new();
        for i in 0..items.len() {
            let mut rest = items.to_vec();
            let head = rest.remove(i);
            for mut p in permutations(&rest) {
                p.insert(0, head);
                out.push(p);
            }
        }
        out
    }

    let n = g.vertex_count();
    let choices: Vec<Vec<Vec<usize>>> = (0..n).map(|v| permutations(g.neighbors(v))).collect();
    let components = g.connected_components();
    let mut out = std::collections::BTreeSet::new();
    let total: usize = choices.iter().map(Vec::len).product();
    for comp_order in permutations(&(0..components.len()).collect::<Vec<_>>()) {
        let root_sets: Vec<&Vec<usize>> = comp_order.iter().map(|&c| &components[c]).collect();
        let root_total: usize = root_sets.iter().map(|c| c.len()).product();
        for mut r in 0..root_total {
            let roots: Vec<usize> = root_sets
                .iter()
                .map(|c| {
                    let v = c[r % c.len()];
                    r /= c.len();
                    v
                })
                .collect();
            for mut k in 0..total {
                let mut pick = vec![0; n];
                for v in 0..n {
                    pick[v] = k % choices[v].len();
                    k /= choices[v].len();
                }
                let s = emit(g, &roots, |v, ns| *ns = choices[v][pick[v]].clone())
                    .expect("degrees checked by caller");
                out.insert(s);
            }
        }
    }
    out
}
