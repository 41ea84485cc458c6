//! graph6: the dense one-line format that packs the upper triangle of the
//! adjacency matrix six bits per printable character.
//!
//! Only the short form is supported: a single header byte `63 + n` for
//! `n <= 62`, followed by the bits `x(0,1), x(0,2), x(1,2), x(0,3), ...`
//! most significant bit first, zero padded to a multiple of six.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{random_permutation, Graph, MAX_VERTICES};
use crate::validity::{Failure, ValidityReport};

/// Optional file header tolerated on input.
pub const FILE_HEADER: &str = ">>graph6<<";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("graph has {0} vertices; graph6 short form supports at most {MAX_VERTICES}")]
pub struct TooLarge(pub usize);

/// Total string length (header included) for a graph on `n` vertices.
pub fn encoded_len(n: usize) -> usize {
    1 + (n * n.saturating_sub(1) / 2).div_ceil(6)
}

pub fn encode_g6(g: &Graph) -> Result<String, TooLarge> {
    let n = g.vertex_count();
    if n > MAX_VERTICES {
        return Err(TooLarge(n));
    }
    let mut out = String::with_capacity(encoded_len(n));
    out.push((63 + n as u8) as char);
    let mut group = 0u8;
    let mut filled = 0;
    for j in 1..n {
        for i in 0..j {
            group = group << 1 | g.has_edge(i, j) as u8;
            filled += 1;
            if filled == 6 {
                out.push((63 + group) as char);
                group = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        out.push((63 + (group << (6 - filled))) as char);
    }
    Ok(out)
}

pub fn decode_g6(text: &str) -> Result<Graph, Failure> {
    let text = text.strip_prefix(FILE_HEADER).unwrap_or(text);
    let bytes = text.as_bytes();
    let Some(&header) = bytes.first() else {
        return Err(Failure::BadLength { expected: 1, actual: 0 });
    };
    for (position, ch) in text.char_indices() {
        if !(63..=126).contains(&(ch as u32)) {
            return Err(Failure::LexicalError { position, ch });
        }
    }
    if header == 126 {
        return Err(Failure::UnsupportedHeader('~'));
    }
    let n = (header - 63) as usize;
    let expected = encoded_len(n);
    if bytes.len() != expected {
        return Err(Failure::BadLength { expected, actual: bytes.len() });
    }
    let mut g = Graph::empty(n);
    let mut bit = 0;
    let body = &bytes[1..];
    let get = |k: usize| (body[k / 6] - 63) >> (5 - k % 6) & 1 == 1;
    for j in 1..n {
        for i in 0..j {
            if get(bit) {
                g.add_edge(i, j);
            }
            bit += 1;
        }
    }
    if (bit..body.len() * 6).any(get) {
        return Err(Failure::NonzeroPadding);
    }
    Ok(g)
}

/// Valid iff the string decodes with the length its header demands and every
/// vertex degree lies in `domain_degrees`.
pub fn check_g6_validity(text: &str, domain_degrees: &BTreeSet<usize>) -> ValidityReport {
    let g = match decode_g6(text) {
        Ok(g) => g,
        Err(f) => return ValidityReport { failures: vec![f] },
    };
    let failures = g
        .degree_sequence()
        .into_iter()
        .enumerate()
        .filter(|(_, d)| !domain_degrees.contains(d))
        .map(|(vertex, degree)| Failure::OutOfDomainDegree { vertex, degree })
        .collect();
    ValidityReport { failures }
}

/// Shuffles the vertex order and re-encodes the adjacency matrix.
pub fn randomize_g6(text: &str, seed: u64) -> Result<String, Failure> {
    let g = decode_g6(text)?;
    Ok(randomize_graph_g6(&g, seed).expect("decoded graphs fit the short form"))
}

pub(crate) fn randomize_graph_g6(g: &Graph, seed: u64) -> Result<String, TooLarge> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let perm = random_permutation(g.vertex_count(), &mut rng);
    encode_g6(&g.permute(&perm).expect("random_permutation is a bijection"))
}

/// graph6 of the canonical relabeling of `g`.
pub fn canonical_g6(g: &Graph) -> Result<String, TooLarge> {
    let order = g.canonical_order();
    let mut perm = vec![0; order.len()];
    for (label, &v) in order.iter().enumerate() {
        perm[v] = label;
    }
    encode_g6(&g.permute(&perm).expect("canonical order is a bijection"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::enumerate_graphs;

    fn k3() -> Graph {
        Graph::from_edge_list(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn encode_examples() {
        assert_eq!(encode_g6(&k3()).unwrap(), "Bw");
        assert_eq!(encode_g6(&Graph::empty(1)).unwrap(), "@");
        assert_eq!(encode_g6(&Graph::empty(0)).unwrap(), "?");
        assert_eq!(encode_g6(&Graph::empty(6)).unwrap().len(), 4);
        assert_eq!(encode_g6(&Graph::empty(63)), Err(TooLarge(63)));
        // The reference graph from the graph6 format description.
        let pairs = [(0, 2), (0, 4), (1, 3), (3, 4)];
        assert_eq!(encode_g6(&Graph::from_edge_list(5, &pairs).unwrap()).unwrap(), "DQc");
    }

    #[test]
    fn decode_examples() {
        assert_eq!(decode_g6("Bw").unwrap(), k3());
        assert_eq!(decode_g6(">>graph6<<Bw").unwrap(), k3());
        let ehe = decode_g6("EhEG").unwrap();
        assert_eq!(ehe.vertex_count(), 6);
        assert_eq!(decode_g6("B"), Err(Failure::BadLength { expected: 2, actual: 1 }));
        assert_eq!(decode_g6(""), Err(Failure::BadLength { expected: 1, actual: 0 }));
        assert_eq!(decode_g6("Bx"), Err(Failure::NonzeroPadding));
        assert_eq!(decode_g6("B "), Err(Failure::LexicalError { position: 1, ch: ' ' }));
        assert_eq!(decode_g6("~?@A"), Err(Failure::UnsupportedHeader('~')));
    }

    #[test]
    fn validity_examples() {
        let ehe = decode_g6("EhEG").unwrap();
        let domain: BTreeSet<usize> = ehe.degree_sequence().into_iter().collect();
        assert!(check_g6_validity("EhEG", &domain).is_valid());
        let report = check_g6_validity("Bw", &BTreeSet::from([0, 1]));
        assert_eq!(report.failures.len(), 3);
        assert_eq!(report.failures[0], Failure::OutOfDomainDegree { vertex: 0, degree: 2 });
        assert_eq!(
            check_g6_validity("E", &domain).failures,
            vec![Failure::BadLength { expected: 4, actual: 1 }]
        );
    }

    #[test]
    fn randomize_examples() {
        for seed in 0..10 {
            assert_eq!(randomize_g6("Bw", seed).unwrap(), "Bw");
        }
        let p3 = encode_g6(&Graph::from_edge_list(3, &[(0, 1), (1, 2)]).unwrap()).unwrap();
        let seen: BTreeSet<String> = (0..50).map(|s| randomize_g6(&p3, s).unwrap()).collect();
        // Oracle: encode P3 under all 3! relabelings. The middle vertex can
        // take any of three positions, giving three bit patterns.
        let p3g = decode_g6(&p3).unwrap();
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let all: BTreeSet<String> =
            perms.iter().map(|p| encode_g6(&p3g.permute(p).unwrap()).unwrap()).collect();
        assert_eq!(all, BTreeSet::from(["BW".to_string(), "Bg".to_string(), "Bo".to_string()]));
        assert_eq!(seen, all);
        assert!(randomize_g6("B", 0).is_err());
    }

    #[test]
    fn bit_exact_roundtrip_on_all_labeled_five_vertex_graphs() {
        for mask in 0u32..1024 {
            let mut g = Graph::empty(5);
            let mut bit = 0;
            for j in 1..5 {
                for i in 0..j {
                    if mask >> bit & 1 == 1 {
                        g.add_edge(i, j);
                    }
                    bit += 1;
                }
            }
            let s = encode_g6(&g).unwrap();
            assert!(s.bytes().all(|b| (63..=126).contains(&b)));
            assert_eq!(decode_g6(&s).unwrap(), g);
            assert_eq!(encode_g6(&decode_g6(&s).unwrap()).unwrap(), s);
        }
    }

    #[test]
    fn randomized_roundtrip_isomorphic() {
        for n in 1..=5 {
            for g in enumerate_graphs(n).unwrap() {
                let s = encode_g6(&g).unwrap();
                for seed in 0..20 {
                    assert!(decode_g6(&randomize_g6(&s, seed).unwrap()).unwrap().is_isomorphic(&g));
                }
                let domain = g.degree_sequence().into_iter().collect();
                assert!(check_g6_validity(&s, &domain).is_valid());
            }
        }
    }
}
