//! Validity reports shared by the LGI and graph6 checkers.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::{g6, lgi};

/// One reason a string fails to describe a well-formed graph.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Failure {
    #[error("unexpected character {ch:?} at position {position}")]
    LexicalError { position: usize, ch: char },
    #[error("unmatched branch bracket at position {position}")]
    UnmatchedBracket { position: usize },
    #[error("ring index {index} is never closed")]
    UnmatchedRingIndex { index: u8 },
    #[error("vertex {vertex} declares degree {declared} but has {actual} edges")]
    DegreeMismatch { vertex: usize, declared: usize, actual: usize },
    #[error("ring closure at position {position} duplicates edge ({u}, {v})")]
    DuplicateEdge { position: usize, u: usize, v: usize },
    #[error("ring index {index} closes on its own vertex at position {position}")]
    SelfLoop { position: usize, index: u8 },
    #[error("syntax error at position {position}: {reason}")]
    Syntax { position: usize, reason: &'static str },
    #[error("graph6 string has length {actual}, expected {expected}")]
    BadLength { expected: usize, actual: usize },
    #[error("graph6 header {0:?} is outside the supported single-byte range")]
    UnsupportedHeader(char),
    #[error("graph6 padding bits are not zero")]
    NonzeroPadding,
    #[error("vertex {vertex} has degree {degree}, not observed in the training domain")]
    OutOfDomainDegree { vertex: usize, degree: usize },
}

/// Outcome of a validity check; valid exactly when `failures` is empty.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidityReport {
    pub failures: Vec<Failure>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for ValidityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.failures.is_empty() {
            return write!(f, "valid");
        }
        for (i, failure) in self.failures.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{failure}")?;
        }
        Ok(())
    }
}

/// Which one-line format a corpus uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatKind {
    Lgi,
    G6,
}

impl FormatKind {
    pub fn name(self) -> &'static str {
        match self {
            FormatKind::Lgi => "lgi",
            FormatKind::G6 => "g6",
        }
    }
}

impl fmt::Display for FormatKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for FormatKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "lgi" => Ok(FormatKind::Lgi),
            "g6" | "graph6" => Ok(FormatKind::G6),
            other => Err(format!("unknown graph format {other:?} (expected lgi or g6)")),
        }
    }
}

/// A format together with whatever context its validity rule needs.
///
/// LGI strings carry their own degree declarations. graph6 strings are
/// additionally checked against the set of vertex degrees seen in training.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphFormat {
    Lgi,
    G6 { domain_degrees: BTreeSet<usize> },
}

impl GraphFormat {
    /// The graph6 checker with the degree domain of `graphs`.
    pub fn g6_for<'a>(graphs: impl IntoIterator<Item = &'a Graph>) -> Self {
        GraphFormat::G6 { domain_degrees: degree_domain(graphs) }
    }

    pub fn kind(&self) -> FormatKind {
        match self {
            GraphFormat::Lgi => FormatKind::Lgi,
            GraphFormat::G6 { .. } => FormatKind::G6,
        }
    }

    pub fn check(&self, text: &str) -> ValidityReport {
        match self {
            GraphFormat::Lgi => lgi::check_lgi_validity(text),
            GraphFormat::G6 { domain_degrees } => g6::check_g6_validity(text, domain_degrees),
        }
    }

    pub fn is_valid(&self, text: &str) -> bool {
        self.check(text).is_valid()
    }

    /// The graph a string describes, if it passes this format's check.
    pub fn parse_valid(&self, text: &str) -> Option<Graph> {
        match self {
            GraphFormat::Lgi => {
                let parsed = lgi::reconstruct(text);
                parsed.failures.is_empty().then_some(parsed.graph)
            }
            GraphFormat::G6 { domain_degrees } => {
                let g = g6::decode_g6(text).ok()?;
                g.degree_sequence()
                    .iter()
                    .all(|d| domain_degrees.contains(d))
                    .then_some(g)
            }
        }
    }
}

/// All vertex degrees occurring in `graphs`.
pub fn degree_domain<'a>(graphs: impl IntoIterator<Item = &'a Graph>) -> BTreeSet<usize> {
    graphs.into_iter().flat_map(|g| g.degree_sequence()).collect()
}
