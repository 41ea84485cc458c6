//! Property distributions and generation-quality measures.

mod eigen;
mod histogram;
mod report;

pub use eigen::symmetric_eigenvalues;
pub use histogram::{jsd, tanimoto, BinSpec, Histogram};
pub use report::{
    generation_report, intersection_point, write_report_csv, GenerationReport, Intersection,
};

use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("no values to bin")]
    EmptyInput,
    #[error("histograms use different bin layouts")]
    IncompatibleBins,
    #[error("both histograms are empty")]
    AllZero,
    #[error("no generated strings")]
    NoGenerated,
    #[error("value {0} cannot be binned")]
    NotFinite(String),
}

/// Sum of absolute adjacency eigenvalues.
pub fn graph_energy(g: &Graph) -> f64 {
    let n = g.vertex_count();
    if g.edge_count() == 0 {
        return 0.0;
    }
    let mut a = vec![0.0; n * n];
    for (u, v) in g.edges() {
        a[u * n + v] = 1.0;
        a[v * n + u] = 1.0;
    }
    symmetric_eigenvalues(a, n).iter().map(|l| l.abs()).sum()
}

/// The three properties compared between training and generated sets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropertyProfile {
    pub lgi_length: usize,
    pub node_count: usize,
    pub graph_energy: f64,
}

pub fn property_profile(text: &str, g: &Graph) -> PropertyProfile {
    PropertyProfile {
        lgi_length: text.chars().count(),
        node_count: g.vertex_count(),
        graph_energy: graph_energy(g),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Property {
    LgiLength,
    NodeCount,
    GraphEnergy,
}

impl Property {
    pub const ALL: [Property; 3] = [Property::LgiLength, Property::NodeCount, Property::GraphEnergy];

    pub fn name(self) -> &'static str {
        match self {
            Property::LgiLength => "lgi_length",
            Property::NodeCount => "node_count",
            Property::GraphEnergy => "graph_energy",
        }
    }

    pub fn bins(self) -> BinSpec {
        match self {
            Property::GraphEnergy => BinSpec::Width(0.5),
            _ => BinSpec::Integer,
        }
    }

    pub fn value(self, p: &PropertyProfile) -> f64 {
        match self {
            Property::LgiLength => p.lgi_length as f64,
            Property::NodeCount => p.node_count as f64,
            Property::GraphEnergy => p.graph_energy,
        }
    }
}

/// Histogram of one property over a set of profiles.
pub fn property_histogram(profiles: &[PropertyProfile], property: Property) -> Result<Histogram, MetricsError> {
    let values: Vec<f64> = profiles.iter().map(|p| property.value(p)).collect();
    Histogram::new(&values, property.bins())
}

#[cfg(test)]
#[path = "../../tests/support/spectrum.rs"]
mod spectrum;
