//! Text-based generative modelling of sparse graphs.
//!
//! The crate covers two one-line graph formats, LGI (a SMILES-like
//! depth-first notation whose vertex characters spell out degrees) and
//! graph6, together with randomized-serialization augmentation, a
//! character-level LSTM generator, an examination-driven training loop that
//! stops once sampled validity is statistically stable, and the metrics used
//! to judge generated sets (validity, uniqueness, novelty, property-histogram
//! overlap, scaffold and ring-system discovery).
//!
//! The `book/` directory at the repository root walks through each concept;
//! its code listings are compiled as doctests of this crate.

pub mod augment;
mod canon;
pub mod exam;
pub mod g6;
pub mod graph;
pub mod lgi;
pub mod metrics;
pub mod neural;
pub mod scaffold;
pub mod seed;
pub mod validity;

pub use graph::{CanonicalKey, Graph, GraphError};
pub use validity::{Failure, GraphFormat, ValidityReport};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/lgi.md")]
    mod lgi {}
    #[doc = include_str!("../../../book/src/g6.md")]
    mod g6 {}
    #[doc = include_str!("../../../book/src/augmentation.md")]
    mod augmentation {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/scaffolds.md")]
    mod scaffolds {}
    #[doc = include_str!("../../../book/src/generator.md")]
    mod generator {}
    #[doc = include_str!("../../../book/src/examination.md")]
    mod examination {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
