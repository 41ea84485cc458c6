//! Validity, uniqueness and novelty of a generated set, and how far into a
//! generated stream a discovery target is reached.

use std::collections::BTreeSet;
use std::io::{self, Write};

use serde::Serialize;

use super::MetricsError;
use crate::graph::{CanonicalKey, Graph};
use crate::validity::GraphFormat;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerationReport {
    pub generated: usize,
    pub valid: usize,
    pub unique: usize,
    pub unknown: usize,
    pub validity_pct: f64,
    /// `None` when nothing was valid.
    pub uniqueness_pct: Option<f64>,
    /// `None` when nothing was unique.
    pub novelty_pct: Option<f64>,
}

fn pct(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64 * 100.0)
}

impl GenerationReport {
    pub fn from_counts(generated: usize, valid: usize, unique: usize, unknown: usize) -> Self {
        assert!(generated >= valid && valid >= unique && unique >= unknown);
        GenerationReport {
            generated,
            valid,
            unique,
            unknown,
            validity_pct: pct(valid, generated).unwrap_or(0.0),
            uniqueness_pct: pct(unique, valid),
            novelty_pct: pct(unknown, unique),
        }
    }
}

/// Scores generated strings against the training graphs' canonical keys.
///
/// Uniqueness is measured up to isomorphism among the valid strings; novelty
/// counts the unique graphs absent from `training_keys`.
pub fn generation_report<S: AsRef<str>>(
    generated: &[S],
    training_keys: &BTreeSet<CanonicalKey>,
    format: &GraphFormat,
) -> Result<GenerationReport, MetricsError> {
    if generated.is_empty() {
        return Err(MetricsError::NoGenerated);
    }
    let mut valid = 0;
    let mut unique = BTreeSet::new();
    for s in generated {
        if let Some(g) = format.parse_valid(s.as_ref()) {
            valid += 1;
            unique.insert(g.canonical_key());
        }
    }
    let unknown = unique.iter().filter(|k| !training_keys.contains(*k)).count();
    Ok(GenerationReport::from_counts(generated.len(), valid, unique.len(), unknown))
}

/// One `metric,value` row per field; undefined percentages are written as `NA`.
pub fn write_report_csv(report: &GenerationReport, mut out: impl Write) -> io::Result<()> {
    let opt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |x| x.to_string());
    writeln!(out, "metric,value")?;
    writeln!(out, "generated,{}", report.generated)?;
    writeln!(out, "valid,{}", report.valid)?;
    writeln!(out, "unique,{}", report.unique)?;
    writeln!(out, "unknown,{}", report.unknown)?;
    writeln!(out, "validity_pct,{}", report.validity_pct)?;
    writeln!(out, "uniqueness_pct,{}", opt(report.uniqueness_pct))?;
    writeln!(out, "novelty_pct,{}", opt(report.novelty_pct))?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Intersection {
    /// Number of stream items consumed when the target was met.
    Reached(usize),
    /// The stream ended first.
    Exhausted { consumed: usize, distinct: usize },
}

/// Consumes `stream` until the distinct keys it yields reach `target`.
///
/// `key_fn` maps each graph to the keys it contributes (its own key, or the
/// keys of its scaffolds or ring systems). With `novelty_only`, keys found in
/// `training_keys` are not counted.
pub fn intersection_point<I, F>(
    stream: I,
    target: usize,
    key_fn: F,
    novelty_only: bool,
    training_keys: &BTreeSet<CanonicalKey>,
) -> Intersection
where
    I: IntoIterator<Item = Graph>,
    F: Fn(&Graph) -> Vec<CanonicalKey>,
{
    if target == 0 {
        return Intersection::Reached(0);
    }
    let mut seen = BTreeSet::new();
    let mut consumed = 0;
    for g in stream {
        consumed += 1;
        for key in key_fn(&g) {
            if !(novelty_only && training_keys.contains(&key)) {
                seen.insert(key);
            }
        }
        if seen.len() >= target {
            return Intersection::Reached(consumed);
        }
    }
    Intersection::Exhausted { consumed, distinct: seen.len() }
}
