use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use lgigen::g6::decode_g6;
use lgigen::lgi::check_lgi_validity;
use lgigen::validity::FormatKind;
use lgigen::{Graph, GraphFormat};

use crate::Internal;

/// Lines of a text file. Blank lines are dropped unless `keep_blank`, since
/// an empty generated string is still a (failed) sample.
pub fn read_lines(path: &Path, keep_blank: bool) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text
        .lines()
        .map(|l| l.trim_end_matches('\r').to_string())
        .filter(|l| keep_blank || !l.trim().is_empty())
        .collect())
}

pub fn read_nonempty(path: &Path, keep_blank: bool) -> Result<Vec<String>> {
    let lines = read_lines(path, keep_blank)?;
    if lines.is_empty() {
        bail!("{} contains no strings", path.display());
    }
    Ok(lines)
}

/// The graph a training or input line describes, or why it does not.
pub fn parse_graph(line: &str, format: FormatKind) -> Result<Graph, String> {
    match format {
        FormatKind::Lgi => {
            let report = check_lgi_validity(line);
            if !report.is_valid() {
                return Err(report.to_string());
            }
            Ok(GraphFormat::Lgi.parse_valid(line).expect("valid strings parse"))
        }
        FormatKind::G6 => decode_g6(line).map_err(|e| e.to_string()),
    }
}

/// Parses every line, failing with all offending line numbers listed.
pub fn parse_all(lines: &[String], format: FormatKind, what: &str) -> Result<Vec<Graph>> {
    let mut graphs = Vec::with_capacity(lines.len());
    let mut bad = Vec::new();
    for (i, line) in lines.iter().enumerate() {
        match parse_graph(line, format) {
            Ok(g) => graphs.push(g),
            Err(e) => bad.push(format!("line {}: {e}", i + 1)),
        }
    }
    if !bad.is_empty() {
        bail!("{} invalid {what} lines:\n  {}", bad.len(), bad.join("\n  "));
    }
    Ok(graphs)
}

pub fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| Internal(format!("writing {}: {e}", path.display())).into())
}

pub fn ensure_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).with_context(|| format!("creating {}", path.display()))
}
