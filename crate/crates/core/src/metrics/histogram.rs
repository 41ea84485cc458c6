//! Fixed-width histograms anchored at zero and the overlap measures between
//! them.

use std::fmt::Write as _;
use std::io::{self, Write};

use super::MetricsError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BinSpec {
    /// Unit-width bins on the integers.
    Integer,
    /// Bins of width `w` starting at 0.
    Width(f64),
}

impl BinSpec {
    pub fn width(self) -> f64 {
        match self {
            BinSpec::Integer => 1.0,
            BinSpec::Width(w) => w,
        }
    }
}

/// Counts over consecutive half-open bins `[first*w, (first+1)*w), ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    width: f64,
    first_bin: i64,
    counts: Vec<u64>,
}

impl Histogram {
    pub fn new(values: &[f64], spec: BinSpec) -> Result<Self, MetricsError> {
        if values.is_empty() {
            return Err(MetricsError::EmptyInput);
        }
        let width = spec.width();
        assert!(width > 0.0 && width.is_finite(), "bin width must be positive");
        let mut idx = Vec::with_capacity(values.len());
        for &v in values {
            if !v.is_finite() {
                return Err(MetricsError::NotFinite(v.to_string()));
            }
            idx.push((v / width).floor() as i64);
        }
        let first_bin = *idx.iter().min().unwrap();
        let last = *idx.iter().max().unwrap();
        let mut counts = vec![0; (last - first_bin + 1) as usize];
        for i in idx {
            counts[(i - first_bin) as usize] += 1;
        }
        Ok(Histogram { width, first_bin, counts })
    }

    /// A histogram from explicit counts starting at bin index `first_bin`.
    pub fn from_counts(spec: BinSpec, first_bin: i64, counts: Vec<u64>) -> Self {
        Histogram { width: spec.width(), first_bin, counts }
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `counts().len() + 1` ascending edges.
    pub fn bin_edges(&self) -> Vec<f64> {
        (0..=self.counts.len() as i64).map(|i| (self.first_bin + i) as f64 * self.width).collect()
    }

    /// Counts normalized to sum to one; all zeros when the histogram is empty.
    pub fn weights(&self) -> Vec<f64> {
        let total = self.total();
        if total == 0 {
            return vec![0.0; self.counts.len()];
        }
        self.counts.iter().map(|&c| c as f64 / total as f64).collect()
    }

    /// CSV rows `bin_left,bin_right,count,weight`.
    pub fn write_csv(&self, mut out: impl Write) -> io::Result<()> {
        writeln!(out, "bin_left,bin_right,count,weight")?;
        let edges = self.bin_edges();
        for (i, (c, w)) in self.counts.iter().zip(self.weights()).enumerate() {
            writeln!(out, "{},{},{},{}", edges[i], edges[i + 1], c, w)?;
        }
        Ok(())
    }

    /// A bar chart of `self` and `other` on shared axes.
    pub fn overlay_svg(&self, other: &Histogram, title: &str) -> Result<String, MetricsError> {
        let (a, b, first) = aligned(self, other)?;
        let (w, h, pad) = (640.0, 320.0, 30.0);
        let peak = a.iter().chain(&b).cloned().fold(0.0, f64::max).max(1e-12);
        let bar = (w - 2.0 * pad) / a.len() as f64;
        let mut svg = String::new();
        let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">"#);
        let _ = writeln!(svg, r#"<text x="{pad}" y="20" font-size="14">{}</text>"#, escape(title));
        for (series, colour) in [(&a, "#1f77b4"), (&b, "#ff7f0e")] {
            for (i, v) in series.iter().enumerate() {
                let bh = v / peak * (h - 2.0 * pad);
                let _ = writeln!(
                    svg,
                    r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{colour}" fill-opacity="0.5"/>"#,
                    pad + i as f64 * bar,
                    h - pad - bh,
                    bar,
                    bh
                );
            }
        }
        let lo = first as f64 * self.width;
        let hi = (first + a.len() as i64) as f64 * self.width;
        let _ = writeln!(svg, r#"<text x="{pad}" y="{}" font-size="11">{lo}</text>"#, h - 10.0);
        let _ = writeln!(svg, r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{hi}</text>"#, w - pad, h - 10.0);
        svg.push_str("</svg>\n");
        Ok(svg)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Weights of both histograms on the union of their bins.
fn aligned(a: &Histogram, b: &Histogram) -> Result<(Vec<f64>, Vec<f64>, i64), MetricsError> {
    if a.width != b.width {
        return Err(MetricsError::IncompatibleBins);
    }
    let first = a.first_bin.min(b.first_bin);
    let end = (a.first_bin + a.counts.len() as i64).max(b.first_bin + b.counts.len() as i64);
    let spread = |h: &Histogram| {
        let mut out = vec![0.0; (end - first) as usize];
        for (i, w) in h.weights().into_iter().enumerate() {
            out[(h.first_bin - first) as usize + i] = w;
        }
        out
    };
    Ok((spread(a), spread(b), first))
}

fn overlap_inputs(a: &Histogram, b: &Histogram) -> Result<(Vec<f64>, Vec<f64>), MetricsError> {
    if a.total() == 0 && b.total() == 0 {
        return Err(MetricsError::AllZero);
    }
    let (x, y, _) = aligned(a, b)?;
    Ok((x, y))
}

/// Continuous Tanimoto coefficient of the normalized weights, as a percentage.
pub fn tanimoto(a: &Histogram, b: &Histogram) -> Result<f64, MetricsError> {
    let (x, y) = overlap_inputs(a, b)?;
    let dot: f64 = x.iter().zip(&y).map(|(p, q)| p * q).sum();
    let xx: f64 = x.iter().map(|p| p * p).sum();
    let yy: f64 = y.iter().map(|q| q * q).sum();
    Ok(dot / (xx + yy - dot) * 100.0)
}

fn entropy_bits(p: impl Iterator<Item = f64>) -> f64 {
    -p.filter(|&x| x > 0.0).map(|x| x * x.log2()).sum::<f64>()
}

/// Jensen-Shannon divergence with equal weights, in bits.
pub fn jsd(a: &Histogram, b: &Histogram) -> Result<f64, MetricsError> {
    let (x, y) = overlap_inputs(a, b)?;
    if x == y {
        return Ok(0.0);
    }
    let mix = entropy_bits(x.iter().zip(&y).map(|(p, q)| 0.5 * (p + q)));
    let d = mix - 0.5 * (entropy_bits(x.iter().copied()) + entropy_bits(y.iter().copied()));
    Ok(d.clamp(0.0, 1.0))
}
