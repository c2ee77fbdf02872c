//! Loading classifier outputs and choosing `k_top` from their top-mass profile.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::ProbVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatasetFormat {
    /// One JSON array per line.
    JsonLines,
    /// Comma-separated rows; blank lines and `#` comments are skipped.
    Delimited,
}

impl DatasetFormat {
    /// `.json`/`.jsonl`/`.ndjson` are JSON lines, anything else is delimited.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json" | "jsonl" | "ndjson") => DatasetFormat::JsonLines,
            _ => DatasetFormat::Delimited,
        }
    }
}

impl std::str::FromStr for DatasetFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" | "json-lines" | "json" => Ok(DatasetFormat::JsonLines),
            "csv" | "delimited" => Ok(DatasetFormat::Delimited),
            other => Err(Error::Domain(format!("unknown dataset format '{other}'"))),
        }
    }
}

/// Probability vectors of a common dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorDataset {
    vectors: Vec<ProbVector>,
    pub source_label: String,
}

impl VectorDataset {
    pub fn new(vectors: Vec<ProbVector>, source_label: impl Into<String>) -> Result<Self> {
        let first = vectors.first().ok_or(Error::EmptyDataset)?;
        let k = first.k();
        if let Some((i, v)) = vectors.iter().enumerate().find(|(_, v)| v.k() != k) {
            return Err(Error::RaggedRows {
                line: i + 1,
                expected: k,
                found: v.k(),
            });
        }
        Ok(Self {
            vectors,
            source_label: source_label.into(),
        })
    }

    pub fn vectors(&self) -> &[ProbVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn k(&self) -> usize {
        self.vectors[0].k()
    }
}

fn parse_row(line: &str, format: DatasetFormat, line_no: usize) -> Result<Vec<f64>> {
    let parse_err = |message: String| Error::Parse {
        line: line_no,
        message,
    };
    match format {
        DatasetFormat::JsonLines => {
            serde_json::from_str::<Vec<f64>>(line).map_err(|e| parse_err(e.to_string()))
        }
        DatasetFormat::Delimited => line
            .split(',')
            .map(|field| {
                let field = field.trim();
                field
                    .parse::<f64>()
                    .map_err(|e| parse_err(format!("'{field}': {e}")))
            })
            .collect(),
    }
}

/// Parses dataset text; each row is normalised.
pub fn parse_dataset(text: &str, format: DatasetFormat, label: &str) -> Result<VectorDataset> {
    let mut vectors = Vec::new();
    let mut k = None;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = parse_row(line, format, i + 1)?;
        let expected = *k.get_or_insert(row.len());
        if row.len() != expected {
            return Err(Error::RaggedRows {
                line: i + 1,
                expected,
                found: row.len(),
            });
        }
        vectors.push(ProbVector::new(&row, true)?);
    }
    VectorDataset::new(vectors, label)
}

pub fn load_dataset(path: &Path, format: DatasetFormat) -> Result<VectorDataset> {
    let text = fs::read_to_string(path)?;
    parse_dataset(&text, format, &path.display().to_string())
}

pub fn write_dataset<W: Write>(ds: &VectorDataset, out: &mut W, format: DatasetFormat) -> Result<()> {
    for v in ds.vectors() {
        let line = match format {
            DatasetFormat::JsonLines => serde_json::to_string(v.values())
                .map_err(|e| Error::Io(e.to_string()))?,
            DatasetFormat::Delimited => v
                .values()
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(","),
        };
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn save_dataset(ds: &VectorDataset, path: &Path, format: DatasetFormat) -> Result<()> {
    let mut buf = Vec::new();
    write_dataset(ds, &mut buf, format)?;
    fs::write(path, buf)?;
    Ok(())
}

/// Average mass of the `k_top` largest entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopMassCurve {
    pub k_top: Vec<usize>,
    pub avg_top_mass: Vec<f64>,
    /// `1 − avg_top_mass`.
    pub delta_avg: Vec<f64>,
}

/// Per-vector cumulative sums of the sorted-descending entries.
fn sorted_prefix_sums(v: &ProbVector) -> Vec<f64> {
    let mut sorted = v.values().to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    sorted
        .iter()
        .scan(0.0, |acc, x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

/// Average top mass for every `k_top` in `1..=k`.
fn full_profile(ds: &VectorDataset) -> Vec<f64> {
    let k = ds.k();
    let mut totals = vec![0.0; k];
    for v in ds.vectors() {
        for (t, s) in totals.iter_mut().zip(sorted_prefix_sums(v)) {
            *t += s;
        }
    }
    let n = ds.len() as f64;
    let mut avg: Vec<f64> = totals.iter().map(|t| (t / n).min(1.0)).collect();
    avg[k - 1] = 1.0;
    avg
}

pub fn top_mass_curve(
    ds: &VectorDataset,
    k_top_range: std::ops::RangeInclusive<usize>,
) -> Result<TopMassCurve> {
    let k = ds.k();
    let (lo, hi) = (*k_top_range.start(), *k_top_range.end());
    if lo < 1 || hi > k || lo > hi {
        return Err(Error::Domain(format!("k_top range {lo}..={hi} outside 1..={k}")));
    }
    let avg = full_profile(ds);
    let k_top: Vec<usize> = (lo..=hi).collect();
    let avg_top_mass: Vec<f64> = k_top.iter().map(|&t| avg[t - 1]).collect();
    let delta_avg = avg_top_mass.iter().map(|m| 1.0 - m).collect();
    Ok(TopMassCurve {
        k_top,
        avg_top_mass,
        delta_avg,
    })
}

impl TopMassCurve {
    /// Two columns, `k_top,delta_avg`.
    pub fn write_delimited<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "k_top,delta_avg")?;
        for (t, d) in self.k_top.iter().zip(&self.delta_avg) {
            writeln!(out, "{t},{d}")?;
        }
        Ok(())
    }
}

/// Tail mass `1 − Σ top k_top` of every vector.
pub fn tail_masses(ds: &VectorDataset, k_top: usize) -> Result<Vec<f64>> {
    let k = ds.k();
    if k_top < 1 || k_top > k {
        return Err(Error::Domain(format!("k_top must be in 1..={k}, got {k_top}")));
    }
    Ok(ds
        .vectors()
        .iter()
        .map(|v| {
            if k_top == k {
                0.0
            } else {
                (1.0 - sorted_prefix_sums(v)[k_top - 1]).max(0.0)
            }
        })
        .collect())
}

/// Empirical `q`-quantile (nearest rank) of the per-vector tail mass.
pub fn tail_mass_quantile(ds: &VectorDataset, k_top: usize, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Domain(format!("quantile must be in [0, 1], got {q}")));
    }
    let mut tails = tail_masses(ds, k_top)?;
    tails.sort_by(f64::total_cmp);
    let rank = ((q * tails.len() as f64).ceil() as usize).clamp(1, tails.len());
    Ok(tails[rank - 1])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KtopRecommendation {
    pub k_top: usize,
    pub delta_avg: f64,
    /// False when only `k_top = k` meets the target.
    pub reachable: bool,
    /// Fraction of vectors whose own tail mass exceeds `delta_avg` by more
    /// than [`TARGET_TOLERANCE`].
    pub violation_fraction: f64,
}

/// Margin below which `δ_avg` counts as equal to the target.
pub const TARGET_TOLERANCE: f64 = 1e-12;

/// Smallest `k_top` with `δ_avg(k_top) < delta_target`.
pub fn recommend_ktop(ds: &VectorDataset, delta_target: f64) -> Result<KtopRecommendation> {
    if !(delta_target > 0.0 && delta_target < 1.0) {
        return Err(Error::Domain(format!(
            "delta target must be in (0, 1), got {delta_target}"
        )));
    }
    let k = ds.k();
    let avg = full_profile(ds);
    let k_top = (1..=k)
        .find(|&t| 1.0 - avg[t - 1] < delta_target - TARGET_TOLERANCE)
        .unwrap_or(k);
    let delta_avg = 1.0 - avg[k_top - 1];
    let tails = tail_masses(ds, k_top)?;
    let violations = tails
        .iter()
        .filter(|&&t| t > delta_avg + TARGET_TOLERANCE)
        .count();
    Ok(KtopRecommendation {
        k_top,
        delta_avg,
        reachable: k_top < k,
        violation_fraction: violations as f64 / tails.len() as f64,
    })
}
