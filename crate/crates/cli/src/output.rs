//! JSON and CSV result files.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use groverlab::circuit::format_bitstring;
use groverlab::{CircuitMetrics, Distribution, Histogram, NoiseModel, SelectivityReport};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

pub const TOOL: Tool = Tool {
    name: "groverlab",
    version: env!("CARGO_PKG_VERSION"),
};

#[derive(Debug, Clone, Default, Args)]
pub struct Outputs {
    /// JSON result file; printed to stdout when omitted.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Histogram CSV file (bitstring,count,probability).
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

impl Outputs {
    /// Renders everything first, then writes, so a failure leaves no partial set.
    pub fn emit(&self, doc: &RunDocument) -> Result<()> {
        let mut json = serde_json::to_string_pretty(doc)?;
        json.push('\n');
        let csv = match &self.csv {
            Some(_) => Some(histogram_csv(&doc.histogram)?),
            None => None,
        };
        write_or_print(self.json.as_deref(), &json)?;
        if let (Some(path), Some(text)) = (&self.csv, csv) {
            write_file(path, &text)?;
        }
        Ok(())
    }
}

#[derive(Debug, Serialize)]
pub struct RunDocument {
    pub tool: Tool,
    pub config: ExperimentConfig,
    pub distribution: Distribution,
    pub histogram: Histogram,
    /// Exact for `run`, from the noisy histogram for `run-noisy`.
    pub selectivity: SelectivityReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampled_selectivity: Option<SelectivityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ideal_selectivity: Option<SelectivityReport>,
    pub metrics: CircuitMetrics,
}

/// The parts of a result file that `report` needs.
#[derive(Debug, Deserialize)]
pub struct StoredDocument {
    pub config: ExperimentConfig,
    pub histogram: Histogram,
    pub selectivity: SelectivityReport,
}

pub fn read_document(path: &Path) -> Result<StoredDocument> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn write_or_print(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write_file(p, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

pub fn histogram_csv(h: &Histogram) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["bitstring", "count", "probability"])?;
    for (i, (count, p)) in h.counts.iter().zip(h.frequencies()).enumerate() {
        w.write_record([format_bitstring(i, h.n_data), count.to_string(), p.to_string()])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRecord {
    #[serde(rename = "R")]
    pub repetitions: usize,
    pub p1: f64,
    pub p2: f64,
    pub shots: u64,
    pub seed: u64,
    pub p_goal: f64,
    pub s_db: f64,
    pub recognized: bool,
}

impl SweepRecord {
    pub fn new(repetitions: usize, model: &NoiseModel, shots: u64, seed: u64, s: &SelectivityReport) -> Self {
        SweepRecord {
            repetitions,
            p1: model.p1,
            p2: model.p2,
            shots,
            seed,
            p_goal: s.p_goal,
            s_db: s.s_db,
            recognized: s.recognized,
        }
    }
}

pub fn sweep_csv(records: &[SweepRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn comparison(
    path_a: &Path,
    a: &StoredDocument,
    path_b: &Path,
    b: &StoredDocument,
    tv: f64,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "a: {}", path_a.display());
    let _ = writeln!(out, "b: {}", path_b.display());
    let _ = writeln!(out, "tv_distance: {tv:.6}");
    let _ = writeln!(out, "{:<12} {:>14} {:>14}", "", "a", "b");
    let row = |out: &mut String, name: &str, x: String, y: String| {
        let _ = writeln!(out, "{name:<12} {x:>14} {y:>14}");
    };
    row(&mut out, "goal", a.config.goal.clone(), b.config.goal.clone());
    row(&mut out, "variant", a.config.variant.to_string(), b.config.variant.to_string());
    row(&mut out, "R", a.config.repetitions.to_string(), b.config.repetitions.to_string());
    row(&mut out, "shots", a.histogram.shots.to_string(), b.histogram.shots.to_string());
    let (sa, sb) = (&a.selectivity, &b.selectivity);
    row(&mut out, "p_goal", format!("{:.6}", sa.p_goal), format!("{:.6}", sb.p_goal));
    row(&mut out, "p_max_other", format!("{:.6}", sa.p_max_other), format!("{:.6}", sb.p_max_other));
    row(&mut out, "s_db", format!("{:.3}", sa.s_db), format!("{:.3}", sb.s_db));
    row(&mut out, "recognized", sa.recognized.to_string(), sb.recognized.to_string());
    out
}
