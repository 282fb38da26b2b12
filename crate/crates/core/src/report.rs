//! Writers for embedding bundles, point matrices, and the pipeline's
//! `report.json`.
//!
//! Floats are written in Rust's shortest round-trip form, so reading a
//! file back yields the same `f64` bit patterns.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use ndarray::ArrayView2;
use serde::Serialize;

use crate::corpus::{EmbeddingBundle, Manifest, ManifestEntry};

/// Writes `points` as headerless CSV, one row per line.
pub fn write_points_csv_to<W: Write>(points: ArrayView2<'_, f64>, out: &mut W) -> io::Result<()> {
    for row in points.rows() {
        let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn write_points_csv(points: ArrayView2<'_, f64>, path: &Path) -> io::Result<()> {
    let mut buf = Vec::new();
    write_points_csv_to(points, &mut buf)?;
    fs::write(path, buf)
}

/// Writes `bundle` into `dir` as `manifest.json` plus one `<id>.csv` per
/// cloud. Returns the manifest path.
pub fn write_bundle(bundle: &EmbeddingBundle, dir: &Path) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let mut sentences = Vec::with_capacity(bundle.clouds.len());
    for cloud in &bundle.clouds {
        let file = PathBuf::from(format!("{}.csv", cloud.sentence_id));
        write_points_csv(cloud.points().view(), &dir.join(&file))?;
        sentences.push(ManifestEntry {
            id: cloud.sentence_id,
            file,
        });
    }
    let manifest = Manifest {
        name: bundle.name.clone(),
        dim: bundle.dim,
        sentences,
    };
    let path = dir.join("manifest.json");
    write_json(&manifest, &path)?;
    Ok(path)
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(value: &T, path: &Path) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
    text.push('\n');
    fs::write(path, text)
}

/// Paths inside the report are relative to the output directory and use
/// `/` separators.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub corpus: CorpusSummary,
    pub sources: Vec<SourceRecord>,
    pub pca: Vec<PcaRecord>,
    pub analysis_set: Vec<String>,
    pub pairs: Vec<PairRecord>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorpusSummary {
    pub sentences: usize,
    pub max_tokens: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SourceRecord {
    pub label: String,
    /// `levenshtein`, `bottleneck-h0`, `bottleneck-h1` or `cosine`.
    pub metric: String,
    pub bundle: Option<String>,
    pub pca: Option<usize>,
    pub matrix: String,
    pub heatmap: String,
    pub max_entry: f64,
    pub mds: MdsRecord,
}

#[derive(Debug, Clone, Serialize)]
pub struct MdsRecord {
    pub coords: String,
    pub plot: String,
    pub strain: f64,
    pub eigenvalues: Vec<f64>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PcaRecord {
    pub bundle: String,
    pub components: usize,
    pub file: String,
    pub mean_variance_captured: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairRecord {
    pub pair: [String; 2],
    pub mds: PairMds,
    pub cca: CcaRecord,
    pub scaled_hausdorff: HausdorffRecord,
}

/// Strain and coordinate files of the two members, in pair order.
#[derive(Debug, Clone, Serialize)]
pub struct PairMds {
    pub strain: [f64; 2],
    pub coords: [String; 2],
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CcaRecord {
    Ok {
        components: usize,
        correlations: Vec<f64>,
        /// Ridge added to the two covariance blocks; zero means
        /// pseudo-inverse whitening.
        ridge: [f64; 2],
    },
    Skipped {
        reason: String,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct HausdorffRecord {
    /// Objective minimised for `alpha_star` / `distance`.
    pub mode: String,
    pub alpha_star: f64,
    pub distance: f64,
    pub symmetric_alpha_star: f64,
    pub symmetric_distance: f64,
    pub directed_alpha_star: f64,
    pub directed_distance: f64,
    /// True when the two objectives have different minima.
    pub modes_disagree: bool,
    pub curve: String,
}
