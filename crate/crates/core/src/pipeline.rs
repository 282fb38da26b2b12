//! End-to-end run: load the corpus and bundles named by a JSON config,
//! build every distance matrix, and emit matrices, plots, and the
//! cross-matrix report.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;
use thiserror::Error;

use crate::corpus::{self, EmbeddingBundle, PointCloud, SentenceRecord};
use crate::correlation::{self, AlphaSearch, CorrelationError, HausdorffMode, MdsEmbedding, Ridge};
use crate::diagram::bottleneck_matrix;
use crate::matrices::{self, DistanceMatrix};
use crate::render;
use crate::report::{
    self, CcaRecord, CorpusSummary, HausdorffRecord, MdsRecord, PairMds, PairRecord, PcaRecord, Report, SourceRecord,
};
use crate::textdist::levenshtein_matrix;
use crate::topology::{self, PersistenceDiagram, TopologyError};
use crate::vecdist::cosine_matrix;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 1,
            PipelineError::Data(_) => 2,
            PipelineError::Numeric(_) => 3,
        }
    }
}

fn data(e: impl std::fmt::Display) -> PipelineError {
    PipelineError::Data(e.to_string())
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub corpus: PathBuf,
    #[serde(default)]
    pub bundles: Vec<BundleSpec>,
    #[serde(default)]
    pub analyses: Analyses,
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleSpec {
    pub manifest: PathBuf,
    pub metric: Metric,
    #[serde(default)]
    pub pca: Option<usize>,
    #[serde(default)]
    pub label: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum Metric {
    #[serde(rename = "bottleneck-h0")]
    BottleneckH0,
    #[serde(rename = "bottleneck-h1")]
    BottleneckH1,
    #[serde(rename = "cosine")]
    Cosine,
}

impl Metric {
    fn name(self) -> &'static str {
        match self {
            Metric::BottleneckH0 => "bottleneck-h0",
            Metric::BottleneckH1 => "bottleneck-h1",
            Metric::Cosine => "cosine",
        }
    }

    fn suffix(self) -> &'static str {
        match self {
            Metric::BottleneckH0 => "h0-bottleneck",
            Metric::BottleneckH1 => "h1-bottleneck",
            Metric::Cosine => "cosine",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Analyses {
    pub pairs: PairSelection,
    /// Absolute CCA ridge; absent means `1e-8 * mean(diag)` per block, zero
    /// means pseudo-inverse whitening.
    pub ridge: Option<f64>,
    pub alpha_grid: AlphaSearch,
    pub include_h0: bool,
    pub mds_dims: usize,
    /// Defaults to `n - 1`, reduced to the whitened rank when ridge is zero.
    pub cca_components: Option<usize>,
    /// Upper end of every heatmap's colour scale; defaults to each
    /// matrix's maximum.
    pub heatmap_ceiling: Option<f64>,
}

impl Default for Analyses {
    fn default() -> Self {
        Self {
            pairs: PairSelection::default(),
            ridge: None,
            alpha_grid: AlphaSearch::default(),
            include_h0: false,
            mds_dims: 2,
            cca_components: None,
            heatmap_ceiling: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PairSelection {
    All(AllKeyword),
    Explicit(Vec<[String; 2]>),
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AllKeyword {
    All,
}

impl Default for PairSelection {
    fn default() -> Self {
        PairSelection::All(AllKeyword::All)
    }
}

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub threads: Option<usize>,
    pub include_h0: bool,
    pub directed_hausdorff: bool,
    pub ridge: Option<f64>,
    pub out_dir: Option<PathBuf>,
}

/// Parses a config file. Relative paths inside it are resolved against the
/// file's directory.
pub fn load_config(path: &Path) -> Result<Config, PipelineError> {
    let text = fs::read_to_string(path).map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    let mut config: Config = serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        PipelineError::Config(format!("{}: field `{field}`: {}", path.display(), e.inner()))
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    config.corpus = base.join(&config.corpus);
    config.out_dir = base.join(&config.out_dir);
    for b in &mut config.bundles {
        b.manifest = base.join(&b.manifest);
    }
    check_config(&config)?;
    Ok(config)
}

fn check_config(config: &Config) -> Result<(), PipelineError> {
    let bad = |field: String, msg: &str| Err(PipelineError::Config(format!("field `{field}`: {msg}")));
    for (i, b) in config.bundles.iter().enumerate() {
        match (b.metric, b.pca) {
            (_, Some(0)) => return bad(format!("bundles[{i}].pca"), "must be at least 1"),
            (Metric::Cosine, Some(_)) => {
                return bad(format!("bundles[{i}].pca"), "PCA does not apply to cosine bundles")
            }
            _ => {}
        }
        if let Some(label) = &b.label {
            if !valid_label(label) {
                return bad(
                    format!("bundles[{i}].label"),
                    "use only letters, digits, `-`, `_` and `.`",
                );
            }
        }
    }
    let a = &config.analyses;
    if a.mds_dims < 2 {
        return bad(
            "analyses.mds_dims".into(),
            "must be at least 2 (the scatter plot uses two coordinates)",
        );
    }
    if a.cca_components == Some(0) {
        return bad("analyses.cca_components".into(), "must be at least 1");
    }
    if let Some(r) = a.ridge {
        if !(r.is_finite() && r >= 0.0) {
            return bad("analyses.ridge".into(), "must be finite and non-negative");
        }
    }
    if let Some(c) = a.heatmap_ceiling {
        if !(c.is_finite() && c > 0.0) {
            return bad("analyses.heatmap_ceiling".into(), "must be finite and positive");
        }
    }
    let g = &a.alpha_grid;
    if !(g.lo_factor > 0.0 && g.hi_factor > g.lo_factor && g.hi_factor.is_finite()) {
        return bad("analyses.alpha_grid".into(), "need 0 < lo_factor < hi_factor < inf");
    }
    if g.grid_points < 3 {
        return bad("analyses.alpha_grid.grid_points".into(), "must be at least 3");
    }
    if g.rel_tol.is_nan() || g.rel_tol < 0.0 {
        return bad("analyses.alpha_grid.rel_tol".into(), "must be non-negative");
    }
    Ok(())
}

fn valid_label(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c))
}

/// Loads the config at `path` and runs it on a pool of `options.threads`
/// workers (all cores when unset).
pub fn run_config_file(path: &Path, options: &RunOptions) -> Result<Report, PipelineError> {
    let config = load_config(path)?;
    run_pipeline(&config, options)
}

pub fn run_pipeline(config: &Config, options: &RunOptions) -> Result<Report, PipelineError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = options.threads {
        if t == 0 {
            return Err(PipelineError::Config("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| PipelineError::Config(format!("thread pool: {e}")))?;
    pool.install(|| Run::new(config, options).execute())
}

struct Source {
    label: String,
    metric: &'static str,
    bundle: Option<String>,
    pca: Option<usize>,
    matrix: DistanceMatrix,
}

/// A bundle after optional PCA, with diagrams computed on first use.
struct Prepared {
    bundle: EmbeddingBundle,
    /// Stem for per-bundle artifacts, e.g. `tokens` or `tokens-pca2`.
    key: String,
    diagrams: Option<Vec<PersistenceDiagram>>,
}

struct Run<'a> {
    config: &'a Config,
    options: &'a RunOptions,
    out: PathBuf,
    ridge: Ridge,
    mode: HausdorffMode,
}

impl<'a> Run<'a> {
    fn new(config: &'a Config, options: &'a RunOptions) -> Self {
        let ridge = match options.ridge.or(config.analyses.ridge) {
            Some(r) => Ridge::Fixed(r),
            None => Ridge::default(),
        };
        let mode = if options.directed_hausdorff {
            HausdorffMode::Directed
        } else {
            HausdorffMode::Symmetric
        };
        Self {
            config,
            options,
            out: options.out_dir.clone().unwrap_or_else(|| config.out_dir.clone()),
            ridge,
            mode,
        }
    }

    fn execute(&self) -> Result<Report, PipelineError> {
        if let Ridge::Fixed(r) = self.ridge {
            if !(r.is_finite() && r >= 0.0) {
                return Err(PipelineError::Config(format!(
                    "--ridge must be finite and non-negative, got {r}"
                )));
            }
        }
        let sentences = corpus::load_corpus(&self.config.corpus).map_err(data)?;
        for dir in ["matrices", "heatmaps", "mds", "curves"] {
            self.mkdir(&self.out.join(dir))?;
        }

        let mut sources = vec![Source {
            label: "levenshtein".into(),
            metric: "levenshtein",
            bundle: None,
            pca: None,
            matrix: levenshtein_matrix(&sentences).map_err(data)?,
        }];
        let mut prepared: Vec<Prepared> = Vec::new();
        let mut by_key: HashMap<(PathBuf, Option<usize>), usize> = HashMap::new();
        let mut pca_records = Vec::new();
        for (i, spec) in self.config.bundles.iter().enumerate() {
            let slot = match by_key.get(&(spec.manifest.clone(), spec.pca)) {
                Some(&slot) => slot,
                None => {
                    let (p, pca) = self.prepare(spec, &sentences)?;
                    pca_records.extend(pca);
                    prepared.push(p);
                    by_key.insert((spec.manifest.clone(), spec.pca), prepared.len() - 1);
                    prepared.len() - 1
                }
            };
            let entry = &mut prepared[slot];
            let label = spec
                .label
                .clone()
                .unwrap_or_else(|| format!("{}-{}", entry.key, spec.metric.suffix()));
            if sources.iter().any(|s| s.label == label) {
                return Err(PipelineError::Config(format!(
                    "field `bundles[{i}]`: duplicate source label `{label}` (set `label` to disambiguate)"
                )));
            }
            let matrix = self.source_matrix(entry, spec.metric, &label)?;
            sources.push(Source {
                label,
                metric: spec.metric.name(),
                bundle: Some(entry.bundle.name.clone()),
                pca: spec.pca,
                matrix,
            });
        }

        let mut records = Vec::with_capacity(sources.len());
        let mut embeddings = Vec::with_capacity(sources.len());
        for s in &sources {
            let (record, embedding) = self.emit_source(s)?;
            records.push(record);
            embeddings.push(embedding);
        }

        let analysis_set: Vec<String> = sources
            .iter()
            .filter(|s| s.metric != "bottleneck-h0" || self.include_h0())
            .map(|s| s.label.clone())
            .collect();
        let pairs = self.pairs(&sources, &analysis_set)?;
        let results: Vec<PairResult> = pairs
            .par_iter()
            .map(|&(a, b)| self.analyse_pair(&sources[a], &sources[b]))
            .collect::<Result<_, _>>()?;

        let mut pair_records = Vec::with_capacity(pairs.len());
        for (&(a, b), result) in pairs.iter().zip(results) {
            let curve = format!("curves/{}__{}.csv", sources[a].label, sources[b].label);
            self.write(&curve, curve_csv(&result))?;
            pair_records.push(PairRecord {
                pair: [sources[a].label.clone(), sources[b].label.clone()],
                mds: PairMds {
                    strain: [embeddings[a].strain, embeddings[b].strain],
                    coords: [records[a].mds.coords.clone(), records[b].mds.coords.clone()],
                },
                cca: result.cca,
                scaled_hausdorff: HausdorffRecord {
                    mode: mode_name(self.mode).into(),
                    alpha_star: result.primary.0,
                    distance: result.primary.1,
                    symmetric_alpha_star: result.symmetric.alpha_star,
                    symmetric_distance: result.symmetric.distance,
                    directed_alpha_star: result.directed.alpha_star,
                    directed_distance: result.directed.distance,
                    modes_disagree: result.symmetric.distance != result.directed.distance,
                    curve,
                },
            });
        }

        let report = Report {
            corpus: CorpusSummary {
                sentences: sentences.len(),
                max_tokens: sentences.iter().map(|s| s.tokens.len()).max().unwrap_or(0),
            },
            sources: records,
            pca: pca_records,
            analysis_set,
            pairs: pair_records,
        };
        report::write_json(&report, &self.out.join("report.json"))
            .map_err(|e| data(format!("{}: {e}", self.out.join("report.json").display())))?;
        Ok(report)
    }

    fn include_h0(&self) -> bool {
        self.options.include_h0 || self.config.analyses.include_h0
    }

    fn mkdir(&self, dir: &Path) -> Result<(), PipelineError> {
        fs::create_dir_all(dir).map_err(|e| data(format!("{}: {e}", dir.display())))
    }

    fn write(&self, rel: &str, contents: impl AsRef<[u8]>) -> Result<(), PipelineError> {
        let path = self.out.join(rel);
        fs::write(&path, contents).map_err(|e| data(format!("{}: {e}", path.display())))
    }

    fn prepare(
        &self,
        spec: &BundleSpec,
        sentences: &[SentenceRecord],
    ) -> Result<(Prepared, Option<PcaRecord>), PipelineError> {
        let bundle = corpus::load_bundle(&spec.manifest)
            .map_err(|e| data(format!("bundle manifest {}: {e}", spec.manifest.display())))?;
        bundle
            .check_corpus_size(sentences.len())
            .map_err(|e| data(format!("bundle manifest {}: {e}", spec.manifest.display())))?;
        if !valid_label(&bundle.name) {
            return Err(data(format!(
                "bundle manifest {}: name `{}` is not usable in file names",
                spec.manifest.display(),
                bundle.name
            )));
        }
        let Some(k) = spec.pca else {
            let key = bundle.name.clone();
            return Ok((
                Prepared {
                    bundle,
                    key,
                    diagrams: None,
                },
                None,
            ));
        };

        let key = format!("{}-pca{k}", bundle.name);
        let reduced: Vec<(PointCloud, usize, Option<f64>)> = bundle
            .clouds
            .par_iter()
            .map(|c| reduce_cloud(c, k))
            .collect::<Result<_, _>>()
            .map_err(|e| PipelineError::Numeric(format!("{key}: {e}")))?;
        self.mkdir(&self.out.join("pca"))?;
        let mut csv = String::from("sentence,rows,components,variance_captured\n");
        let mut captured = Vec::new();
        for (cloud, kept, variance) in &reduced {
            let v = variance.map(|v| format!("{v:?}")).unwrap_or_default();
            csv.push_str(&format!("{},{},{kept},{v}\n", cloud.sentence_id, cloud.len()));
            captured.extend(*variance);
        }
        let file = format!("pca/{key}.csv");
        self.write(&file, csv)?;
        let record = PcaRecord {
            bundle: bundle.name.clone(),
            components: k,
            file,
            mean_variance_captured: (!captured.is_empty())
                .then(|| captured.iter().sum::<f64>() / captured.len() as f64),
        };
        let bundle = EmbeddingBundle {
            name: bundle.name,
            dim: k,
            clouds: reduced.into_iter().map(|(c, _, _)| c).collect(),
        };
        Ok((
            Prepared {
                bundle,
                key,
                diagrams: None,
            },
            Some(record),
        ))
    }

    fn source_matrix(&self, p: &mut Prepared, metric: Metric, label: &str) -> Result<DistanceMatrix, PipelineError> {
        let dim = match metric {
            Metric::Cosine => {
                return cosine_matrix(&p.bundle)
                    .map(|m| m.with_source(label))
                    .map_err(|e| data(format!("{label}: {e}")));
            }
            Metric::BottleneckH0 => 0,
            Metric::BottleneckH1 => 1,
        };
        if p.diagrams.is_none() {
            let diagrams: Vec<PersistenceDiagram> = p
                .bundle
                .clouds
                .par_iter()
                .map(|c| topology::rips_diagram(c, 1))
                .collect::<Result<_, TopologyError>>()
                .map_err(|e| PipelineError::Numeric(format!("{}: {e}", p.key)))?;
            let dir = format!("diagrams/{}", p.key);
            self.mkdir(&self.out.join(&dir))?;
            for d in &diagrams {
                let mut buf = Vec::new();
                d.write_csv(&mut buf).map_err(data)?;
                self.write(&format!("{dir}/{}.csv", d.cloud_id), buf)?;
            }
            p.diagrams = Some(diagrams);
        }
        let diagrams = p.diagrams.as_deref().unwrap_or_default();
        bottleneck_matrix(diagrams, dim, label).map_err(|e| PipelineError::Numeric(format!("{label}: {e}")))
    }

    fn emit_source(&self, s: &Source) -> Result<(SourceRecord, MdsEmbedding), PipelineError> {
        let violations = matrices::validate(&s.matrix, false);
        if let Some(v) = violations.first() {
            return Err(PipelineError::Numeric(format!(
                "matrix `{}` failed validation ({} violations, first: {v})",
                s.label,
                violations.len()
            )));
        }
        let matrix = format!("matrices/{}.csv", s.label);
        matrices::write_csv(&s.matrix, &self.out.join(&matrix)).map_err(data)?;
        let heatmap = format!("heatmaps/{}.svg", s.label);
        let svg = render::heatmap_svg(&s.matrix, self.config.analyses.heatmap_ceiling)
            .map_err(|e| PipelineError::Numeric(format!("{}: {e}", s.label)))?;
        self.write(&heatmap, svg)?;

        let embedding = self.mds(s)?;
        let coords = format!("mds/{}.csv", s.label);
        let mut buf = Vec::new();
        report::write_points_csv_to(embedding.coords.view(), &mut buf).map_err(data)?;
        self.write(&coords, buf)?;
        let plot = format!("mds/{}.svg", s.label);
        let svg = render::scatter_svg(&embedding, &s.label)
            .map_err(|e| PipelineError::Numeric(format!("{}: {e}", s.label)))?;
        self.write(&plot, svg)?;

        let record = SourceRecord {
            label: s.label.clone(),
            metric: s.metric.into(),
            bundle: s.bundle.clone(),
            pca: s.pca,
            matrix,
            heatmap,
            max_entry: s.matrix.max_entry(),
            mds: MdsRecord {
                coords,
                plot,
                strain: embedding.strain,
                eigenvalues: embedding.eigenvalues_used.clone(),
                warnings: embedding.warnings.clone(),
            },
        };
        Ok((record, embedding))
    }

    /// MDS with the configured dimension; matrices too small or with all
    /// points coincident get all-zero coordinates and a warning.
    fn mds(&self, s: &Source) -> Result<MdsEmbedding, PipelineError> {
        let n = s.matrix.n();
        let m = self.config.analyses.mds_dims;
        let zeros = |why: String| MdsEmbedding {
            coords: ndarray::Array2::zeros((n, m)),
            eigenvalues_used: vec![0.0; m],
            strain: 0.0,
            warnings: vec![why],
        };
        if n < m {
            let mut e = match correlation::classical_mds(&s.matrix, n) {
                Ok(e) => e,
                Err(CorrelationError::NoPositiveEigenvalue) => return Ok(zeros("all points coincide".into())),
                Err(e) => return Err(PipelineError::Numeric(format!("{}: MDS: {e}", s.label))),
            };
            let mut coords = ndarray::Array2::zeros((n, m));
            coords.slice_mut(ndarray::s![.., ..n]).assign(&e.coords);
            e.coords = coords;
            e.eigenvalues_used.resize(m, 0.0);
            e.warnings
                .push(format!("only {n} points; coordinates beyond {n} are zero"));
            return Ok(e);
        }
        match correlation::classical_mds(&s.matrix, m) {
            Ok(e) => Ok(e),
            Err(CorrelationError::NoPositiveEigenvalue) => Ok(zeros("all points coincide".into())),
            Err(e) => Err(PipelineError::Numeric(format!("{}: MDS: {e}", s.label))),
        }
    }

    fn pairs(&self, sources: &[Source], analysis_set: &[String]) -> Result<Vec<(usize, usize)>, PipelineError> {
        let index = |label: &str| sources.iter().position(|s| s.label == label);
        match &self.config.analyses.pairs {
            PairSelection::All(_) => {
                let idx: Vec<usize> = analysis_set.iter().filter_map(|l| index(l)).collect();
                Ok(matrices::upper_pairs(idx.len())
                    .map(|(i, j)| (idx[i], idx[j]))
                    .collect())
            }
            PairSelection::Explicit(list) => list
                .iter()
                .enumerate()
                .map(|(k, [a, b])| {
                    let find = |l: &str| {
                        index(l).ok_or_else(|| {
                            PipelineError::Config(format!("field `analyses.pairs[{k}]`: unknown source `{l}`"))
                        })
                    };
                    let (ia, ib) = (find(a)?, find(b)?);
                    if ia == ib {
                        return Err(PipelineError::Config(format!(
                            "field `analyses.pairs[{k}]`: a source cannot be paired with itself"
                        )));
                    }
                    Ok((ia, ib))
                })
                .collect(),
        }
    }

    fn analyse_pair(&self, a: &Source, b: &Source) -> Result<PairResult, PipelineError> {
        let fail = |what: &str, e: CorrelationError| {
            PipelineError::Numeric(format!("pair ({}, {}): {what}: {e}", a.label, b.label))
        };
        let x = correlation::matrix_to_pointset(&a.matrix).map_err(|e| fail("point set", e))?;
        let y = correlation::matrix_to_pointset(&b.matrix).map_err(|e| fail("point set", e))?;
        let cca = self.cca(&x, &y).map_err(|e| fail("CCA", e))?;
        let grid = &self.config.analyses.alpha_grid;
        let symmetric = correlation::scaled_hausdorff(x.view(), y.view(), grid, HausdorffMode::Symmetric);
        let directed = correlation::scaled_hausdorff(x.view(), y.view(), grid, HausdorffMode::Directed);
        let (symmetric, directed) = match (symmetric, directed) {
            (Ok(s), Ok(d)) => (s, d),
            (Err(e), _) | (_, Err(e)) => return Err(fail("scaled Hausdorff", e)),
        };
        let primary = match self.mode {
            HausdorffMode::Symmetric => (symmetric.alpha_star, symmetric.distance),
            HausdorffMode::Directed => (directed.alpha_star, directed.distance),
        };
        Ok(PairResult {
            cca,
            primary,
            symmetric,
            directed,
        })
    }

    fn cca(&self, x: &ndarray::Array2<f64>, y: &ndarray::Array2<f64>) -> Result<CcaRecord, CorrelationError> {
        let n = x.nrows();
        if n < 2 {
            return Ok(CcaRecord::Skipped {
                reason: format!("{n} sample; CCA needs at least 2"),
            });
        }
        let configured = self.config.analyses.cca_components;
        let mut k = configured.unwrap_or(n - 1);
        loop {
            match correlation::cca(x.view(), y.view(), k, self.ridge) {
                Ok(r) => {
                    return Ok(CcaRecord::Ok {
                        components: k,
                        correlations: r.correlations,
                        ridge: [r.ridge.0, r.ridge.1],
                    })
                }
                Err(CorrelationError::SingularCovariance { rank, .. }) if configured.is_none() && rank < k => {
                    if rank == 0 {
                        return Ok(CcaRecord::Skipped {
                            reason: "a covariance block has rank 0".into(),
                        });
                    }
                    k = rank;
                }
                Err(e) => return Err(e),
            }
        }
    }
}

struct PairResult {
    cca: CcaRecord,
    primary: (f64, f64),
    symmetric: correlation::ScaledHausdorffResult,
    directed: correlation::ScaledHausdorffResult,
}

fn mode_name(mode: HausdorffMode) -> &'static str {
    match mode {
        HausdorffMode::Symmetric => "symmetric",
        HausdorffMode::Directed => "directed",
    }
}

/// `alpha,symmetric,directed`; both searches sample the same grid.
fn curve_csv(r: &PairResult) -> String {
    let mut out = String::from("alpha,symmetric,directed\n");
    for (&(alpha, s), &(_, d)) in r.symmetric.curve.iter().zip(&r.directed.curve) {
        out.push_str(&format!("{alpha:?},{s:?},{d:?}\n"));
    }
    out
}

/// PCA to `k` components. Clouds with fewer than `k + 1` points already
/// lie in a subspace of dimension below `k`, so they are projected onto
/// every direction they span and padded with zero columns; distances are
/// unchanged. Returns the reduced cloud, the number of real components, and
/// the captured variance when PCA ran.
fn reduce_cloud(c: &PointCloud, k: usize) -> Result<(PointCloud, usize, Option<f64>), TopologyError> {
    let (rows, dim) = c.points().dim();
    let kept = k.min(rows.saturating_sub(1)).min(dim);
    let mut out = ndarray::Array2::zeros((rows, k));
    if kept == 0 {
        return Ok((PointCloud::new(c.sentence_id, out), 0, None));
    }
    match topology::pca_reduce(c, kept) {
        Ok(p) => {
            out.slice_mut(ndarray::s![.., ..kept]).assign(p.cloud.points());
            Ok((PointCloud::new(c.sentence_id, out), kept, Some(p.variance_captured)))
        }
        Err(TopologyError::ZeroVariance { .. }) => Ok((PointCloud::new(c.sentence_id, out), 0, None)),
        Err(e) => Err(e),
    }
}
