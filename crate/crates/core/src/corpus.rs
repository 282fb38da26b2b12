//! Sentence corpora and embedding bundles.
//!
//! A corpus is a UTF-8 file with one sentence per line. A bundle is a JSON
//! manifest pointing at one headerless CSV matrix per sentence:
//!
//! ```json
//! {"name": "gpt2", "dim": 768, "sentences": [{"id": 0, "file": "s0.csv"}]}
//! ```

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use ndarray::{Array2, ArrayView1};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}: invalid UTF-8 on line {line}", path.display())]
    InvalidUtf8 { path: PathBuf, line: usize },
    #[error("{}: corpus is empty", path.display())]
    EmptyCorpus { path: PathBuf },
    #[error("{}: line {line} is blank", path.display())]
    BlankLine { path: PathBuf, line: usize },
    #[error("{}: invalid manifest: {message}", path.display())]
    Schema { path: PathBuf, message: String },
    #[error("{}: expected sentence id {expected}, found {found}", path.display())]
    MissingSentence {
        path: PathBuf,
        expected: usize,
        found: usize,
    },
    #[error("{}:{row}: expected {expected} values, found {found}", path.display())]
    DimensionMismatch {
        path: PathBuf,
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("{}:{row}: non-finite value `{token}`", path.display())]
    NonFinite { path: PathBuf, row: usize, token: String },
    #[error("{}:{row}: cannot parse `{token}` as a number", path.display())]
    Parse { path: PathBuf, row: usize, token: String },
    #[error("{}: matrix has no rows", path.display())]
    EmptyCloud { path: PathBuf },
    #[error("bundle `{bundle}` has {found} clouds, corpus has {expected} sentences")]
    CorpusSizeMismatch {
        bundle: String,
        expected: usize,
        found: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceRecord {
    pub id: usize,
    pub text: String,
    pub tokens: Vec<String>,
}

impl SentenceRecord {
    pub fn new(id: usize, text: impl Into<String>) -> Self {
        let text = text.into();
        let tokens = tokenize(&text);
        Self { id, text, tokens }
    }
}

/// Splits on runs of Unicode whitespace. Case and punctuation are kept.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_owned).collect()
}

pub fn load_corpus(path: &Path) -> Result<Vec<SentenceRecord>, CorpusError> {
    let bytes = fs::read(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_corpus(&bytes, path)
}

pub fn parse_corpus(bytes: &[u8], path: &Path) -> Result<Vec<SentenceRecord>, CorpusError> {
    let mut lines: Vec<&[u8]> = bytes.split(|&b| b == b'\n').collect();
    // a trailing newline leaves one empty slice behind
    if lines.last().is_some_and(|l| l.is_empty()) {
        lines.pop();
    }
    if lines.is_empty() {
        return Err(CorpusError::EmptyCorpus {
            path: path.to_path_buf(),
        });
    }

    let mut records = Vec::with_capacity(lines.len());
    for (idx, raw) in lines.into_iter().enumerate() {
        let line_no = idx + 1;
        let raw = raw.strip_suffix(b"\r").unwrap_or(raw);
        let text = std::str::from_utf8(raw).map_err(|_| CorpusError::InvalidUtf8 {
            path: path.to_path_buf(),
            line: line_no,
        })?;
        if text.trim().is_empty() {
            return Err(CorpusError::BlankLine {
                path: path.to_path_buf(),
                line: line_no,
            });
        }
        records.push(SentenceRecord::new(idx, text));
    }
    Ok(records)
}

/// One sentence's embedding: rows are points (word vectors, or a single
/// sentence vector).
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub sentence_id: usize,
    points: Array2<f64>,
}

impl PointCloud {
    /// Panics if `points` has no rows, no columns, or a non-finite entry.
    pub fn new(sentence_id: usize, points: Array2<f64>) -> Self {
        assert!(
            points.nrows() > 0 && points.ncols() > 0,
            "point cloud must be non-empty"
        );
        assert!(
            points.iter().all(|v| v.is_finite()),
            "point cloud entries must be finite"
        );
        Self { sentence_id, points }
    }

    pub fn points(&self) -> &Array2<f64> {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.points.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    pub fn point(&self, i: usize) -> ArrayView1<'_, f64> {
        self.points.row(i)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingBundle {
    pub name: String,
    pub dim: usize,
    pub clouds: Vec<PointCloud>,
}

impl EmbeddingBundle {
    pub fn check_corpus_size(&self, corpus_len: usize) -> Result<(), CorpusError> {
        if self.clouds.len() != corpus_len {
            return Err(CorpusError::CorpusSizeMismatch {
                bundle: self.name.clone(),
                expected: corpus_len,
                found: self.clouds.len(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub name: String,
    pub dim: usize,
    pub sentences: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub id: usize,
    pub file: PathBuf,
}

pub fn load_bundle(manifest_path: &Path) -> Result<EmbeddingBundle, CorpusError> {
    let text = fs::read_to_string(manifest_path).map_err(|source| CorpusError::Io {
        path: manifest_path.to_path_buf(),
        source,
    })?;
    let schema = |message: String| CorpusError::Schema {
        path: manifest_path.to_path_buf(),
        message,
    };
    let manifest: Manifest = serde_json::from_str(&text).map_err(|e| schema(e.to_string()))?;
    if manifest.dim == 0 {
        return Err(schema("`dim` must be positive".into()));
    }
    if manifest.sentences.is_empty() {
        return Err(schema("`sentences` must not be empty".into()));
    }

    let mut entries = manifest.sentences.clone();
    entries.sort_by_key(|e| e.id);
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let mut clouds = Vec::with_capacity(entries.len());
    for (expected, entry) in entries.iter().enumerate() {
        if entry.id != expected {
            return Err(CorpusError::MissingSentence {
                path: manifest_path.to_path_buf(),
                expected,
                found: entry.id,
            });
        }
        let file = base.join(&entry.file);
        let points = read_points_csv(&file, manifest.dim)?;
        clouds.push(PointCloud::new(entry.id, points));
    }
    Ok(EmbeddingBundle {
        name: manifest.name,
        dim: manifest.dim,
        clouds,
    })
}

/// Reads a headerless CSV with exactly `dim` finite values per line.
pub fn read_points_csv(path: &Path, dim: usize) -> Result<Array2<f64>, CorpusError> {
    let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut data = Vec::new();
    let mut rows = 0;
    for (idx, line) in text.lines().enumerate() {
        let row = idx + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != dim {
            return Err(CorpusError::DimensionMismatch {
                path: path.to_path_buf(),
                row,
                expected: dim,
                found: fields.len(),
            });
        }
        for token in fields {
            let value: f64 = token.parse().map_err(|_| CorpusError::Parse {
                path: path.to_path_buf(),
                row,
                token: token.to_string(),
            })?;
            if !value.is_finite() {
                return Err(CorpusError::NonFinite {
                    path: path.to_path_buf(),
                    row,
                    token: token.to_string(),
                });
            }
            data.push(value);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(CorpusError::EmptyCloud {
            path: path.to_path_buf(),
        });
    }
    Ok(Array2::from_shape_vec((rows, dim), data).expect("row lengths checked"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn corpus(bytes: &[u8]) -> Result<Vec<SentenceRecord>, CorpusError> {
        parse_corpus(bytes, Path::new("corpus.txt"))
    }

    #[test]
    fn lines_become_records_in_order() {
        let recs = corpus(b"the cat sat\na dog\n").unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].id, 0);
        assert_eq!(recs[0].tokens, ["the", "cat", "sat"]);
        assert_eq!(recs[1].id, 1);
        assert_eq!(recs[1].tokens, ["a", "dog"]);
    }

    #[test]
    fn whitespace_runs_are_collapsed() {
        assert_eq!(corpus(b"  a   b  ").unwrap()[0].tokens, ["a", "b"]);
        assert_eq!(corpus(b"a\tb").unwrap()[0].tokens, corpus(b"a b").unwrap()[0].tokens);
    }

    #[test]
    fn punctuation_and_case_are_kept() {
        assert_eq!(
            corpus(b"This is no big deal.").unwrap()[0].tokens,
            ["This", "is", "no", "big", "deal."]
        );
    }

    #[test]
    fn crlf_line_endings() {
        let recs = corpus(b"a b\r\nc\r\n").unwrap();
        assert_eq!(recs[0].text, "a b");
        assert_eq!(recs[1].tokens, ["c"]);
    }

    #[test]
    fn error_cases() {
        assert!(matches!(corpus(b""), Err(CorpusError::EmptyCorpus { .. })));
        assert!(matches!(
            corpus(b"a\n\nb\n"),
            Err(CorpusError::BlankLine { line: 2, .. })
        ));
        assert!(matches!(
            corpus(b"ok\n\xff\xfe\n"),
            Err(CorpusError::InvalidUtf8 { line: 2, .. })
        ));
        assert!(matches!(
            load_corpus(Path::new("/nonexistent/corpus.txt")),
            Err(CorpusError::Io { .. })
        ));
    }

    fn write_bundle(dir: &Path, dim: usize, files: &[(&str, &str)]) -> PathBuf {
        let sentences: Vec<_> = files
            .iter()
            .enumerate()
            .map(|(id, (name, body))| {
                fs::write(dir.join(name), body).unwrap();
                serde_json::json!({"id": id, "file": name})
            })
            .collect();
        let manifest = dir.join("manifest.json");
        let doc = serde_json::json!({"name": "toy", "dim": dim, "sentences": sentences});
        fs::write(&manifest, doc.to_string()).unwrap();
        manifest
    }

    #[test]
    fn bundle_happy_path() {
        let dir = tempfile::tempdir().unwrap();
        let m = write_bundle(dir.path(), 3, &[("a.csv", "1,2,3\n4,5,6\n"), ("b.csv", "0,0,1\n")]);
        let bundle = load_bundle(&m).unwrap();
        assert_eq!(bundle.clouds.len(), 2);
        assert_eq!(bundle.clouds[0].len(), 2);
        assert_eq!(bundle.clouds[1].point(0).to_vec(), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn bundle_dimension_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let m = write_bundle(dir.path(), 3, &[("a.csv", "1,2,3\n"), ("b.csv", "1,2,3,4\n")]);
        assert!(matches!(
            load_bundle(&m),
            Err(CorpusError::DimensionMismatch {
                expected: 3,
                found: 4,
                row: 1,
                ..
            })
        ));
    }

    #[test]
    fn bundle_nan_names_file_and_row() {
        let dir = tempfile::tempdir().unwrap();
        let m = write_bundle(dir.path(), 2, &[("a.csv", "1,2\nnan,1\n")]);
        let err = load_bundle(&m).unwrap_err();
        assert!(matches!(&err, CorpusError::NonFinite { row: 2, .. }));
        assert!(err.to_string().contains("a.csv:2"));
    }

    #[test]
    fn bundle_schema_and_id_errors() {
        let dir = tempfile::tempdir().unwrap();
        let m = dir.path().join("bad.json");
        fs::write(&m, r#"{"name": "x", "sentences": []}"#).unwrap();
        assert!(matches!(load_bundle(&m), Err(CorpusError::Schema { .. })));

        fs::write(dir.path().join("a.csv"), "1\n").unwrap();
        fs::write(
            &m,
            r#"{"name": "x", "dim": 1, "sentences": [{"id": 1, "file": "a.csv"}]}"#,
        )
        .unwrap();
        assert!(matches!(
            load_bundle(&m),
            Err(CorpusError::MissingSentence {
                expected: 0,
                found: 1,
                ..
            })
        ));
    }
}
