//! Cosine similarity and distance between single-vector embeddings.

use ndarray::ArrayView1;
use rayon::prelude::*;
use thiserror::Error;

use crate::corpus::EmbeddingBundle;
use crate::matrices::{upper_pairs, DistanceMatrix, MatrixError};

#[derive(Debug, Error, PartialEq)]
pub enum CosineError {
    #[error("vectors have different dimensions ({left} vs {right})")]
    DimensionMismatch { left: usize, right: usize },
    #[error("zero-norm vector")]
    ZeroNorm,
    #[error("cosine {value} lies outside [-1, 1]")]
    OutOfRange { value: f64 },
    #[error("sentence {sentence}: cosine distance needs a single vector, cloud has {rows} rows")]
    NotSingleVector { sentence: usize, rows: usize },
    #[error("sentence {sentence}: zero-norm embedding")]
    ZeroNormSentence { sentence: usize },
    #[error("{0}")]
    Matrix(String),
}

impl From<MatrixError> for CosineError {
    fn from(e: MatrixError) -> Self {
        CosineError::Matrix(e.to_string())
    }
}

/// `a.b / (|a| |b|)`, clamped to `[-1, 1]`.
pub fn cosine_similarity(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> Result<f64, CosineError> {
    if a.len() != b.len() {
        return Err(CosineError::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let (na2, nb2) = (a.dot(&a), b.dot(&b));
    if na2 == 0.0 || nb2 == 0.0 {
        return Err(CosineError::ZeroNorm);
    }
    // sqrt(|a|^2 |a|^2) rounds back to |a|^2 exactly, so a == b gives 1
    Ok((a.dot(&b) / (na2 * nb2).sqrt()).clamp(-1.0, 1.0))
}

/// `1 - cosine_similarity`, in `[0, 2]`.
pub fn cosine_distance(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> Result<f64, CosineError> {
    cosine_similarity(a, b).map(|s| 1.0 - s)
}

/// Bounds on `cos(A, B)` given `cos(A, C)` and `cos(C, B)`, from the
/// triangle inequality on angles. Returns `(lower, upper)`.
pub fn cosine_bounds(cos_ac: f64, cos_cb: f64) -> Result<(f64, f64), CosineError> {
    for value in [cos_ac, cos_cb] {
        if !(-1.0..=1.0).contains(&value) {
            return Err(CosineError::OutOfRange { value });
        }
    }
    let product = cos_ac * cos_cb;
    let spread = ((1.0 - cos_ac * cos_ac) * (1.0 - cos_cb * cos_cb)).max(0.0).sqrt();
    Ok((product - spread, product + spread))
}

/// Pairwise cosine distances between single-row clouds.
pub fn cosine_matrix(bundle: &EmbeddingBundle) -> Result<DistanceMatrix, CosineError> {
    for cloud in &bundle.clouds {
        if cloud.len() != 1 {
            return Err(CosineError::NotSingleVector {
                sentence: cloud.sentence_id,
                rows: cloud.len(),
            });
        }
        let v = cloud.point(0);
        if v.dot(&v) == 0.0 {
            return Err(CosineError::ZeroNormSentence {
                sentence: cloud.sentence_id,
            });
        }
    }
    let n = bundle.clouds.len();
    let pairs: Vec<(usize, usize)> = upper_pairs(n).collect();
    let upper: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| cosine_distance(bundle.clouds[i].point(0), bundle.clouds[j].point(0)))
        .collect::<Result<_, _>>()?;
    Ok(DistanceMatrix::from_upper(
        format!("{}-cosine", bundle.name),
        n,
        &upper,
    )?)
}
