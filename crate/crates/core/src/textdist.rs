//! Word-level edit distance.

use rayon::prelude::*;

use crate::corpus::SentenceRecord;
use crate::matrices::{upper_pairs, DistanceMatrix, MatrixError};

/// Minimum number of whole-word insertions, deletions and substitutions
/// turning `x` into `y`. Unit cost, exact string comparison.
pub fn levenshtein_words<S: AsRef<str>>(x: &[S], y: &[S]) -> usize {
    // keep the rolling row over the shorter sequence
    let (long, short) = if x.len() >= y.len() { (x, y) } else { (y, x) };
    if short.is_empty() {
        return long.len();
    }

    let mut prev: Vec<usize> = (0..=short.len()).collect();
    let mut curr = vec![0; short.len() + 1];
    for (i, a) in long.iter().enumerate() {
        curr[0] = i + 1;
        for (j, b) in short.iter().enumerate() {
            let substitute = prev[j] + usize::from(a.as_ref() != b.as_ref());
            curr[j + 1] = substitute.min(prev[j + 1] + 1).min(curr[j] + 1);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[short.len()]
}

pub fn levenshtein_matrix(corpus: &[SentenceRecord]) -> Result<DistanceMatrix, MatrixError> {
    let n = corpus.len();
    let pairs: Vec<(usize, usize)> = upper_pairs(n).collect();
    let upper: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| levenshtein_words(&corpus[i].tokens, &corpus[j].tokens) as f64)
        .collect();
    DistanceMatrix::from_upper("levenshtein", n, &upper)
}
