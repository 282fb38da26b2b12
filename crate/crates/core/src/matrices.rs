//! Dense pairwise distance matrices tagged with the metric that produced them.
//!
//! On-disk format is a comment header followed by `n` lines of `n`
//! comma-separated decimals:
//!
//! ```text
//! # distance-matrix source=levenshtein n=3
//! 0,2,5
//! 2,0,4
//! 5,4,0
//! ```
//!
//! Infinite entries (possible for bottleneck matrices) are written as `inf`.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use ndarray::Array2;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("matrix must have at least one row")]
    Empty,
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}:{line}: {message}", path.display())]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{}:{line}: expected {expected} fields, found {found}", path.display())]
    RaggedRow {
        path: PathBuf,
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("matrix `{source_label}` has an infinite entry at ({row}, {col})")]
    Infinite {
        source_label: String,
        row: usize,
        col: usize,
    },
}

/// A symmetric, zero-diagonal, non-negative `n x n` matrix.
///
/// Construction from a pair function fills the upper triangle and mirrors
/// it, so symmetry is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    source: String,
    values: Array2<f64>,
}

impl DistanceMatrix {
    /// Wraps raw values without checking invariants; see [`validate`].
    pub fn from_array(source: impl Into<String>, values: Array2<f64>) -> Result<Self, MatrixError> {
        let (rows, cols) = values.dim();
        if rows == 0 {
            return Err(MatrixError::Empty);
        }
        if rows != cols {
            return Err(MatrixError::NotSquare { rows, cols });
        }
        Ok(Self {
            source: source.into(),
            values,
        })
    }

    /// Builds a matrix by evaluating `f(i, j)` for `i < j` and mirroring.
    pub fn from_pairs<F>(source: impl Into<String>, n: usize, f: F) -> Result<Self, MatrixError>
    where
        F: Fn(usize, usize) -> f64,
    {
        let upper: Vec<f64> = upper_pairs(n).map(|(i, j)| f(i, j)).collect();
        Self::from_upper(source, n, &upper)
    }

    /// Builds a matrix from row-major upper-triangle values (`i < j`).
    pub fn from_upper(source: impl Into<String>, n: usize, upper: &[f64]) -> Result<Self, MatrixError> {
        if n == 0 {
            return Err(MatrixError::Empty);
        }
        assert_eq!(upper.len(), n * (n - 1) / 2, "upper triangle length");
        let mut values = Array2::zeros((n, n));
        for ((i, j), &v) in upper_pairs(n).zip(upper) {
            values[[i, j]] = v;
            values[[j, i]] = v;
        }
        Ok(Self {
            source: source.into(),
            values,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[[i, j]]
    }

    pub fn max_entry(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Fails on the first infinite entry, scanning row-major.
    pub fn ensure_finite(&self) -> Result<(), MatrixError> {
        for ((row, col), v) in self.values.indexed_iter() {
            if !v.is_finite() {
                return Err(MatrixError::Infinite {
                    source_label: self.source.clone(),
                    row,
                    col,
                });
            }
        }
        Ok(())
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = source.into();
        self
    }
}

/// All `(i, j)` with `i < j < n`, row-major.
pub fn upper_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> + Clone {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Asymmetric { row: usize, col: usize },
    NonZeroDiagonal { index: usize },
    Negative { row: usize, col: usize },
    NotANumber { row: usize, col: usize },
    Infinite { row: usize, col: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Asymmetric { row, col } => write!(f, "asymmetric at ({row}, {col})"),
            Violation::NonZeroDiagonal { index } => write!(f, "non-zero diagonal at {index}"),
            Violation::Negative { row, col } => write!(f, "negative entry at ({row}, {col})"),
            Violation::NotANumber { row, col } => write!(f, "NaN at ({row}, {col})"),
            Violation::Infinite { row, col } => write!(f, "infinite entry at ({row}, {col})"),
        }
    }
}

/// Reports every broken invariant. Infinite entries are reported only when
/// `allow_infinite` is false.
pub fn validate(m: &DistanceMatrix, allow_infinite: bool) -> Vec<Violation> {
    let n = m.n();
    let v = &m.values;
    let mut out = Vec::new();
    for i in 0..n {
        if v[[i, i]] != 0.0 {
            out.push(Violation::NonZeroDiagonal { index: i });
        }
    }
    for (i, j) in upper_pairs(n) {
        let (a, b) = (v[[i, j]], v[[j, i]]);
        // NaN != NaN, report it as NaN rather than asymmetry
        if !(a.is_nan() || b.is_nan()) && a != b {
            out.push(Violation::Asymmetric { row: i, col: j });
        }
    }
    for ((row, col), &x) in v.indexed_iter() {
        if x.is_nan() {
            out.push(Violation::NotANumber { row, col });
        } else if x < 0.0 {
            out.push(Violation::Negative { row, col });
        } else if x.is_infinite() && !allow_infinite {
            out.push(Violation::Infinite { row, col });
        }
    }
    out
}

fn format_value(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".to_string()
    } else {
        // shortest representation that parses back to the same bits
        format!("{x:?}")
    }
}

pub fn write_csv(m: &DistanceMatrix, path: &Path) -> Result<(), MatrixError> {
    let io_err = |source| MatrixError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut out = io::BufWriter::new(fs::File::create(path).map_err(io_err)?);
    write_csv_to(m, &mut out).map_err(io_err)?;
    out.flush().map_err(io_err)
}

pub fn write_csv_to<W: Write>(m: &DistanceMatrix, out: &mut W) -> io::Result<()> {
    writeln!(out, "# distance-matrix source={} n={}", m.source, m.n())?;
    for row in m.values.rows() {
        let line: Vec<String> = row.iter().map(|&x| format_value(x)).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<DistanceMatrix, MatrixError> {
    let text = fs::read_to_string(path).map_err(|source| MatrixError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_csv(&text, path)
}

pub fn parse_csv(text: &str, path: &Path) -> Result<DistanceMatrix, MatrixError> {
    let malformed = |line: usize, message: String| MatrixError::Malformed {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
    let (_, header) = lines.next().ok_or_else(|| malformed(1, "empty file".into()))?;
    let (source, n) = parse_header(header).ok_or_else(|| {
        malformed(
            1,
            format!("expected `# distance-matrix source=<label> n=<n>`, found `{header}`"),
        )
    })?;
    if n == 0 {
        return Err(malformed(1, "n must be positive".into()));
    }

    let mut values = Array2::zeros((n, n));
    let mut row = 0;
    for (line_no, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        if row == n {
            return Err(malformed(line_no, format!("more than {n} data rows")));
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != n {
            return Err(MatrixError::RaggedRow {
                path: path.to_path_buf(),
                line: line_no,
                expected: n,
                found: fields.len(),
            });
        }
        for (col, field) in fields.iter().enumerate() {
            values[[row, col]] = parse_value(field.trim())
                .ok_or_else(|| malformed(line_no, format!("invalid value `{field}` in column {col}")))?;
        }
        row += 1;
    }
    if row != n {
        return Err(malformed(
            text.lines().count(),
            format!("expected {n} data rows, found {row}"),
        ));
    }
    Ok(DistanceMatrix { source, values })
}

fn parse_header(line: &str) -> Option<(String, usize)> {
    let rest = line.strip_prefix('#')?.trim();
    let rest = rest.strip_prefix("distance-matrix")?.trim();
    let (source_part, n_part) = rest.rsplit_once(' ')?;
    let source = source_part.trim().strip_prefix("source=")?.to_string();
    let n = n_part.strip_prefix("n=")?.parse().ok()?;
    Some((source, n))
}

fn parse_value(field: &str) -> Option<f64> {
    if field == "inf" {
        return Some(f64::INFINITY);
    }
    let v: f64 = field.parse().ok()?;
    // Rust accepts "NaN", "infinity" and friends; only the literal `inf` is allowed
    v.is_finite().then_some(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn sample() -> DistanceMatrix {
        DistanceMatrix::from_array("t", array![[0.0, 1.0, 2.0], [1.0, 0.0, 3.0], [2.0, 3.0, 0.0]]).unwrap()
    }

    #[test]
    fn valid_matrix_has_no_violations() {
        assert!(validate(&sample(), false).is_empty());
    }

    #[test]
    fn asymmetry_is_reported_with_indices() {
        let mut m = sample();
        m.values[[0, 1]] = 1.5;
        assert_eq!(validate(&m, false), vec![Violation::Asymmetric { row: 0, col: 1 }]);
    }

    #[test]
    fn diagonal_violation_is_reported() {
        let mut m = sample();
        m.values[[2, 2]] = 0.5;
        assert_eq!(validate(&m, false), vec![Violation::NonZeroDiagonal { index: 2 }]);
    }

    #[test]
    fn infinite_entries_depend_on_policy() {
        let m = DistanceMatrix::from_upper("b", 2, &[f64::INFINITY]).unwrap();
        assert!(validate(&m, true).is_empty());
        assert_eq!(validate(&m, false).len(), 2);
        assert!(matches!(
            m.ensure_finite(),
            Err(MatrixError::Infinite { row: 0, col: 1, .. })
        ));
    }

    #[test]
    fn one_by_one_zero_matrix_format() {
        let m = DistanceMatrix::from_upper("levenshtein", 1, &[]).unwrap();
        let mut buf = Vec::new();
        write_csv_to(&m, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "# distance-matrix source=levenshtein n=1\n0.0\n"
        );
    }

    #[test]
    fn round_trip_preserves_values_and_label() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let m = DistanceMatrix::from_upper("gpt-h1-bottleneck", 3, &[1.5, 0.1 + 0.2, f64::INFINITY]).unwrap();
        write_csv(&m, &path).unwrap();
        assert_eq!(read_csv(&path).unwrap(), m);
    }

    #[test]
    fn ragged_row_is_rejected() {
        let err = parse_csv("# distance-matrix source=x n=2\n0,1,2\n1,0\n", Path::new("m.csv")).unwrap_err();
        assert!(matches!(
            err,
            MatrixError::RaggedRow {
                line: 2,
                expected: 2,
                found: 3,
                ..
            }
        ));
    }

    #[test]
    fn nan_and_other_infinity_spellings_are_rejected() {
        for bad in ["nan", "NaN", "infinity", "-inf"] {
            let text = format!("# distance-matrix source=x n=2\n0,{bad}\n1,0\n");
            assert!(matches!(
                parse_csv(&text, Path::new("m.csv")),
                Err(MatrixError::Malformed { line: 2, .. })
            ));
        }
    }

    #[test]
    fn missing_rows_are_rejected() {
        assert!(parse_csv("# distance-matrix source=x n=2\n0,1\n", Path::new("m.csv")).is_err());
    }

    #[test]
    fn crlf_input_is_accepted() {
        let m = parse_csv(
            "# distance-matrix source=x n=2\r\n0,1.5\r\n1.5,0\r\n",
            Path::new("m.csv"),
        )
        .unwrap();
        assert_eq!(m.get(0, 1), 1.5);
    }
}
