//! Cross-matrix analyses: classical MDS, canonical correlation, and
//! (scaled) Hausdorff distance between the row sets of two matrices.

use ndarray::{s, Array1, Array2, ArrayView2};
use serde::Serialize;
use thiserror::Error;

use crate::matrices::{DistanceMatrix, MatrixError};
use crate::numerics::{self, NumericsError};

#[derive(Debug, Error)]
pub enum CorrelationError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("requested {requested} dimensions, allowed range is 1..={max}")]
    ComponentsOutOfRange { requested: usize, max: usize },
    #[error("double-centered matrix has no positive eigenvalue (all points coincide)")]
    NoPositiveEigenvalue,
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("X has {x} rows but Y has {y}")]
    RowMismatch { x: usize, y: usize },
    #[error("covariance of {block} has numerical rank {rank}, fewer than the {k} requested components")]
    SingularCovariance { block: &'static str, rank: usize, k: usize },
    #[error("point set is empty")]
    EmptySet,
    #[error("point sets live in R^{left} and R^{right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("ridge must be finite and non-negative, got {0}")]
    InvalidRidge(f64),
    #[error("degenerate scale search: {0}")]
    DegenerateSearch(String),
}

/// Coordinates recovered by classical MDS.
#[derive(Debug, Clone)]
pub struct MdsEmbedding {
    /// `n x m`; column `i` belongs to `eigenvalues_used[i]`.
    pub coords: Array2<f64>,
    /// Top-`m` eigenvalues of the double-centered matrix, clamped at zero.
    pub eigenvalues_used: Vec<f64>,
    pub strain: f64,
    pub warnings: Vec<String>,
}

/// Classical (Torgerson) MDS into `m` dimensions.
///
/// Squares `D`, double-centers it into `B`, and scales the top-`m`
/// eigenvectors of `B` by the square roots of their eigenvalues. Negative
/// eigenvalues (non-Euclidean input) are clamped to zero and reported in
/// `warnings`. `strain` compares `x_i . x_j` against `b_ij`:
/// `sqrt(sum (b_ij - x_i.x_j)^2 / sum b_ij^2)`.
pub fn classical_mds(d: &DistanceMatrix, m: usize) -> Result<MdsEmbedding, CorrelationError> {
    d.ensure_finite()?;
    let n = d.n();
    if m == 0 || m > n {
        return Err(CorrelationError::ComponentsOutOfRange { requested: m, max: n });
    }
    let squared = d.values().mapv(|v| v * v);
    let b = numerics::double_center(squared.view())?;
    let eig = numerics::sym_eigen(b.view())?;

    let scale = eig.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let tol = scale * n as f64 * f64::EPSILON;
    let positive = eig.values.iter().filter(|&&v| v > tol).count();
    if positive == 0 {
        return Err(CorrelationError::NoPositiveEigenvalue);
    }

    let mut warnings = Vec::new();
    if positive < m {
        warnings.push(format!(
            "only {positive} positive eigenvalue(s) for {m} requested dimensions; trailing coordinates are zero"
        ));
    }
    let negative = eig.values.iter().filter(|&&v| v < -tol).count();
    if negative > 0 {
        let most_negative = eig.values[n - 1];
        warnings.push(format!(
            "{negative} negative eigenvalue(s) clamped to 0 (smallest {most_negative:.3e}); distances are not Euclidean"
        ));
    }

    let used: Vec<f64> = eig
        .values
        .iter()
        .take(m)
        .map(|&v| if v > tol { v } else { 0.0 })
        .collect();
    let mut coords = eig.vectors.slice(s![.., ..m]).to_owned();
    for (mut col, &lambda) in coords.columns_mut().into_iter().zip(&used) {
        col.mapv_inplace(|x| x * lambda.sqrt());
    }
    let strain = strain(&b, &coords);
    Ok(MdsEmbedding {
        coords,
        eigenvalues_used: used,
        strain,
        warnings,
    })
}

fn strain(b: &Array2<f64>, coords: &Array2<f64>) -> f64 {
    let gram = coords.dot(&coords.t());
    let denom: f64 = b.iter().map(|v| v * v).sum();
    if denom == 0.0 {
        return 0.0;
    }
    let num: f64 = b.iter().zip(gram.iter()).map(|(x, y)| (x - y) * (x - y)).sum();
    (num / denom).sqrt()
}

/// Regularisation added to each covariance block before whitening.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Ridge {
    /// Same absolute value on both blocks. Zero selects pseudo-inverse
    /// whitening.
    Fixed(f64),
    /// Multiple of each block's mean diagonal.
    Relative(f64),
}

impl Default for Ridge {
    fn default() -> Self {
        Ridge::Relative(1e-8)
    }
}

#[derive(Debug, Clone)]
pub struct CcaResult {
    /// Canonical correlations, non-increasing, in `[0, 1]`.
    pub correlations: Vec<f64>,
    pub x_weights: Array2<f64>,
    pub y_weights: Array2<f64>,
    pub x_scores: Array2<f64>,
    pub y_scores: Array2<f64>,
    /// Ridge actually applied to `(Sigma_XX, Sigma_YY)`.
    pub ridge: (f64, f64),
}

/// Relative cut-off below which whitening treats an eigenvalue as zero.
pub const PSEUDO_INVERSE_CUTOFF: f64 = 1e-10;

/// Canonical correlation analysis of `x` (`n x p`) and `y` (`n x q`), rows
/// as samples.
///
/// The canonical correlations are the top-`k` singular values of the
/// whitened cross-covariance `Sxx^{-1/2} Sxy Syy^{-1/2}`; weights are the
/// singular vectors mapped back through the whitening transforms.
pub fn cca(
    x: ArrayView2<'_, f64>,
    y: ArrayView2<'_, f64>,
    k: usize,
    ridge: Ridge,
) -> Result<CcaResult, CorrelationError> {
    let n = x.nrows();
    if y.nrows() != n {
        return Err(CorrelationError::RowMismatch { x: n, y: y.nrows() });
    }
    if n < 2 {
        return Err(CorrelationError::TooFewSamples(n));
    }
    let max = x.ncols().min(y.ncols()).min(n - 1);
    if k == 0 || k > max {
        return Err(CorrelationError::ComponentsOutOfRange { requested: k, max });
    }

    let (Ridge::Fixed(r) | Ridge::Relative(r)) = ridge;
    if !(r.is_finite() && r >= 0.0) {
        return Err(CorrelationError::InvalidRidge(r));
    }

    let xc = numerics::center_columns(x);
    let yc = numerics::center_columns(y);
    let sxx = numerics::cross_covariance(xc.view(), xc.view());
    let syy = numerics::cross_covariance(yc.view(), yc.view());
    let sxy = numerics::cross_covariance(xc.view(), yc.view());

    let ridge_for = |cov: &Array2<f64>| match ridge {
        Ridge::Fixed(r) => r,
        Ridge::Relative(f) => f * cov.diag().mean().unwrap_or(0.0),
    };
    let (rx, ry) = (ridge_for(&sxx), ridge_for(&syy));
    let wx = inverse_sqrt(&sxx, rx, k, "X")?;
    let wy = inverse_sqrt(&syy, ry, k, "Y")?;

    let t = wx.dot(&sxy).dot(&wy);
    let svd = numerics::svd_via_gram(t.view())?;
    let correlations: Vec<f64> = svd.singular.iter().take(k).map(|s| s.clamp(0.0, 1.0)).collect();
    let x_weights = wx.dot(&svd.u.slice(s![.., ..k]));
    let y_weights = wy.dot(&svd.v.slice(s![.., ..k]));
    let x_scores = xc.dot(&x_weights);
    let y_scores = yc.dot(&y_weights);
    Ok(CcaResult {
        correlations,
        x_weights,
        y_weights,
        x_scores,
        y_scores,
        ridge: (rx, ry),
    })
}

/// `(S + ridge I)^{-1/2}`; with `ridge == 0`, the pseudo-inverse square root.
fn inverse_sqrt(cov: &Array2<f64>, ridge: f64, k: usize, block: &'static str) -> Result<Array2<f64>, CorrelationError> {
    let eig = numerics::sym_eigen(cov.view())?;
    let top = eig.values.first().copied().unwrap_or(0.0).max(0.0);
    let shifted: Array1<f64> = eig.values.mapv(|v| v + ridge);
    let cutoff = if ridge > 0.0 { 0.0 } else { PSEUDO_INVERSE_CUTOFF * top };
    let rank = shifted.iter().filter(|&&v| v > cutoff).count();
    if rank < k {
        return Err(CorrelationError::SingularCovariance { block, rank, k });
    }
    let inv: Array1<f64> = shifted.mapv(|v| if v > cutoff { 1.0 / v.sqrt() } else { 0.0 });
    Ok((&eig.vectors * &inv).dot(&eig.vectors.t()))
}

fn check_sets(x: ArrayView2<'_, f64>, y: ArrayView2<'_, f64>) -> Result<(), CorrelationError> {
    if x.nrows() == 0 || y.nrows() == 0 {
        return Err(CorrelationError::EmptySet);
    }
    if x.ncols() != y.ncols() {
        return Err(CorrelationError::DimensionMismatch {
            left: x.ncols(),
            right: y.ncols(),
        });
    }
    Ok(())
}

/// `sup_{o in outer} inf_{i in inner} |s_o o - s_i i|`.
fn sup_inf(outer: ArrayView2<'_, f64>, inner: ArrayView2<'_, f64>, s_outer: f64, s_inner: f64) -> f64 {
    let mut worst = 0.0_f64;
    for o in outer.rows() {
        let mut best = f64::INFINITY;
        for i in inner.rows() {
            let d2: f64 = o
                .iter()
                .zip(i.iter())
                .map(|(u, v)| (s_outer * u - s_inner * v) * (s_outer * u - s_inner * v))
                .sum();
            if d2 < best {
                best = d2;
                // this point can no longer raise the maximum
                if best <= worst {
                    break;
                }
            }
        }
        worst = worst.max(best);
    }
    worst.sqrt()
}

/// Symmetric Hausdorff distance between the row sets of `x` and `y`.
pub fn hausdorff(x: ArrayView2<'_, f64>, y: ArrayView2<'_, f64>) -> Result<f64, CorrelationError> {
    check_sets(x, y)?;
    Ok(scaled_objective(x, y, 1.0, HausdorffMode::Symmetric))
}

/// `sup_{y in Y} d(X, y)`: how far the worst point of `y` is from `x`.
pub fn directed_hausdorff(x: ArrayView2<'_, f64>, y: ArrayView2<'_, f64>) -> Result<f64, CorrelationError> {
    check_sets(x, y)?;
    Ok(scaled_objective(x, y, 1.0, HausdorffMode::Directed))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HausdorffMode {
    /// `d_H(alpha X, Y)`.
    Symmetric,
    /// `sup_{y in Y} d(alpha X, y)`.
    Directed,
}

fn scaled_objective(x: ArrayView2<'_, f64>, y: ArrayView2<'_, f64>, alpha: f64, mode: HausdorffMode) -> f64 {
    let y_to_x = sup_inf(y, x, 1.0, alpha);
    match mode {
        HausdorffMode::Directed => y_to_x,
        HausdorffMode::Symmetric => y_to_x.max(sup_inf(x, y, alpha, 1.0)),
    }
}

/// Search range and resolution for the scale factor.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlphaSearch {
    /// Range is `[lo_factor, hi_factor] * |Y|_F / |X|_F`.
    pub lo_factor: f64,
    pub hi_factor: f64,
    /// Number of log-spaced grid samples.
    pub grid_points: usize,
    /// Golden-section refinement stops when the bracket's relative width
    /// falls below this.
    pub rel_tol: f64,
}

impl Default for AlphaSearch {
    fn default() -> Self {
        Self {
            lo_factor: 1e-6,
            hi_factor: 1e6,
            grid_points: 200,
            rel_tol: 1e-14,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScaledHausdorffResult {
    pub alpha_star: f64,
    pub distance: f64,
    pub mode: HausdorffMode,
    /// Grid samples `(alpha, distance)`, ascending in alpha.
    pub curve: Vec<(f64, f64)>,
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;
const MAX_GOLDEN_STEPS: usize = 400;

/// Minimises the Hausdorff objective over `alpha > 0` by a log-spaced grid
/// scan, then golden-section search (in `ln alpha`) inside the best cell's
/// neighbours. `alpha = 1` is also tried when it lies in range.
pub fn scaled_hausdorff(
    x: ArrayView2<'_, f64>,
    y: ArrayView2<'_, f64>,
    search: &AlphaSearch,
    mode: HausdorffMode,
) -> Result<ScaledHausdorffResult, CorrelationError> {
    check_sets(x, y)?;
    let (lo, hi) = search_bounds(x, y, search)?;
    let f = |alpha: f64| scaled_objective(x, y, alpha, mode);

    let (log_lo, log_hi) = (lo.ln(), hi.ln());
    let steps = (search.grid_points - 1) as f64;
    let grid: Vec<f64> = (0..search.grid_points)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == search.grid_points - 1 {
                hi
            } else {
                (log_lo + (log_hi - log_lo) * i as f64 / steps).exp()
            }
        })
        .collect();
    let curve: Vec<(f64, f64)> = grid.iter().map(|&a| (a, f(a))).collect();

    let mut best = curve[0];
    let mut best_idx = 0;
    for (i, &(a, v)) in curve.iter().enumerate() {
        if v < best.1 {
            best = (a, v);
            best_idx = i;
        }
    }

    let left = grid[best_idx.saturating_sub(1)].ln();
    let right = grid[(best_idx + 1).min(grid.len() - 1)].ln();
    for candidate in golden_section(|u| f(u.exp()), left, right, search.rel_tol) {
        if candidate.1 < best.1 {
            best = (candidate.0.exp(), candidate.1);
        }
    }
    if (lo..=hi).contains(&1.0) {
        let at_one = f(1.0);
        if at_one < best.1 {
            best = (1.0, at_one);
        }
    }

    // report the objective recomputed at the returned alpha
    let distance = f(best.0);
    Ok(ScaledHausdorffResult {
        alpha_star: best.0,
        distance,
        mode,
        curve,
    })
}

fn search_bounds(
    x: ArrayView2<'_, f64>,
    y: ArrayView2<'_, f64>,
    search: &AlphaSearch,
) -> Result<(f64, f64), CorrelationError> {
    let degenerate = |msg: String| Err(CorrelationError::DegenerateSearch(msg));
    if !(search.lo_factor > 0.0 && search.hi_factor > search.lo_factor && search.hi_factor.is_finite()) {
        return degenerate(format!(
            "need 0 < lo_factor < hi_factor, got [{}, {}]",
            search.lo_factor, search.hi_factor
        ));
    }
    if search.grid_points < 3 {
        return degenerate(format!("need at least 3 grid points, got {}", search.grid_points));
    }
    if search.rel_tol.is_nan() || search.rel_tol < 0.0 {
        return degenerate(format!("rel_tol must be non-negative, got {}", search.rel_tol));
    }
    let (nx, ny) = (numerics::frobenius(x), numerics::frobenius(y));
    if nx == 0.0 || ny == 0.0 || !nx.is_finite() || !ny.is_finite() {
        return degenerate(format!("|X|_F = {nx}, |Y|_F = {ny}; both must be positive and finite"));
    }
    let base = ny / nx;
    Ok((search.lo_factor * base, search.hi_factor * base))
}

/// Golden-section minimisation on `[a, b]`; returns every evaluated point.
fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> Vec<(f64, f64)> {
    let mut evaluated = Vec::new();
    if b <= a {
        return evaluated;
    }
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    evaluated.push((c, fc));
    evaluated.push((d, fd));
    for _ in 0..MAX_GOLDEN_STEPS {
        // widths in ln(alpha) are relative widths in alpha
        if b - a <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            if !(c > a && c < d) {
                break;
            }
            fc = f(c);
            evaluated.push((c, fc));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            if !(d > c && d < b) {
                break;
            }
            fd = f(d);
            evaluated.push((d, fd));
        }
    }
    evaluated
}

/// The `n` rows of `D` as `n` points in `R^n`.
pub fn matrix_to_pointset(d: &DistanceMatrix) -> Result<Array2<f64>, CorrelationError> {
    d.ensure_finite()?;
    Ok(d.values().clone())
}
