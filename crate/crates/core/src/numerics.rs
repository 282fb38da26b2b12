//! Small dense linear algebra kernels shared by PCA, MDS and CCA.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum NumericsError {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
}

const MAX_SWEEPS: usize = 100;

/// Eigenpairs of a symmetric matrix. `values` are sorted descending and
/// column `i` of `vectors` belongs to `values[i]`.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Array1<f64>,
    pub vectors: Array2<f64>,
}

/// Cyclic Jacobi eigendecomposition.
///
/// The input is symmetrized as `(A + A^T) / 2` first. Iteration stops once the
/// off-diagonal Frobenius norm drops below `1e-12 * ||A||_F`. Each
/// eigenvector is signed so its largest-magnitude entry is positive (lowest
/// index on ties).
pub fn sym_eigen(a: ArrayView2<'_, f64>) -> Result<SymEigen, NumericsError> {
    let (rows, cols) = a.dim();
    if rows != cols {
        return Err(NumericsError::NotSquare { rows, cols });
    }
    let n = rows;
    let mut m = Array2::from_shape_fn((n, n), |(i, j)| 0.5 * (a[[i, j]] + a[[j, i]]));
    let mut v = Array2::<f64>::eye(n);

    let norm = frobenius(m.view());
    let target = 1e-12 * norm;
    let mut converged = norm == 0.0;
    for _ in 0..MAX_SWEEPS {
        if converged || off_diagonal_norm(&m) <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[[p, q]];
                if apq == 0.0 {
                    continue;
                }
                let app = m[[p, p]];
                let aqq = m[[q, q]];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut m, &mut v, p, q, c, s, t);
            }
        }
    }
    if !converged && off_diagonal_norm(&m) > target {
        return Err(NumericsError::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable sort keeps index order among equal eigenvalues
    order.sort_by(|&i, &j| m[[j, j]].total_cmp(&m[[i, i]]));
    let values = Array1::from_iter(order.iter().map(|&i| m[[i, i]]));
    let mut vectors = Array2::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        vectors.column_mut(dst).assign(&v.column(src));
    }
    fix_signs(&mut vectors);
    Ok(SymEigen { values, vectors })
}

fn rotate(m: &mut Array2<f64>, v: &mut Array2<f64>, p: usize, q: usize, c: f64, s: f64, t: f64) {
    let n = m.nrows();
    let apq = m[[p, q]];
    let tau = s / (1.0 + c);
    m[[p, p]] -= t * apq;
    m[[q, q]] += t * apq;
    m[[p, q]] = 0.0;
    m[[q, p]] = 0.0;
    for r in 0..n {
        if r != p && r != q {
            let arp = m[[r, p]];
            let arq = m[[r, q]];
            let new_rp = arp - s * (arq + tau * arp);
            let new_rq = arq + s * (arp - tau * arq);
            m[[r, p]] = new_rp;
            m[[p, r]] = new_rp;
            m[[r, q]] = new_rq;
            m[[q, r]] = new_rq;
        }
    }
    for r in 0..n {
        let vrp = v[[r, p]];
        let vrq = v[[r, q]];
        v[[r, p]] = vrp - s * (vrq + tau * vrp);
        v[[r, q]] = vrq + s * (vrp - tau * vrq);
    }
}

fn off_diagonal_norm(m: &Array2<f64>) -> f64 {
    let mut sum = 0.0;
    for ((i, j), &x) in m.indexed_iter() {
        if i != j {
            sum += x * x;
        }
    }
    sum.sqrt()
}

/// Flips each column so its largest-magnitude entry is positive.
pub fn fix_signs(vectors: &mut Array2<f64>) {
    for mut col in vectors.columns_mut() {
        let mut best = 0;
        for (i, &x) in col.iter().enumerate() {
            if x.abs() > col[best].abs() {
                best = i;
            }
        }
        if col[best] < 0.0 {
            col.mapv_inplace(|x| -x);
        }
    }
}

pub fn frobenius(a: ArrayView2<'_, f64>) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `B = -1/2 * C * D2 * C` with the centering matrix `C = I - J/n`.
///
/// Computed as `b_ij = -1/2 (d_ij - rowmean_i - colmean_j + grandmean)`,
/// which is the same product without forming `C`.
pub fn double_center(d2: ArrayView2<'_, f64>) -> Result<Array2<f64>, NumericsError> {
    let (rows, cols) = d2.dim();
    if rows != cols {
        return Err(NumericsError::NotSquare { rows, cols });
    }
    let n = rows as f64;
    // plain index-order sums: a symmetric input gets bitwise equal row and
    // column means, and `r_i + c_j` commutes, so the output stays symmetric
    let mut row_means = vec![0.0; rows];
    let mut col_means = vec![0.0; cols];
    for i in 0..rows {
        for j in 0..cols {
            row_means[i] += d2[[i, j]];
            col_means[j] += d2[[i, j]];
        }
    }
    row_means.iter_mut().chain(col_means.iter_mut()).for_each(|m| *m /= n);
    let grand = row_means.iter().sum::<f64>() / n;
    Ok(Array2::from_shape_fn((rows, cols), |(i, j)| {
        -0.5 * ((d2[[i, j]] - (row_means[i] + col_means[j])) + grand)
    }))
}

/// Subtracts the column means.
pub fn center_columns(x: ArrayView2<'_, f64>) -> Array2<f64> {
    let mean = x.mean_axis(Axis(0)).expect("at least one row");
    &x - &mean
}

/// Sample cross-covariance of already-centered blocks, denominator `n - 1`.
pub fn cross_covariance(xc: ArrayView2<'_, f64>, yc: ArrayView2<'_, f64>) -> Array2<f64> {
    let denom = (xc.nrows() as f64 - 1.0).max(1.0);
    xc.t().dot(&yc) / denom
}

/// Applies `f` to the eigenvalues of a symmetric matrix: `V f(L) V^T`.
pub fn sym_matrix_function<F>(a: ArrayView2<'_, f64>, f: F) -> Result<Array2<f64>, NumericsError>
where
    F: Fn(f64) -> f64,
{
    let eig = sym_eigen(a)?;
    let scaled = &eig.vectors * &eig.values.mapv(f);
    Ok(scaled.dot(&eig.vectors.t()))
}

/// Thin SVD `A = U S V^T` from the eigendecomposition of the smaller Gram
/// matrix. Singular values are descending; only pairs with `s > 0` carry
/// meaningful left/right partners.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Array2<f64>,
    pub singular: Array1<f64>,
    pub v: Array2<f64>,
}

pub fn svd_via_gram(a: ArrayView2<'_, f64>) -> Result<Svd, NumericsError> {
    let (rows, cols) = a.dim();
    let k = rows.min(cols);
    if cols <= rows {
        let eig = sym_eigen(a.t().dot(&a).view())?;
        let singular = eig.values.mapv(|l| l.max(0.0).sqrt());
        let v = eig.vectors;
        let u = partner_vectors(a, v.view(), &singular);
        Ok(truncate(Svd { u, singular, v }, k))
    } else {
        let eig = sym_eigen(a.dot(&a.t()).view())?;
        let singular = eig.values.mapv(|l| l.max(0.0).sqrt());
        let u = eig.vectors;
        let v = partner_vectors(a.t(), u.view(), &singular);
        Ok(truncate(Svd { u, singular, v }, k))
    }
}

// columns of `a * basis / s`; zero where s vanishes
fn partner_vectors(a: ArrayView2<'_, f64>, basis: ArrayView2<'_, f64>, singular: &Array1<f64>) -> Array2<f64> {
    let mut out = a.dot(&basis);
    let cutoff = singular.first().copied().unwrap_or(0.0) * 1e-13;
    for (mut col, &s) in out.columns_mut().into_iter().zip(singular) {
        if s > cutoff {
            col.mapv_inplace(|x| x / s);
        } else {
            col.fill(0.0);
        }
    }
    out
}

fn truncate(svd: Svd, k: usize) -> Svd {
    Svd {
        u: svd.u.slice(ndarray::s![.., ..k]).to_owned(),
        singular: svd.singular.slice(ndarray::s![..k]).to_owned(),
        v: svd.v.slice(ndarray::s![.., ..k]).to_owned(),
    }
}
