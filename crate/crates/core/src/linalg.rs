//! Just enough dense linear algebra for tall-skinny least squares: a
//! column-pivoted Householder QR solver and cyclic Jacobi eigenvalues for
//! the tiny symmetric Gram matrices behind the condition number.
//!
//! Everything here works column-major (`cols[j][i]` is row i of column j)
//! because the regression design is built from whole columns, and K stays
//! small (a constant plus a handful of themes) while n can be 10⁴⁺.

// The kernels keep their index form: rotations and triangular products
// touch several slots of several matrices per step, which iterator
// adapters only obscure.
#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};

/// Least-squares solution with the pieces the regression layer needs.
pub(crate) struct Lstsq {
    /// Coefficients in the original column order.
    pub beta: Vec<f64>,
    /// (XᵀX)⁻¹ in the original column order.
    pub xtx_inv: Vec<Vec<f64>>,
}

/// Minimize ‖Xβ − y‖₂ via Householder QR with column pivoting.
///
/// Pivoting keeps the diagonal of R non-increasing in magnitude, so the
/// rank test is a single ratio: |R[k−1,k−1]| < `rel_pivot_tol` · |R[0,0]|
/// flags the design as numerically singular.
pub(crate) fn lstsq_colpiv_qr(cols: &[Vec<f64>], y: &[f64], rel_pivot_tol: f64) -> Result<Lstsq> {
    let k = cols.len();
    let n = y.len();
    if k == 0 {
        return Err(Error::domain("least squares needs at least one column"));
    }
    if cols.iter().any(|c| c.len() != n) {
        return Err(Error::domain(
            "design columns must match the response length",
        ));
    }
    if n < k {
        return Err(Error::domain(format!(
            "least squares needs at least as many rows as columns, got {n} rows for {k} columns"
        )));
    }
    if y.iter()
        .chain(cols.iter().flatten())
        .any(|v| !v.is_finite())
    {
        return Err(Error::domain("least squares inputs must be finite"));
    }

    let mut a: Vec<Vec<f64>> = cols.to_vec();
    let mut qty = y.to_vec();
    let mut perm: Vec<usize> = (0..k).collect();

    for j in 0..k {
        // Pivot: bring the column with the largest remaining norm to j.
        let pivot = (j..k)
            .max_by(|&p, &q| {
                let np: f64 = a[p][j..].iter().map(|v| v * v).sum();
                let nq: f64 = a[q][j..].iter().map(|v| v * v).sum();
                np.partial_cmp(&nq).unwrap()
            })
            .unwrap();
        a.swap(j, pivot);
        perm.swap(j, pivot);

        // Householder reflection zeroing column j below the diagonal.
        let norm: f64 = a[j][j..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue; // R[j][j] = 0; caught by the pivot test below
        }
        let alpha = if a[j][j] >= 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = a[j][j..].to_vec();
        v[0] -= alpha;
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        if vtv > 0.0 {
            let apply = |col: &mut [f64]| {
                let dot: f64 = v.iter().zip(&col[j..]).map(|(vi, ci)| vi * ci).sum();
                let scale = 2.0 * dot / vtv;
                for (vi, ci) in v.iter().zip(&mut col[j..]) {
                    *ci -= scale * vi;
                }
            };
            for col in a.iter_mut().skip(j) {
                apply(col);
            }
            apply(&mut qty);
        }
        a[j][j] = alpha; // exact by construction; kills residual round-off
        for value in a[j][j + 1..].iter_mut() {
            *value = 0.0;
        }
    }

    // Rank test on the pivoted diagonal.
    let diag: Vec<f64> = (0..k).map(|j| a[j][j].abs()).collect();
    let max_d = diag.iter().cloned().fold(0.0_f64, f64::max);
    let min_d = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    if max_d == 0.0 || min_d < rel_pivot_tol * max_d {
        return Err(Error::Singular(format!(
            "pivot ratio {:e} below tolerance {:e}",
            if max_d == 0.0 { 0.0 } else { min_d / max_d },
            rel_pivot_tol
        )));
    }

    // Solve R z = (Qᵀy)[..k] by back substitution; un-permute into beta.
    let mut z = vec![0.0; k];
    for j in (0..k).rev() {
        let mut rhs = qty[j];
        for l in j + 1..k {
            rhs -= a[l][j] * z[l];
        }
        z[j] = rhs / a[j][j];
    }
    let mut beta = vec![0.0; k];
    for j in 0..k {
        beta[perm[j]] = z[j];
    }

    // (XᵀX)⁻¹ = P R⁻¹ R⁻ᵀ Pᵀ.
    let rinv = invert_upper(&a, k);
    let mut xtx_inv = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..k {
            let mut sum = 0.0;
            for l in i.max(j)..k {
                sum += rinv[i][l] * rinv[j][l];
            }
            xtx_inv[perm[i]][perm[j]] = sum;
        }
    }

    Ok(Lstsq { beta, xtx_inv })
}

/// Invert the k×k upper-triangular R stored in the transformed columns
/// (`a[j][i]`, i ≤ j). Returns row-major R⁻¹.
fn invert_upper(a: &[Vec<f64>], k: usize) -> Vec<Vec<f64>> {
    let mut inv = vec![vec![0.0; k]; k];
    for col in (0..k).rev() {
        inv[col][col] = 1.0 / a[col][col];
        for row in (0..col).rev() {
            let mut sum = 0.0;
            for l in row + 1..=col {
                sum += a[l][row] * inv[l][col];
            }
            inv[row][col] = -sum / a[row][row];
        }
    }
    inv
}

/// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations,
/// returned in no particular order.
pub(crate) fn sym_eigenvalues(mat: &[Vec<f64>]) -> Vec<f64> {
    let k = mat.len();
    debug_assert!(mat.iter().all(|row| row.len() == k));
    if k == 1 {
        return vec![mat[0][0]];
    }
    let mut a: Vec<Vec<f64>> = mat.to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..k)
            .flat_map(|p| ((p + 1)..k).map(move |q| (p, q)))
            .map(|(p, q)| a[p][q] * a[p][q])
            .sum();
        let scale: f64 = (0..k)
            .map(|i| a[i][i] * a[i][i])
            .sum::<f64>()
            .max(f64::MIN_POSITIVE);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..k {
            for q in (p + 1)..k {
                if a[p][q].abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..k {
                    let aip = a[i][p];
                    let aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for i in 0..k {
                    let api = a[p][i];
                    let aqi = a[q][i];
                    a[p][i] = c * api - s * aqi;
                    a[q][i] = s * api + c * aqi;
                }
            }
        }
    }
    (0..k).map(|i| a[i][i]).collect()
}
