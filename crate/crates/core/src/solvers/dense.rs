//! Small dense kernels shared by the interior-point solvers.

use nalgebra::DMatrix;

/// Lower Cholesky factor `L` with `LLᵀ = A` for a symmetric positive
/// semidefinite `A`, stored column-major.
///
/// Pivots that collapse below `PIVOT_FLOOR` times the original diagonal are
/// replaced by a huge value, which zeroes the corresponding solution
/// component instead of failing. Interior-point normal matrices become
/// numerically singular near degenerate optima, which is the expected case
/// for sparse recovery problems.
#[derive(Debug, Clone)]
pub(crate) struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

const PIVOT_FLOOR: f64 = 1e-30;
const HUGE_PIVOT: f64 = 1e64;

impl Cholesky {
    /// Factors the lower triangle of `a`. Returns `None` when the matrix
    /// contains non-finite values.
    pub(crate) fn factor(a: &DMatrix<f64>) -> Option<Self> {
        let n = a.nrows();
        debug_assert_eq!(n, a.ncols());
        let mut l = a.as_slice().to_vec();
        if l.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let diag: Vec<f64> = (0..n).map(|j| a[(j, j)].abs()).collect();
        let max_diag = diag.iter().cloned().fold(0.0, f64::max);
        for j in 0..n {
            // col_j[j..] -= sum_k L[j,k] * col_k[j..]
            let (done, rest) = l.split_at_mut(j * n);
            let col_j = &mut rest[..n];
            for k in 0..j {
                let col_k = &done[k * n..(k + 1) * n];
                let ljk = col_k[j];
                if ljk != 0.0 {
                    for i in j..n {
                        col_j[i] -= ljk * col_k[i];
                    }
                }
            }
            let pivot = col_j[j];
            let floor = PIVOT_FLOOR * diag[j].max(max_diag * 1e-16);
            if !(pivot > floor) {
                col_j[j] = HUGE_PIVOT;
                for v in col_j[j + 1..].iter_mut() {
                    *v = 0.0;
                }
            } else {
                let r = pivot.sqrt();
                col_j[j] = r;
                for v in col_j[j + 1..].iter_mut() {
                    *v /= r;
                }
            }
        }
        Some(Cholesky { n, l })
    }

    /// Solves `A x = b` in place.
    pub(crate) fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        let l = &self.l;
        // Forward: L y = b, column oriented.
        for j in 0..n {
            let col = &l[j * n..(j + 1) * n];
            b[j] /= col[j];
            let bj = b[j];
            if bj != 0.0 {
                for i in j + 1..n {
                    b[i] -= col[i] * bj;
                }
            }
        }
        // Backward: Lᵀ x = y.
        for j in (0..n).rev() {
            let col = &l[j * n..(j + 1) * n];
            let mut acc = b[j];
            for i in j + 1..n {
                acc -= col[i] * b[i];
            }
            b[j] = acc / col[j];
        }
    }
}

/// `Φ diag(w) Φᵀ` for an `m × d` matrix.
pub(crate) fn weighted_gram(phi: &DMatrix<f64>, w: &[f64]) -> DMatrix<f64> {
    let mut scaled = phi.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= w[j].sqrt();
    }
    &scaled * scaled.transpose()
}

pub(crate) fn mat_vec(phi: &DMatrix<f64>, x: &[f64], out: &mut [f64]) {
    let m = phi.nrows();
    out[..m].iter_mut().for_each(|v| *v = 0.0);
    for (j, col) in phi.column_iter().enumerate() {
        let xj = x[j];
        if xj != 0.0 {
            for (o, c) in out[..m].iter_mut().zip(col.iter()) {
                *o += c * xj;
            }
        }
    }
}

pub(crate) fn mat_tr_vec(phi: &DMatrix<f64>, y: &[f64], out: &mut [f64]) {
    for (j, col) in phi.column_iter().enumerate() {
        out[j] = col.iter().zip(y).map(|(c, v)| c * v).sum();
    }
}
