//! Small sparse/dense helpers shared by the operator and spectral modules.

use nalgebra::DMatrix;
use sprs::{CsMat, TriMat};

pub type SparseMatrix = CsMat<f64>;

pub fn empty(rows: usize, cols: usize) -> SparseMatrix {
    TriMat::<f64>::new((rows, cols)).to_csr()
}

/// `y = A x` for a CSR or CSC matrix.
pub fn matvec(a: &SparseMatrix, x: &[f64]) -> Vec<f64> {
    assert_eq!(a.cols(), x.len(), "matvec dimension mismatch");
    let mut y = vec![0.0; a.rows()];
    if a.is_csr() {
        for (row, vec) in a.outer_iterator().enumerate() {
            y[row] = vec.iter().map(|(col, &v)| v * x[col]).sum();
        }
    } else {
        for (col, vec) in a.outer_iterator().enumerate() {
            for (row, &v) in vec.iter() {
                y[row] += v * x[col];
            }
        }
    }
    y
}

pub fn transpose(a: &SparseMatrix) -> SparseMatrix {
    a.transpose_view().to_csr()
}

pub fn product(a: &SparseMatrix, b: &SparseMatrix) -> SparseMatrix {
    let a = a.to_csr();
    let b = b.to_csr();
    &a * &b
}

pub fn sum(a: &SparseMatrix, b: &SparseMatrix) -> SparseMatrix {
    let a = a.to_csr();
    let b = b.to_csr();
    &a + &b
}

/// Scales rows by `left` and columns by `right`: `diag(left) A diag(right)`.
pub fn scale(a: &SparseMatrix, left: &[f64], right: &[f64]) -> SparseMatrix {
    let mut tri = TriMat::with_capacity(a.shape(), a.nnz());
    for (&v, (r, c)) in a.iter() {
        tri.add_triplet(r, c, left[r] * v * right[c]);
    }
    tri.to_csr()
}

pub fn to_dense(a: &SparseMatrix) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(a.rows(), a.cols());
    for (&v, (r, c)) in a.iter() {
        m[(r, c)] += v;
    }
    m
}

pub fn max_abs_entry(a: &SparseMatrix) -> f64 {
    a.iter().map(|(v, _)| v.abs()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `Σ w_k a_k b_k`.
pub fn weighted_dot(w: &[f64], a: &[f64], b: &[f64]) -> f64 {
    w.iter().zip(a).zip(b).map(|((w, x), y)| w * x * y).sum()
}
