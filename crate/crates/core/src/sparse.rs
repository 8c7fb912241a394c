//! Thin helpers over faer's compressed-column matrices.

use std::fmt::Write as _;

use faer::sparse::linalg::matmul::sparse_sparse_matmul;
use faer::sparse::{SparseColMat, Triplet};
use faer::{c64, Mat, Par};

pub type CsMatrix = SparseColMat<usize, c64>;

/// Triplet accumulator whose compressed result does not depend on the order in
/// which contributions arrive: duplicates are summed in order of a caller key.
#[derive(Debug, Default)]
pub struct CanonicalTriplets {
    entries: Vec<(usize, usize, [usize; 4], c64)>,
}

impl CanonicalTriplets {
    pub fn with_capacity(n: usize) -> Self {
        Self { entries: Vec::with_capacity(n) }
    }

    pub fn push(&mut self, row: usize, col: usize, key: [usize; 4], val: c64) {
        self.entries.push((row, col, key, val));
    }

    pub fn into_matrix(mut self, nrows: usize, ncols: usize) -> CsMatrix {
        self.entries
            .sort_unstable_by(|a, b| (a.1, a.0, a.2).cmp(&(b.1, b.0, b.2)));
        let mut summed: Vec<Triplet<usize, usize, c64>> = Vec::with_capacity(self.entries.len() / 4);
        for (row, col, _, val) in self.entries {
            match summed.last_mut() {
                Some(t) if t.row == row && t.col == col => t.val += val,
                _ => summed.push(Triplet::new(row, col, val)),
            }
        }
        SparseColMat::try_new_from_triplets(nrows, ncols, &summed).expect("in-range triplets")
    }
}

pub fn matmul(lhs: &CsMatrix, rhs: &CsMatrix) -> CsMatrix {
    sparse_sparse_matmul(lhs.as_ref(), rhs.as_ref(), c64::new(1.0, 0.0), Par::Seq)
        .expect("sparse product")
}

/// Owned conjugate transpose.
pub fn adjoint(a: &CsMatrix) -> CsMatrix {
    let triplets: Vec<Triplet<usize, usize, c64>> = a
        .triplet_iter()
        .map(|t| Triplet::new(t.col, t.row, t.val.conj()))
        .collect();
    SparseColMat::try_new_from_triplets(a.ncols(), a.nrows(), &triplets).expect("in-range")
}

/// `alpha * a + beta * b`.
pub fn add_scaled(a: &CsMatrix, alpha: c64, b: &CsMatrix, beta: c64) -> CsMatrix {
    let mut acc = CanonicalTriplets::with_capacity(a.compute_nnz() + b.compute_nnz());
    for t in a.triplet_iter() {
        acc.push(t.row, t.col, [0; 4], *t.val * alpha);
    }
    for t in b.triplet_iter() {
        acc.push(t.row, t.col, [1; 4], *t.val * beta);
    }
    acc.into_matrix(a.nrows(), a.ncols())
}

pub fn max_abs(a: &CsMatrix) -> f64 {
    a.triplet_iter().map(|t| t.val.norm()).fold(0.0, f64::max)
}

pub fn frobenius(a: &CsMatrix) -> f64 {
    a.triplet_iter().map(|t| t.val.norm_sqr()).sum::<f64>().sqrt()
}

/// Max-norm of `a - b` over the union of both sparsity patterns.
pub fn max_abs_diff(a: &CsMatrix, b: &CsMatrix) -> f64 {
    max_abs(&add_scaled(a, c64::new(1.0, 0.0), b, c64::new(-1.0, 0.0)))
}

pub fn matvec(a: &CsMatrix, x: &[c64]) -> Vec<c64> {
    assert_eq!(a.ncols(), x.len());
    let mut y = vec![c64::new(0.0, 0.0); a.nrows()];
    for t in a.triplet_iter() {
        y[t.row] += *t.val * x[t.col];
    }
    y
}

pub fn to_dense(a: &CsMatrix) -> Mat<c64> {
    let mut d = Mat::zeros(a.nrows(), a.ncols());
    for t in a.triplet_iter() {
        d[(t.row, t.col)] += *t.val;
    }
    d
}

/// `row col re im` per stored entry, 1-based, preceded by a size line.
pub fn dump_triplets(a: &CsMatrix) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "% {} {} {}", a.nrows(), a.ncols(), a.compute_nnz());
    let mut entries: Vec<_> = a.triplet_iter().map(|t| (t.row, t.col, *t.val)).collect();
    entries.sort_unstable_by_key(|e| (e.0, e.1));
    for (r, c, v) in entries {
        let _ = writeln!(out, "{} {} {:.17e} {:.17e}", r + 1, c + 1, v.re, v.im);
    }
    out
}

pub fn norm2(x: &[c64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}
