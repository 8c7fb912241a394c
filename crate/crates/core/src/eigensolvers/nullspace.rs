use faer::{c64, Mat};

use crate::error::SolverError;
use crate::sparse::{to_dense, CsMatrix};

/// Orthonormal basis of the numerical null space of a constraint matrix.
#[derive(Debug, Clone)]
pub struct NullspaceBasis {
    /// n x r, orthonormal columns.
    pub q: Mat<c64>,
    pub r: usize,
    /// Numerical rank of the constraint matrix.
    pub rank: usize,
    pub sigma_min_kept: f64,
    pub sigma_max_dropped: f64,
    /// `sigma_max * max(m, n) * rank_tol_factor`.
    pub threshold: f64,
}

/// Full SVD of the densified `c`; the basis is the trailing right singular
/// vectors past the numerical rank.
pub fn nullspace_basis(c: &CsMatrix, rank_tol_factor: f64) -> Result<NullspaceBasis, SolverError> {
    let (m, n) = (c.nrows(), c.ncols());
    let dense = to_dense(c);
    let svd = dense.svd().map_err(|e| SolverError::Backend(format!("{e:?}")))?;
    let s = svd.S();
    let p = m.min(n);
    let sigma: Vec<f64> = (0..p).map(|i| s[i].re).collect();
    let smax = sigma.first().copied().unwrap_or(0.0);
    let threshold = smax * m.max(n) as f64 * rank_tol_factor;
    let rank = sigma.iter().filter(|&&v| v > threshold).count();
    let r = n - rank;
    if r == 0 {
        return Err(SolverError::EmptyNullspace);
    }
    let q = svd.V().subcols(rank, r).to_owned();
    Ok(NullspaceBasis {
        q,
        r,
        rank,
        sigma_min_kept: if rank > 0 { sigma[rank - 1] } else { 0.0 },
        sigma_max_dropped: sigma.get(rank).copied().unwrap_or(0.0),
        threshold,
    })
}
