use faer::linalg::solvers::Solve;
use faer::{c64, Mat};

use crate::error::SolverError;

/// One generalized Schur pair `(alpha, beta)` with its right eigenvector.
#[derive(Debug, Clone)]
pub struct GevpPair {
    pub alpha: c64,
    pub beta: c64,
    /// `alpha / beta`, or `None` when flagged infinite.
    pub lambda: Option<c64>,
    pub vector: Vec<c64>,
}

impl GevpPair {
    pub fn is_infinite(&self) -> bool {
        self.lambda.is_none()
    }
}

/// Dense generalized eigendecomposition of `(a, b)` by QZ. Pairs with
/// `|beta| <= qz_tol * max|beta|` are flagged infinite.
pub fn dense_gevp(a: &Mat<c64>, b: &Mat<c64>, qz_tol: f64) -> Result<Vec<GevpPair>, SolverError> {
    if a.nrows() != a.ncols() || b.nrows() != a.nrows() || b.ncols() != a.ncols() {
        return Err(SolverError::InvalidParameter(format!(
            "pencil shapes {}x{} and {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let evd = a
        .generalized_eigen(b)
        .map_err(|e| SolverError::Backend(format!("{e:?}")))?;
    let (sa, sb, u) = (evd.S_a(), evd.S_b(), evd.U());
    let bmax = (0..n).map(|i| sb[i].norm()).fold(0.0, f64::max);
    let pairs = (0..n)
        .map(|i| {
            let (alpha, beta) = (sa[i], sb[i]);
            let lambda = (beta.norm() > qz_tol * bmax).then(|| alpha / beta);
            GevpPair { alpha, beta, lambda, vector: (0..n).map(|r| u[(r, i)]).collect() }
        })
        .collect();
    Ok(pairs)
}

/// Full spectrum of `(a, b)` for nonsingular `b`, from the standard problem
/// `b^-1 a`. QZ stalls on pencils with a zero eigenvalue of high multiplicity
/// (the unconstrained curl-curl pencil), this reduction does not. Falls back
/// to [`dense_gevp`] when the factorization of `b` breaks down.
pub fn dense_reduced(a: &Mat<c64>, b: &Mat<c64>, qz_tol: f64) -> Result<Vec<GevpPair>, SolverError> {
    let n = a.nrows();
    if n == 0 || b.nrows() != n || a.ncols() != n || b.ncols() != n {
        return dense_gevp(a, b, qz_tol);
    }
    let mut op = a.clone();
    b.partial_piv_lu().solve_in_place(op.as_mut());
    if !(0..n).all(|j| (0..n).all(|i| op[(i, j)].re.is_finite() && op[(i, j)].im.is_finite())) {
        return dense_gevp(a, b, qz_tol);
    }
    let evd = op.eigen().map_err(|e| SolverError::Backend(format!("{e:?}")))?;
    let (s, u) = (evd.S(), evd.U());
    Ok((0..n)
        .map(|i| GevpPair {
            alpha: s[i],
            beta: c64::new(1.0, 0.0),
            lambda: Some(s[i]),
            vector: (0..n).map(|r| u[(r, i)]).collect(),
        })
        .collect())
}

/// Full spectrum of `(a, b)` through the spectral transformation
/// `(a - sigma b)^-1 b`, for pencils whose `b` is singular. An eigenvalue
/// `theta` of the transformed matrix is returned as the pair
/// `(1 + sigma theta, theta)`; pairs with `|theta| <= inf_tol * max|theta|` are
/// flagged infinite.
pub fn dense_spectral_transform(
    a: &Mat<c64>,
    b: &Mat<c64>,
    sigma: c64,
    inf_tol: f64,
) -> Result<Vec<GevpPair>, SolverError> {
    let n = a.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let shifted = a - faer::Scale(sigma) * b;
    let mut op = b.clone();
    shifted.partial_piv_lu().solve_in_place(op.as_mut());
    if !(0..n).all(|j| (0..n).all(|i| op[(i, j)].re.is_finite() && op[(i, j)].im.is_finite())) {
        return Err(SolverError::Backend(format!("shift {sigma} is an eigenvalue of the pencil")));
    }
    let evd = op.eigen().map_err(|e| SolverError::Backend(format!("{e:?}")))?;
    let (s, u) = (evd.S(), evd.U());
    let tmax = (0..n).map(|i| s[i].norm()).fold(0.0, f64::max);
    Ok((0..n)
        .map(|i| {
            let theta = s[i];
            let finite = theta.norm() > inf_tol * tmax;
            GevpPair {
                alpha: c64::new(1.0, 0.0) + sigma * theta,
                beta: theta,
                lambda: finite.then(|| sigma + theta.inv()),
                vector: (0..n).map(|r| u[(r, i)]).collect(),
            }
        })
        .collect())
}
