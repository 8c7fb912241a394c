//! Solvers for `A x = lambda M x` subject to `C x = 0`.
//!
//! Every solver reduces to a pencil `(K, B)` that is handed to one of two
//! backends. The dense backend returns the whole finite spectrum, from the
//! standard problem `B^-1 K` ([`dense_reduced`], with QZ in [`dense_gevp`] as
//! fallback) or, when `B` is singular, by a spectral transformation
//! ([`dense_spectral_transform`]). The shift-invert backend runs Arnoldi
//! around [`SolverConfig::shift`] and returns the `k` eigenvalues nearest it.

mod dense;
mod krylov;
mod nullspace;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::matmul::sparse_dense_matmul;
use faer::sparse::Triplet;
use faer::{c64, Accum, Mat, Par};

pub use dense::{dense_gevp, dense_reduced, dense_spectral_transform, GevpPair};
pub use krylov::{largest_magnitude, KrylovOptions, LinearOperator, RitzPair};
pub use nullspace::{nullspace_basis, NullspaceBasis};

use crate::assembly::AssembledSystem;
use crate::error::SolverError;
use crate::sparse::{self, CanonicalTriplets, CsMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Unconstrained,
    Penalty,
    Augmented,
    Projection,
}

impl Method {
    pub const ALL: [Method; 4] =
        [Method::Unconstrained, Method::Penalty, Method::Augmented, Method::Projection];

    pub fn name(self) -> &'static str {
        match self {
            Method::Unconstrained => "unconstrained",
            Method::Penalty => "penalty",
            Method::Augmented => "augmented",
            Method::Projection => "projection",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = SolverError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| SolverError::InvalidParameter(format!("unknown method `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    /// Dense QZ for small pencils, shift-invert Arnoldi otherwise.
    Auto,
    Dense,
    ShiftInvert,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Auto => "auto",
            Backend::Dense => "dense",
            Backend::ShiftInvert => "shift-invert",
        }
    }
}

impl FromStr for Backend {
    type Err = SolverError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Backend::Auto),
            "dense" => Ok(Backend::Dense),
            "shift-invert" => Ok(Backend::ShiftInvert),
            _ => Err(SolverError::InvalidParameter(format!("unknown backend `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub k: usize,
    pub alpha: f64,
    /// Largest `n + m` accepted by any solver.
    pub dense_limit: usize,
    pub qz_tol: f64,
    pub rank_tol_factor: f64,
    pub zero_tol_factor: f64,
    pub backend: Backend,
    /// `Auto` uses dense QZ up to this pencil dimension.
    pub auto_dense_max: usize,
    pub shift: c64,
    pub krylov_tol: f64,
    pub krylov_max_restarts: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            k: 20,
            alpha: 800.0,
            dense_limit: 4000,
            qz_tol: 1e-10,
            rank_tol_factor: f64::EPSILON / 2.0,
            zero_tol_factor: 1e-8,
            backend: Backend::Auto,
            auto_dense_max: 400,
            shift: c64::new(0.0, 0.0),
            krylov_tol: 1e-12,
            krylov_max_restarts: 300,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |msg: &str| Err(SolverError::InvalidParameter(msg.to_string()));
        if self.k == 0 {
            return bad("k must be at least 1");
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad("alpha must be positive");
        }
        if !(self.qz_tol >= 0.0 && self.rank_tol_factor > 0.0 && self.zero_tol_factor > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.krylov_tol > 0.0) {
            return bad("krylov tolerance must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeLabel {
    Physical,
    Spurious,
    Unclassified,
}

impl ModeLabel {
    pub fn name(self) -> &'static str {
        match self {
            ModeLabel::Physical => "physical",
            ModeLabel::Spurious => "spurious",
            ModeLabel::Unclassified => "unclassified",
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenMode {
    pub lambda: c64,
    /// Unit Euclidean norm.
    pub xi: Vec<c64>,
    /// Multiplier of the augmented pencil, scaled with `xi`. Entries of
    /// deflated constraint rows are zero.
    pub zeta: Option<Vec<c64>>,
    /// `max|zeta_i - mean| / max|zeta_i|`.
    pub zeta_uniformity: Option<f64>,
    /// `max|zeta_i - mean| ||C||_max / (||A||_max + |lambda| ||M||_max)`: the
    /// non-uniform part of the multiplier measured against the other terms of
    /// the equation rather than against `max|zeta_i|`.
    pub zeta_deviation: Option<f64>,
    /// `||C xi||_2`
    pub residual_constraint: f64,
    /// `||K xi - lambda M xi||_2` for the stiffness side `K` of the solved pencil.
    pub residual_eigen: f64,
    pub label: ModeLabel,
}

#[derive(Debug, Clone)]
pub struct EigenSolution {
    /// Sorted by ascending `|lambda|`.
    pub modes: Vec<EigenMode>,
    pub method: Method,
    pub alpha: Option<f64>,
    /// Backend actually used (never `Auto`).
    pub backend: Backend,
    /// Pencil dimension.
    pub dimension: usize,
    /// Pairs flagged infinite by the dense backend.
    pub infinite_count: usize,
    pub elapsed: Duration,
}

impl EigenSolution {
    pub fn eigenvalues(&self) -> Vec<c64> {
        self.modes.iter().map(|m| m.lambda).collect()
    }

    pub fn physical(&self) -> impl Iterator<Item = &EigenMode> {
        self.modes.iter().filter(|m| m.label == ModeLabel::Physical)
    }
}

/// `factor * median(|lambda|)` over the eigenvalues that are not zero to
/// working precision (`|lambda| > sqrt(u) max|lambda|`).
pub fn zero_tolerance(values: &[c64], factor: f64) -> f64 {
    let max = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let cutoff = max * (f64::EPSILON / 2.0).sqrt();
    let mut nonzero: Vec<f64> = values.iter().map(|v| v.norm()).filter(|&v| v > cutoff).collect();
    if nonzero.is_empty() {
        return 0.0;
    }
    nonzero.sort_by(f64::total_cmp);
    let mid = nonzero.len() / 2;
    let median =
        if nonzero.len() % 2 == 1 { nonzero[mid] } else { 0.5 * (nonzero[mid - 1] + nonzero[mid]) };
    factor * median
}

pub fn count_below(values: &[c64], tol: f64) -> usize {
    values.iter().filter(|v| v.norm() <= tol).count()
}

enum Pencil {
    Sparse { k: CsMatrix, b: CsMatrix },
    Dense { k: Mat<c64>, b: Mat<c64> },
}

impl Pencil {
    fn dim(&self) -> usize {
        match self {
            Pencil::Sparse { k, .. } => k.nrows(),
            Pencil::Dense { k, .. } => k.nrows(),
        }
    }
}

struct SparseShiftInvert {
    lu: faer::sparse::linalg::solvers::Lu<usize, c64>,
    b: CsMatrix,
}

impl LinearOperator for SparseShiftInvert {
    fn dim(&self) -> usize {
        self.b.nrows()
    }

    fn apply(&self, x: &[c64]) -> Vec<c64> {
        let bx = sparse::matvec(&self.b, x);
        let mut rhs = Mat::from_fn(bx.len(), 1, |i, _| bx[i]);
        self.lu.solve_in_place(rhs.as_mut());
        (0..bx.len()).map(|i| rhs[(i, 0)]).collect()
    }
}

struct DenseShiftInvert {
    lu: faer::linalg::solvers::PartialPivLu<c64>,
    b: Mat<c64>,
}

impl LinearOperator for DenseShiftInvert {
    fn dim(&self) -> usize {
        self.b.nrows()
    }

    fn apply(&self, x: &[c64]) -> Vec<c64> {
        let xm = Mat::from_fn(x.len(), 1, |i, _| x[i]);
        let mut rhs = &self.b * &xm;
        self.lu.solve_in_place(rhs.as_mut());
        (0..x.len()).map(|i| rhs[(i, 0)]).collect()
    }
}

struct PencilEigs {
    pairs: Vec<(c64, Vec<c64>)>,
    backend: Backend,
    infinite: usize,
}

fn resolve_backend(cfg: &SolverConfig, dim: usize, count: usize) -> Backend {
    let tiny = KrylovOptions::for_count(count, dim).ncv >= dim;
    match cfg.backend {
        _ if tiny => Backend::Dense,
        Backend::Auto if dim <= cfg.auto_dense_max => Backend::Dense,
        Backend::Auto => Backend::ShiftInvert,
        other => other,
    }
}

/// `singular_b` selects the spectral transformation over QZ on the dense
/// path; QZ is very slow on pencils with many infinite eigenvalues.
fn solve_pencil(
    pencil: Pencil,
    count: usize,
    cfg: &SolverConfig,
    singular_b: bool,
) -> Result<PencilEigs, SolverError> {
    let dim = pencil.dim();
    match resolve_backend(cfg, dim, count) {
        Backend::ShiftInvert => {
            let opts = KrylovOptions {
                tol: cfg.krylov_tol,
                max_restarts: cfg.krylov_max_restarts,
                ..KrylovOptions::for_count(count, dim)
            };
            let sigma = cfg.shift;
            let pairs = match pencil {
                Pencil::Sparse { k, b } => {
                    let shifted = sparse::add_scaled(&k, c64::new(1.0, 0.0), &b, -sigma);
                    let lu = shifted
                        .sp_lu()
                        .map_err(|e| SolverError::Backend(format!("sparse LU: {e:?}")))?;
                    shift_invert_pairs(&SparseShiftInvert { lu, b }, &opts, sigma)?
                }
                Pencil::Dense { k, b } => {
                    let shifted = &k - faer::Scale(sigma) * &b;
                    let lu = shifted.partial_piv_lu();
                    shift_invert_pairs(&DenseShiftInvert { lu, b }, &opts, sigma)?
                }
            };
            Ok(PencilEigs { pairs, backend: Backend::ShiftInvert, infinite: 0 })
        }
        _ => {
            let (k, b) = match pencil {
                Pencil::Sparse { k, b } => (sparse::to_dense(&k), sparse::to_dense(&b)),
                Pencil::Dense { k, b } => (k, b),
            };
            let all = if singular_b {
                // infinite eigenvalues of index 2 perturb to O(sqrt(u))
                dense_spectral_transform(&k, &b, cfg.shift, cfg.qz_tol.sqrt())?
            } else {
                dense_reduced(&k, &b, cfg.qz_tol)?
            };
            let infinite = all.iter().filter(|p| p.is_infinite()).count();
            let mut pairs: Vec<(c64, Vec<c64>)> =
                all.into_iter().filter_map(|p| p.lambda.map(|l| (l, p.vector))).collect();
            sort_pairs(&mut pairs);
            pairs.truncate(count);
            Ok(PencilEigs { pairs, backend: Backend::Dense, infinite })
        }
    }
}

fn shift_invert_pairs<O: LinearOperator>(
    op: &O,
    opts: &KrylovOptions,
    sigma: c64,
) -> Result<Vec<(c64, Vec<c64>)>, SolverError> {
    let ritz = largest_magnitude(op, opts)?;
    let mut pairs = Vec::with_capacity(ritz.len());
    for p in ritz {
        if p.theta.norm() == 0.0 {
            continue;
        }
        // one more application purges components along infinite eigenvectors
        let mut x = op.apply(&p.vector);
        let nx = sparse::norm2(&x);
        if nx > 0.0 && nx.is_finite() {
            x.iter_mut().for_each(|v| *v /= nx);
        } else {
            x = p.vector;
        }
        pairs.push((sigma + p.theta.inv(), x));
    }
    sort_pairs(&mut pairs);
    Ok(pairs)
}

fn sort_pairs(pairs: &mut [(c64, Vec<c64>)]) {
    pairs.sort_by(|a, b| {
        a.0.norm()
            .total_cmp(&b.0.norm())
            .then(a.0.re.total_cmp(&b.0.re))
            .then(a.0.im.total_cmp(&b.0.im))
    });
}

fn check_size(sys: &AssembledSystem, cfg: &SolverConfig) -> Result<(), SolverError> {
    cfg.validate()?;
    let size = sys.n() + sys.m();
    if size > cfg.dense_limit {
        return Err(SolverError::DenseLimitExceeded { size, limit: cfg.dense_limit });
    }
    Ok(())
}

fn normalized(mut x: Vec<c64>) -> (Vec<c64>, f64) {
    let nx = sparse::norm2(&x);
    if nx > 0.0 {
        x.iter_mut().for_each(|v| *v /= nx);
    }
    (x, nx)
}

fn residual(kx: &[c64], mx: &[c64], lambda: c64) -> f64 {
    kx.iter().zip(mx).map(|(a, b)| (a - lambda * b).norm_sqr()).sum::<f64>().sqrt()
}

fn plain_mode(sys: &AssembledSystem, stiffness: &CsMatrix, lambda: c64, xi: Vec<c64>, label: ModeLabel) -> EigenMode {
    let (xi, _) = normalized(xi);
    let kx = sparse::matvec(stiffness, &xi);
    let mx = sparse::matvec(&sys.m, &xi);
    EigenMode {
        lambda,
        residual_constraint: sparse::norm2(&sparse::matvec(&sys.c, &xi)),
        residual_eigen: residual(&kx, &mx, lambda),
        xi,
        zeta: None,
        zeta_uniformity: None,
        zeta_deviation: None,
        label,
    }
}

/// `k` smallest-magnitude eigenpairs of `(A, M)` with the constraint ignored.
/// Always uses the dense backend: the pencil has `m - 1` zero eigenvalues, so
/// there is no safe default shift.
pub fn solve_unconstrained(
    sys: &AssembledSystem,
    k: usize,
    cfg: &SolverConfig,
) -> Result<EigenSolution, SolverError> {
    check_size(sys, cfg)?;
    let start = Instant::now();
    let cfg = SolverConfig { backend: Backend::Dense, ..cfg.clone() };
    let pencil = Pencil::Sparse { k: sys.a.clone(), b: sys.m.clone() };
    let eigs = solve_pencil(pencil, k, &cfg, false)?;
    let modes = eigs
        .pairs
        .into_iter()
        .map(|(l, x)| plain_mode(sys, &sys.a, l, x, ModeLabel::Unclassified))
        .collect();
    Ok(EigenSolution {
        modes,
        method: Method::Unconstrained,
        alpha: None,
        backend: eigs.backend,
        dimension: sys.n(),
        infinite_count: eigs.infinite,
        elapsed: start.elapsed(),
    })
}

/// `A + alpha C^H C`.
pub fn penalty_matrix(sys: &AssembledSystem, alpha: f64) -> CsMatrix {
    let ctc = sparse::matmul(&sparse::adjoint(&sys.c), &sys.c);
    sparse::add_scaled(&sys.a, c64::new(1.0, 0.0), &ctc, c64::new(alpha, 0.0))
}

/// `k` smallest-magnitude eigenpairs of `(A + alpha C^H C, M)`.
pub fn solve_penalty(
    sys: &AssembledSystem,
    alpha: f64,
    k: usize,
    cfg: &SolverConfig,
) -> Result<EigenSolution, SolverError> {
    let cfg = SolverConfig { alpha, ..cfg.clone() };
    check_size(sys, &cfg)?;
    let start = Instant::now();
    let p = penalty_matrix(sys, alpha);
    let eigs = solve_pencil(Pencil::Sparse { k: p.clone(), b: sys.m.clone() }, k, &cfg, false)?;
    let modes = eigs
        .pairs
        .into_iter()
        .map(|(l, x)| plain_mode(sys, &p, l, x, ModeLabel::Unclassified))
        .collect();
    Ok(EigenSolution {
        modes,
        method: Method::Penalty,
        alpha: Some(alpha),
        backend: eigs.backend,
        dimension: sys.n(),
        infinite_count: eigs.infinite,
        elapsed: start.elapsed(),
    })
}

/// Constraint rows kept in the augmented pencil: all but one node per
/// connected component of the edge graph. The dropped rows are linear
/// combinations of the kept ones (`beta^T C = 0` per component), and keeping
/// them would make the pencil singular for every `lambda`.
pub fn independent_constraint_rows(sys: &AssembledSystem) -> Vec<usize> {
    let m = sys.m();
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for k in 0..sys.y.ncols() {
        let [a, b] = sys.y.column(k);
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.min(rb)] = ra.max(rb);
        }
    }
    // the root of each component is its largest node index
    (0..m).filter(|&i| find(&mut parent, i) != i).collect()
}

/// Finite eigenpairs of `[[A, C^H], [C, 0]] x = lambda [[M, 0], [0, 0]] x`,
/// with one redundant constraint row per mesh component removed.
pub fn solve_augmented(
    sys: &AssembledSystem,
    k: usize,
    cfg: &SolverConfig,
) -> Result<EigenSolution, SolverError> {
    check_size(sys, cfg)?;
    let start = Instant::now();
    let n = sys.n();
    let rows = independent_constraint_rows(sys);
    let mut slot = vec![usize::MAX; sys.m()];
    for (j, &i) in rows.iter().enumerate() {
        slot[i] = j;
    }
    let dim = n + rows.len();
    let mut kt = CanonicalTriplets::with_capacity(sys.a.compute_nnz() + 2 * sys.c.compute_nnz());
    for t in sys.a.triplet_iter() {
        kt.push(t.row, t.col, [0; 4], *t.val);
    }
    let mut c_kept = Vec::with_capacity(sys.c.compute_nnz());
    for t in sys.c.triplet_iter() {
        let j = slot[t.row];
        if j != usize::MAX {
            kt.push(n + j, t.col, [0; 4], *t.val);
            kt.push(t.col, n + j, [0; 4], t.val.conj());
            c_kept.push(Triplet::new(j, t.col, *t.val));
        }
    }
    let kmat = kt.into_matrix(dim, dim);
    let mut bt = CanonicalTriplets::with_capacity(sys.m.compute_nnz());
    for t in sys.m.triplet_iter() {
        bt.push(t.row, t.col, [0; 4], *t.val);
    }
    let bmat = bt.into_matrix(dim, dim);
    let c_kept = faer::sparse::SparseColMat::try_new_from_triplets(rows.len(), n, &c_kept)
        .expect("in-range constraint rows");
    let c_kept_h = sparse::adjoint(&c_kept);

    let eigs = solve_pencil(Pencil::Sparse { k: kmat, b: bmat }, k, cfg, true)?;
    let (a_max, m_max, c_max) =
        (sparse::max_abs(&sys.a), sparse::max_abs(&sys.m), sparse::max_abs(&sys.c));
    let mut modes = Vec::with_capacity(eigs.pairs.len());
    for (lambda, x) in eigs.pairs {
        let (xi, scale) = normalized(x[..n].to_vec());
        if scale == 0.0 {
            continue;
        }
        let zeta_kept: Vec<c64> = x[n..].iter().map(|v| v / scale).collect();
        let mut zeta = vec![c64::new(0.0, 0.0); sys.m()];
        for (j, &i) in rows.iter().enumerate() {
            zeta[i] = zeta_kept[j];
        }
        let mean: c64 = zeta.iter().sum::<c64>() / zeta.len().max(1) as f64;
        let zmax = zeta.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let spread = zeta.iter().map(|z| (z - mean).norm()).fold(0.0, f64::max);
        let uniformity = if zmax > 0.0 { spread / zmax } else { 0.0 };
        let deviation = spread * c_max / (a_max + lambda.norm() * m_max);

        let mut kx = sparse::matvec(&sys.a, &xi);
        for (v, w) in kx.iter_mut().zip(sparse::matvec(&c_kept_h, &zeta_kept)) {
            *v += w;
        }
        let mx = sparse::matvec(&sys.m, &xi);
        modes.push(EigenMode {
            lambda,
            residual_constraint: sparse::norm2(&sparse::matvec(&sys.c, &xi)),
            residual_eigen: residual(&kx, &mx, lambda),
            xi,
            zeta: Some(zeta),
            zeta_uniformity: Some(uniformity),
            zeta_deviation: Some(deviation),
            label: ModeLabel::Unclassified,
        });
    }
    Ok(EigenSolution {
        modes,
        method: Method::Augmented,
        alpha: None,
        backend: eigs.backend,
        dimension: dim,
        infinite_count: eigs.infinite,
        elapsed: start.elapsed(),
    })
}

/// `Q^H S Q` for sparse `s` and dense `q`.
fn reduce(s: &CsMatrix, q: &Mat<c64>) -> Mat<c64> {
    let mut sq = Mat::<c64>::zeros(s.nrows(), q.ncols());
    sparse_dense_matmul(sq.as_mut(), Accum::Replace, s.as_ref(), q.as_ref(), c64::new(1.0, 0.0), Par::Seq);
    q.adjoint() * sq
}

/// Galerkin solve on the null space of `C`: `(Q^H A Q) y = lambda (Q^H M Q) y`.
pub fn solve_projection(
    sys: &AssembledSystem,
    k: usize,
    cfg: &SolverConfig,
) -> Result<EigenSolution, SolverError> {
    check_size(sys, cfg)?;
    let basis = nullspace_basis(&sys.c, cfg.rank_tol_factor)?;
    solve_projection_with(sys, &basis, k, cfg)
}

pub fn solve_projection_with(
    sys: &AssembledSystem,
    basis: &NullspaceBasis,
    k: usize,
    cfg: &SolverConfig,
) -> Result<EigenSolution, SolverError> {
    check_size(sys, cfg)?;
    let start = Instant::now();
    let qa = reduce(&sys.a, &basis.q);
    let qm = reduce(&sys.m, &basis.q);
    let eigs = solve_pencil(Pencil::Dense { k: qa, b: qm }, k, cfg, false)?;
    let modes = eigs
        .pairs
        .into_iter()
        .map(|(lambda, y)| {
            let ym = Mat::from_fn(y.len(), 1, |i, _| y[i]);
            let x = &basis.q * ym;
            let xi = (0..x.nrows()).map(|i| x[(i, 0)]).collect();
            plain_mode(sys, &sys.a, lambda, xi, ModeLabel::Physical)
        })
        .collect();
    Ok(EigenSolution {
        modes,
        method: Method::Projection,
        alpha: None,
        backend: eigs.backend,
        dimension: basis.r,
        infinite_count: eigs.infinite,
        elapsed: start.elapsed(),
    })
}

/// Runs `method` with `cfg.k` and `cfg.alpha`.
pub fn solve(sys: &AssembledSystem, method: Method, cfg: &SolverConfig) -> Result<EigenSolution, SolverError> {
    match method {
        Method::Unconstrained => solve_unconstrained(sys, cfg.k, cfg),
        Method::Penalty => solve_penalty(sys, cfg.alpha, cfg.k, cfg),
        Method::Augmented => solve_augmented(sys, cfg.k, cfg),
        Method::Projection => solve_projection(sys, cfg.k, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::assemble_system;
    use crate::materials::MaterialTensors;
    use crate::mesh::{build_connectivity_matrix, extract_edges, generate_box_mesh};

    fn box_system(div: [usize; 3], mat: &MaterialTensors) -> AssembledSystem {
        let mesh = generate_box_mesh(1.0, 0.5, 0.75, div[0], div[1], div[2]).unwrap();
        let edges = extract_edges(&mesh);
        let y = build_connectivity_matrix(&edges, mesh.node_count());
        assemble_system(&mesh, &edges, &y, mat).unwrap()
    }

    fn rel(a: c64, b: c64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn one_cube_zero_count() {
        let sys = box_system([1, 1, 1], &MaterialTensors::vacuum());
        let sol = solve_unconstrained(&sys, sys.n(), &SolverConfig::default()).unwrap();
        let vals = sol.eigenvalues();
        let tol = zero_tolerance(&vals, 1e-8);
        assert_eq!(count_below(&vals, tol), 7);
    }

    #[test]
    fn projection_dimension_and_constraint() {
        let sys = box_system([1, 1, 1], &MaterialTensors::vacuum());
        let basis = nullspace_basis(&sys.c, f64::EPSILON / 2.0).unwrap();
        assert_eq!(basis.r, 12);
        let sol = solve_projection(&sys, 12, &SolverConfig::default()).unwrap();
        assert_eq!(sol.modes.len(), 12);
        for m in &sol.modes {
            assert!(m.residual_constraint < 1e-10);
            assert!(m.lambda.im.abs() <= 1e-10 * m.lambda.norm());
            assert!((sparse::norm2(&m.xi) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn methods_agree_on_small_box() {
        let sys = box_system([2, 1, 2], &MaterialTensors::paper_case2());
        let cfg = SolverConfig::default();
        let proj = solve_projection(&sys, 6, &cfg).unwrap().eigenvalues();
        let aug = solve_augmented(&sys, 6, &cfg).unwrap().eigenvalues();
        for (p, a) in proj.iter().zip(&aug) {
            assert!(rel(*a, *p) < 1e-8, "{a} vs {p}");
        }
    }

    #[test]
    fn shift_invert_matches_dense() {
        let sys = box_system([2, 2, 2], &MaterialTensors::paper_case4());
        let dense = SolverConfig { backend: Backend::Dense, ..Default::default() };
        let si = SolverConfig { backend: Backend::ShiftInvert, ..Default::default() };
        for method in [Method::Penalty, Method::Augmented, Method::Projection] {
            let a = solve(&sys, method, &SolverConfig { k: 5, ..dense.clone() }).unwrap();
            let b = solve(&sys, method, &SolverConfig { k: 5, ..si.clone() }).unwrap();
            assert_eq!(b.backend, Backend::ShiftInvert);
            for (x, y) in a.eigenvalues().iter().zip(b.eigenvalues()) {
                assert!(rel(y, *x) < 1e-9, "{method}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn dense_limit_is_enforced() {
        let sys = box_system([1, 1, 1], &MaterialTensors::vacuum());
        let cfg = SolverConfig { dense_limit: 10, ..Default::default() };
        assert!(matches!(
            solve(&sys, Method::Projection, &cfg),
            Err(SolverError::DenseLimitExceeded { size: 27, limit: 10 })
        ));
    }

    #[test]
    fn zero_tolerance_ignores_roundoff_zeros() {
        let vals = [1e-15, 2e-15, 1.0, 2.0, 3.0].map(|v| c64::new(v, 0.0));
        assert_eq!(zero_tolerance(&vals, 1e-8), 2e-8);
        assert_eq!(count_below(&vals, 2e-8), 2);
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("qz".parse::<Method>().is_err());
    }
}
