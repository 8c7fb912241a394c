//! Thick-restart Arnoldi for the largest-magnitude eigenvalues of a linear
//! operator, used with shift-invert operators `(K - sigma B)^-1 B`.

use faer::{c64, Mat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::SolverError;
use crate::sparse::norm2;

pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[c64]) -> Vec<c64>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct KrylovOptions {
    pub nev: usize,
    /// Basis size; must exceed `nev`.
    pub ncv: usize,
    /// Relative Ritz residual `||Op x - theta x|| <= tol |theta|`.
    pub tol: f64,
    pub max_restarts: usize,
    pub seed: u64,
}

impl KrylovOptions {
    pub fn for_count(nev: usize, dim: usize) -> Self {
        let ncv = (2 * nev + 20).max(nev + 24).min(dim);
        Self { nev: nev.min(dim), ncv, tol: 1e-12, max_restarts: 300, seed: 0x5eed }
    }
}

#[derive(Debug, Clone)]
pub struct RitzPair {
    pub theta: c64,
    /// Unit Euclidean norm.
    pub vector: Vec<c64>,
    /// Estimated `||Op x - theta x||`.
    pub residual: f64,
}

fn dotc(u: &[c64], v: &[c64]) -> c64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// Two passes of classical Gram-Schmidt; returns the coefficients.
fn orthogonalize(basis: &[Vec<c64>], w: &mut [c64]) -> Vec<c64> {
    let mut coeffs = vec![c64::new(0.0, 0.0); basis.len()];
    for _ in 0..2 {
        let h: Vec<c64> = basis.iter().map(|v| dotc(v, w)).collect();
        for (v, hj) in basis.iter().zip(&h) {
            for (wi, vi) in w.iter_mut().zip(v) {
                *wi -= hj * vi;
            }
        }
        for (c, hj) in coeffs.iter_mut().zip(h) {
            *c += hj;
        }
    }
    coeffs
}

fn random_unit(n: usize, rng: &mut ChaCha8Rng, basis: &[Vec<c64>]) -> Vec<c64> {
    loop {
        let mut v: Vec<c64> = (0..n)
            .map(|_| c64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        orthogonalize(basis, &mut v);
        let nv = norm2(&v);
        if nv > 1e-8 {
            v.iter_mut().for_each(|x| *x /= nv);
            return v;
        }
    }
}

fn combine(basis: &[Vec<c64>], coeffs: impl Fn(usize) -> c64) -> Vec<c64> {
    let mut x = vec![c64::new(0.0, 0.0); basis[0].len()];
    for (j, v) in basis.iter().enumerate() {
        let c = coeffs(j);
        for (xi, vi) in x.iter_mut().zip(v) {
            *xi += c * vi;
        }
    }
    x
}

/// Computes the `nev` eigenvalues of largest magnitude of `op`.
pub fn largest_magnitude<O: LinearOperator + ?Sized>(
    op: &O,
    opts: &KrylovOptions,
) -> Result<Vec<RitzPair>, SolverError> {
    let n = op.dim();
    let nev = opts.nev;
    let ncv = opts.ncv.min(n);
    if nev == 0 {
        return Ok(Vec::new());
    }
    if ncv <= nev {
        return Err(SolverError::InvalidParameter(format!(
            "Krylov basis {ncv} must exceed the requested count {nev}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let start = random_unit(n, &mut rng, &[]);
    // one application damps components along eigenvalue zero of the operator
    let mut v0 = op.apply(&start);
    let nv = norm2(&v0);
    if !(nv > 0.0 && nv.is_finite()) {
        return Err(SolverError::Backend("operator annihilated the start vector".into()));
    }
    v0.iter_mut().for_each(|x| *x /= nv);

    let mut basis: Vec<Vec<c64>> = vec![v0];
    let mut h = Mat::<c64>::zeros(ncv + 1, ncv);
    let mut kept = 0usize;

    for restart in 0..=opts.max_restarts {
        for j in kept..ncv {
            let mut w = op.apply(&basis[j]);
            let wnorm = norm2(&w);
            if !wnorm.is_finite() {
                return Err(SolverError::Backend("non-finite operator output".into()));
            }
            let coeffs = orthogonalize(&basis, &mut w);
            for (i, c) in coeffs.into_iter().enumerate() {
                h[(i, j)] = c;
            }
            let beta = norm2(&w);
            if beta <= 1e-13 * wnorm.max(f64::MIN_POSITIVE) {
                h[(j + 1, j)] = c64::new(0.0, 0.0);
                basis.push(random_unit(n, &mut rng, &basis));
            } else {
                h[(j + 1, j)] = c64::new(beta, 0.0);
                w.iter_mut().for_each(|x| *x /= beta);
                basis.push(w);
            }
        }

        let hm = h.submatrix(0, 0, ncv, ncv).to_owned();
        let evd = hm.eigen().map_err(|e| SolverError::Backend(format!("{e:?}")))?;
        let (s, u) = (evd.S(), evd.U());
        let mut order: Vec<usize> = (0..ncv).collect();
        order.sort_by(|&a, &b| s[b].norm().total_cmp(&s[a].norm()).then(a.cmp(&b)));
        let spike = h[(ncv, ncv - 1)].norm();
        let residual = |i: usize| {
            let col_norm = (0..ncv).map(|r| u[(r, i)].norm_sqr()).sum::<f64>().sqrt();
            spike * u[(ncv - 1, i)].norm() / col_norm
        };
        let converged = order[..nev].iter().all(|&i| residual(i) <= opts.tol * s[i].norm());

        if converged || restart == opts.max_restarts {
            if !converged {
                return Err(SolverError::Backend(format!(
                    "shift-invert Arnoldi did not converge in {} restarts",
                    opts.max_restarts
                )));
            }
            return Ok(order[..nev]
                .iter()
                .map(|&i| {
                    let mut x = combine(&basis[..ncv], |j| u[(j, i)]);
                    let nx = norm2(&x);
                    x.iter_mut().for_each(|v| *v /= nx);
                    RitzPair { theta: s[i], vector: x, residual: residual(i) }
                })
                .collect());
        }

        let keep = (nev + (ncv - nev) / 2).min(ncv - 1);
        let wanted = Mat::from_fn(ncv, keep, |r, c| u[(r, order[c])]);
        let z = wanted.qr().compute_thin_Q();
        let hz = &hm * &z;
        let small = z.adjoint() * &hz;
        let mut new_basis: Vec<Vec<c64>> =
            (0..keep).map(|c| combine(&basis[..ncv], |j| z[(j, c)])).collect();
        new_basis.push(basis.pop().expect("residual direction"));
        let mut new_h = Mat::<c64>::zeros(ncv + 1, ncv);
        for r in 0..keep {
            for c in 0..keep {
                new_h[(r, c)] = small[(r, c)];
            }
        }
        let tail = h[(ncv, ncv - 1)];
        for c in 0..keep {
            new_h[(keep, c)] = tail * z[(ncv - 1, c)];
        }
        basis = new_basis;
        h = new_h;
        kept = keep;
    }
    unreachable!("loop returns on the final restart")
}
