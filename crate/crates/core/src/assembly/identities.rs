use super::AssembledSystem;
use crate::sparse::{self, CsMatrix};

/// Largest node count for which `rank(Y)` is computed densely.
pub const RANK_NODE_LIMIT: usize = 500;

/// Residuals of the structural identities, each relative to the matrix it is
/// measured against.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    /// `||Y A||_max / ||A||_max`
    pub ya: f64,
    /// `||C - Y M||_max / ||M||_max`
    pub c_minus_ym: f64,
    /// `||Y^T beta||_max` for the all-ones node vector (exact integers).
    pub yt_beta: f64,
    /// `rank(Y)`, computed when `m <= RANK_NODE_LIMIT`.
    pub rank_y: Option<usize>,
    pub m: usize,
    pub tol: f64,
}

impl IdentityReport {
    pub fn ya_ok(&self) -> bool {
        self.ya <= self.tol
    }

    pub fn c_ok(&self) -> bool {
        self.c_minus_ym <= self.tol
    }

    pub fn null_ok(&self) -> bool {
        self.yt_beta == 0.0 && self.rank_y.is_none_or(|r| r + 1 == self.m)
    }

    pub fn all_ok(&self) -> bool {
        self.ya_ok() && self.c_ok() && self.null_ok()
    }
}

/// Checks `YA = 0`, `C = YM` and `Y^T beta = 0`. When `c_reference` is given
/// (typically the directly integrated constraint matrix) it replaces the
/// stored `C` in the second identity.
pub fn check_identities(sys: &AssembledSystem, c_reference: Option<&CsMatrix>) -> IdentityReport {
    let y = sys.y.to_sparse();
    let rel = |num: f64, den: f64| if den > 0.0 { num / den } else { num };
    let ya = rel(sparse::max_abs(&sparse::matmul(&y, &sys.a)), sparse::max_abs(&sys.a));
    let ym = sparse::matmul(&y, &sys.m);
    let c = c_reference.unwrap_or(&sys.c);
    let c_minus_ym = rel(sparse::max_abs_diff(c, &ym), sparse::max_abs(&sys.m));
    let ones = vec![1.0; sys.y.nrows()];
    let yt_beta = sys.y.transpose_apply(&ones).iter().map(|v| v.abs()).fold(0.0, f64::max);
    let rank_y = (sys.y.nrows() <= RANK_NODE_LIMIT).then(|| sys.y.rank());
    IdentityReport { ya, c_minus_ym, yt_beta, rank_y, m: sys.y.nrows(), tol: 1e-12 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::assemble_system;
    use crate::materials::MaterialTensors;
    use crate::mesh::{build_connectivity_matrix, extract_edges, generate_box_mesh};
    use faer::c64;
    use faer::sparse::{SparseColMat, Triplet};

    fn system() -> AssembledSystem {
        let mesh = generate_box_mesh(1.0, 1.0, 1.0, 1, 1, 1).unwrap();
        let edges = extract_edges(&mesh);
        let y = build_connectivity_matrix(&edges, mesh.node_count());
        assemble_system(&mesh, &edges, &y, &MaterialTensors::paper_case4()).unwrap()
    }

    #[test]
    fn clean_system_passes() {
        let report = check_identities(&system(), None);
        assert!(report.all_ok(), "{report:?}");
        assert_eq!(report.rank_y, Some(7));
    }

    #[test]
    fn perturbed_stiffness_is_flagged() {
        let mut sys = system();
        let n = sys.n();
        let bump = SparseColMat::try_new_from_triplets(
            n,
            n,
            &[Triplet::new(3, 5, c64::new(1e-3, 0.0))],
        )
        .unwrap();
        sys.a = sparse::add_scaled(&sys.a, c64::new(1.0, 0.0), &bump, c64::new(1.0, 0.0));
        let report = check_identities(&sys, None);
        assert!(!report.ya_ok());
        assert!(report.c_ok());
    }
}
