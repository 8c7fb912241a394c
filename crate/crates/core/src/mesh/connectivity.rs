use faer::sparse::{SparseColMat, Triplet};
use faer::{c64, Mat};

use super::EdgeNumbering;

/// Signed node-edge incidence matrix `Y` (m x n): column `k` holds -1 at the
/// initial (lower-index) node of edge `k` and +1 at its terminal node.
///
/// Row `i` holds the coefficients of `grad L_i` in the global edge basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectivityMatrix {
    nodes: usize,
    /// `columns[k] = [initial, terminal]`
    columns: Vec<[usize; 2]>,
}

pub fn build_connectivity_matrix(edges: &EdgeNumbering, m: usize) -> ConnectivityMatrix {
    ConnectivityMatrix { nodes: m, columns: edges.edges().to_vec() }
}

impl ConnectivityMatrix {
    pub fn nrows(&self) -> usize {
        self.nodes
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    pub fn nnz(&self) -> usize {
        2 * self.columns.len()
    }

    pub fn column(&self, k: usize) -> [usize; 2] {
        self.columns[k]
    }

    /// Entry `y_{ik}`.
    pub fn get(&self, i: usize, k: usize) -> i8 {
        let [lo, hi] = self.columns[k];
        if i == lo {
            -1
        } else if i == hi {
            1
        } else {
            0
        }
    }

    /// Row `i` as a dense coefficient vector of length n.
    pub fn row_dense(&self, i: usize) -> Vec<f64> {
        (0..self.ncols()).map(|k| self.get(i, k) as f64).collect()
    }

    /// Number of edges incident to each node.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.nodes];
        for &[lo, hi] in &self.columns {
            deg[lo] += 1;
            deg[hi] += 1;
        }
        deg
    }

    /// `Y^T x` for a node vector `x`.
    pub fn transpose_apply(&self, x: &[f64]) -> Vec<f64> {
        self.columns.iter().map(|&[lo, hi]| x[hi] - x[lo]).collect()
    }

    pub fn to_sparse(&self) -> SparseColMat<usize, c64> {
        let triplets: Vec<Triplet<usize, usize, c64>> = self
            .columns
            .iter()
            .enumerate()
            .flat_map(|(k, &[lo, hi])| {
                [Triplet::new(lo, k, c64::new(-1.0, 0.0)), Triplet::new(hi, k, c64::new(1.0, 0.0))]
            })
            .collect();
        SparseColMat::try_new_from_triplets(self.nodes, self.ncols(), &triplets)
            .expect("valid incidence triplets")
    }

    pub fn to_dense(&self) -> Mat<f64> {
        let mut y = Mat::zeros(self.nodes, self.ncols());
        for (k, &[lo, hi]) in self.columns.iter().enumerate() {
            y[(lo, k)] = -1.0;
            y[(hi, k)] = 1.0;
        }
        y
    }

    /// Numerical rank from the singular values of the dense matrix. Intended
    /// for small meshes only.
    pub fn rank(&self) -> usize {
        let y = self.to_dense();
        let sv = y.singular_values().expect("svd of incidence matrix");
        let smax = sv.iter().cloned().fold(0.0, f64::max);
        let tol = smax * (self.nodes.max(self.ncols()) as f64) * f64::EPSILON;
        sv.iter().filter(|&&s| s > tol).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{extract_edges, generate_box_mesh, TetMesh};

    #[test]
    fn reference_tet_first_row() {
        let mesh = TetMesh::new(
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            vec![[0, 1, 2, 3]],
            "",
        )
        .unwrap();
        let edges = extract_edges(&mesh);
        let y = build_connectivity_matrix(&edges, 4);
        // local edge order N1..N6 maps to global edges via tet_edges
        let local_row: Vec<i8> =
            edges.tet_edges(0).iter().map(|&(g, s)| s * y.get(0, g)).collect();
        assert_eq!(local_row, vec![-1, 0, -1, 0, -1, 0]);
    }

    #[test]
    fn one_cube_structure() {
        let mesh = generate_box_mesh(1.0, 1.0, 1.0, 1, 1, 1).unwrap();
        let edges = extract_edges(&mesh);
        let y = build_connectivity_matrix(&edges, mesh.node_count());
        assert_eq!(y.nnz(), 2 * 19);
        assert!(y.transpose_apply(&[1.0; 8]).iter().all(|&v| v == 0.0));
        assert_eq!(y.rank(), 7);
        let deg = y.degrees();
        for i in 0..8 {
            assert_eq!(y.row_dense(i).iter().filter(|v| **v != 0.0).count(), deg[i]);
        }
        // corners on the main diagonal touch 7 edges, the other six touch 4
        assert_eq!(deg[0], 7);
        assert_eq!(deg[7], 7);
        assert!(deg[1..7].iter().all(|&d| d == 4));
    }
}
