use faer::c64;

use crate::materials::Tensor3;
use crate::mesh::{cross, dot, sub, Point, TetMesh, LOCAL_EDGES};

/// Symmetric 4-point rule on the tetrahedron, exact for quadratics. Barycentric
/// points are permutations of (a, b, b, b); each weight is V/4.
pub const QUAD4_A: f64 = 0.585_410_196_624_968_5;
pub const QUAD4_B: f64 = 0.138_196_601_125_010_5;

pub fn quad4_points() -> [[f64; 4]; 4] {
    let (a, b) = (QUAD4_A, QUAD4_B);
    [[a, b, b, b], [b, a, b, b], [b, b, a, b], [b, b, b, a]]
}

pub type Local6 = [[c64; 6]; 6];

/// Constant gradients of the four barycentric (nodal) functions and the volume.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementGeometry {
    pub vertices: [Point; 4],
    pub grads: [[f64; 3]; 4],
    pub volume: f64,
}

impl ElementGeometry {
    /// Returns `None` for a degenerate element.
    pub fn from_points(p: [Point; 4]) -> Option<Self> {
        let e1 = sub(p[1], p[0]);
        let e2 = sub(p[2], p[0]);
        let e3 = sub(p[3], p[0]);
        let det = dot(e1, cross(e2, e3));
        let scale = [e1, e2, e3].iter().map(|e| dot(*e, *e)).fold(0.0, f64::max).sqrt();
        if !(det.abs() > 1e-12 * scale * scale * scale) {
            return None;
        }
        let g1 = cross(e2, e3).map(|v| v / det);
        let g2 = cross(e3, e1).map(|v| v / det);
        let g3 = cross(e1, e2).map(|v| v / det);
        let g0 = [0, 1, 2].map(|k| -(g1[k] + g2[k] + g3[k]));
        Some(Self { vertices: p, grads: [g0, g1, g2, g3], volume: det.abs() / 6.0 })
    }

    /// Barycentric coordinates `L_1..L_4` at `x`.
    pub fn barycentric(&self, x: Point) -> [f64; 4] {
        let d = sub(x, self.vertices[0]);
        let l1 = dot(self.grads[1], d);
        let l2 = dot(self.grads[2], d);
        let l3 = dot(self.grads[3], d);
        [1.0 - l1 - l2 - l3, l1, l2, l3]
    }

    /// Physical point for barycentric coordinates.
    pub fn point(&self, bary: [f64; 4]) -> Point {
        let mut x = [0.0; 3];
        for (w, v) in bary.iter().zip(&self.vertices) {
            for k in 0..3 {
                x[k] += w * v[k];
            }
        }
        x
    }

    /// Unsigned local edge function `N_i = L_a grad L_b - L_b grad L_a` at
    /// barycentric coordinates `bary`.
    pub fn edge_function(&self, i: usize, bary: [f64; 4]) -> [f64; 3] {
        let [a, b] = LOCAL_EDGES[i];
        [0, 1, 2].map(|k| bary[a] * self.grads[b][k] - bary[b] * self.grads[a][k])
    }

    /// Constant curl of the unsigned local edge function: `2 grad L_a x grad L_b`.
    pub fn edge_curl(&self, i: usize) -> [f64; 3] {
        let [a, b] = LOCAL_EDGES[i];
        cross(self.grads[a], self.grads[b]).map(|v| 2.0 * v)
    }
}

pub fn element_geometry(mesh: &TetMesh, tet: usize) -> Option<ElementGeometry> {
    ElementGeometry::from_points(mesh.tet_points(tet))
}

/// Local curl-curl matrix `K[i][k] = V (eps_inv c_k) . c_i` of the signed edge
/// functions. Exact, since the curls are constant.
pub fn element_stiffness(geom: &ElementGeometry, eps_inv: &Tensor3, signs: [i8; 6]) -> Local6 {
    let curls: [[f64; 3]; 6] =
        std::array::from_fn(|i| geom.edge_curl(i).map(|v| v * signs[i] as f64));
    let mut k = [[c64::new(0.0, 0.0); 6]; 6];
    for i in 0..6 {
        for j in 0..6 {
            k[i][j] = eps_inv.bilinear(curls[i], curls[j]) * geom.volume;
        }
    }
    k
}

/// Local mass matrix `M[i][k] = int (mu N_k) . N_i` of the signed edge functions.
pub fn element_mass(geom: &ElementGeometry, mu: &Tensor3, signs: [i8; 6]) -> Local6 {
    let w = geom.volume / 4.0;
    let mut m = [[c64::new(0.0, 0.0); 6]; 6];
    for bary in quad4_points() {
        let n: [[f64; 3]; 6] = std::array::from_fn(|i| {
            geom.edge_function(i, bary).map(|v| v * signs[i] as f64)
        });
        for i in 0..6 {
            for j in 0..6 {
                m[i][j] += mu.bilinear(n[i], n[j]) * w;
            }
        }
    }
    m
}

/// Local constraint block `C[a][k] = int (mu N_k) . grad L_a` (4 nodes x 6 edges).
pub fn element_constraint(geom: &ElementGeometry, mu: &Tensor3, signs: [i8; 6]) -> [[c64; 6]; 4] {
    let w = geom.volume / 4.0;
    let mut c = [[c64::new(0.0, 0.0); 6]; 4];
    for bary in quad4_points() {
        for k in 0..6 {
            let nk = geom.edge_function(k, bary).map(|v| v * signs[k] as f64);
            for (a, row) in c.iter_mut().enumerate() {
                row[k] += mu.bilinear(geom.grads[a], nk) * w;
            }
        }
    }
    c
}

/// Local rows of the connectivity matrix in terms of the unsigned local edge
/// functions: `grad L_a = sum_i LOCAL_GRADIENT_ROWS[a][i] N_i`.
pub const LOCAL_GRADIENT_ROWS: [[i8; 6]; 4] = [
    [-1, 0, -1, 0, -1, 0],
    [1, -1, 0, 0, 0, -1],
    [0, 1, 1, -1, 0, 0],
    [0, 0, 0, 1, 1, 1],
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::MaterialTensors;

    fn reference() -> ElementGeometry {
        ElementGeometry::from_points([
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
        ])
        .unwrap()
    }

    #[test]
    fn reference_geometry() {
        let g = reference();
        assert_eq!(g.grads, [[-1.0, -1.0, -1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        assert!((g.volume - 1.0 / 6.0).abs() < 1e-16);
    }

    #[test]
    fn scaling() {
        let s = 2.5;
        let base = reference();
        let scaled = ElementGeometry::from_points(base.vertices.map(|p| p.map(|c| c * s))).unwrap();
        assert!((scaled.volume - base.volume * s * s * s).abs() < 1e-14);
        for a in 0..4 {
            for k in 0..3 {
                assert!((scaled.grads[a][k] - base.grads[a][k] / s).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn degenerate_rejected() {
        let flat = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0]];
        assert!(ElementGeometry::from_points(flat).is_none());
    }

    #[test]
    fn stiffness_annihilates_local_gradients() {
        let g = ElementGeometry::from_points([
            [0.1, 0.0, 0.2],
            [1.0, 0.3, 0.0],
            [0.2, 1.1, 0.1],
            [0.0, 0.4, 0.9],
        ])
        .unwrap();
        let eps_inv = MaterialTensors::paper_case4().eps_inverse().unwrap();
        let k = element_stiffness(&g, &eps_inv, [1; 6]);
        for row in LOCAL_GRADIENT_ROWS {
            for j in 0..6 {
                let v: c64 = (0..6).map(|i| k[i][j] * row[i] as f64).sum();
                assert!(v.norm() < 1e-14, "{v}");
            }
        }
    }

    #[test]
    fn hermitian_tensors_give_hermitian_blocks() {
        let g = reference();
        let mat = MaterialTensors::paper_case2();
        let m = element_mass(&g, &mat.mu_r, [1, -1, 1, 1, -1, 1]);
        let k = element_stiffness(&g, &Tensor3::identity(), [1, -1, 1, 1, -1, 1]);
        for i in 0..6 {
            assert!(m[i][i].re > 0.0);
            for j in 0..6 {
                assert!((m[i][j] - m[j][i].conj()).norm() < 1e-15);
                assert!((k[i][j] - k[j][i].conj()).norm() < 1e-15);
            }
        }
    }
}
