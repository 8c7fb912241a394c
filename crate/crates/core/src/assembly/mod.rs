//! Global curl-curl, mass and constraint matrices.

mod element;
mod identities;

pub use element::{
    element_constraint, element_geometry, element_mass, element_stiffness, quad4_points,
    ElementGeometry, Local6, LOCAL_GRADIENT_ROWS, QUAD4_A, QUAD4_B,
};
pub use identities::{check_identities, IdentityReport, RANK_NODE_LIMIT};

use crate::error::MaterialError;
use crate::materials::{MaterialLookup, MediumCase, HERMITIAN_TOL};
use crate::mesh::{ConnectivityMatrix, EdgeNumbering, TetMesh};
use crate::sparse::{self, CanonicalTriplets, CsMatrix};

/// The constrained pencil `A x = lambda M x`, `C x = 0` on one mesh.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    /// Curl-curl matrix, n x n.
    pub a: CsMatrix,
    /// Mass matrix, n x n.
    pub m: CsMatrix,
    /// Node-edge connectivity, m x n.
    pub y: ConnectivityMatrix,
    /// Constraint matrix `Y M`, m x n.
    pub c: CsMatrix,
    /// Longest mesh edge.
    pub mesh_h: f64,
    pub case: MediumCase,
}

impl AssembledSystem {
    /// Number of edges (unknowns).
    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    /// Number of nodes (constraint rows).
    pub fn m(&self) -> usize {
        self.c.nrows()
    }
}

fn tet_key(mesh: &TetMesh, t: usize) -> [usize; 4] {
    let mut key = mesh.tets()[t];
    key.sort_unstable();
    key
}

fn tet_signs(edges: &EdgeNumbering, t: usize) -> ([usize; 6], [i8; 6]) {
    let e = edges.tet_edges(t);
    (e.map(|(g, _)| g), e.map(|(_, s)| s))
}

/// Assembles `A`, `M` by signed scatter-add and forms `C = Y M`.
pub fn assemble_system<L: MaterialLookup + ?Sized>(
    mesh: &TetMesh,
    edges: &EdgeNumbering,
    y: &ConnectivityMatrix,
    materials: &L,
) -> Result<AssembledSystem, MaterialError> {
    let n = edges.edge_count();
    let mut a = CanonicalTriplets::with_capacity(36 * mesh.tet_count());
    let mut m = CanonicalTriplets::with_capacity(36 * mesh.tet_count());
    for t in 0..mesh.tet_count() {
        let mat = materials.tensors(t);
        let eps_inv = mat.eps_inverse()?;
        let geom = element_geometry(mesh, t).expect("mesh elements are non-degenerate");
        let (global, signs) = tet_signs(edges, t);
        let ke = element_stiffness(&geom, &eps_inv, signs);
        let me = element_mass(&geom, &mat.mu_r, signs);
        let key = tet_key(mesh, t);
        for i in 0..6 {
            for k in 0..6 {
                a.push(global[i], global[k], key, ke[i][k]);
                m.push(global[i], global[k], key, me[i][k]);
            }
        }
    }
    let a = a.into_matrix(n, n);
    let m = m.into_matrix(n, n);
    let c = sparse::matmul(&y.to_sparse(), &m);
    Ok(AssembledSystem {
        a,
        m,
        y: y.clone(),
        c,
        mesh_h: mesh.longest_edge(),
        case: materials.medium_case(HERMITIAN_TOL),
    })
}

/// Constraint matrix by direct quadrature of `int (mu N_k) . grad L_i`. Used
/// to cross-check `C = Y M`.
pub fn assemble_constraint_direct<L: MaterialLookup + ?Sized>(
    mesh: &TetMesh,
    edges: &EdgeNumbering,
    materials: &L,
) -> CsMatrix {
    let mut c = CanonicalTriplets::with_capacity(24 * mesh.tet_count());
    for t in 0..mesh.tet_count() {
        let mat = materials.tensors(t);
        let geom = element_geometry(mesh, t).expect("mesh elements are non-degenerate");
        let (global, signs) = tet_signs(edges, t);
        let ce = element_constraint(&geom, &mat.mu_r, signs);
        let nodes = mesh.tets()[t];
        let key = tet_key(mesh, t);
        for (a, row) in ce.iter().enumerate() {
            for k in 0..6 {
                c.push(nodes[a], global[k], key, row[k]);
            }
        }
    }
    c.into_matrix(mesh.node_count(), edges.edge_count())
}
