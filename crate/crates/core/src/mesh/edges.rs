use super::TetMesh;

/// Local vertex pairs defining the six edge functions of a tetrahedron, in the
/// order N1..N6: (1,2), (2,3), (1,3), (3,4), (1,4), (2,4), written 0-based.
pub const LOCAL_EDGES: [[usize; 2]; 6] = [[0, 1], [1, 2], [0, 2], [2, 3], [0, 3], [1, 3]];

/// Global edge list plus per-element local-to-global maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeNumbering {
    /// Node pairs `(lo, hi)` with `lo < hi`, sorted lexicographically.
    edges: Vec<[usize; 2]>,
    /// For each tet and local edge: (global edge id, orientation sign).
    tet_edges: Vec<[(usize, i8); 6]>,
}

impl EdgeNumbering {
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn tet_edges(&self, tet: usize) -> &[(usize, i8); 6] {
        &self.tet_edges[tet]
    }

    pub fn tet_count(&self) -> usize {
        self.tet_edges.len()
    }

    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        let key = if a < b { [a, b] } else { [b, a] };
        self.edges.binary_search(&key).ok()
    }
}

/// Numbers the edges of `mesh` globally (lexicographic on sorted node pairs,
/// oriented low index to high index) and records each local edge's sign.
pub fn extract_edges(mesh: &TetMesh) -> EdgeNumbering {
    let mut edges: Vec<[usize; 2]> = Vec::with_capacity(mesh.tet_count() * 6);
    for tet in mesh.tets() {
        for [a, b] in LOCAL_EDGES {
            let (u, v) = (tet[a], tet[b]);
            edges.push(if u < v { [u, v] } else { [v, u] });
        }
    }
    edges.sort_unstable();
    edges.dedup();

    let tet_edges = mesh
        .tets()
        .iter()
        .map(|tet| {
            LOCAL_EDGES.map(|[a, b]| {
                let (u, v) = (tet[a], tet[b]);
                let key = if u < v { [u, v] } else { [v, u] };
                let id = edges.binary_search(&key).expect("edge collected above");
                (id, if u < v { 1 } else { -1 })
            })
        })
        .collect();

    EdgeNumbering { edges, tet_edges }
}
