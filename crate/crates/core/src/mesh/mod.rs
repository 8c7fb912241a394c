//! Tetrahedral meshes: storage, generators, text I/O, edge numbering and the
//! node-edge connectivity matrix.

mod connectivity;
mod edges;
mod generate;
mod io;

use std::collections::HashMap;

pub use connectivity::{build_connectivity_matrix, ConnectivityMatrix};
pub use edges::{extract_edges, EdgeNumbering, LOCAL_EDGES};
pub use generate::{generate_ball_mesh, generate_box_mesh, generate_cylinder_mesh};
pub use io::{parse_mesh, write_mesh};

use crate::error::MeshError;

pub type Point = [f64; 3];

/// Relative threshold on `|6V| / h_K^3` below which a tetrahedron counts as degenerate.
const DEGENERATE_REL: f64 = 1e-12;

/// A tetrahedral mesh with 0-based node indices.
///
/// Every tetrahedron is stored with positive signed volume; construction swaps
/// the last two vertices of any negatively oriented element.
#[derive(Debug, Clone, PartialEq)]
pub struct TetMesh {
    nodes: Vec<Point>,
    tets: Vec<[usize; 4]>,
    label: String,
}

impl TetMesh {
    pub fn new(
        nodes: Vec<Point>,
        mut tets: Vec<[usize; 4]>,
        label: impl Into<String>,
    ) -> Result<Self, MeshError> {
        let count = nodes.len();
        if let Some(i) = nodes.iter().position(|p| p.iter().any(|c| !c.is_finite())) {
            return Err(MeshError::NonFinite(i));
        }
        for (t, tet) in tets.iter_mut().enumerate() {
            for (k, &v) in tet.iter().enumerate() {
                if v >= count {
                    return Err(MeshError::NodeIndexOutOfRange { tet: t, index: v, count });
                }
                if tet[..k].contains(&v) {
                    return Err(MeshError::RepeatedVertex { tet: t, index: v });
                }
            }
            let pts = tet.map(|v| nodes[v]);
            let vol6 = signed_volume6(&pts);
            let h = longest_edge_of(&pts);
            if !(vol6.abs() > DEGENERATE_REL * h * h * h) {
                return Err(MeshError::Degenerate { tet: t });
            }
            if vol6 < 0.0 {
                tet.swap(2, 3);
            }
        }
        Ok(Self { nodes, tets, label: label.into() })
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn tets(&self) -> &[[usize; 4]] {
        &self.tets
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn tet_count(&self) -> usize {
        self.tets.len()
    }

    pub fn tet_points(&self, tet: usize) -> [Point; 4] {
        self.tets[tet].map(|v| self.nodes[v])
    }

    pub fn volume(&self, tet: usize) -> f64 {
        signed_volume6(&self.tet_points(tet)) / 6.0
    }

    pub fn total_volume(&self) -> f64 {
        (0..self.tets.len()).map(|t| self.volume(t)).sum()
    }

    /// Longest edge length over all elements (the mesh size `h`).
    pub fn longest_edge(&self) -> f64 {
        (0..self.tets.len())
            .map(|t| longest_edge_of(&self.tet_points(t)))
            .fold(0.0, f64::max)
    }

    /// Same nodes and elements with a different element listing order.
    pub fn with_tet_order(&self, order: &[usize]) -> Self {
        Self {
            nodes: self.nodes.clone(),
            tets: order.iter().map(|&t| self.tets[t]).collect(),
            label: self.label.clone(),
        }
    }

    /// Face-hash pairing check: no face may be shared by more than two
    /// elements and no element may be listed twice.
    pub fn check_conforming(&self) -> Result<(), MeshError> {
        let mut faces: HashMap<[usize; 3], u32> = HashMap::with_capacity(self.tets.len() * 4);
        let mut seen: HashMap<[usize; 4], usize> = HashMap::with_capacity(self.tets.len());
        for (t, tet) in self.tets.iter().enumerate() {
            let mut key = *tet;
            key.sort_unstable();
            if let Some(prev) = seen.insert(key, t) {
                return Err(MeshError::NonConforming(format!("tets {prev} and {t} coincide")));
            }
            for skip in 0..4 {
                let mut face = [0; 3];
                let mut k = 0;
                for (j, &v) in key.iter().enumerate() {
                    if j != skip {
                        face[k] = v;
                        k += 1;
                    }
                }
                *faces.entry(face).or_insert(0) += 1;
            }
        }
        if let Some((face, c)) = faces.iter().find(|(_, &c)| c > 2) {
            return Err(MeshError::NonConforming(format!(
                "face {face:?} shared by {c} elements"
            )));
        }
        Ok(())
    }
}

pub(crate) fn signed_volume6(p: &[Point; 4]) -> f64 {
    let a = sub(p[1], p[0]);
    let b = sub(p[2], p[0]);
    let c = sub(p[3], p[0]);
    dot(a, cross(b, c))
}

fn longest_edge_of(p: &[Point; 4]) -> f64 {
    let mut h: f64 = 0.0;
    for i in 0..4 {
        for j in i + 1..4 {
            h = h.max(norm(sub(p[j], p[i])));
        }
    }
    h
}

pub(crate) fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: Point, b: Point) -> Point {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm(a: Point) -> f64 {
    dot(a, a).sqrt()
}
