use std::f64::consts::FRAC_PI_4;

use super::{Point, TetMesh};
use crate::error::MeshError;

/// Kuhn split of the unit cube: one tetrahedron per axis permutation, all
/// sharing the main diagonal from corner (0,0,0) to corner (1,1,1).
const KUHN_PERMUTATIONS: [[usize; 3]; 6] =
    [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Structured tensor-product grid split into 6 tetrahedra per cell.
fn structured_grid(xs: &[f64], ys: &[f64], zs: &[f64]) -> (Vec<Point>, Vec<[usize; 4]>) {
    let (px, py) = (xs.len(), ys.len());
    let (nx, ny, nz) = (xs.len() - 1, ys.len() - 1, zs.len() - 1);
    let id = |i: usize, j: usize, k: usize| i + px * (j + py * k);

    let mut nodes = Vec::with_capacity(px * py * zs.len());
    for &z in zs {
        for &y in ys {
            for &x in xs {
                nodes.push([x, y, z]);
            }
        }
    }

    let mut tets = Vec::with_capacity(6 * nx * ny * nz);
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                for perm in KUHN_PERMUTATIONS {
                    let mut corner = [i, j, k];
                    let mut tet = [id(i, j, k); 4];
                    for (step, &axis) in perm.iter().enumerate() {
                        corner[axis] += 1;
                        tet[step + 1] = id(corner[0], corner[1], corner[2]);
                    }
                    tets.push(tet);
                }
            }
        }
    }
    (nodes, tets)
}

fn linspace(start: f64, end: f64, cells: usize) -> Vec<f64> {
    (0..=cells)
        .map(|i| {
            if i == cells {
                end
            } else {
                start + (end - start) * i as f64 / cells as f64
            }
        })
        .collect()
}

/// Box `[0,a] x [0,b] x [0,c]` with `nx * ny * nz` cubes, each Kuhn-split into 6 tets.
pub fn generate_box_mesh(
    a: f64,
    b: f64,
    c: f64,
    nx: usize,
    ny: usize,
    nz: usize,
) -> Result<TetMesh, MeshError> {
    if !(a > 0.0 && b > 0.0 && c > 0.0) {
        return Err(MeshError::InvalidParameter(format!(
            "box dimensions must be positive, got ({a}, {b}, {c})"
        )));
    }
    if nx == 0 || ny == 0 || nz == 0 {
        return Err(MeshError::InvalidParameter("box divisions must be at least 1".into()));
    }
    let (nodes, tets) =
        structured_grid(&linspace(0.0, a, nx), &linspace(0.0, b, ny), &linspace(0.0, c, nz));
    TetMesh::new(nodes, tets, format!("box {a}x{b}x{c} cells {nx}x{ny}x{nz}"))
}

/// Maps a point of the cube `[-1,1]^d` onto the unit ball. On each shell
/// `|p|_inf = s` the coordinates are spread by equal angles and pushed to the
/// sphere of radius `s`; the result is blended with the identity by weight `s^2`
/// so that cells near the centre stay close to cubes.
fn cube_to_ball<const D: usize>(p: [f64; D]) -> [f64; D] {
    let inf = p.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if inf == 0.0 {
        return p;
    }
    let q = p.map(|c| inf * (FRAC_PI_4 * c / inf).tan());
    let scale = inf / q.iter().map(|c| c * c).sum::<f64>().sqrt();
    let t = inf * inf;
    std::array::from_fn(|i| (1.0 - t) * p[i] + t * scale * q[i])
}

/// Ball of radius `r` centred at the origin: the cube `[-1,1]^3` with
/// `2*level + 1` cells per axis, mapped by [`cube_to_ball`] and scaled by `r`.
pub fn generate_ball_mesh(r: f64, level: usize) -> Result<TetMesh, MeshError> {
    if !(r > 0.0) || level == 0 {
        return Err(MeshError::InvalidParameter(format!(
            "ball needs r > 0 and level >= 1, got r={r}, level={level}"
        )));
    }
    let axis = linspace(-1.0, 1.0, 2 * level + 1);
    let (mut nodes, tets) = structured_grid(&axis, &axis, &axis);
    for p in &mut nodes {
        *p = cube_to_ball(*p).map(|c| r * c);
    }
    TetMesh::new(nodes, tets, format!("ball r={r} level={level}"))
}

/// Circular cylinder of radius `r` on the z-axis, `0 <= z <= height`. The square
/// cross-section `[-1,1]^2` with `2*level` cells per side is mapped to the disk
/// by [`cube_to_ball`];
/// the layer count is chosen so cells stay roughly cubic.
pub fn generate_cylinder_mesh(r: f64, height: f64, level: usize) -> Result<TetMesh, MeshError> {
    if !(r > 0.0 && height > 0.0) || level == 0 {
        return Err(MeshError::InvalidParameter(format!(
            "cylinder needs r > 0, height > 0 and level >= 1, got r={r}, height={height}, level={level}"
        )));
    }
    let axis = linspace(-1.0, 1.0, 2 * level);
    let layers = ((height * level as f64 / r).ceil() as usize).max(1);
    let zs = linspace(0.0, height, layers);
    let (mut nodes, tets) = structured_grid(&axis, &axis, &zs);
    for p in &mut nodes {
        let [x, y] = cube_to_ball([p[0], p[1]]);
        p[0] = r * x;
        p[1] = r * y;
    }
    TetMesh::new(nodes, tets, format!("cylinder r={r} h={height} level={level}"))
}
