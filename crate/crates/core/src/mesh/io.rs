//! Plain-text mesh format.
//!
//! ```text
//! # label: optional free text
//! nodes <m>
//! <id> <x> <y> <z>        (m lines, id = 1..m in order)
//! tets <t>
//! <id> <n1> <n2> <n3> <n4> (t lines, 1-based node ids)
//! ```
//!
//! `#` starts a comment anywhere on a line; blank lines are ignored.

use std::fmt::Write as _;

use super::{signed_volume6, Point, TetMesh};
use crate::error::{MeshError, MeshParseError};

const LABEL_PREFIX: &str = "label:";

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    label: Option<String>,
}

impl<'a> Lines<'a> {
    /// Next non-empty record as (1-based line number, whitespace tokens).
    fn next_record(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, raw) in self.inner.by_ref() {
            let (content, comment) = match raw.find('#') {
                Some(pos) => (&raw[..pos], Some(&raw[pos + 1..])),
                None => (raw, None),
            };
            if let Some(c) = comment {
                let c = c.trim();
                if self.label.is_none() {
                    if let Some(rest) = c.strip_prefix(LABEL_PREFIX) {
                        self.label = Some(rest.trim().to_string());
                    }
                }
            }
            let tokens: Vec<&str> = content.split_whitespace().collect();
            if !tokens.is_empty() {
                return Some((i + 1, tokens));
            }
        }
        None
    }
}

fn parse_header(
    lines: &mut Lines<'_>,
    keyword: &'static str,
) -> Result<usize, MeshParseError> {
    let (line, tokens) = lines.next_record().ok_or(MeshParseError::UnexpectedEof(keyword))?;
    match tokens.as_slice() {
        [k, count] if *k == keyword => count
            .parse::<usize>()
            .map_err(|_| MeshParseError::MalformedHeader { line, expected: keyword }),
        _ => Err(MeshParseError::MalformedHeader { line, expected: keyword }),
    }
}

fn parse_id(token: &str, line: usize, expected: usize) -> Result<(), MeshParseError> {
    let id: usize = token.parse().map_err(|_| MeshParseError::MalformedRecord {
        line,
        reason: format!("bad id `{token}`"),
    })?;
    if id != expected {
        return Err(MeshParseError::IdOutOfSequence { line, found: id, expected });
    }
    Ok(())
}

/// Parses mesh-file text into a [`TetMesh`]. Elements with negative orientation
/// are reordered; zero-volume elements are rejected.
pub fn parse_mesh(text: &str) -> Result<TetMesh, MeshParseError> {
    let mut lines = Lines { inner: text.lines().enumerate(), label: None };

    let node_count = parse_header(&mut lines, "nodes")?;
    let mut nodes: Vec<Point> = Vec::new();
    for expected in 1..=node_count {
        let (line, tokens) =
            lines.next_record().ok_or(MeshParseError::UnexpectedEof("node record"))?;
        if tokens.len() != 4 {
            return Err(MeshParseError::MalformedRecord {
                line,
                reason: format!("expected `<id> <x> <y> <z>`, got {} fields", tokens.len()),
            });
        }
        parse_id(tokens[0], line, expected)?;
        let mut p = [0.0; 3];
        for (c, tok) in p.iter_mut().zip(&tokens[1..]) {
            *c = tok
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| MeshParseError::MalformedRecord {
                    line,
                    reason: format!("bad coordinate `{tok}`"),
                })?;
        }
        nodes.push(p);
    }

    let tet_count = parse_header(&mut lines, "tets")?;
    let mut tets: Vec<[usize; 4]> = Vec::new();
    for expected in 1..=tet_count {
        let (line, tokens) =
            lines.next_record().ok_or(MeshParseError::UnexpectedEof("tet record"))?;
        if tokens.len() != 5 {
            return Err(MeshParseError::MalformedRecord {
                line,
                reason: format!("expected `<id> <n1> <n2> <n3> <n4>`, got {} fields", tokens.len()),
            });
        }
        parse_id(tokens[0], line, expected)?;
        let mut tet = [0usize; 4];
        for (k, tok) in tokens[1..].iter().enumerate() {
            let index: usize = tok.parse().map_err(|_| MeshParseError::MalformedRecord {
                line,
                reason: format!("bad node index `{tok}`"),
            })?;
            if index == 0 || index > node_count {
                return Err(MeshParseError::NodeIndexOutOfRange {
                    line,
                    index,
                    count: node_count,
                });
            }
            if tet[..k].contains(&(index - 1)) {
                return Err(MeshParseError::RepeatedVertex { line, index });
            }
            tet[k] = index - 1;
        }
        if signed_volume6(&tet.map(|v| nodes[v])) == 0.0 {
            return Err(MeshParseError::ZeroVolume { line });
        }
        tets.push(tet);
    }

    if let Some((line, _)) = lines.next_record() {
        return Err(MeshParseError::TrailingContent { line });
    }

    let label = lines.label.take().unwrap_or_default();
    TetMesh::new(nodes, tets, label).map_err(|e| match e {
        // only near-degenerate elements can still fail here
        MeshError::Degenerate { tet } => MeshParseError::ZeroVolume {
            line: tet_line(text, tet),
        },
        other => MeshParseError::MalformedRecord { line: 0, reason: other.to_string() },
    })
}

/// Line number of the `tet`-th (0-based) tetrahedron record.
fn tet_line(text: &str, tet: usize) -> usize {
    let mut lines = Lines { inner: text.lines().enumerate(), label: None };
    let mut remaining = None;
    while let Some((line, tokens)) = lines.next_record() {
        match remaining {
            None if tokens.first() == Some(&"tets") => remaining = Some(tet),
            Some(0) => return line,
            Some(r) => remaining = Some(r - 1),
            None => {}
        }
    }
    0
}

/// Serializes `mesh` in the text format with 17 significant digits, so that
/// [`parse_mesh`] reproduces it exactly.
pub fn write_mesh(mesh: &TetMesh) -> String {
    let mut out = String::new();
    if !mesh.label().is_empty() {
        let label = mesh.label().replace(['\n', '\r'], " ");
        let _ = writeln!(out, "# {LABEL_PREFIX} {label}");
    }
    let _ = writeln!(out, "nodes {}", mesh.node_count());
    for (i, p) in mesh.nodes().iter().enumerate() {
        let _ = writeln!(out, "{} {:.16e} {:.16e} {:.16e}", i + 1, p[0], p[1], p[2]);
    }
    let _ = writeln!(out, "tets {}", mesh.tet_count());
    for (i, t) in mesh.tets().iter().enumerate() {
        let _ = writeln!(out, "{} {} {} {} {}", i + 1, t[0] + 1, t[1] + 1, t[2] + 1, t[3] + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_ball_mesh, generate_box_mesh, generate_cylinder_mesh};

    const SINGLE: &str = "\
# reference tetrahedron
nodes 4
1 0 0 0
2 1 0 0
3 0 1 0
4 0 0 1   # apex
tets 1
1 1 2 3 4
";

    #[test]
    fn single_tet() {
        let mesh = parse_mesh(SINGLE).unwrap();
        assert_eq!(mesh.node_count(), 4);
        assert_eq!(mesh.tet_count(), 1);
        assert!((mesh.volume(0) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn out_of_range_index() {
        let text = SINGLE.replace("1 1 2 3 4", "1 1 2 3 9");
        let err = parse_mesh(&text).unwrap_err();
        assert_eq!(err, MeshParseError::NodeIndexOutOfRange { line: 8, index: 9, count: 4 });
        assert!(err.to_string().contains("node index out of range"));
    }

    #[test]
    fn zero_volume_names_line() {
        let text = SINGLE.replace("4 0 0 1   # apex", "4 1 1 0");
        assert_eq!(parse_mesh(&text).unwrap_err(), MeshParseError::ZeroVolume { line: 8 });
    }

    #[test]
    fn malformed_header() {
        let err = parse_mesh("vertices 4\n").unwrap_err();
        assert_eq!(err, MeshParseError::MalformedHeader { line: 1, expected: "nodes" });
        let err = parse_mesh("nodes four\n").unwrap_err();
        assert!(matches!(err, MeshParseError::MalformedHeader { line: 1, .. }));
        let text = SINGLE.replace("tets 1", "tet 1");
        assert!(matches!(
            parse_mesh(&text).unwrap_err(),
            MeshParseError::MalformedHeader { line: 7, expected: "tets" }
        ));
    }

    #[test]
    fn truncated_and_trailing() {
        assert!(matches!(
            parse_mesh("nodes 2\n1 0 0 0\n").unwrap_err(),
            MeshParseError::UnexpectedEof(_)
        ));
        let text = format!("{SINGLE}2 1 2 3 4\n");
        assert_eq!(parse_mesh(&text).unwrap_err(), MeshParseError::TrailingContent { line: 9 });
    }

    #[test]
    fn generated_meshes_round_trip() {
        for mesh in [
            generate_box_mesh(1.0, 0.5, 0.75, 4, 2, 3).unwrap(),
            generate_ball_mesh(1.0, 2).unwrap(),
            generate_cylinder_mesh(0.2, 0.5, 2).unwrap(),
        ] {
            let back = parse_mesh(&write_mesh(&mesh)).unwrap();
            assert_eq!(back, mesh);
        }
    }
}
