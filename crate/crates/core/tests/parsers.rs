//! Robustness of the text parsers: round trips, mutated input and replay of
//! the fuzz corpus seeds.

use std::path::Path;

use cavity_core::c64;
use cavity_core::materials::{format_complex, parse_complex};
use cavity_core::mesh::{generate_ball_mesh, generate_box_mesh, parse_mesh, write_mesh, TetMesh};
use proptest::prelude::*;

fn seeds(target: &str) -> Vec<Vec<u8>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<Vec<u8>> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| std::fs::read(e.unwrap().path()).unwrap())
        .collect();
    out.sort();
    out
}

fn assert_same(a: &TetMesh, b: &TetMesh) {
    assert_eq!(a.nodes(), b.nodes());
    assert_eq!(a.tets(), b.tets());
}

#[test]
fn generated_meshes_round_trip() {
    for mesh in [generate_box_mesh(1.0, 0.5, 0.75, 3, 2, 2).unwrap(), generate_ball_mesh(0.3, 1).unwrap()] {
        let back = parse_mesh(&write_mesh(&mesh)).unwrap();
        assert_same(&mesh, &back);
        assert!(back.check_conforming().is_ok());
    }
}

#[test]
fn mesh_seeds_parse_or_fail_cleanly() {
    let seeds = seeds("parse_mesh");
    assert!(seeds.len() >= 5);
    let mut accepted = 0;
    for data in seeds {
        let Ok(text) = String::from_utf8(data) else { continue };
        if let Ok(mesh) = parse_mesh(&text) {
            accepted += 1;
            assert_same(&mesh, &parse_mesh(&write_mesh(&mesh)).unwrap());
        }
    }
    // the single tet and its flipped copy
    assert_eq!(accepted, 2);
}

#[test]
fn flipped_tet_is_reoriented() {
    let mesh = parse_mesh("nodes 4\n1 0 0 0\n2 1 0 0\n3 0 1 0\n4 0 0 1\ntets 1\n1 2 1 3 4\n").unwrap();
    assert!(mesh.volume(0) > 0.0);
}

#[test]
fn complex_seeds_round_trip() {
    for data in seeds("parse_complex") {
        let Ok(text) = String::from_utf8(data) else { continue };
        if let Ok(z) = parse_complex(&text) {
            let back = parse_complex(&format_complex(z)).unwrap();
            assert!((back - z).norm() <= 1e-11 * z.norm().max(f64::MIN_POSITIVE), "{text}");
        }
    }
}

#[test]
fn complex_forms() {
    assert_eq!(parse_complex("2-1j").unwrap(), c64::new(2.0, -1.0));
    assert_eq!(parse_complex(" 1e-3 + 2.5e2j ").unwrap(), c64::new(1e-3, 250.0));
    assert_eq!(parse_complex("-j").unwrap(), c64::new(0.0, -1.0));
    assert_eq!(parse_complex("4").unwrap(), c64::new(4.0, 0.0));
    for bad in ["", "j+", "1+2", "nan", "inf", "1e400", "--1", "1+2jj"] {
        assert!(parse_complex(bad).is_err(), "{bad}");
    }
}

proptest! {
    #[test]
    fn complex_round_trip(re in -1e12f64..1e12, im in -1e12f64..1e12) {
        let z = c64::new(re, im);
        let back = parse_complex(&format_complex(z)).unwrap();
        prop_assert!((back - z).norm() <= 1e-11 * z.norm().max(1e-300));
    }

    #[test]
    fn complex_never_panics(s in "\\PC{0,24}") {
        if let Ok(z) = parse_complex(&s) {
            prop_assert!(z.re.is_finite() && z.im.is_finite());
        }
    }

    #[test]
    fn mutated_mesh_never_panics(pos in 0usize..200, byte in any::<u8>(), cut in 0usize..200) {
        let base = write_mesh(&generate_box_mesh(1.0, 1.0, 1.0, 1, 1, 2).unwrap()).into_bytes();
        let mut data = base.clone();
        let p = pos % data.len();
        data[p] = byte;
        data.truncate(data.len() - cut.min(data.len()));
        if let Ok(text) = String::from_utf8(data) {
            if let Ok(mesh) = parse_mesh(&text) {
                let again = parse_mesh(&write_mesh(&mesh)).unwrap();
                prop_assert_eq!(mesh.tets(), again.tets());
            }
        }
    }

    #[test]
    fn random_box_meshes_round_trip(nx in 1usize..4, ny in 1usize..4, nz in 1usize..4, a in 0.1f64..10.0) {
        let mesh = generate_box_mesh(a, 1.0, 0.5, nx, ny, nz).unwrap();
        let back = parse_mesh(&write_mesh(&mesh)).unwrap();
        prop_assert_eq!(mesh.nodes(), back.nodes());
        prop_assert_eq!(mesh.tets(), back.tets());
        prop_assert!((back.total_volume() - a * 0.5).abs() <= 1e-12 * a);
    }
}
