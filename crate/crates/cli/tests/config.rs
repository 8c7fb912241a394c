use cavity_cli::config::{experiment_entries, merge_entries, parse_entries, Geometry, ReferenceChoice};
use cavity_cli::{parse_config, ConfigError, RunConfig};
use cavity_core::eigensolvers::Method;
use cavity_core::materials::MaterialTensors;
use cavity_core::modes::Experiment;

#[test]
fn minimal_config_gets_defaults() {
    let cfg = parse_config("geometry.ball.radius = 1\ngeometry.ball.level = 1\n").unwrap();
    assert_eq!(cfg.geometry, Geometry::Ball { radius: 1.0, level: 1 });
    assert_eq!(cfg.methods, vec![Method::Projection]);
    assert_eq!(cfg.solver.k, 20);
    assert_eq!(cfg.solver.alpha, 800.0);
    assert_eq!(cfg.material_name, "vacuum");
    assert_eq!(cfg.reference, ReferenceChoice::None);
    assert!(!cfg.output.dump_matrices);
}

#[test]
fn comments_and_blank_lines_are_ignored() {
    let text = "# header\n\n  geometry.box.size = 1 1 1   \ngeometry.box.cells = 1 1 1\n# trailing\n";
    let cfg = parse_config(text).unwrap();
    assert_eq!(cfg.geometry, Geometry::Box { size: [1.0; 3], cells: [1; 3] });
}

#[test]
fn errors_carry_line_numbers() {
    let err = parse_config("geometry.box.size = 1 1 1\nnot a pair\n").unwrap_err();
    assert_eq!(err, ConfigError::Syntax { line: 2 });
    assert!(err.to_string().starts_with("line 2:"));

    let err = parse_config("geometry.box.size = 1 1 1\ngeometry.box.cells = 1 1 1\nsolver.kk = 3\n").unwrap_err();
    assert!(matches!(err, ConfigError::UnknownKey { line: 3, .. }), "{err}");

    let err = parse_config("solver.k = 3\nsolver.k = 4\n").unwrap_err();
    assert!(matches!(err, ConfigError::DuplicateKey { line: 2, first: 1, .. }), "{err}");

    let err = parse_config("geometry.box.size = 1 1 1\ngeometry.box.cells = 1 1 1\nsolver.k = many\n").unwrap_err();
    assert!(matches!(err, ConfigError::InvalidValue { line: 3, .. }), "{err}");
}

#[test]
fn two_geometries_are_rejected() {
    let text = "geometry.box.size = 1 1 1\ngeometry.box.cells = 1 1 1\ngeometry.ball.radius = 1\ngeometry.ball.level = 1\n";
    let err = parse_config(text).unwrap_err();
    assert!(matches!(err, ConfigError::ConflictingGeometry { .. }), "{err}");
}

#[test]
fn missing_geometry_is_rejected() {
    assert_eq!(parse_config("solver.k = 4\n").unwrap_err(), ConfigError::MissingGeometry);
}

#[test]
fn preset_and_tensor_are_exclusive() {
    let text = "geometry.ball.radius = 1\ngeometry.ball.level = 1\nmaterial.preset = vacuum\n\
                material.eps_r = 1,0,0,0,1,0,0,0,1\n";
    assert!(parse_config(text).is_err());
}

#[test]
fn custom_tensor_parses_complex_entries() {
    let text = "geometry.ball.radius = 1\ngeometry.ball.level = 1\n\
                material.eps_r = 2-1j,0,0, 0,2-1j,0, 0,0,3\n";
    let cfg = parse_config(text).unwrap();
    assert_eq!(cfg.material_name, "custom");
    assert_eq!(cfg.material.eps_r.0[0][0].im, -1.0);
    assert_eq!(cfg.material.eps_r.0[2][2].re, 3.0);
}

#[test]
fn analytic_reference_needs_a_box() {
    let text = "geometry.ball.radius = 1\ngeometry.ball.level = 1\nreference = analytic-box\n";
    assert!(parse_config(text).is_err());
}

#[test]
fn paper_case2_experiment_configuration() {
    let cfg = RunConfig::from_entries(&experiment_entries(Experiment::CylinderCase2)).unwrap();
    assert_eq!(cfg.geometry, Geometry::Cylinder { radius: 0.2, height: 0.5, level: 3 });
    assert_eq!(cfg.material, MaterialTensors::paper_case2());
    assert_eq!(cfg.methods, vec![Method::Penalty, Method::Augmented, Method::Projection]);
    assert_eq!(cfg.reference, ReferenceChoice::Paper(Experiment::CylinderCase2));
}

#[test]
fn overrides_replace_experiment_geometry() {
    let overrides = parse_entries("geometry.cylinder.radius = 0.2\ngeometry.cylinder.height = 0.5\ngeometry.cylinder.level = 2\nsolver.k = 8\n").unwrap();
    let merged = merge_entries(&experiment_entries(Experiment::CylinderCase4), &overrides);
    let cfg = RunConfig::from_entries(&merged).unwrap();
    assert_eq!(cfg.geometry, Geometry::Cylinder { radius: 0.2, height: 0.5, level: 2 });
    assert_eq!(cfg.solver.k, 8);
    assert_eq!(cfg.material, MaterialTensors::paper_case4());

    let overrides = parse_entries("geometry.ball.radius = 2\ngeometry.ball.level = 1\n").unwrap();
    let cfg = RunConfig::from_entries(&merge_entries(&experiment_entries(Experiment::CylinderCase2), &overrides)).unwrap();
    assert_eq!(cfg.geometry, Geometry::Ball { radius: 2.0, level: 1 });
}

#[test]
fn fuzz_seeds_never_panic() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fuzz/corpus/parse_config");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let text = std::fs::read(entry.unwrap().path()).unwrap();
        let _ = parse_config(&String::from_utf8_lossy(&text));
        seen += 1;
    }
    assert!(seen >= 5);
}
