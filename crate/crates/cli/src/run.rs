//! Pipeline behind each subcommand. Every command computes its full output in
//! memory; nothing is written unless the command succeeds.

use std::fmt::Write as _;
use std::time::Instant;

use cavity_core::assembly::{assemble_constraint_direct, assemble_system, check_identities, AssembledSystem};
use cavity_core::eigensolvers::{solve, EigenSolution, Method};
use cavity_core::error::{MeshError, SolverError};
use cavity_core::materials::{format_complex, format_sig};
use cavity_core::mesh::{
    build_connectivity_matrix, extract_edges, generate_ball_mesh, generate_box_mesh, generate_cylinder_mesh,
    parse_mesh, write_mesh, TetMesh,
};
use cavity_core::modes::{
    analytic_box_eigenvalues, classify_by_alpha_sweep, classify_by_residual, compare_to_reference,
    default_residual_threshold, paper_reference, verdict, ReferenceSpectrum,
};
use cavity_core::sparse::dump_triplets;
use thiserror::Error;

use crate::config::{Geometry, ReferenceChoice, RunConfig};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("cannot read mesh file {path}: {reason}")]
    MeshFile { path: String, reason: String },
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Material(#[from] cavity_core::error::MaterialError),
    #[error("{method}: {source}")]
    Solver { method: Method, source: SolverError },
    #[error("sweep: {0}")]
    Sweep(SolverError),
}

/// Files to write, `key = value` summary and a verdict.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    /// (file name, contents), relative to the output directory.
    pub files: Vec<(String, String)>,
    pub summary: Vec<(String, String)>,
    /// Human-readable progress lines, including timings. Not part of the
    /// reports, which stay bitwise reproducible.
    pub log: Vec<String>,
    pub passed: bool,
}

impl Outcome {
    fn new() -> Self {
        Self { passed: true, ..Default::default() }
    }

    fn put(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.summary.push((key.into(), value.into()));
    }

    /// Records a pass/fail line and folds it into the verdict.
    fn check(&mut self, key: impl Into<String>, ok: bool) {
        self.passed &= ok;
        self.put(key, verdict(ok));
    }

    pub fn summary_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.summary {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    /// First failing summary key, for the diagnostic stream.
    pub fn first_failure(&self) -> Option<&str> {
        self.summary.iter().find(|(_, v)| v == "fail").map(|(k, _)| k.as_str())
    }
}

pub fn build_mesh(cfg: &RunConfig, strict: bool) -> Result<TetMesh, RunError> {
    let mesh = match &cfg.geometry {
        Geometry::Box { size, cells } => {
            generate_box_mesh(size[0], size[1], size[2], cells[0], cells[1], cells[2])?
        }
        Geometry::Ball { radius, level } => generate_ball_mesh(*radius, *level)?,
        Geometry::Cylinder { radius, height, level } => generate_cylinder_mesh(*radius, *height, *level)?,
        Geometry::File { path } => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| RunError::MeshFile { path: path.display().to_string(), reason: e.to_string() })?;
            let mesh = parse_mesh(&text).map_err(MeshError::from)?;
            if strict {
                mesh.check_conforming()?;
            }
            mesh
        }
    };
    Ok(mesh)
}

pub fn build_system(cfg: &RunConfig, mesh: &TetMesh) -> Result<AssembledSystem, RunError> {
    let edges = extract_edges(mesh);
    let y = build_connectivity_matrix(&edges, mesh.node_count());
    Ok(assemble_system(mesh, &edges, &y, &cfg.material)?)
}

fn mesh_summary(out: &mut Outcome, mesh: &TetMesh, edges: usize) {
    out.put("mesh.label", mesh.label());
    out.put("mesh.nodes", mesh.node_count().to_string());
    out.put("mesh.tets", mesh.tet_count().to_string());
    out.put("mesh.edges", edges.to_string());
    out.put("mesh.h", format_sig(mesh.longest_edge()));
    out.put("mesh.volume", format_sig(mesh.total_volume()));
}

fn system_summary(out: &mut Outcome, cfg: &RunConfig, sys: &AssembledSystem) {
    out.put("system.n", sys.n().to_string());
    out.put("system.m", sys.m().to_string());
    out.put("material.name", cfg.material_name.clone());
    out.put("material.case", sys.case.to_string());
}

/// `mesh`: generate or load the mesh, report its statistics and write it.
pub fn run_mesh(cfg: &RunConfig, strict: bool) -> Result<Outcome, RunError> {
    let mesh = build_mesh(cfg, strict)?;
    let mut out = Outcome::new();
    mesh_summary(&mut out, &mesh, extract_edges(&mesh).edge_count());
    if strict || !matches!(cfg.geometry, Geometry::File { .. }) {
        let ok = mesh.check_conforming().is_ok();
        out.check("mesh.conforming", ok);
    }
    out.files.push(("mesh.txt".into(), write_mesh(&mesh)));
    Ok(out)
}

/// `assemble`: structural identity report and optional matrix dumps.
pub fn run_assemble(cfg: &RunConfig, strict: bool) -> Result<Outcome, RunError> {
    let mesh = build_mesh(cfg, strict)?;
    let edges = extract_edges(&mesh);
    let start = Instant::now();
    let sys = build_system(cfg, &mesh)?;
    let elapsed = start.elapsed();
    let c_direct = assemble_constraint_direct(&mesh, &edges, &cfg.material);
    let report = check_identities(&sys, Some(&c_direct));

    let mut out = Outcome::new();
    mesh_summary(&mut out, &mesh, edges.edge_count());
    system_summary(&mut out, cfg, &sys);
    out.put("identity.ya", format_sig(report.ya));
    out.check("identity.ya.status", report.ya_ok());
    out.put("identity.c_direct_minus_ym", format_sig(report.c_minus_ym));
    out.check("identity.c_direct_minus_ym.status", report.c_ok());
    out.put("identity.yt_beta", format_sig(report.yt_beta));
    if let Some(r) = report.rank_y {
        out.put("identity.rank_y", r.to_string());
    }
    out.check("identity.nullspace.status", report.null_ok());
    out.log.push(format!("assembled n={} m={} in {:.3} s", sys.n(), sys.m(), elapsed.as_secs_f64()));
    if cfg.output.dump_matrices {
        out.files.push(("A.txt".into(), dump_triplets(&sys.a)));
        out.files.push(("M.txt".into(), dump_triplets(&sys.m)));
        out.files.push(("Y.txt".into(), dump_triplets(&sys.y.to_sparse())));
        out.files.push(("C.txt".into(), dump_triplets(&sys.c)));
    }
    Ok(out)
}

fn reference_spectrum(cfg: &RunConfig) -> Option<ReferenceSpectrum> {
    match cfg.reference {
        ReferenceChoice::None => None,
        ReferenceChoice::AnalyticBox { count } => match cfg.geometry {
            Geometry::Box { size, .. } => Some(analytic_box_eigenvalues(size[0], size[1], size[2], count)),
            _ => None,
        },
        ReferenceChoice::Paper(which) => Some(paper_reference(which)),
    }
}

/// Labels: projection modes are physical by construction; the other methods
/// are labeled by constraint residual.
fn labeled(sol: EigenSolution, tau: f64) -> EigenSolution {
    if sol.method == Method::Projection {
        sol
    } else {
        classify_by_residual(sol, tau)
    }
}

fn report_block(out: &mut Outcome, cfg: &RunConfig, sol: &EigenSolution, reference: Option<&ReferenceSpectrum>) {
    let name = sol.method.name();
    out.put(format!("{name}.backend"), sol.backend.name());
    out.put(format!("{name}.dimension"), sol.dimension.to_string());
    if let Some(a) = sol.alpha {
        out.put(format!("{name}.alpha"), format_sig(a));
    }
    out.put(format!("{name}.modes"), sol.modes.len().to_string());
    out.put(format!("{name}.physical"), sol.physical().count().to_string());
    let worst = sol.modes.iter().map(|m| m.residual_constraint).fold(0.0, f64::max);
    out.put(format!("{name}.max_residual_constraint"), format_sig(worst));
    match reference {
        Some(r) => {
            let tol = cfg.reference_tolerance.unwrap_or(r.tolerance);
            let report = compare_to_reference(sol, r, tol);
            out.put(format!("{name}.reference"), r.source.name());
            out.put(format!("{name}.rel_tol"), format_sig(tol));
            for (k, v) in report.summary(name) {
                if k.ends_with(".status") && k.matches('.').count() == 1 {
                    out.check(k, v == "pass");
                } else {
                    out.put(k, v);
                }
            }
            out.files.push((format!("report_{name}.csv"), report.to_csv()));
        }
        None => {
            let empty = ReferenceSpectrum::new(cavity_core::modes::ReferenceSource::External, Vec::new(), 0.0);
            out.files.push((format!("report_{name}.csv"), compare_to_reference(sol, &empty, 0.0).to_csv()));
        }
    }
}

/// `solve` (and `validate`): every configured method, labeled and compared.
pub fn run_solve(cfg: &RunConfig, strict: bool) -> Result<Outcome, RunError> {
    let mesh = build_mesh(cfg, strict)?;
    let sys = build_system(cfg, &mesh)?;
    let mut out = Outcome::new();
    mesh_summary(&mut out, &mesh, sys.n());
    system_summary(&mut out, cfg, &sys);
    let tau = cfg.classification.residual_threshold.unwrap_or_else(|| default_residual_threshold(&sys));
    out.put("classify.residual_threshold", format_sig(tau));
    let reference = reference_spectrum(cfg);
    for &method in &cfg.methods {
        let sol = solve(&sys, method, &cfg.solver).map_err(|source| RunError::Solver { method, source })?;
        out.log.push(format!(
            "{:<13} {:>4} modes  backend {:<12}  t = {:.3} s",
            method.name(),
            sol.modes.len(),
            sol.backend.name(),
            sol.elapsed.as_secs_f64()
        ));
        let sol = labeled(sol, tau);
        for m in sol.physical().take(3) {
            out.log.push(format!("    {}", format_complex(m.lambda)));
        }
        report_block(&mut out, cfg, &sol, reference.as_ref());
    }
    Ok(out)
}

/// `sweep`: penalty at every alpha of the list; stable values are physical.
pub fn run_sweep(cfg: &RunConfig, strict: bool) -> Result<Outcome, RunError> {
    let mesh = build_mesh(cfg, strict)?;
    let sys = build_system(cfg, &mesh)?;
    let mut out = Outcome::new();
    mesh_summary(&mut out, &mesh, sys.n());
    system_summary(&mut out, cfg, &sys);
    let start = Instant::now();
    let sweep = classify_by_alpha_sweep(
        &sys,
        &cfg.classification.alpha_list,
        cfg.solver.k,
        cfg.classification.match_tol,
        &cfg.solver,
    )
    .map_err(RunError::Sweep)?;
    out.log.push(format!("sweep over {} alphas in {:.3} s", sweep.alphas.len(), start.elapsed().as_secs_f64()));
    let alphas: Vec<String> = sweep.alphas.iter().map(|a| format_sig(*a)).collect();
    out.put("sweep.alphas", alphas.join(", "));
    out.put("sweep.match_tol", format_sig(cfg.classification.match_tol));
    out.put("sweep.stable", sweep.stable().len().to_string());
    out.put("sweep.unstable", sweep.unstable().len().to_string());
    let mut csv = String::from("mode,re_lambda,im_lambda,shift,label\n");
    for (i, v) in sweep.values.iter().enumerate() {
        let _ = writeln!(
            csv,
            "{i},{},{},{},{}",
            format_sig(v.lambda.re),
            format_sig(v.lambda.im),
            format_sig(v.shift),
            v.label.name()
        );
    }
    out.files.push(("sweep.csv".into(), csv));
    let base = &sweep.runs[0];
    report_block(&mut out, cfg, base, reference_spectrum(cfg).as_ref());
    Ok(out)
}
