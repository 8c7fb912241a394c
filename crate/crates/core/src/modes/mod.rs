//! Physical/spurious classification, reference spectra and comparison reports.

mod reference;

use faer::c64;

pub use reference::{
    analytic_box_eigenvalues, paper_reference, paper_reference_by_id, Experiment, ReferenceSource,
    ReferenceSpectrum, ReferenceValue,
};

use crate::assembly::AssembledSystem;
use crate::eigensolvers::{solve_penalty, EigenSolution, Method, ModeLabel, SolverConfig};
use crate::error::SolverError;
use crate::materials::format_sig;
use crate::sparse;

/// Relative radius of a degenerate cluster.
pub const CLUSTER_RADIUS: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationConfig {
    /// `None` uses [`default_residual_threshold`].
    pub residual_threshold: Option<f64>,
    pub alpha_list: Vec<f64>,
    pub match_tol: f64,
}

impl Default for ClassificationConfig {
    fn default() -> Self {
        Self { residual_threshold: None, alpha_list: vec![800.0, 1600.0], match_tol: 1e-8 }
    }
}

impl ClassificationConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |msg: &str| Err(SolverError::InvalidParameter(msg.to_string()));
        if let Some(tau) = self.residual_threshold {
            if !(tau > 0.0) {
                return bad("residual threshold must be positive");
            }
        }
        if self.alpha_list.len() < 2 {
            return bad("alpha_list needs at least two values");
        }
        for (i, a) in self.alpha_list.iter().enumerate() {
            if !(*a > 0.0 && a.is_finite()) {
                return bad("alpha values must be positive");
            }
            if self.alpha_list[..i].contains(a) {
                return bad("alpha values must be distinct");
            }
        }
        if !(self.match_tol > 0.0) {
            return bad("match_tol must be positive");
        }
        Ok(())
    }
}

/// `1e-6 ||C||_F`.
pub fn default_residual_threshold(sys: &AssembledSystem) -> f64 {
    1e-6 * sparse::frobenius(&sys.c)
}

/// Labels each mode physical iff `||C xi||_2 <= tau`.
pub fn classify_by_residual(mut sol: EigenSolution, tau: f64) -> EigenSolution {
    for m in &mut sol.modes {
        m.label = if m.residual_constraint <= tau { ModeLabel::Physical } else { ModeLabel::Spurious };
    }
    sol
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledEigenvalue {
    pub lambda: c64,
    pub label: ModeLabel,
    /// Largest, over the other runs, relative distance to the nearest eigenvalue.
    pub shift: f64,
}

#[derive(Debug, Clone)]
pub struct SweepClassification {
    /// Sorted ascending; the first entry is the base run.
    pub alphas: Vec<f64>,
    pub values: Vec<LabeledEigenvalue>,
    /// One penalty solution per alpha, in `alphas` order. The base run carries
    /// the labels.
    pub runs: Vec<EigenSolution>,
}

impl SweepClassification {
    pub fn stable(&self) -> Vec<c64> {
        self.values.iter().filter(|v| v.label == ModeLabel::Physical).map(|v| v.lambda).collect()
    }

    pub fn unstable(&self) -> Vec<&LabeledEigenvalue> {
        self.values.iter().filter(|v| v.label == ModeLabel::Spurious).collect()
    }
}

fn relative_distance(a: c64, b: c64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

fn nearest_distance(lambda: c64, others: &[c64]) -> f64 {
    others.iter().map(|&o| relative_distance(lambda, o)).fold(f64::INFINITY, f64::min)
}

/// Solves the penalty pencil at every alpha with `k` modes. The `k` values of
/// the smallest alpha are labeled: physical iff every other run has a value
/// within `match_tol` relative distance. Spurious values grow with alpha, so a
/// larger alpha never pushes a physical value of the base run out of the window.
pub fn classify_by_alpha_sweep(
    sys: &AssembledSystem,
    alpha_list: &[f64],
    k: usize,
    match_tol: f64,
    cfg: &SolverConfig,
) -> Result<SweepClassification, SolverError> {
    ClassificationConfig { residual_threshold: None, alpha_list: alpha_list.to_vec(), match_tol }
        .validate()?;
    let mut alphas = alpha_list.to_vec();
    alphas.sort_by(f64::total_cmp);
    let mut runs = alphas
        .iter()
        .map(|&a| solve_penalty(sys, a, k, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let others: Vec<Vec<c64>> = runs[1..].iter().map(|r| r.eigenvalues()).collect();
    let mut values = Vec::with_capacity(runs[0].modes.len());
    for mode in &mut runs[0].modes {
        let shift = others.iter().map(|o| nearest_distance(mode.lambda, o)).fold(0.0, f64::max);
        mode.label = if shift <= match_tol { ModeLabel::Physical } else { ModeLabel::Spurious };
        values.push(LabeledEigenvalue { lambda: mode.lambda, label: mode.label, shift });
    }
    Ok(SweepClassification { alphas, values, runs })
}

/// Physical modes of a solution matched to one reference value.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceMatch {
    pub reference: ReferenceValue,
    /// Indices into the solution's modes; as many as the multiplicity when
    /// enough physical modes exist.
    pub members: Vec<usize>,
    pub mean: Option<c64>,
    /// `|mean - reference| / |reference|`.
    pub rel_error: Option<f64>,
    /// `max |lambda_i - mean| / |mean|` over the members.
    pub spread: Option<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub mode_index: usize,
    pub lambda: c64,
    pub reference: Option<c64>,
    pub rel_error: Option<f64>,
    pub label: ModeLabel,
    pub method: Method,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub source: ReferenceSource,
    pub method: Method,
    pub rel_tol: f64,
    pub matches: Vec<ReferenceMatch>,
    pub rows: Vec<ReportRow>,
    /// Some reference value found fewer physical modes than its multiplicity.
    pub partial: bool,
    pub passed: bool,
}

pub const CSV_HEADER: &str = "mode,re_lambda,im_lambda,ref_re,ref_im,rel_error,label,method";

impl ComparisonReport {
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(format_sig).unwrap_or_default();
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.mode_index,
                format_sig(r.lambda.re),
                format_sig(r.lambda.im),
                opt(r.reference.map(|z| z.re)),
                opt(r.reference.map(|z| z.im)),
                opt(r.rel_error),
                r.label.name(),
                r.method.name(),
            ));
        }
        out
    }

    /// `key = value` lines describing each reference match and the verdict.
    pub fn summary(&self, prefix: &str) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for (i, m) in self.matches.iter().enumerate() {
            let key = |s: &str| format!("{prefix}.ref{i}.{s}");
            out.push((key("reference"), crate::materials::format_complex(m.reference.lambda)));
            out.push((key("multiplicity"), m.reference.multiplicity.to_string()));
            out.push((key("found"), m.members.len().to_string()));
            if let Some(mean) = m.mean {
                out.push((key("mean"), crate::materials::format_complex(mean)));
            }
            if let Some(e) = m.rel_error {
                out.push((key("rel_error"), format_sig(e)));
            }
            if let Some(s) = m.spread {
                out.push((key("spread"), format_sig(s)));
            }
            out.push((key("status"), verdict(m.passed).to_string()));
        }
        out.push((format!("{prefix}.partial"), self.partial.to_string()));
        out.push((format!("{prefix}.status"), verdict(self.passed).to_string()));
        out
    }
}

pub fn verdict(passed: bool) -> &'static str {
    if passed {
        "pass"
    } else {
        "fail"
    }
}

/// Greedy nearest matching of the solution's physical modes to `reference`.
/// Each reference value, in ascending `|Lambda|`, takes its `multiplicity`
/// nearest unused physical modes; their mean is compared against it. A match
/// passes when the mean is within `rel_tol` and the members lie within
/// [`CLUSTER_RADIUS`] of the mean.
pub fn compare_to_reference(
    sol: &EigenSolution,
    reference: &ReferenceSpectrum,
    rel_tol: f64,
) -> ComparisonReport {
    let physical: Vec<usize> =
        (0..sol.modes.len()).filter(|&i| sol.modes[i].label == ModeLabel::Physical).collect();
    let mut used = vec![false; sol.modes.len()];
    let mut row_ref: Vec<Option<c64>> = vec![None; sol.modes.len()];
    let mut matches = Vec::with_capacity(reference.values.len());
    let mut partial = false;
    for rv in &reference.values {
        let mut candidates: Vec<usize> = physical.iter().copied().filter(|&i| !used[i]).collect();
        candidates.sort_by(|&a, &b| {
            (sol.modes[a].lambda - rv.lambda)
                .norm()
                .total_cmp(&(sol.modes[b].lambda - rv.lambda).norm())
                .then(a.cmp(&b))
        });
        candidates.truncate(rv.multiplicity);
        candidates.sort_unstable();
        for &i in &candidates {
            used[i] = true;
            row_ref[i] = Some(rv.lambda);
        }
        if candidates.len() < rv.multiplicity {
            partial = true;
        }
        let entry = if candidates.is_empty() {
            ReferenceMatch { reference: *rv, members: candidates, mean: None, rel_error: None, spread: None, passed: false }
        } else {
            let mean = candidates.iter().map(|&i| sol.modes[i].lambda).sum::<c64>() / candidates.len() as f64;
            let rel_error = (mean - rv.lambda).norm() / rv.lambda.norm();
            let spread = candidates
                .iter()
                .map(|&i| (sol.modes[i].lambda - mean).norm() / mean.norm())
                .fold(0.0, f64::max);
            let passed = candidates.len() == rv.multiplicity && rel_error <= rel_tol && spread <= CLUSTER_RADIUS;
            ReferenceMatch { reference: *rv, members: candidates, mean: Some(mean), rel_error: Some(rel_error), spread: Some(spread), passed }
        };
        matches.push(entry);
    }
    let rows = sol
        .modes
        .iter()
        .enumerate()
        .map(|(i, m)| ReportRow {
            mode_index: i,
            lambda: m.lambda,
            reference: row_ref[i],
            rel_error: row_ref[i].map(|r| (m.lambda - r).norm() / r.norm()),
            label: m.label,
            method: sol.method,
        })
        .collect();
    let passed = !partial && matches.iter().all(|m| m.passed);
    ComparisonReport { source: reference.source, method: sol.method, rel_tol, matches, rows, partial, passed }
}
