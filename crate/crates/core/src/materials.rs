//! Complex anisotropic material tensors and the lossless/lossy medium cases.

use std::fmt;
use std::ops::{Index, Mul};

use faer::{c64, Mat};

use crate::error::MaterialError;

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Default relative tolerance for Hermitian checks.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// A complex 3x3 tensor, row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct Tensor3(pub [[c64; 3]; 3]);

impl fmt::Debug for Tensor3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter().map(|r| r.map(format_complex))).finish()
    }
}

impl Index<(usize, usize)> for Tensor3 {
    type Output = c64;
    fn index(&self, (i, j): (usize, usize)) -> &c64 {
        &self.0[i][j]
    }
}

impl Mul for Tensor3 {
    type Output = Tensor3;
    fn mul(self, rhs: Tensor3) -> Tensor3 {
        let mut out = [[c64::new(0.0, 0.0); 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        Tensor3(out)
    }
}

impl Tensor3 {
    pub fn identity() -> Self {
        Self::diag([c64::new(1.0, 0.0); 3])
    }

    pub fn diag(d: [c64; 3]) -> Self {
        let z = c64::new(0.0, 0.0);
        Tensor3([[d[0], z, z], [z, d[1], z], [z, z, d[2]]])
    }

    pub fn from_real(rows: [[f64; 3]; 3]) -> Self {
        Tensor3(rows.map(|r| r.map(|v| c64::new(v, 0.0))))
    }

    pub fn scale(&self, s: c64) -> Self {
        Tensor3(self.0.map(|r| r.map(|v| v * s)))
    }

    pub fn adjoint(&self) -> Self {
        let mut out = self.0;
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.0[j][i].conj();
            }
        }
        Tensor3(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `T v` for a real vector `v`.
    pub fn apply_real(&self, v: [f64; 3]) -> [c64; 3] {
        self.0.map(|row| row[0] * v[0] + row[1] * v[1] + row[2] * v[2])
    }

    /// `u^T T v` for real `u`, `v`.
    pub fn bilinear(&self, u: [f64; 3], v: [f64; 3]) -> c64 {
        let tv = self.apply_real(v);
        tv[0] * u[0] + tv[1] * u[1] + tv[2] * u[2]
    }

    pub fn det(&self) -> c64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn to_faer(self) -> Mat<c64> {
        Mat::from_fn(3, 3, |i, j| self.0[i][j])
    }
}

/// `t^{-1}` by the adjugate formula.
pub fn invert_tensor(t: &Tensor3) -> Result<Tensor3, MaterialError> {
    let scale = t.max_abs();
    let det = t.det();
    if scale == 0.0 || !(det.norm() > 1e-14 * scale * scale * scale) {
        return Err(MaterialError::Singular("material"));
    }
    let m = &t.0;
    let cof = |r0: usize, r1: usize, c0: usize, c1: usize| {
        m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]
    };
    let adj = [
        [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
        [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
        [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
    ];
    Ok(Tensor3(adj.map(|r| r.map(|v| v / det))))
}

/// True iff `t` is Hermitian to `tol` (relative, max-norm) and its Hermitian
/// part is positive definite.
pub fn is_hermitian_pd(t: &Tensor3, tol: f64) -> bool {
    let scale = t.max_abs();
    let adj = t.adjoint();
    let skew = (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .map(|(i, j)| (t.0[i][j] - adj.0[i][j]).norm())
        .fold(0.0, f64::max);
    if skew > tol * scale {
        return false;
    }
    let herm = Mat::from_fn(3, 3, |i, j| (t.0[i][j] + adj.0[i][j]) * 0.5);
    match herm.self_adjoint_eigenvalues(faer::Side::Lower) {
        Ok(ev) => ev.iter().all(|&l| l > 0.0),
        Err(_) => false,
    }
}

/// Lossy classification of an anisotropic medium.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MediumCase {
    /// Lossless: both tensors Hermitian positive definite.
    Case1,
    /// Electric lossy only.
    Case2,
    /// Magnetic lossy only.
    Case3,
    /// Electric and magnetic lossy.
    Case4,
}

impl MediumCase {
    /// Whether the permeability is Hermitian positive definite, the condition
    /// under which the augmented pencil has no spurious eigenpairs.
    pub fn magnetic_lossless(self) -> bool {
        matches!(self, MediumCase::Case1 | MediumCase::Case2)
    }

    pub fn number(self) -> u8 {
        match self {
            MediumCase::Case1 => 1,
            MediumCase::Case2 => 2,
            MediumCase::Case3 => 3,
            MediumCase::Case4 => 4,
        }
    }
}

impl fmt::Display for MediumCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "case{}", self.number())
    }
}

/// Relative permittivity and permeability of one homogeneous region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialTensors {
    pub eps_r: Tensor3,
    pub mu_r: Tensor3,
}

impl MaterialTensors {
    pub fn new(eps_r: Tensor3, mu_r: Tensor3) -> Result<Self, MaterialError> {
        invert_tensor(&eps_r).map_err(|_| MaterialError::Singular("permittivity"))?;
        invert_tensor(&mu_r).map_err(|_| MaterialError::Singular("permeability"))?;
        Ok(Self { eps_r, mu_r })
    }

    pub fn vacuum() -> Self {
        Self { eps_r: Tensor3::identity(), mu_r: Tensor3::identity() }
    }

    /// Electric-lossy, gyrotropic-permeability fill of the cylinder benchmark.
    pub fn paper_case2() -> Self {
        let (z, j) = (c64::new(0.0, 0.0), |im: f64| c64::new(0.0, im));
        let two = c64::new(2.0, 0.0);
        let lossy = c64::new(2.0, -1.0);
        Self {
            eps_r: Tensor3::diag([lossy, lossy, two]),
            mu_r: Tensor3([[two, j(-0.375), z], [j(0.375), two, z], [z, z, two]]),
        }
    }

    /// Electric- and magnetic-lossy fill of the cylinder benchmark.
    pub fn paper_case4() -> Self {
        let (z, j) = (c64::new(0.0, 0.0), |im: f64| c64::new(0.0, im));
        let two = c64::new(2.0, 0.0);
        let eps_d = c64::new(2.0, 1.0);
        let mu_d = c64::new(2.0, -1.0);
        Self {
            eps_r: Tensor3::diag([eps_d, eps_d, two]),
            mu_r: Tensor3([[mu_d, j(0.375), z], [j(0.375), mu_d, z], [z, z, two]]),
        }
    }

    pub fn preset(name: &str) -> Result<Self, MaterialError> {
        match name {
            "vacuum" => Ok(Self::vacuum()),
            "paper-case2" => Ok(Self::paper_case2()),
            "paper-case4" => Ok(Self::paper_case4()),
            other => Err(MaterialError::UnknownPreset(other.to_string())),
        }
    }

    pub fn eps_inverse(&self) -> Result<Tensor3, MaterialError> {
        invert_tensor(&self.eps_r).map_err(|_| MaterialError::Singular("permittivity"))
    }

    pub fn classify(&self, tol: f64) -> MediumCase {
        classify_medium(self, tol)
    }
}

pub fn classify_medium(mat: &MaterialTensors, tol: f64) -> MediumCase {
    match (is_hermitian_pd(&mat.eps_r, tol), is_hermitian_pd(&mat.mu_r, tol)) {
        (true, true) => MediumCase::Case1,
        (false, true) => MediumCase::Case2,
        (true, false) => MediumCase::Case3,
        (false, false) => MediumCase::Case4,
    }
}

/// Per-element material lookup used by assembly.
pub trait MaterialLookup {
    fn tensors(&self, tet: usize) -> &MaterialTensors;

    /// Medium case over all regions: the worst case per tensor.
    fn medium_case(&self, tol: f64) -> MediumCase;
}

impl MaterialLookup for MaterialTensors {
    fn tensors(&self, _tet: usize) -> &MaterialTensors {
        self
    }

    fn medium_case(&self, tol: f64) -> MediumCase {
        classify_medium(self, tol)
    }
}

/// Piecewise-constant fill: one tensor pair per region, one region id per tet.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionMaterials {
    pub regions: Vec<MaterialTensors>,
    pub tet_region: Vec<usize>,
}

impl MaterialLookup for RegionMaterials {
    fn tensors(&self, tet: usize) -> &MaterialTensors {
        &self.regions[self.tet_region[tet]]
    }

    fn medium_case(&self, tol: f64) -> MediumCase {
        let eps_ok = self.regions.iter().all(|m| is_hermitian_pd(&m.eps_r, tol));
        let mu_ok = self.regions.iter().all(|m| is_hermitian_pd(&m.mu_r, tol));
        match (eps_ok, mu_ok) {
            (true, true) => MediumCase::Case1,
            (false, true) => MediumCase::Case2,
            (true, false) => MediumCase::Case3,
            (false, false) => MediumCase::Case4,
        }
    }
}

/// Resonant frequency in Hz for eigenvalue `lambda` (squared vacuum
/// wavenumber, 1/m^2), using the principal square root.
pub fn resonant_frequency(lambda: c64) -> c64 {
    lambda.sqrt() * (SPEED_OF_LIGHT / (2.0 * std::f64::consts::PI))
}

/// Inverse of [`resonant_frequency`].
pub fn eigenvalue_from_frequency(f: c64) -> c64 {
    let k = f * (2.0 * std::f64::consts::PI / SPEED_OF_LIGHT);
    k * k
}

/// Parses `a+bj`, `a-bj`, `a`, `bj`, `-j`, with optional spaces around the sign.
pub fn parse_complex(s: &str) -> Result<c64, MaterialError> {
    let bad = || MaterialError::MalformedComplex(s.to_string());
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix(['j', 'i']) else {
        return parse_real(&t).map(|re| c64::new(re, 0.0)).ok_or_else(bad);
    };
    // split at the last sign that is not part of an exponent or the leading sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (parse_real(&body[..k]).ok_or_else(bad)?, parse_imag(&body[k..]).ok_or_else(bad)?),
        None => (0.0, parse_imag(body).ok_or_else(bad)?),
    };
    Ok(c64::new(re, im))
}

fn parse_real(s: &str) -> Option<f64> {
    // reject "inf"/"nan" spellings and bare signs
    if !s.bytes().any(|b| b.is_ascii_digit()) || s.bytes().any(|b| b.is_ascii_alphabetic() && b != b'e' && b != b'E') {
        return None;
    }
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn parse_imag(s: &str) -> Option<f64> {
    match s {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        _ => parse_real(s),
    }
}

/// Formats as `a+bj` with 12 significant digits.
pub fn format_complex(z: c64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}j", format_sig(z.re), sign, format_sig(z.im.abs()))
}

/// Formats a real number with 12 significant digits.
pub fn format_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{v:.11e}")
    }
}
