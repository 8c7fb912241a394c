use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use faer::c64;

use crate::error::ReferenceError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceSource {
    AnalyticBox,
    PaperSphere,
    PaperCylinderCase2,
    PaperCylinderCase4,
    External,
}

impl ReferenceSource {
    pub fn name(self) -> &'static str {
        match self {
            ReferenceSource::AnalyticBox => "analytic-box",
            ReferenceSource::PaperSphere => "paper-sphere",
            ReferenceSource::PaperCylinderCase2 => "paper-cylinder-case2",
            ReferenceSource::PaperCylinderCase4 => "paper-cylinder-case4",
            ReferenceSource::External => "external",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceValue {
    pub lambda: c64,
    pub multiplicity: usize,
}

/// Reference eigenvalues sorted by `|lambda|`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSpectrum {
    pub source: ReferenceSource,
    pub values: Vec<ReferenceValue>,
    /// Relative tolerance used when none is given to the comparison.
    pub tolerance: f64,
}

impl ReferenceSpectrum {
    pub fn new(source: ReferenceSource, mut values: Vec<ReferenceValue>, tolerance: f64) -> Self {
        values.sort_by(|a, b| a.lambda.norm().total_cmp(&b.lambda.norm()));
        Self { source, values, tolerance }
    }

    /// Values repeated by multiplicity.
    pub fn expanded(&self) -> Vec<c64> {
        self.values.iter().flat_map(|v| std::iter::repeat_n(v.lambda, v.multiplicity)).collect()
    }
}

/// The three validation experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    /// Empty sphere of radius 1 m.
    Sphere,
    /// Cylinder r = 0.2 m, h = 0.5 m, electric-lossy fill.
    CylinderCase2,
    /// Same cylinder, electric- and magnetic-lossy fill.
    CylinderCase4,
}

impl Experiment {
    pub const ALL: [Experiment; 3] =
        [Experiment::Sphere, Experiment::CylinderCase2, Experiment::CylinderCase4];

    pub fn letter(self) -> char {
        match self {
            Experiment::Sphere => 'A',
            Experiment::CylinderCase2 => 'B',
            Experiment::CylinderCase4 => 'C',
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            Experiment::Sphere => "sphere",
            Experiment::CylinderCase2 => "cylinder-case2",
            Experiment::CylinderCase4 => "cylinder-case4",
        }
    }

    /// Material preset name used by the experiment.
    pub fn preset(self) -> &'static str {
        match self {
            Experiment::Sphere => "vacuum",
            Experiment::CylinderCase2 => "paper-case2",
            Experiment::CylinderCase4 => "paper-case4",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Experiment {
    type Err = ReferenceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        Experiment::ALL
            .into_iter()
            .find(|e| {
                s.eq_ignore_ascii_case(e.id())
                    || s.eq_ignore_ascii_case(&e.letter().to_string())
                    || s.eq_ignore_ascii_case(&format!("paper-{}", e.id()))
            })
            .ok_or_else(|| ReferenceError::UnknownExperiment(s.to_string()))
    }
}

/// Published eigenvalues (1/m^2) for the three experiments.
pub fn paper_reference(which: Experiment) -> ReferenceSpectrum {
    let v = |re: f64, im: f64, multiplicity: usize| ReferenceValue { lambda: c64::new(re, im), multiplicity };
    match which {
        // exact dominant eigenvalue of the unit sphere, triple
        Experiment::Sphere => {
            ReferenceSpectrum::new(ReferenceSource::PaperSphere, vec![v(7.52793, 0.0, 3)], 0.03)
        }
        // commercial-solver column of the electric-lossy table
        Experiment::CylinderCase2 => ReferenceSpectrum::new(
            ReferenceSource::PaperCylinderCase2,
            vec![v(23.8230, 11.9085, 1), v(26.3968, 13.1848, 1), v(37.6067, 0.0069, 1)],
            0.05,
        ),
        // commercial-solver column of the electric- and magnetic-lossy table
        Experiment::CylinderCase4 => ReferenceSpectrum::new(
            ReferenceSource::PaperCylinderCase4,
            vec![v(24.2476, -7.5597, 1), v(25.2649, -9.7244, 1)],
            0.05,
        ),
    }
}

pub fn paper_reference_by_id(id: &str) -> Result<ReferenceSpectrum, ReferenceError> {
    Ok(paper_reference(id.parse()?))
}

/// The `count` smallest distinct resonances `pi^2 (p^2/a^2 + q^2/b^2 + s^2/c^2)`
/// of a rectangular cavity. Triples with no zero index carry one TE and one TM
/// mode; triples with exactly one zero index carry one mode.
pub fn analytic_box_eigenvalues(a: f64, b: f64, c: f64, count: usize) -> ReferenceSpectrum {
    assert!(a > 0.0 && b > 0.0 && c > 0.0, "box dimensions must be positive");
    let value = |p: usize, q: usize, s: usize| {
        PI * PI * ((p * p) as f64 / (a * a) + (q * q) as f64 / (b * b) + (s * s) as f64 / (c * c))
    };
    let longest = a.max(b).max(c);
    let mut limit = 2usize;
    loop {
        let mut raw: Vec<(f64, usize)> = Vec::new();
        for p in 0..=limit {
            for q in 0..=limit {
                for s in 0..=limit {
                    let zeros = [p, q, s].iter().filter(|&&i| i == 0).count();
                    if zeros <= 1 {
                        raw.push((value(p, q, s), if zeros == 0 { 2 } else { 1 }));
                    }
                }
            }
        }
        raw.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut merged: Vec<ReferenceValue> = Vec::new();
        for (lam, mult) in raw {
            match merged.last_mut() {
                Some(last) if (lam - last.lambda.re).abs() <= 1e-12 * lam => last.multiplicity += mult,
                _ => merged.push(ReferenceValue { lambda: c64::new(lam, 0.0), multiplicity: mult }),
            }
        }
        // any triple with an index above `limit` exceeds this bound
        let bound = PI * PI * ((limit + 1) * (limit + 1)) as f64 / (longest * longest);
        if merged.len() > count && merged[count].lambda.re < bound {
            merged.truncate(count);
            return ReferenceSpectrum::new(ReferenceSource::AnalyticBox, merged, 0.02);
        }
        limit *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_cube_first_resonance() {
        let spectrum = analytic_box_eigenvalues(1.0, 1.0, 1.0, 3);
        assert!((spectrum.values[0].lambda.re - 2.0 * PI * PI).abs() < 1e-12);
        assert_eq!(spectrum.values[0].multiplicity, 3);
        // (1,1,1) carries TE and TM
        assert!((spectrum.values[1].lambda.re - 3.0 * PI * PI).abs() < 1e-12);
        assert_eq!(spectrum.values[1].multiplicity, 2);
    }

    #[test]
    fn brute_force_first_value_of_test_box() {
        let spectrum = analytic_box_eigenvalues(1.0, 0.5, 0.75, 1);
        let mut best = f64::INFINITY;
        for p in 0..4 {
            for q in 0..4 {
                for s in 0..4 {
                    if [p, q, s].iter().filter(|&&i| i == 0).count() <= 1 {
                        let v = PI * PI * (p * p) as f64 + PI * PI * (q * q) as f64 / 0.25 + PI * PI * (s * s) as f64 / 0.5625;
                        best = best.min(v);
                    }
                }
            }
        }
        assert!((spectrum.values[0].lambda.re - best).abs() < 1e-12);
        assert!((best - PI * PI * (1.0 + 1.0 / 0.5625)).abs() < 1e-12);
    }

    #[test]
    fn scaling_divides_by_square() {
        let base = analytic_box_eigenvalues(1.0, 0.5, 0.75, 8);
        let scaled = analytic_box_eigenvalues(2.0, 1.0, 1.5, 8);
        for (x, y) in base.values.iter().zip(&scaled.values) {
            assert!((x.lambda.re / 4.0 - y.lambda.re).abs() < 1e-12 * x.lambda.re);
            assert_eq!(x.multiplicity, y.multiplicity);
        }
    }

    #[test]
    fn published_constants() {
        let s = paper_reference(Experiment::Sphere);
        assert_eq!(s.values, vec![ReferenceValue { lambda: c64::new(7.52793, 0.0), multiplicity: 3 }]);
        let b = paper_reference_by_id("B").unwrap();
        assert_eq!(b.values.len(), 3);
        assert_eq!(b.values[0].lambda, c64::new(23.8230, 11.9085));
        let c = paper_reference_by_id("cylinder-case4").unwrap();
        assert_eq!(c.values[1].lambda, c64::new(25.2649, -9.7244));
        assert!(paper_reference_by_id("torus").is_err());
    }
}
