//! Atomic species: reference-state data and dipole transition tables.
//!
//! Data files are TOML with a `[meta]` table and one `[[line]]` table per
//! transition. All energies are in hartree and the file must say so with
//! `units = "atomic"`.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::units::CODATA_2018;

/// Relative TRK-sum deviation above which a dataset is rejected.
pub const TRK_REJECT_TOLERANCE: f64 = 0.05;
/// Relative tolerance for the optional `alpha0_reference` cross-check.
pub const ALPHA0_REFERENCE_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LineKind {
    /// Bound-bound transition.
    Discrete,
    /// Effective line standing in for continuum oscillator strength.
    Pseudo,
}

/// One dipole transition out of the reference state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionLine {
    /// `E_m - E` in hartree; positive for upward transitions.
    pub delta_e: f64,
    /// Oscillator strength `f_m0`, carrying the sign of `delta_e`.
    pub f: f64,
    pub kind: LineKind,
}

impl TransitionLine {
    pub fn new(delta_e: f64, f: f64, kind: LineKind) -> Result<Self> {
        if !delta_e.is_finite() || delta_e == 0.0 {
            return Err(Error::validation(
                "delta_e",
                format!("transition energy must be finite and non-zero, got {delta_e}"),
            ));
        }
        if !f.is_finite() || !(f / delta_e > 0.0) {
            return Err(Error::validation(
                "f",
                format!("oscillator strength {f} must be non-zero with the sign of delta_e = {delta_e}"),
            ));
        }
        Ok(Self { delta_e, f, kind })
    }

    /// Resonance angular frequency `|delta_e|` (a.u., hbar = 1).
    pub fn resonance(&self) -> f64 {
        self.delta_e.abs()
    }
}

/// A validated atomic species in a definite reference state.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomSpecies {
    pub name: String,
    pub state_label: String,
    /// Atomic mass in kg.
    pub mass: f64,
    pub n_electrons: u32,
    pub lines: Vec<TransitionLine>,
    /// Literature static polarizability (a.u.), if the dataset records one.
    pub alpha0_reference: Option<f64>,
}

impl AtomSpecies {
    /// Builds a species and checks every dataset invariant.
    pub fn new(
        name: impl Into<String>,
        state_label: impl Into<String>,
        mass: f64,
        n_electrons: u32,
        lines: Vec<TransitionLine>,
        alpha0_reference: Option<f64>,
    ) -> Result<Self> {
        let species = Self {
            name: name.into(),
            state_label: state_label.into(),
            mass,
            n_electrons,
            lines,
            alpha0_reference,
        };
        species.validate()?;
        Ok(species)
    }

    /// Builds a species without the sum-rule and reference checks. Meant
    /// for synthetic model atoms (two-level toys and the like).
    pub fn synthetic(name: impl Into<String>, mass: f64, lines: Vec<TransitionLine>) -> Result<Self> {
        let species = Self {
            name: name.into(),
            state_label: "model".into(),
            mass,
            n_electrons: 0,
            lines,
            alpha0_reference: None,
        };
        species.validate_lines()?;
        if !(mass > 0.0) {
            return Err(Error::validation("mass", "mass must be positive"));
        }
        Ok(species)
    }

    fn validate_lines(&self) -> Result<()> {
        if self.lines.is_empty() {
            return Err(Error::validation("line", "at least one transition line is required"));
        }
        for (i, line) in self.lines.iter().enumerate() {
            TransitionLine::new(line.delta_e, line.f, line.kind)?;
            if self.lines[..i].iter().any(|other| other.delta_e == line.delta_e) {
                return Err(Error::validation(
                    "delta_e",
                    format!("duplicate transition energy {}", line.delta_e),
                ));
            }
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        self.validate_lines()?;
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return Err(Error::validation("mass_amu", "mass must be positive"));
        }
        if self.n_electrons == 0 {
            return Err(Error::validation("n_electrons", "electron count must be positive"));
        }
        let n = f64::from(self.n_electrons);
        let sum = trk_sum(self);
        if ((sum - n) / n).abs() > TRK_REJECT_TOLERANCE {
            return Err(Error::validation(
                "f",
                format!(
                    "TRK sum rule violated: sum of oscillator strengths {sum:.6} vs N = {n} \
                     (tolerance {:.0}%)",
                    TRK_REJECT_TOLERANCE * 100.0
                ),
            ));
        }
        if let Some(reference) = self.alpha0_reference {
            let alpha0 = static_polarizability(self);
            if ((alpha0 - reference) / reference).abs() > ALPHA0_REFERENCE_TOLERANCE {
                return Err(Error::validation(
                    "alpha0_reference",
                    format!("dataset gives alpha(0) = {alpha0:.6} a.u., reference is {reference}"),
                ));
            }
        }
        Ok(())
    }

    /// Mass in electron masses.
    pub fn mass_au(&self) -> f64 {
        self.mass / CODATA_2018.m_e
    }

    /// Smallest `|delta_e|` over all lines, pseudo-lines included.
    pub fn lowest_resonance(&self) -> f64 {
        self.lines
            .iter()
            .map(TransitionLine::resonance)
            .fold(f64::INFINITY, f64::min)
    }

    /// `name(state)` label used in output.
    pub fn label(&self) -> String {
        format!("{}({})", self.name, self.state_label)
    }

    /// Returns a copy with all oscillator strengths scaled by `factor` (> 0).
    pub fn with_scaled_strengths(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for line in &mut out.lines {
            line.f *= factor;
        }
        out
    }

    /// Returns a copy with a different atomic mass (kg).
    pub fn with_mass(&self, mass: f64) -> Self {
        Self {
            mass,
            ..self.clone()
        }
    }
}

/// Thomas-Reiche-Kuhn sum `sum_m f_m0`.
pub fn trk_sum(species: &AtomSpecies) -> f64 {
    species.lines.iter().map(|l| l.f).sum()
}

/// Static dipole polarizability `sum_m f_m / delta_e_m^2` in atomic units.
pub fn static_polarizability(species: &AtomSpecies) -> f64 {
    species
        .lines
        .iter()
        .map(|l| l.f / (l.delta_e * l.delta_e))
        .sum()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AtomFile {
    meta: MetaSection,
    #[serde(default)]
    line: Vec<LineRecord>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MetaSection {
    name: String,
    state: String,
    mass_amu: Option<f64>,
    n_electrons: Option<u32>,
    units: String,
    alpha0_reference: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LineRecord {
    delta_e: f64,
    f: f64,
    kind: LineKind,
}

/// 1-based line number of a byte offset.
pub(crate) fn line_of(source: &str, offset: usize) -> usize {
    source[..offset.min(source.len())].matches('\n').count() + 1
}

pub(crate) fn format_error(source: &str, err: toml::de::Error) -> Error {
    let line = err.span().map(|s| line_of(source, s.start)).unwrap_or(0);
    Error::Format {
        line,
        message: err.message().to_string(),
    }
}

/// Parses and validates an atom data file.
pub fn load_atom(source: &str) -> Result<AtomSpecies> {
    let file: AtomFile = toml::from_str(source).map_err(|e| format_error(source, e))?;
    let meta = file.meta;
    if meta.units != "atomic" {
        return Err(Error::validation(
            "units",
            format!("unsupported unit convention `{}` (expected \"atomic\")", meta.units),
        ));
    }
    let mass_amu = meta
        .mass_amu
        .ok_or_else(|| Error::validation("mass_amu", "missing atomic mass"))?;
    let n_electrons = meta
        .n_electrons
        .ok_or_else(|| Error::validation("n_electrons", "missing electron count"))?;
    let lines = file
        .line
        .into_iter()
        .map(|r| TransitionLine::new(r.delta_e, r.f, r.kind))
        .collect::<Result<Vec<_>>>()?;
    AtomSpecies::new(
        meta.name,
        meta.state,
        mass_amu * CODATA_2018.amu,
        n_electrons,
        lines,
        meta.alpha0_reference,
    )
}

/// Datasets compiled into the binary.
pub mod bundled {
    use super::{load_atom, AtomSpecies};
    use crate::error::Result;

    pub const H_1S: &str = include_str!("../data/atoms/h_1s.toml");
    pub const H_2S: &str = include_str!("../data/atoms/h_2s.toml");
    pub const HE_1S1: &str = include_str!("../data/atoms/he_1s1.toml");
    pub const HE_2S3: &str = include_str!("../data/atoms/he_2s3.toml");

    pub const NAMES: [&str; 4] = ["h_1s", "h_2s", "he_1s1", "he_2s3"];

    pub fn source(name: &str) -> Option<&'static str> {
        match name {
            "h_1s" => Some(H_1S),
            "h_2s" => Some(H_2S),
            "he_1s1" => Some(HE_1S1),
            "he_2s3" => Some(HE_2S3),
            _ => None,
        }
    }

    /// Loads a bundled species by short name (`h_1s`, `h_2s`, `he_1s1`, `he_2s3`).
    pub fn atom(name: &str) -> Option<Result<AtomSpecies>> {
        source(name).map(load_atom)
    }

    pub fn h_1s() -> AtomSpecies {
        load_atom(H_1S).expect("bundled h_1s dataset is valid")
    }

    pub fn h_2s() -> AtomSpecies {
        load_atom(H_2S).expect("bundled h_2s dataset is valid")
    }

    pub fn he_1s1() -> AtomSpecies {
        load_atom(HE_1S1).expect("bundled he_1s1 dataset is valid")
    }

    pub fn he_2s3() -> AtomSpecies {
        load_atom(HE_2S3).expect("bundled he_2s3 dataset is valid")
    }

    pub fn all() -> Vec<AtomSpecies> {
        vec![h_1s(), h_2s(), he_1s1(), he_2s3()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    const TWO_LEVEL: &str = r#"
[meta]
name = "Toy"
state = "g"
mass_amu = 1.0
n_electrons = 1
units = "atomic"

[[line]]
delta_e = 0.5
f = 1.0
kind = "discrete"
"#;

    #[test]
    fn bundled_hydrogen_ground_state() {
        let h = bundled::h_1s();
        assert_eq!(h.n_electrons, 1);
        assert!(h.lines.iter().filter(|l| l.kind == LineKind::Discrete).count() == 20);
        assert!(h.lines.iter().any(|l| l.kind == LineKind::Pseudo));
        assert!((trk_sum(&h) - 1.0).abs() < 0.01);
        assert!((static_polarizability(&h) - 4.5).abs() < 0.05);
    }

    #[test]
    fn bundled_helium_sum_rules() {
        let he = bundled::he_1s1();
        assert!((trk_sum(&he) - 2.0).abs() < 0.02);
        assert!(rel(static_polarizability(&he), 1.383) < 0.01);
        let he3 = bundled::he_2s3();
        assert!((trk_sum(&he3) - 2.0).abs() < 0.02);
        assert!((static_polarizability(&he3) - 315.6).abs() < 3.0);
        assert!(he3.lines.iter().all(|l| l.delta_e > 0.0));
        let h2 = bundled::h_2s();
        assert!((trk_sum(&h2) - 1.0).abs() < 0.01);
        assert!(rel(static_polarizability(&h2), 120.0) < 0.01);
    }

    #[test]
    fn lyman_alpha_alone() {
        let s = AtomSpecies::synthetic(
            "lyman",
            1.0,
            vec![TransitionLine::new(0.375, 0.4162, LineKind::Discrete).unwrap()],
        )
        .unwrap();
        assert_eq!(trk_sum(&s), 0.4162);
    }

    #[test]
    fn two_level_static_polarizability() {
        let toy = load_atom(TWO_LEVEL).unwrap();
        assert_eq!(static_polarizability(&toy), 4.0);
        assert!(rel(toy.mass, CODATA_2018.amu) < 1e-15);
    }

    #[test]
    fn discrete_only_hydrogen_fails_sum_rule() {
        let source = bundled::H_1S;
        let stripped: String = source
            .split("[[line]]")
            .filter(|chunk| !chunk.contains("\"pseudo\""))
            .collect::<Vec<_>>()
            .join("[[line]]");
        let err = load_atom(&stripped).unwrap_err();
        assert!(matches!(err, Error::Validation { ref field, .. } if field == "f"), "{err}");
    }

    #[test]
    fn sum_of_082_is_rejected() {
        let src = TWO_LEVEL.replace("f = 1.0", "f = 0.82");
        assert!(matches!(load_atom(&src), Err(Error::Validation { .. })));
        // within 5% is accepted
        let src = TWO_LEVEL.replace("f = 1.0", "f = 0.97");
        assert!(load_atom(&src).is_ok());
    }

    #[test]
    fn empty_line_list_is_rejected() {
        let src = TWO_LEVEL.split("[[line]]").next().unwrap().to_string();
        let err = load_atom(&src).unwrap_err();
        assert!(matches!(err, Error::Validation { ref field, .. } if field == "line"));
    }

    #[test]
    fn duplicate_energies_are_rejected() {
        let src = TWO_LEVEL.replace("f = 1.0", "f = 0.5")
            + "\n[[line]]\ndelta_e = 0.5\nf = 0.5\nkind = \"pseudo\"\n";
        let err = load_atom(&src).unwrap_err();
        assert!(matches!(err, Error::Validation { ref field, .. } if field == "delta_e"));
    }

    #[test]
    fn missing_mass_or_electrons() {
        let src = TWO_LEVEL.replace("mass_amu = 1.0\n", "");
        let err = load_atom(&src).unwrap_err();
        assert!(matches!(err, Error::Validation { ref field, .. } if field == "mass_amu"));
        let src = TWO_LEVEL.replace("n_electrons = 1\n", "");
        let err = load_atom(&src).unwrap_err();
        assert!(matches!(err, Error::Validation { ref field, .. } if field == "n_electrons"));
    }

    #[test]
    fn parse_error_reports_line() {
        let src = TWO_LEVEL.replace("f = 1.0", "f = = 1.0");
        match load_atom(&src) {
            Err(Error::Format { line, .. }) => assert_eq!(line, 11),
            other => panic!("expected format error, got {other:?}"),
        }
        let src = TWO_LEVEL.replace("delta_e = 0.5", "delta_e = 0.5\nwidth = 2.0");
        assert!(matches!(load_atom(&src), Err(Error::Format { .. })));
    }

    #[test]
    fn unknown_units_rejected() {
        let src = TWO_LEVEL.replace("units = \"atomic\"", "units = \"eV\"");
        let err = load_atom(&src).unwrap_err();
        assert!(matches!(err, Error::Validation { ref field, .. } if field == "units"));
    }

    #[test]
    fn sign_mismatch_rejected() {
        assert!(TransitionLine::new(-0.2, 0.1, LineKind::Discrete).is_err());
        assert!(TransitionLine::new(0.2, 0.0, LineKind::Discrete).is_err());
        assert!(TransitionLine::new(0.0, 0.1, LineKind::Discrete).is_err());
        assert!(TransitionLine::new(-0.2, -0.1, LineKind::Discrete).is_ok());
    }

    #[test]
    fn reference_mismatch_rejected() {
        let src = TWO_LEVEL.replace("units = \"atomic\"", "units = \"atomic\"\nalpha0_reference = 4.2");
        let err = load_atom(&src).unwrap_err();
        assert!(matches!(err, Error::Validation { ref field, .. } if field == "alpha0_reference"));
    }

    #[test]
    fn loading_is_deterministic() {
        assert_eq!(load_atom(bundled::HE_2S3).unwrap(), load_atom(bundled::HE_2S3).unwrap());
    }

    #[test]
    fn scaling_strengths_scales_polarizability() {
        let he = bundled::he_2s3();
        let a = static_polarizability(&he);
        for lambda in [0.5, 1.7, 3.0] {
            let scaled = he.with_scaled_strengths(lambda);
            assert!(rel(static_polarizability(&scaled), lambda * a) < 1e-14);
        }
    }

    #[test]
    fn static_polarizability_non_negative_for_bundled() {
        for s in bundled::all() {
            assert!(static_polarizability(&s) >= 0.0);
        }
    }
}
