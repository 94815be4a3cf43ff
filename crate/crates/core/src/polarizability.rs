//! Dynamic dipole polarizability and the gauge-invariant imaginary part.
//!
//! `Im alpha(omega)` is the sum of two pieces:
//!
//! * the tree-level resonant term, a set of delta lines at `omega_m = |E_m - E|`
//!   with weight `(pi/2) f_m / (E_m - E)`;
//! * the one-loop term `omega^3 alpha(omega)^2 / (6 pi eps0 c^3)`, which in
//!   atomic units reads `(2/3) omega^3 alpha(omega)^2 / c^3`.
//!
//! Everything here works in Hartree atomic units.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::atomdata::{AtomSpecies, LineKind};
use crate::error::{Error, Result};
use crate::quadrature;
use crate::units::CODATA_2018;

/// Half-width of the window around each resonance in which unbroadened
/// evaluation is refused.
pub const POLE_EXCLUSION: f64 = 1e-9;

/// Default uniform linewidth for the Lorentzian policy (a.u.).
pub const DEFAULT_LORENTZIAN_GAMMA: f64 = 1e-6;

/// How poles of the sum-over-states polarizability are treated.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum BroadeningPolicy {
    /// Bare poles; evaluation too close to a resonance is an error.
    #[default]
    None,
    /// Every resonance gets the same full width `gamma`.
    Lorentzian { gamma: f64 },
}

impl BroadeningPolicy {
    pub fn lorentzian(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::validation("gamma", format!("linewidth must be positive, got {gamma}")));
        }
        Ok(Self::Lorentzian { gamma })
    }

    pub fn is_broadened(&self) -> bool {
        matches!(self, Self::Lorentzian { .. })
    }
}

/// Which parts of `Im alpha` enter an evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EvaluationMode {
    #[default]
    Total,
    TreeOnly,
    OneloopOnly,
}

impl EvaluationMode {
    pub fn includes_tree(self) -> bool {
        matches!(self, Self::Total | Self::TreeOnly)
    }

    pub fn includes_oneloop(self) -> bool {
        matches!(self, Self::Total | Self::OneloopOnly)
    }
}

/// Sum over states at a signed frequency. Only `omega^2` enters.
fn sum_over_states(species: &AtomSpecies, omega: f64, policy: BroadeningPolicy) -> Result<f64> {
    match policy {
        BroadeningPolicy::None => {
            let mut total = 0.0;
            for line in &species.lines {
                let resonance = line.resonance();
                if (resonance - omega.abs()).abs() < POLE_EXCLUSION {
                    return Err(Error::PoleProximity {
                        omega,
                        resonance,
                        window: POLE_EXCLUSION,
                    });
                }
                total += line.f / (line.delta_e * line.delta_e - omega * omega);
            }
            Ok(total)
        }
        BroadeningPolicy::Lorentzian { gamma } => {
            let z = Complex64::new(omega.abs(), 0.5 * gamma);
            Ok(species
                .lines
                .iter()
                .map(|line| (line.f / (line.delta_e * line.delta_e - z * z)).re)
                .sum())
        }
    }
}

/// Real dynamic polarizability `sum_m f_m / (dE_m^2 - omega^2)` (a.u.).
pub fn alpha(species: &AtomSpecies, omega: f64, policy: BroadeningPolicy) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(Error::Domain(format!("frequency must be non-negative, got {omega}")));
    }
    sum_over_states(species, omega, policy)
}

/// One-loop density `(2/3) omega^3 alpha(omega)^2 / c^3` (a.u.).
pub fn im_alpha_oneloop(species: &AtomSpecies, omega: f64, policy: BroadeningPolicy) -> Result<f64> {
    let a = alpha(species, omega, policy)?;
    Ok(oneloop_from_alpha(omega, a))
}

pub(crate) fn oneloop_from_alpha(omega: f64, alpha: f64) -> f64 {
    let c = CODATA_2018.c_au();
    2.0 / 3.0 * omega.powi(3) * alpha * alpha / (c * c * c)
}

/// A delta line `weight * delta(omega - omega_m)` in `Im alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaLine {
    pub omega: f64,
    pub weight: f64,
}

/// Tree-level resonant lines. Pseudo-lines are skipped unless asked for.
pub fn resonant_lines(species: &AtomSpecies, include_pseudo: bool) -> Vec<DeltaLine> {
    species
        .lines
        .iter()
        .filter(|l| include_pseudo || l.kind == LineKind::Discrete)
        .map(|l| DeltaLine {
            omega: l.resonance(),
            // f / dE > 0 for every valid line
            weight: 0.5 * PI * l.f / l.delta_e,
        })
        .collect()
}

/// `Im alpha` as a measure on `omega >= 0`: smooth one-loop density plus
/// weighted delta lines.
#[derive(Debug, Clone)]
pub struct ImAlphaMeasure<'a> {
    species: &'a AtomSpecies,
    policy: BroadeningPolicy,
    mode: EvaluationMode,
    pub delta_lines: Vec<DeltaLine>,
}

pub fn im_alpha_measure(
    species: &AtomSpecies,
    policy: BroadeningPolicy,
    mode: EvaluationMode,
    include_pseudo: bool,
) -> ImAlphaMeasure<'_> {
    let delta_lines = if mode.includes_tree() {
        resonant_lines(species, include_pseudo)
    } else {
        Vec::new()
    };
    ImAlphaMeasure {
        species,
        policy,
        mode,
        delta_lines,
    }
}

impl ImAlphaMeasure<'_> {
    pub fn mode(&self) -> EvaluationMode {
        self.mode
    }

    pub fn policy(&self) -> BroadeningPolicy {
        self.policy
    }

    pub fn species(&self) -> &AtomSpecies {
        self.species
    }

    /// Smooth (one-loop) density at `omega`; zero in tree-only mode.
    pub fn smooth(&self, omega: f64) -> Result<f64> {
        if self.mode.includes_oneloop() {
            im_alpha_oneloop(self.species, omega, self.policy)
        } else {
            Ok(0.0)
        }
    }

    /// `int_lo^hi g(omega) dIm alpha(omega)`: the smooth part by adaptive
    /// quadrature (split at every resonance inside the window) plus every
    /// delta line in `[lo, hi]`.
    pub fn integrate<G>(&self, g: G, lo: f64, hi: f64, rel_tol: f64) -> Result<f64>
    where
        G: Fn(f64) -> f64,
    {
        let lines: f64 = self
            .delta_lines
            .iter()
            .filter(|l| l.omega >= lo && l.omega <= hi)
            .map(|l| l.weight * g(l.omega))
            .sum();
        if !self.mode.includes_oneloop() {
            return Ok(lines);
        }
        let mut edges = vec![lo, hi];
        for line in &self.species.lines {
            let w = line.resonance();
            if w > lo && w < hi {
                edges.push(w);
            }
        }
        edges.sort_by(f64::total_cmp);
        let mut smooth = 0.0;
        for pair in edges.windows(2) {
            smooth += quadrature::integrate(
                |w| Ok(g(w) * self.smooth(w)?),
                pair[0],
                pair[1],
                rel_tol,
                4000,
            )?
            .value;
        }
        Ok(smooth + lines)
    }
}
