//! Lorentz-oscillator dielectric functions and the non-retarded surface
//! response `Im[(eps - 1) / (eps + 1)]`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Deserialize;

use crate::atomdata::format_error;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oscillator {
    /// Dimensionless oscillator strength `S_j`.
    pub strength: f64,
    /// Resonance frequency (a.u.).
    pub omega: f64,
    /// Damping (a.u.).
    pub gamma: f64,
}

/// `eps_inf` plus a set of Lorentz oscillators at one temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSet {
    pub eps_inf: f64,
    pub oscillators: Vec<Oscillator>,
}

impl ParameterSet {
    pub fn new(eps_inf: f64, oscillators: Vec<Oscillator>) -> Result<Self> {
        let set = Self { eps_inf, oscillators };
        set.validate()?;
        Ok(set)
    }

    fn validate(&self) -> Result<()> {
        if !(self.eps_inf >= 1.0) || !self.eps_inf.is_finite() {
            return Err(Error::validation("eps_inf", format!("must be >= 1, got {}", self.eps_inf)));
        }
        for o in &self.oscillators {
            for (field, v) in [("S", o.strength), ("omega", o.omega), ("gamma", o.gamma)] {
                if !(v > 0.0) || !v.is_finite() {
                    return Err(Error::validation(field, format!("must be positive, got {v}")));
                }
            }
        }
        if !(self.static_permittivity() > 1.0) {
            return Err(Error::validation("S", "static permittivity must exceed 1"));
        }
        Ok(())
    }

    /// `eps(0) = eps_inf + sum S_j`.
    pub fn static_permittivity(&self) -> f64 {
        self.eps_inf + self.oscillators.iter().map(|o| o.strength).sum::<f64>()
    }

    /// Lorentz formula at a signed frequency.
    pub fn epsilon_signed(&self, omega: f64) -> Complex64 {
        let mut eps = Complex64::new(self.eps_inf, 0.0);
        for o in &self.oscillators {
            let w2 = o.omega * o.omega;
            eps += o.strength * w2 / Complex64::new(w2 - omega * omega, -o.gamma * omega);
        }
        eps
    }

    /// `d Im[(eps-1)/(eps+1)] / d omega` at `omega = 0`.
    pub fn response_slope(&self) -> f64 {
        let d_im_eps: f64 = self
            .oscillators
            .iter()
            .map(|o| o.strength * o.gamma / (o.omega * o.omega))
            .sum();
        let e0 = self.static_permittivity();
        2.0 * d_im_eps / ((e0 + 1.0) * (e0 + 1.0))
    }

    fn lerp(&self, other: &Self, t: f64) -> Self {
        let mix = |a: f64, b: f64| a + (b - a) * t;
        Self {
            eps_inf: mix(self.eps_inf, other.eps_inf),
            oscillators: self
                .oscillators
                .iter()
                .zip(&other.oscillators)
                .map(|(a, b)| Oscillator {
                    strength: mix(a.strength, b.strength),
                    omega: mix(a.omega, b.omega),
                    gamma: mix(a.gamma, b.gamma),
                })
                .collect(),
        }
    }
}

/// A surface material: either temperature independent or tabulated in T.
#[derive(Debug, Clone, PartialEq)]
pub struct DielectricModel {
    pub name: String,
    parameters: Temperature,
}

#[derive(Debug, Clone, PartialEq)]
enum Temperature {
    Independent(ParameterSet),
    /// Rows sorted by temperature, identical oscillator counts.
    Table(Vec<(f64, ParameterSet)>),
}

impl DielectricModel {
    pub fn constant(name: impl Into<String>, parameters: ParameterSet) -> Result<Self> {
        parameters.validate()?;
        Ok(Self {
            name: name.into(),
            parameters: Temperature::Independent(parameters),
        })
    }

    pub fn tabulated(name: impl Into<String>, mut rows: Vec<(f64, ParameterSet)>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::validation("temperature", "at least one temperature row is required"));
        }
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (i, (t, set)) in rows.iter().enumerate() {
            if !(*t > 0.0) || !t.is_finite() {
                return Err(Error::validation("temperature", format!("row temperature must be positive, got {t}")));
            }
            if i > 0 && rows[i - 1].0 == *t {
                return Err(Error::validation("temperature", format!("duplicate row for T = {t}")));
            }
            if set.oscillators.len() != rows[0].1.oscillators.len() {
                return Err(Error::validation(
                    "oscillator",
                    format!("row T = {t} has a different oscillator count"),
                ));
            }
            set.validate()?;
        }
        Ok(Self {
            name: name.into(),
            parameters: Temperature::Table(rows),
        })
    }

    /// Tabulated temperature range, `None` if temperature independent.
    pub fn temperature_range(&self) -> Option<(f64, f64)> {
        match &self.parameters {
            Temperature::Independent(_) => None,
            Temperature::Table(rows) => Some((rows[0].0, rows[rows.len() - 1].0)),
        }
    }

    /// Parameters at `temperature`, linearly interpolated between rows.
    pub fn parameters(&self, temperature: f64) -> Result<ParameterSet> {
        match &self.parameters {
            Temperature::Independent(set) => Ok(set.clone()),
            Temperature::Table(rows) => {
                let (min, max) = (rows[0].0, rows[rows.len() - 1].0);
                if !(temperature >= min && temperature <= max) {
                    return Err(Error::Extrapolation {
                        material: self.name.clone(),
                        temperature,
                        min,
                        max,
                    });
                }
                let upper = rows.partition_point(|(t, _)| *t < temperature);
                if rows[upper].0 == temperature {
                    return Ok(rows[upper].1.clone());
                }
                let (t0, lo) = &rows[upper - 1];
                let (t1, hi) = &rows[upper];
                Ok(lo.lerp(hi, (temperature - t0) / (t1 - t0)))
            }
        }
    }
}

/// Anything that supplies the dissipative surface response for the
/// non-contact friction integral.
pub trait SurfaceResponse: Send + Sync {
    fn name(&self) -> &str;

    /// `Im[(eps(omega) - 1) / (eps(omega) + 1)]`.
    fn response(&self, omega: f64, temperature: f64) -> Result<f64>;

    /// Fails if the material cannot be evaluated at `temperature`.
    fn check_temperature(&self, temperature: f64) -> Result<()>;

    /// Inverse low-frequency slope of [`SurfaceResponse::response`].
    fn characteristic_frequency(&self, temperature: f64) -> Result<f64>;

    /// Frequencies around which the response has narrow structure.
    fn features(&self, _temperature: f64) -> Result<Vec<f64>> {
        Ok(Vec::new())
    }
}

/// Complex permittivity at `omega >= 0`.
pub fn epsilon(model: &DielectricModel, omega: f64, temperature: f64) -> Result<Complex64> {
    if !(omega >= 0.0) {
        return Err(Error::Domain(format!("frequency must be non-negative, got {omega}")));
    }
    Ok(model.parameters(temperature)?.epsilon_signed(omega))
}

pub fn surface_response(model: &DielectricModel, omega: f64, temperature: f64) -> Result<f64> {
    let eps = epsilon(model, omega, temperature)?;
    Ok(((eps - 1.0) / (eps + 1.0)).im)
}

/// `Omega_0` such that the surface response is `omega / Omega_0` for small
/// `omega`, from the analytic slope of the Lorentz model.
pub fn characteristic_frequency(model: &DielectricModel, temperature: f64) -> Result<f64> {
    Ok(1.0 / model.parameters(temperature)?.response_slope())
}

impl SurfaceResponse for DielectricModel {
    fn name(&self) -> &str {
        &self.name
    }

    fn response(&self, omega: f64, temperature: f64) -> Result<f64> {
        surface_response(self, omega, temperature)
    }

    fn check_temperature(&self, temperature: f64) -> Result<()> {
        self.parameters(temperature).map(|_| ())
    }

    fn characteristic_frequency(&self, temperature: f64) -> Result<f64> {
        characteristic_frequency(self, temperature)
    }

    fn features(&self, temperature: f64) -> Result<Vec<f64>> {
        let set = self.parameters(temperature)?;
        let background = set.static_permittivity();
        let mut out = Vec::new();
        for o in &set.oscillators {
            // transverse resonance and the approximate surface mode where
            // Re eps = -1, each bracketed by a few linewidths
            let others = background - o.strength;
            let surface = o.omega * ((others + o.strength + 1.0) / (others + 1.0)).sqrt();
            for centre in [o.omega, surface] {
                for k in [-4.0, 0.0, 4.0] {
                    let w = centre + k * o.gamma;
                    if w > 0.0 {
                        out.push(w);
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Idealized surface with an exactly linear response `omega / Omega_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSurface {
    pub name: String,
    pub omega0: f64,
}

impl LinearSurface {
    pub fn new(omega0: f64) -> Result<Self> {
        if !(omega0 > 0.0) || !omega0.is_finite() {
            return Err(Error::validation("omega0", format!("must be positive, got {omega0}")));
        }
        Ok(Self {
            name: "linear".into(),
            omega0,
        })
    }
}

impl SurfaceResponse for LinearSurface {
    fn name(&self) -> &str {
        &self.name
    }

    fn response(&self, omega: f64, _temperature: f64) -> Result<f64> {
        Ok(omega / self.omega0)
    }

    fn check_temperature(&self, _temperature: f64) -> Result<()> {
        Ok(())
    }

    fn characteristic_frequency(&self, _temperature: f64) -> Result<f64> {
        Ok(self.omega0)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MaterialFile {
    meta: MaterialMeta,
    #[serde(default)]
    temperature: BTreeMap<String, RowSection>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MaterialMeta {
    name: String,
    units: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RowSection {
    eps_inf: f64,
    #[serde(default)]
    oscillator: Vec<OscillatorRecord>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OscillatorRecord {
    #[serde(rename = "S")]
    strength: f64,
    omega: f64,
    gamma: f64,
}

/// Parses a material file: `[meta]` plus `[temperature."T=<kelvin>"]` rows,
/// each with `eps_inf` and `[[temperature."T=<kelvin>".oscillator]]` entries.
pub fn load_material(source: &str) -> Result<DielectricModel> {
    let file: MaterialFile = toml::from_str(source).map_err(|e| format_error(source, e))?;
    if file.meta.units != "atomic" {
        return Err(Error::validation(
            "units",
            format!("unsupported unit convention `{}` (expected \"atomic\")", file.meta.units),
        ));
    }
    let mut rows = Vec::with_capacity(file.temperature.len());
    for (key, row) in file.temperature {
        let t: f64 = key
            .strip_prefix("T=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::validation("temperature", format!("bad row key `{key}`, expected \"T=<kelvin>\"")))?;
        let oscillators = row
            .oscillator
            .into_iter()
            .map(|o| Oscillator {
                strength: o.strength,
                omega: o.omega,
                gamma: o.gamma,
            })
            .collect();
        rows.push((t, ParameterSet::new(row.eps_inf, oscillators)?));
    }
    DielectricModel::tabulated(file.meta.name, rows)
}

pub mod bundled {
    use super::{load_material, DielectricModel};
    use crate::error::Result;

    pub const CAF2: &str = include_str!("../data/materials/caf2.toml");

    pub const NAMES: [&str; 1] = ["caf2"];

    pub fn source(name: &str) -> Option<&'static str> {
        match name {
            "caf2" => Some(CAF2),
            _ => None,
        }
    }

    pub fn material(name: &str) -> Option<Result<DielectricModel>> {
        source(name).map(load_material)
    }

    pub fn caf2() -> DielectricModel {
        load_material(CAF2).expect("bundled caf2 dataset is valid")
    }
}
