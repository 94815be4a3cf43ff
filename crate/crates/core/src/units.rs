//! Physical constants and SI <-> Hartree atomic unit conversion.
//!
//! Every conversion factor in the crate is derived from [`CODATA_2018`].
//! The exact SI defining constants and the two measured inputs (electron
//! mass, fine-structure constant) are stored; vacuum permittivity, Bohr
//! radius and Hartree energy follow from them, so the usual identities
//! (`a0 = hbar / (m_e c alpha)` and friends) hold to rounding.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// A record of fundamental constants in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalConstants {
    /// Speed of light (m/s).
    pub c: f64,
    /// Reduced Planck constant (J s).
    pub hbar: f64,
    /// Elementary charge (C).
    pub e_charge: f64,
    /// Electron mass (kg).
    pub m_e: f64,
    /// Vacuum permittivity (F/m).
    pub eps0: f64,
    /// Boltzmann constant (J/K).
    pub k_b: f64,
    /// Fine-structure constant.
    pub alpha_fs: f64,
    /// Bohr radius (m).
    pub a0: f64,
    /// Hartree energy (J).
    pub hartree: f64,
    /// Unified atomic mass unit (kg).
    pub amu: f64,
}

const PLANCK_H: f64 = 6.626_070_15e-34;
const HBAR: f64 = PLANCK_H / (2.0 * PI);
const C: f64 = 299_792_458.0;
const E_CHARGE: f64 = 1.602_176_634e-19;
const M_E: f64 = 9.109_383_701_5e-31;
const ALPHA_FS: f64 = 7.297_352_569_3e-3;

/// CODATA 2018 recommended values.
pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
    c: C,
    hbar: HBAR,
    e_charge: E_CHARGE,
    m_e: M_E,
    eps0: E_CHARGE * E_CHARGE / (4.0 * PI * ALPHA_FS * HBAR * C),
    k_b: 1.380_649e-23,
    alpha_fs: ALPHA_FS,
    a0: HBAR / (M_E * C * ALPHA_FS),
    hartree: ALPHA_FS * ALPHA_FS * M_E * C * C,
    amu: 1.660_539_066_60e-27,
};

/// Label written into output provenance headers.
pub const CONSTANTS_VERSION: &str = "CODATA-2018";

impl PhysicalConstants {
    /// Speed of light in atomic units (`1 / alpha_fs`).
    pub fn c_au(&self) -> f64 {
        1.0 / self.alpha_fs
    }

    /// SI magnitude of one atomic unit of `kind`.
    pub fn atomic_unit(&self, kind: QuantityKind) -> f64 {
        match kind {
            QuantityKind::Energy => self.hartree,
            QuantityKind::AngularFrequency | QuantityKind::Rate => self.hartree / self.hbar,
            QuantityKind::Polarizability => 4.0 * PI * self.eps0 * self.a0.powi(3),
            QuantityKind::FrictionCoefficient => self.m_e * self.hartree / self.hbar,
            QuantityKind::Length => self.a0,
            QuantityKind::Mass => self.m_e,
            QuantityKind::Temperature => self.hartree / self.k_b,
            QuantityKind::Time => self.hbar / self.hartree,
        }
    }
}

/// Physical dimension of a [`Quantity`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QuantityKind {
    Energy,
    AngularFrequency,
    Polarizability,
    FrictionCoefficient,
    Length,
    Mass,
    Temperature,
    Rate,
    Time,
}

impl FromStr for QuantityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "energy" => Self::Energy,
            "angular_frequency" => Self::AngularFrequency,
            "polarizability" => Self::Polarizability,
            "friction_coefficient" => Self::FrictionCoefficient,
            "length" => Self::Length,
            "mass" => Self::Mass,
            "temperature" => Self::Temperature,
            "rate" => Self::Rate,
            "time" => Self::Time,
            other => {
                return Err(Error::ConversionNotDefined(format!(
                    "unknown quantity kind `{other}`"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitSystem {
    Si,
    Atomic,
}

impl fmt::Display for UnitSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UnitSystem::Si => "SI",
            UnitSystem::Atomic => "atomic",
        })
    }
}

/// A value tagged with its dimension and unit system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quantity {
    pub value: f64,
    pub kind: QuantityKind,
    pub system: UnitSystem,
}

impl Quantity {
    pub fn si(value: f64, kind: QuantityKind) -> Self {
        Self {
            value,
            kind,
            system: UnitSystem::Si,
        }
    }

    pub fn atomic(value: f64, kind: QuantityKind) -> Self {
        Self {
            value,
            kind,
            system: UnitSystem::Atomic,
        }
    }
}

/// Expresses an SI quantity in Hartree atomic units.
pub fn to_atomic(q: Quantity) -> Result<Quantity> {
    if q.system != UnitSystem::Si {
        return Err(Error::ConversionNotDefined(format!(
            "to_atomic expects an SI quantity, got {} {:?}",
            q.system, q.kind
        )));
    }
    Ok(Quantity::atomic(
        q.value / CODATA_2018.atomic_unit(q.kind),
        q.kind,
    ))
}

/// Expresses an atomic-unit quantity in SI.
pub fn from_atomic(q: Quantity) -> Result<Quantity> {
    if q.system != UnitSystem::Atomic {
        return Err(Error::ConversionNotDefined(format!(
            "from_atomic expects an atomic-unit quantity, got {} {:?}",
            q.system, q.kind
        )));
    }
    Ok(Quantity::si(
        q.value * CODATA_2018.atomic_unit(q.kind),
        q.kind,
    ))
}

/// Inverse thermal energy `1 / (k_B T)` for `temperature` in kelvin.
///
/// In SI the result is in 1/J, in atomic units in 1/hartree.
pub fn thermal_beta(temperature: f64, system: UnitSystem) -> Result<f64> {
    if !(temperature > 0.0) || !temperature.is_finite() {
        return Err(Error::Domain(format!(
            "temperature must be positive and finite, got {temperature} K"
        )));
    }
    let beta_si = 1.0 / (CODATA_2018.k_b * temperature);
    Ok(match system {
        UnitSystem::Si => beta_si,
        UnitSystem::Atomic => beta_si * CODATA_2018.hartree,
    })
}

/// SI value of one atomic unit of `kind`.
pub fn si_per_au(kind: QuantityKind) -> f64 {
    CODATA_2018.atomic_unit(kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    const KINDS: [QuantityKind; 9] = [
        QuantityKind::Energy,
        QuantityKind::AngularFrequency,
        QuantityKind::Polarizability,
        QuantityKind::FrictionCoefficient,
        QuantityKind::Length,
        QuantityKind::Mass,
        QuantityKind::Temperature,
        QuantityKind::Rate,
        QuantityKind::Time,
    ];

    #[test]
    fn constant_identities() {
        let k = CODATA_2018;
        assert!(rel(k.a0, k.hbar / (k.m_e * k.c * k.alpha_fs)) < 1e-9);
        assert!(rel(k.hartree, k.alpha_fs.powi(2) * k.m_e * k.c * k.c) < 1e-9);
        assert!(
            rel(
                k.alpha_fs,
                k.e_charge.powi(2) / (4.0 * PI * k.eps0 * k.hbar * k.c)
            ) < 1e-9
        );
    }

    #[test]
    fn derived_constants_match_tabulated_values() {
        // Tabulated CODATA 2018 values of the derived constants.
        assert!(rel(CODATA_2018.eps0, 8.854_187_812_8e-12) < 1e-9);
        assert!(rel(CODATA_2018.a0, 5.291_772_109_03e-11) < 1e-9);
        assert!(rel(CODATA_2018.hartree, 4.359_744_722_207_1e-18) < 1e-9);
        assert!(rel(CODATA_2018.hbar, 1.054_571_817e-34) < 1e-9);
    }

    #[test]
    fn polarizability_unit() {
        let au = to_atomic(Quantity::si(1.648_777e-41, QuantityKind::Polarizability)).unwrap();
        assert!(rel(au.value, 1.0) < 1e-6);
        let si = from_atomic(Quantity::atomic(1.0, QuantityKind::Polarizability)).unwrap();
        assert!(rel(si.value, 1.648_777_274e-41) < 1e-8);
    }

    #[test]
    fn energy_and_frequency_units() {
        let e = to_atomic(Quantity::si(4.359_744e-18, QuantityKind::Energy)).unwrap();
        assert!(rel(e.value, 1.0) < 1e-6);
        let w = from_atomic(Quantity::atomic(1.0, QuantityKind::AngularFrequency)).unwrap();
        assert!(rel(w.value, 4.134_137e16) < 1e-6);
    }

    #[test]
    fn zero_maps_to_zero() {
        for kind in KINDS {
            assert_eq!(to_atomic(Quantity::si(0.0, kind)).unwrap().value, 0.0);
            assert_eq!(from_atomic(Quantity::atomic(0.0, kind)).unwrap().value, 0.0);
        }
    }

    #[test]
    fn wrong_system_or_kind_is_rejected() {
        assert!(matches!(
            to_atomic(Quantity::atomic(1.0, QuantityKind::Mass)),
            Err(Error::ConversionNotDefined(_))
        ));
        assert!(matches!(
            from_atomic(Quantity::si(1.0, QuantityKind::Mass)),
            Err(Error::ConversionNotDefined(_))
        ));
        assert!(matches!(
            "luminosity".parse::<QuantityKind>(),
            Err(Error::ConversionNotDefined(_))
        ));
        assert_eq!(
            "friction_coefficient".parse::<QuantityKind>().unwrap(),
            QuantityKind::FrictionCoefficient
        );
    }

    #[test]
    fn beta_at_room_temperature() {
        let b = thermal_beta(298.0, UnitSystem::Atomic).unwrap();
        // hartree / (k_B * 298 K) = 4.3597447222071e-18 / (1.380649e-23 * 298)
        assert!(rel(b, 1_059.647_734) < 1e-8, "{b}");
        let b_si = thermal_beta(298.0, UnitSystem::Si).unwrap();
        assert!(rel(b_si * CODATA_2018.hartree, b) < 1e-14);
    }

    #[test]
    fn beta_scaling_and_domain() {
        let b1 = thermal_beta(149.0, UnitSystem::Atomic).unwrap();
        let b2 = thermal_beta(298.0, UnitSystem::Atomic).unwrap();
        assert!(rel(b2, b1 / 2.0) < 1e-15);
        let mut last = f64::INFINITY;
        for t in [1.0, 10.0, 1e3, 1e6, 1e12] {
            let b = thermal_beta(t, UnitSystem::Atomic).unwrap();
            assert!(b < last);
            last = b;
        }
        assert!(matches!(thermal_beta(0.0, UnitSystem::Si), Err(Error::Domain(_))));
        assert!(matches!(thermal_beta(-3.0, UnitSystem::Si), Err(Error::Domain(_))));
    }

    proptest! {
        #[test]
        fn round_trip(value in -1e30f64..1e30, idx in 0usize..9) {
            let kind = KINDS[idx];
            let q = Quantity::si(value, kind);
            let back = from_atomic(to_atomic(q).unwrap()).unwrap();
            prop_assert!(back.kind == kind && back.system == UnitSystem::Si);
            if value != 0.0 {
                prop_assert!(rel(back.value, value) < 1e-12);
            }
        }
    }
}
