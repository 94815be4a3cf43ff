//! Blackbody friction, non-contact (van der Waals) friction, and the derived
//! attenuation time and damping constant.
//!
//! In atomic units (hbar = m_e = e = 4 pi eps0 = 1, c = 1/alpha_fs):
//!
//! ```text
//! eta_BB = beta / (3 pi c^5)     * int omega^5 Im alpha(omega) / sinh^2(beta omega / 2)
//! eta_QF = 3 beta / (8 pi Z^5)   * int Im alpha(omega) R(omega) / sinh^2(beta omega / 2)
//! ```
//!
//! with `R = Im[(eps - 1)/(eps + 1)]`. The one-loop part of `Im alpha` is
//! integrated numerically; tree-level delta lines are inserted exactly.

use std::f64::consts::PI;

use serde::Serialize;

use crate::atomdata::{static_polarizability, AtomSpecies};
use crate::dielectric::SurfaceResponse;
use crate::error::{Error, Result};
use crate::polarizability::{
    im_alpha_oneloop, resonant_lines, BroadeningPolicy, EvaluationMode,
};
use crate::quadrature::{sinh2_kernel, thermal_integral_window, QuadratureSpec, MIN_X_MAX};
use crate::units::{si_per_au, thermal_beta, QuantityKind, UnitSystem, CODATA_2018};

/// In strict mode the integration window ends at this fraction of the
/// lowest resonance.
pub const STRICT_FRACTION: f64 = 0.95;

/// Reference distance (in Bohr radii) at which the damping constant is
/// evaluated, and the cross-check distance.
pub const GAMMA0_DISTANCES_BOHR: [f64; 2] = [100.0, 1000.0];

/// Knobs shared by every friction evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Evaluation {
    pub mode: EvaluationMode,
    pub policy: BroadeningPolicy,
    pub quadrature: QuadratureSpec,
    /// Also treat pseudo-lines as tree-level delta lines.
    pub include_pseudo_lines: bool,
}

impl Evaluation {
    pub fn with_mode(self, mode: EvaluationMode) -> Self {
        Self { mode, ..self }
    }

    pub fn with_policy(self, policy: BroadeningPolicy) -> Self {
        Self { policy, ..self }
    }

    pub fn with_quadrature(self, quadrature: QuadratureSpec) -> Self {
        Self { quadrature, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Validity {
    /// The thermal window stayed below the first resonance.
    Strict,
    /// Poles were regularized with a finite linewidth.
    Broadened,
}

impl Validity {
    pub fn as_str(self) -> &'static str {
        match self {
            Validity::Strict => "strict",
            Validity::Broadened => "broadened",
        }
    }
}

/// A friction coefficient in both unit systems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Friction {
    /// kg/s
    pub si: f64,
    /// atomic units of mass / time
    pub au: f64,
}

impl Friction {
    pub fn from_au(au: f64) -> Self {
        Self {
            si: au * si_per_au(QuantityKind::FrictionCoefficient),
            au,
        }
    }

    pub fn from_si(si: f64) -> Self {
        Self {
            si,
            au: si / si_per_au(QuantityKind::FrictionCoefficient),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrictionResult {
    pub eta: Friction,
    pub tree_part: Friction,
    pub oneloop_part: Friction,
    /// Kelvin.
    pub temperature: f64,
    pub validity: Validity,
    /// Atom-surface distance in metres (non-contact friction only).
    pub distance: Option<f64>,
    pub material: Option<String>,
}

struct Window {
    omega_max: f64,
    breakpoints: Vec<f64>,
    validity: Validity,
}

fn thermal_window(species: &AtomSpecies, temperature: f64, beta: f64, eval: &Evaluation) -> Result<Window> {
    let x_max = eval.quadrature.x_max;
    match eval.policy {
        BroadeningPolicy::None => {
            let resonance = species.lowest_resonance();
            let reach = STRICT_FRACTION * beta * resonance;
            if eval.mode.includes_oneloop() && reach < MIN_X_MAX {
                return Err(Error::Validity {
                    temperature,
                    resonance,
                    reach,
                    required: MIN_X_MAX,
                });
            }
            Ok(Window {
                omega_max: x_max.min(reach) / beta,
                breakpoints: Vec::new(),
                validity: Validity::Strict,
            })
        }
        BroadeningPolicy::Lorentzian { gamma } => {
            let omega_max = x_max / beta;
            let mut breakpoints = Vec::new();
            for line in &species.lines {
                let w = line.resonance();
                if w < omega_max {
                    for k in [-1e3, -1e2, -1e1, -1.0, 0.0, 1.0, 1e1, 1e2, 1e3] {
                        breakpoints.push(w + k * gamma);
                    }
                }
            }
            Ok(Window {
                omega_max,
                breakpoints,
                validity: Validity::Broadened,
            })
        }
    }
}

struct Parts {
    tree: f64,
    oneloop: f64,
    validity: Validity,
}

/// `int oneloop(w) weight(w) K(beta w) dw` and `sum_m w_m weight(w_m) K(beta w_m)`.
fn thermal_parts<W>(
    species: &AtomSpecies,
    temperature: f64,
    beta: f64,
    eval: &Evaluation,
    extra_breakpoints: &[f64],
    weight: W,
) -> Result<Parts>
where
    W: Fn(f64) -> Result<f64>,
{
    let window = thermal_window(species, temperature, beta, eval)?;
    let oneloop = if eval.mode.includes_oneloop() {
        let mut breakpoints = window.breakpoints;
        breakpoints.extend_from_slice(extra_breakpoints);
        thermal_integral_window(
            |w| Ok(im_alpha_oneloop(species, w, eval.policy)? * weight(w)?),
            beta,
            window.omega_max,
            &breakpoints,
            &eval.quadrature,
        )?
        .value
    } else {
        0.0
    };
    let tree = if eval.mode.includes_tree() {
        let mut sum = 0.0;
        for line in resonant_lines(species, eval.include_pseudo_lines) {
            let kernel = sinh2_kernel(beta * line.omega);
            if kernel > 0.0 {
                sum += line.weight * weight(line.omega)? * kernel;
            }
        }
        sum
    } else {
        0.0
    };
    Ok(Parts {
        tree,
        oneloop,
        validity: window.validity,
    })
}

fn assemble(parts: Parts, prefactor: f64, temperature: f64) -> FrictionResult {
    let tree = prefactor * parts.tree;
    let oneloop = prefactor * parts.oneloop;
    FrictionResult {
        eta: Friction::from_au(tree + oneloop),
        tree_part: Friction::from_au(tree),
        oneloop_part: Friction::from_au(oneloop),
        temperature,
        validity: parts.validity,
        distance: None,
        material: None,
    }
}

/// Blackbody friction coefficient `eta_BB` at temperature `temperature` (K).
pub fn eta_bb(species: &AtomSpecies, temperature: f64, eval: &Evaluation) -> Result<FrictionResult> {
    let beta = thermal_beta(temperature, UnitSystem::Atomic)?;
    let c = CODATA_2018.c_au();
    let parts = thermal_parts(species, temperature, beta, eval, &[], |w| Ok(w.powi(5)))?;
    Ok(assemble(parts, beta / (3.0 * PI * c.powi(5)), temperature))
}

/// Attenuation time `m_A / eta_BB` in seconds; infinite when `eta_BB`
/// vanishes (underflows).
pub fn tau_bb(species: &AtomSpecies, temperature: f64, eval: &Evaluation) -> Result<f64> {
    let eta = eta_bb(species, temperature, eval)?;
    Ok(attenuation_time(species, &eta))
}

pub fn attenuation_time(species: &AtomSpecies, result: &FrictionResult) -> f64 {
    if result.eta.si > 0.0 {
        species.mass / result.eta.si
    } else {
        f64::INFINITY
    }
}

/// Non-contact friction coefficient `eta_QF` at distance `distance` (m)
/// from `surface`.
pub fn eta_qf(
    species: &AtomSpecies,
    surface: &dyn SurfaceResponse,
    temperature: f64,
    distance: f64,
    eval: &Evaluation,
) -> Result<FrictionResult> {
    if !(distance > 0.0) || !distance.is_finite() {
        return Err(Error::Domain(format!("distance must be positive, got {distance} m")));
    }
    let beta = thermal_beta(temperature, UnitSystem::Atomic)?;
    surface.check_temperature(temperature)?;
    let features = surface.features(temperature)?;
    let z = distance / CODATA_2018.a0;
    let parts = thermal_parts(species, temperature, beta, eval, &features, |w| {
        surface.response(w, temperature)
    })?;
    let mut result = assemble(parts, 3.0 * beta / (8.0 * PI * z.powi(5)), temperature);
    result.distance = Some(distance);
    result.material = Some(surface.name().to_string());
    Ok(result)
}

/// Distance-normalized damping constant in 1/s.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DampingConstant {
    pub temperature: f64,
    pub gamma0: f64,
    pub tree_part: f64,
    pub oneloop_part: f64,
    pub validity: Validity,
}

/// `gamma0 = (eta_QF / m_A) (Z / a0)^5`, evaluated at two distances whose
/// agreement is asserted.
pub fn gamma0(
    species: &AtomSpecies,
    surface: &dyn SurfaceResponse,
    temperature: f64,
    eval: &Evaluation,
) -> Result<DampingConstant> {
    let rate = si_per_au(QuantityKind::Rate);
    let mass = species.mass_au();
    let mut values = Vec::with_capacity(2);
    for z in GAMMA0_DISTANCES_BOHR {
        let r = eta_qf(species, surface, temperature, z * CODATA_2018.a0, eval)?;
        let scale = z.powi(5) / mass * rate;
        values.push(DampingConstant {
            temperature,
            gamma0: r.eta.au * scale,
            tree_part: r.tree_part.au * scale,
            oneloop_part: r.oneloop_part.au * scale,
            validity: r.validity,
        });
    }
    let (near, far) = (&values[0], &values[1]);
    assert!(
        (near.gamma0 - far.gamma0).abs() <= 1e-10 * near.gamma0.abs(),
        "gamma0 depends on distance: {} vs {}",
        near.gamma0,
        far.gamma0
    );
    Ok(values.swap_remove(0))
}

/// Low-temperature closed form evaluated through its SI and its
/// atomic-unit expression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Asymptotic {
    /// From the expression written with `alpha(0)` in SI.
    pub si_form: Friction,
    /// From the expression written with the reduced (a.u.) `alpha(0)`.
    pub au_form: Friction,
}

/// `eta_BB ~ 32 pi^5 alpha(0)^2 / (135 hbar^7 eps0^2 c^8 beta^8)`.
pub fn eta_bb_asymptotic(species: &AtomSpecies, temperature: f64) -> Result<Asymptotic> {
    eta_bb_asymptotic_for(static_polarizability(species), temperature)
}

pub fn eta_bb_asymptotic_for(alpha0_au: f64, temperature: f64) -> Result<Asymptotic> {
    let k = CODATA_2018;
    let beta = thermal_beta(temperature, UnitSystem::Si)?;
    let alpha_si = alpha0_au * si_per_au(QuantityKind::Polarizability);
    let si = 32.0 * PI.powi(5) * alpha_si * alpha_si
        / (135.0 * k.hbar.powi(7) * k.eps0 * k.eps0 * k.c.powi(8) * beta.powi(8));
    let au = 512.0 * PI.powi(7) * alpha0_au * alpha0_au
        / (135.0 * k.alpha_fs.powi(6) * k.hbar * k.m_e.powi(6) * k.c.powi(14) * beta.powi(8));
    Ok(Asymptotic {
        si_form: Friction::from_si(si),
        au_form: Friction::from_si(au),
    })
}

/// `eta_QF ~ pi alpha(0)^2 / (60 hbar^3 eps0^2 c^3 Omega0 Z^5 beta^4)`.
pub fn eta_qf_asymptotic(
    species: &AtomSpecies,
    surface: &dyn SurfaceResponse,
    temperature: f64,
    distance: f64,
) -> Result<Asymptotic> {
    let omega0 = surface.characteristic_frequency(temperature)?;
    eta_qf_asymptotic_for(static_polarizability(species), omega0, temperature, distance)
}

/// As [`eta_qf_asymptotic`] with explicit `alpha(0)` (a.u.) and
/// `Omega0` (a.u.).
pub fn eta_qf_asymptotic_for(
    alpha0_au: f64,
    omega0_au: f64,
    temperature: f64,
    distance: f64,
) -> Result<Asymptotic> {
    if !(distance > 0.0) {
        return Err(Error::Domain(format!("distance must be positive, got {distance} m")));
    }
    if !(omega0_au > 0.0) || !omega0_au.is_finite() {
        return Err(Error::Domain(format!("characteristic frequency must be finite and positive, got {omega0_au}")));
    }
    let k = CODATA_2018;
    let beta = thermal_beta(temperature, UnitSystem::Si)?;
    let omega0 = omega0_au * si_per_au(QuantityKind::AngularFrequency);
    let alpha_si = alpha0_au * si_per_au(QuantityKind::Polarizability);
    let si = PI * alpha_si * alpha_si
        / (60.0 * k.hbar.powi(3) * k.eps0 * k.eps0 * k.c.powi(3) * omega0 * distance.powi(5) * beta.powi(4));
    let au = 4.0 * PI.powi(3) * k.hbar.powi(3) * alpha0_au * alpha0_au
        / (15.0
            * k.alpha_fs.powi(6)
            * k.m_e.powi(6)
            * k.c.powi(9)
            * omega0
            * distance.powi(5)
            * beta.powi(4));
    Ok(Asymptotic {
        si_form: Friction::from_si(si),
        au_form: Friction::from_si(au),
    })
}

/// Temperature (K) at which the tree-level part of `eta_BB` first exceeds
/// the one-loop part, located by bisection in `ln T` inside `[t_lo, t_hi]`.
///
/// Requires a broadened policy once the thermal window reaches the first
/// resonance.
pub fn tree_oneloop_crossover(
    species: &AtomSpecies,
    t_lo: f64,
    t_hi: f64,
    eval: &Evaluation,
    rel_precision: f64,
) -> Result<f64> {
    let excess = |t: f64| -> Result<f64> {
        let r = eta_bb(species, t, &eval.with_mode(EvaluationMode::Total))?;
        // log ratio tolerates the underflowed tree part at low T
        Ok(r.tree_part.au.max(f64::MIN_POSITIVE).ln() - r.oneloop_part.au.max(f64::MIN_POSITIVE).ln())
    };
    let (mut lo, mut hi) = (t_lo, t_hi);
    let (f_lo, f_hi) = (excess(lo)?, excess(hi)?);
    if !(f_lo < 0.0 && f_hi > 0.0) {
        return Err(Error::Domain(format!(
            "no tree/one-loop crossover bracketed in [{t_lo}, {t_hi}] K \
             (log ratios {f_lo:.3} and {f_hi:.3})"
        )));
    }
    while hi / lo - 1.0 > rel_precision {
        let mid = (lo * hi).sqrt();
        if excess(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo * hi).sqrt())
}
