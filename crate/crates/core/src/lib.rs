//! Imaginary dynamic polarizability of atoms and the friction it causes:
//! blackbody friction in a thermal radiation field and non-contact
//! (van der Waals) friction near a dielectric surface.
//!
//! All internal arithmetic is in Hartree atomic units. SI appears only at
//! the edges, through [`units`].

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atomdata;
pub mod dielectric;
pub mod error;
pub mod friction;
pub mod polarizability;
pub mod quadrature;
pub mod sweep;
pub mod units;

pub use atomdata::{load_atom, AtomSpecies, LineKind, TransitionLine};
pub use dielectric::{load_material, DielectricModel, LinearSurface, SurfaceResponse};
pub use error::{Error, Result};
pub use friction::{eta_bb, eta_qf, gamma0, tau_bb, Evaluation, FrictionResult, Validity};
pub use polarizability::{alpha, im_alpha_oneloop, BroadeningPolicy, EvaluationMode};
pub use quadrature::QuadratureSpec;
pub use units::{PhysicalConstants, Quantity, QuantityKind, UnitSystem, CODATA_2018};
