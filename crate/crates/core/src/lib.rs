//! Thermal Casimir interaction between two parallel semispaces.
//!
//! The free energy per unit area is evaluated from the Lifshitz formula as a
//! Matsubara sum of semi-infinite integrals, with reflection coefficients
//! taken either from a permittivity ε(iζ) or from a surface impedance Z(iζ).
//! On top of that sit finite-difference entropy and pressure, a low-temperature
//! asymptotic expansion, and diagnostics for the third law of thermodynamics.
//!
//! Internally everything is in natural units (k_B = ħ = c = 1) with the metre
//! as base unit; see [`quantities`] for the conversions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod error;
pub mod lifshitz;
pub mod materials;
pub mod quadrature;
pub mod quantities;
pub mod thermo;

pub use error::{CasimirError, Result};
pub use lifshitz::{free_energy, FreeEnergyResult, Geometry, MatsubaraGrid};
pub use materials::{
    DielectricModel, DrudeParams, ImpedanceModel, MaterialResponse, RelaxationModel,
};
pub use thermo::{
    entropy, pressure, EntropyResult, Monotonicity, MonotonicityReport, PressureResult,
};
