//! Resonance Casimir-Polder interaction (RCPI) between two entangled static
//! two-level atoms coupled to a conformally coupled massless scalar field.
//!
//! Two backgrounds are supported: the static patch of de Sitter spacetime and
//! Minkowski spacetime filled with a thermal bath. The crate covers the whole
//! chain from geometry and Wightman functions through the Kossakowski-Lindblad
//! generator to the closed-form and quadrature interaction energies, plus a
//! power-law discriminator that tells the two universes apart from a sweep of
//! interaction energies.
//!
//! Natural units throughout (ħ = c = k_B = 1). Every length is a multiple of
//! one reference length chosen by the caller; frequencies and temperatures are
//! in inverse reference lengths.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod correlators;
pub mod discriminator;
pub mod error;
pub mod geometry;
pub mod liouvillian;
mod ode;
pub mod parallel;
pub mod quadrature;
pub mod shifts;
pub mod spectral;

pub use error::{Error, Result};
pub use geometry::{DeSitterPatch, Spacetime, ThermalBath};
pub use shifts::{DickeState, Method, ShiftResult};
