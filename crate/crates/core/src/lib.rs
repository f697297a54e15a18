//! Storage and regeneration of optical pulses in a three-level Λ medium.
//!
//! The crate solves the coupled atom/field system in the retarded frame two
//! ways: an adiabatic traveling-wave construction that reduces propagation
//! to a flux integral, and a direct numerical march of the full equations.
//! Closed-form revival estimates and comparison diagnostics sit on top.

pub mod adiabatic;
pub mod bloch;
pub mod cli;
pub mod diagnostics;
pub mod erf;
pub mod error;
pub mod io;
pub mod model;
pub mod revival;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use model::{GridSpec, MediumParams, PulsePair, PulseShape};
