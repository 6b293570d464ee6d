//! Simulation and verification of motional quantum error correction in a
//! trapped ion.
//!
//! A logical qubit lives in the two-quanta-per-mode code space of a
//! two-dimensional ion oscillator. Quantum jumps of the motion are detected
//! with number-sensitive Raman entanglers and cavity photon readout, and undone
//! with adiabatic passages. Units: `ħ = 1`, every rate or frequency is an
//! angular frequency in s⁻¹.

pub mod cli;
pub mod config;
pub mod dynamics;
pub mod encoding;
pub mod error;
pub mod hilbert;
pub mod protocol;
pub mod raman;
pub mod restore;
pub mod syndrome;

pub use error::{Error, Result};
