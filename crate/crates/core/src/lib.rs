//! Off-resonant Raman photon-echo quantum memory with scalable time reversal.
//!
//! Units: the storage control Rabi frequency Ω₁,₀ and the group velocity are 1.
//! Everything else (detunings, rates, times, lengths) is a ratio to those.

pub mod config;
pub mod efficiency;
pub mod envelope;
pub mod error;
pub mod mbsolver;
pub mod ode;
pub mod params;
pub mod pipeline;
pub mod quad;
pub mod specfun;
pub mod str_verifier;
pub mod sweep;
pub mod switching;

pub use error::{Error, Result};
