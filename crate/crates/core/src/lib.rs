//! Model of a current-biased dc-SQUID whose two suspended loop segments act as
//! nanomechanical resonators, and of the two-mode squeezing they undergo when
//! the SQUID is driven at the sum frequency of the resonators.
//!
//! The crate is split along the computational routes it offers:
//!
//! * [`device`] turns SI device parameters into the effective coupling
//!   constants and evaluates the SQUID potential landscape.
//! * [`rwa`] expands the SQUID/resonator interaction into normal-ordered
//!   terms, classifies them by rotating frequency and applies rotating-wave
//!   selection.
//! * [`ideal`] holds the lossless Bogoliubov dynamics in closed form.
//! * [`langevin`] integrates the damped moment equations and provides the
//!   closed-form steady state.
//! * [`oracle`] is an independent brute-force check on a truncated Fock space.
//!
//! All energies are stored as angular frequencies (E/ħ, rad/s).

pub mod constants;
pub mod device;
pub mod error;
pub mod ideal;
pub mod langevin;
pub mod moments;
pub mod ode;
pub mod oracle;
pub mod rwa;

pub use error::{Error, Result};
