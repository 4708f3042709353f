//! Frequency estimation with coherence trapping.
//!
//! A probe qubit and an ancilla qubit share a damped bosonic mode. When the
//! two qubits are resonant, part of the probe coherence survives forever and
//! can be used for long Ramsey interrogations. This crate provides
//!
//! - [`quantum`]: dense complex matrices, composite spaces and states,
//! - [`lindblad`]: the probe/mode and probe/ancilla/mode master equations and
//!   an RK4 integrator,
//! - [`analytic`]: closed-form decoherence functions and the amplitude ODE,
//! - [`metrology`]: Cramér–Rao and Ramsey precision functionals,
//! - [`ions`]: equilibrium positions, normal modes and couplings of a mixed
//!   species ion chain,
//! - [`experiments`]: configuration-driven scenarios that produce CSV tables.

pub mod analytic;
pub mod error;
pub mod experiments;
pub mod ions;
pub mod lindblad;
pub mod metrology;
pub mod quantum;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
