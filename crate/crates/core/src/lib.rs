//! Simulation of a controlled-NOT gate in a dimer of exchange-coupled
//! `S = 9/2` single-molecule magnets.
//!
//! The crate is layered bottom-up: [`spin`] builds angular-momentum
//! operators and the labelled product basis, [`model`] the dimer
//! Hamiltonian and its analytic spectrum, [`perturbation`] first-order
//! transition amplitudes for a rectangular rotating pulse, and [`dynamics`]
//! exact time-domain propagation and gate extraction.

pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod model;
pub mod perturbation;
pub mod spin;

pub use dynamics::{Frame, GateResult, PropagationOptions};
pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector};
pub use model::{ComputingBasis, ModelParams, PhysicalConstants};
pub use perturbation::PulseParams;
pub use spin::{DimerBasis, ProductState, SpinOperatorSet, SpinQuantumNumber};
