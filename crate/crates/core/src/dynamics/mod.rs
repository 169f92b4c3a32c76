//! Exact and two-level dynamics of the driven dimer, and gate extraction.

mod gate;
mod ode;
mod propagate;
mod rabi;

pub use gate::{
    cnot_fidelity, cnot_matrix, extract_gate, extract_gate_with, GateMatrix, GateResult,
    CNOT_PERMUTATION,
};
pub use ode::{DormandPrince, Tolerances};
pub use propagate::{
    basis_vector, propagate, Frame, PropagationOptions, PropagationResult, Propagator,
};
pub use rabi::{
    calibrate_pi_pulse, effective_rabi_frequency, ladder_element, pi_pulse_duration, rabi_angle,
    rabi_evolve, TwoLevelState,
};
