//! Reduction of propagated trajectories to a 4×4 operator on the computing
//! basis and its comparison against CNOT.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dynamics::propagate::{basis_vector, PropagationOptions, Propagator};
use crate::error::Result;
use crate::model::{analytic_energy, kelvin_to_angular, ComputingBasis, ModelParams};
use crate::perturbation::PulseParams;

/// Image of logical input `k` under CNOT with the first unit as control.
pub const CNOT_PERMUTATION: [usize; 4] = [0, 1, 3, 2];

pub type GateMatrix = [[Complex64; 4]; 4];

pub fn cnot_matrix() -> GateMatrix {
    let mut u = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (k, &row) in CNOT_PERMUTATION.iter().enumerate() {
        u[row][k] = Complex64::new(1.0, 0.0);
    }
    u
}

#[derive(Clone, Debug, PartialEq)]
pub struct GateResult {
    /// `matrix[j][k] = <j| U_I |k>` over `a, b, c, d`.
    pub matrix: GateMatrix,
    pub leakage_per_state: [f64; 4],
    pub truth_table_fidelity: f64,
    pub phase_aware_fidelity: f64,
}

impl GateResult {
    pub fn from_matrix(matrix: GateMatrix) -> Self {
        let leakage_per_state = std::array::from_fn(|k| {
            let kept: f64 = (0..4).map(|j| matrix[j][k].norm_sqr()).sum();
            (1.0 - kept).clamp(0.0, 1.0)
        });
        let (truth_table_fidelity, phase_aware_fidelity) = fidelities(&matrix);
        Self {
            matrix,
            leakage_per_state,
            truth_table_fidelity,
            phase_aware_fidelity,
        }
    }

    /// Probability that input `k` lands on its CNOT image.
    pub fn truth_table_probability(&self, k: usize) -> f64 {
        self.matrix[CNOT_PERMUTATION[k]][k].norm_sqr()
    }
}

fn fidelities(u: &GateMatrix) -> (f64, f64) {
    let truth = (0..4)
        .map(|k| u[CNOT_PERMUTATION[k]][k].norm_sqr())
        .sum::<f64>()
        / 4.0;
    // Tr(CNOT† U) split by control sector; maximising over one free phase per
    // sector leaves the sum of the sector moduli.
    let sector_trace =
        |ks: [usize; 2]| -> Complex64 { ks.iter().map(|&k| u[CNOT_PERMUTATION[k]][k]).sum() };
    let phase = (sector_trace([0, 1]).norm() + sector_trace([2, 3]).norm()) / 4.0;
    (truth, phase.min(1.0))
}

/// `(truth_table_fidelity, phase_aware_fidelity)`.
pub fn cnot_fidelity(gate: &GateResult) -> (f64, f64) {
    fidelities(&gate.matrix)
}

/// Propagates each computing state through the pulse and projects back onto
/// the computing subspace in the interaction picture of `H₀`:
/// `G[j][k] = e^{iE_j t₁} <j|U|k> e^{-iE_k t₀}`.
pub fn extract_gate(params: &ModelParams, pulse: &PulseParams) -> Result<GateResult> {
    extract_gate_with(params, pulse, PropagationOptions::default())
}

pub fn extract_gate_with(
    params: &ModelParams,
    pulse: &PulseParams,
    options: PropagationOptions,
) -> Result<GateResult> {
    let propagator = Propagator::new(params, pulse, options)?;
    let cb = ComputingBasis::new(params.spin);
    let states = cb.states();
    let energies: Vec<f64> = states
        .iter()
        .map(|s| kelvin_to_angular(analytic_energy(params, s)))
        .collect();
    let (t0, t1) = (pulse.start(), pulse.end());

    let finals = states
        .par_iter()
        .map(|s| {
            propagator
                .propagate(&basis_vector(params, s))
                .map(|r| r.final_state)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut matrix = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (k, psi) in finals.iter().enumerate() {
        for (j, s) in states.iter().enumerate() {
            let phase = energies[j] * t1 - energies[k] * t0;
            matrix[j][k] = psi[s.index()] * Complex64::from_polar(1.0, phase);
        }
    }
    Ok(GateResult::from_matrix(matrix))
}
