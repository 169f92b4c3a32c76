//! Time-domain propagation of the full dimer under the rotating transverse
//! pulse.
//!
//! The lab-frame Hamiltonian is
//! `H(t) = H_dimer - (Ω₀/2)(e^{iωt} S+ + e^{-iωt} S-)` (angular units,
//! `Ω₀ = g μB B⊥ / ħ`). Since `H_dimer` conserves total `Sz`, the unitary
//! `exp(-iω Sz t)` maps it exactly onto the static rotating-frame generator
//! `H_dimer + ω Sz - (Ω₀/2)(S+ + S-)`, which is propagated by
//! diagonalisation. The lab frame is integrated directly with adaptive
//! Dormand–Prince stepping in the interaction picture of `H_dimer`.

use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::ode::{DormandPrince, Tolerances};
use crate::error::{invalid, Error, Result};
use crate::linalg::{c, eigendecompose, CMatrix, CVector, Eigensystem};
use crate::model::{h_full, kelvin_to_angular, ModelParams};
use crate::perturbation::PulseParams;
use crate::spin::{DimerOperators, ProductState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    Lab,
    Rotating,
}

impl std::str::FromStr for Frame {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lab" => Ok(Frame::Lab),
            "rotating" | "rot" => Ok(Frame::Rotating),
            other => Err(invalid("frame", format!("unknown frame `{other}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PropagationOptions {
    pub frame: Frame,
    /// Number of equally spaced output times over the pulse, endpoints
    /// included.
    pub samples: usize,
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Largest tolerated `| ‖ψ‖ - 1 |` at any accepted step.
    pub norm_tolerance: f64,
    /// Restrict all couplings to these labels; other levels keep only their
    /// diagonal energy.
    pub subspace: Option<Vec<ProductState>>,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        Self {
            frame: Frame::Rotating,
            samples: 2,
            rtol: 1e-11,
            atol: 1e-13,
            max_steps: 50_000_000,
            norm_tolerance: 1e-9,
            subspace: None,
        }
    }
}

impl PropagationOptions {
    pub fn frame(mut self, frame: Frame) -> Self {
        self.frame = frame;
        self
    }

    pub fn samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn subspace(mut self, states: Vec<ProductState>) -> Self {
        self.subspace = Some(states);
        self
    }
}

#[derive(Clone, Debug)]
pub struct PropagationResult {
    /// Seconds, over `(-T/2, T/2)`.
    pub times: Vec<f64>,
    /// Labels of the population columns, in basis order.
    pub labels: Vec<ProductState>,
    pub populations: Vec<Vec<f64>>,
    /// Lab-frame state at each sample time.
    pub states: Vec<CVector>,
    pub final_state: CVector,
    pub max_norm_drift: f64,
    /// Accepted integrator steps (zero for the rotating frame).
    pub steps: usize,
}

/// Unit vector on a product state.
pub fn basis_vector(params: &ModelParams, state: &ProductState) -> CVector {
    let mut v = CVector::zeros(params.basis().dim());
    v[state.index()] = c(1.0);
    v
}

/// One entry `P[row, col]` of the raising operator in the eigenbasis.
#[derive(Clone, Copy, Debug)]
struct Coupling {
    row: usize,
    col: usize,
    value: Complex64,
}

enum Engine {
    Rotating {
        eig: Eigensystem,
    },
    Lab {
        /// Columns are `H_dimer` eigenvectors grouped by total-`Sz` sector.
        vectors: CMatrix,
        energies: Vec<f64>,
        /// `W† S+ W` restricted to structurally non-zero entries.
        raising: Vec<Coupling>,
        max_frequency: f64,
    },
}

/// Prepared propagator for one model, pulse and frame.
pub struct Propagator {
    params: ModelParams,
    pulse: PulseParams,
    options: PropagationOptions,
    labels: Vec<ProductState>,
    /// Doubled total `Sz` per basis index.
    twice_m: Vec<i32>,
    engine: Engine,
}

fn masked(op: &CMatrix, keep: &[bool]) -> CMatrix {
    CMatrix::from_fn(op.nrows(), op.ncols(), |i, j| {
        if i == j || (keep[i] && keep[j]) {
            op[(i, j)]
        } else {
            c(0.0)
        }
    })
}

impl Propagator {
    pub fn new(
        params: &ModelParams,
        pulse: &PulseParams,
        options: PropagationOptions,
    ) -> Result<Self> {
        params.validate()?;
        pulse.validate()?;
        if options.samples < 2 {
            return Err(invalid("samples", "need at least 2 output times"));
        }
        let tol_ok = |v: f64| v.is_finite() && v > 0.0;
        if !(tol_ok(options.rtol) && tol_ok(options.atol) && tol_ok(options.norm_tolerance)) {
            return Err(invalid("tolerance", "must be finite and positive"));
        }

        let basis = params.basis();
        let n = basis.dim();
        let labels: Vec<ProductState> = basis.states().collect();
        let twice_m: Vec<i32> = labels.iter().map(|s| s.twice_total_m()).collect();
        let keep: Vec<bool> = match &options.subspace {
            None => vec![true; n],
            Some(states) => {
                let mut keep = vec![false; n];
                for s in states {
                    if s.index() >= n {
                        return Err(Error::IndexOutOfRange {
                            index: s.index(),
                            dim: n,
                        });
                    }
                    keep[s.index()] = true;
                }
                keep
            }
        };

        let ops = DimerOperators::new(params.spin);
        let h_dimer = masked(&h_full(params)?, &keep) * c(kelvin_to_angular(1.0));
        let raising = masked(&ops.s_plus_total(), &keep);
        let half_rabi = 0.5 * pulse.bare_rabi_frequency(params);

        let engine = match options.frame {
            Frame::Rotating => {
                let mut h_rot = &h_dimer - (&raising + raising.adjoint()) * c(half_rabi);
                for (i, tm) in twice_m.iter().enumerate() {
                    h_rot[(i, i)] += c(0.5 * f64::from(*tm) * pulse.omega);
                }
                Engine::Rotating {
                    eig: eigendecompose(&h_rot)?,
                }
            }
            Frame::Lab => {
                let (vectors, energies, sector) = sector_eigensystem(&h_dimer, &twice_m)?;
                let p = vectors.adjoint() * &raising * &vectors;
                let mut couplings = Vec::new();
                let mut max_frequency = pulse.omega.abs();
                for row in 0..n {
                    for col in 0..n {
                        let value = p[(row, col)];
                        if sector[row] == sector[col] + 2 && value != c(0.0) {
                            couplings.push(Coupling { row, col, value });
                            let f = (energies[row] - energies[col] + pulse.omega).abs();
                            max_frequency = max_frequency.max(f);
                        }
                    }
                }
                Engine::Lab {
                    vectors,
                    energies,
                    raising: couplings,
                    max_frequency,
                }
            }
        };

        Ok(Self {
            params: *params,
            pulse: *pulse,
            options,
            labels,
            twice_m,
            engine,
        })
    }

    pub fn options(&self) -> &PropagationOptions {
        &self.options
    }

    pub fn sample_times(&self) -> Vec<f64> {
        let (t0, t1) = (self.pulse.start(), self.pulse.end());
        let n = self.options.samples;
        (0..n)
            .map(|k| {
                if k + 1 == n {
                    t1
                } else {
                    t0 + (t1 - t0) * (k as f64) / ((n - 1) as f64)
                }
            })
            .collect()
    }

    pub fn propagate(&self, psi0: &CVector) -> Result<PropagationResult> {
        let n = self.labels.len();
        if psi0.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: psi0.len(),
            });
        }
        let norm0 = psi0.norm();
        if (norm0 - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized(norm0));
        }
        let times = self.sample_times();
        let (states, drift, steps) = match &self.engine {
            Engine::Rotating { eig } => self.run_rotating(eig, psi0, &times),
            Engine::Lab {
                vectors,
                energies,
                raising,
                max_frequency,
            } => self.run_lab(vectors, energies, raising, *max_frequency, psi0, &times)?,
        };
        if drift > self.options.norm_tolerance {
            return Err(Error::NormDrift {
                drift,
                tolerance: self.options.norm_tolerance,
            });
        }
        let populations = states
            .iter()
            .map(|v| v.iter().map(|z| z.norm_sqr()).collect())
            .collect();
        Ok(PropagationResult {
            times,
            labels: self.labels.clone(),
            populations,
            final_state: states.last().expect("at least two samples").clone(),
            states,
            max_norm_drift: drift,
            steps,
        })
    }

    /// `diag(exp(i ω m t))` applied to `v`: rotating -> lab when `sign = +1`.
    fn frame_phase(&self, v: &mut CVector, t: f64, sign: f64) {
        for (z, tm) in v.iter_mut().zip(&self.twice_m) {
            *z *= Complex64::from_polar(1.0, sign * 0.5 * f64::from(*tm) * self.pulse.omega * t);
        }
    }

    fn run_rotating(
        &self,
        eig: &Eigensystem,
        psi0: &CVector,
        times: &[f64],
    ) -> (Vec<CVector>, f64, usize) {
        let t0 = times[0];
        let mut phi0 = psi0.clone();
        self.frame_phase(&mut phi0, t0, -1.0);
        let coeff = eig.vectors.adjoint() * phi0;
        let mut drift = 0.0f64;
        let states = times
            .iter()
            .map(|&t| {
                let dt = t - t0;
                let evolved = CVector::from_iterator(
                    coeff.len(),
                    coeff
                        .iter()
                        .zip(&eig.values)
                        .map(|(a, l)| a * Complex64::from_polar(1.0, -l * dt)),
                );
                let mut psi = &eig.vectors * evolved;
                self.frame_phase(&mut psi, t, 1.0);
                drift = drift.max((psi.norm() - 1.0).abs());
                psi
            })
            .collect();
        (states, drift, 0)
    }

    fn run_lab(
        &self,
        vectors: &CMatrix,
        energies: &[f64],
        raising: &[Coupling],
        max_frequency: f64,
        psi0: &CVector,
        times: &[f64],
    ) -> Result<(Vec<CVector>, f64, usize)> {
        let n = energies.len();
        let half_rabi = 0.5 * self.pulse.bare_rabi_frequency(&self.params);
        let omega = self.pulse.omega;

        // ψ = W e^{-iΛt} φ
        let to_lab = |phi: &[Complex64], t: f64| -> CVector {
            let rotated = CVector::from_iterator(
                n,
                phi.iter()
                    .zip(energies)
                    .map(|(z, e)| z * Complex64::from_polar(1.0, -e * t)),
            );
            vectors * rotated
        };

        let rhs = |t: f64, phi: &[Complex64], out: &mut [Complex64]| {
            // y = e^{-iΛt} φ, out = i(Ω₀/2) e^{iΛt} (e^{iωt} P + e^{-iωt} P†) y
            let phases: Vec<Complex64> = energies
                .iter()
                .map(|e| Complex64::from_polar(1.0, e * t))
                .collect();
            let y: Vec<Complex64> = phi.iter().zip(&phases).map(|(z, a)| z * a.conj()).collect();
            let carrier = Complex64::from_polar(1.0, omega * t);
            out.iter_mut().for_each(|z| *z = c(0.0));
            for cp in raising {
                out[cp.row] += carrier * cp.value * y[cp.col];
                out[cp.col] += (carrier * cp.value).conj() * y[cp.row];
            }
            let scale = Complex64::new(0.0, half_rabi);
            for (z, a) in out.iter_mut().zip(&phases) {
                *z *= scale * a;
            }
        };

        let t0 = times[0];
        let mut phi: Vec<Complex64> = {
            let w = vectors.adjoint() * psi0;
            w.iter()
                .zip(energies)
                .map(|(z, e)| z * Complex64::from_polar(1.0, e * t0))
                .collect()
        };

        let tol = Tolerances {
            rtol: self.options.rtol,
            atol: self.options.atol,
            max_steps: self.options.max_steps,
        };
        let h0 = (0.05 / max_frequency.max(1.0)).min(times[times.len() - 1] - t0);
        let mut stepper = DormandPrince::new(n, h0);
        let mut drift = 0.0f64;
        let mut states = vec![to_lab(&phi, t0)];
        for pair in times.windows(2) {
            stepper.integrate(&rhs, pair[0], pair[1], &mut phi, &tol, |y| {
                let norm = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                drift = drift.max((norm - 1.0).abs());
            })?;
            states.push(to_lab(&phi, pair[1]));
        }
        Ok((states, drift, stepper.steps))
    }
}

/// Eigen-decomposes a total-`Sz`-conserving Hamiltonian sector by sector.
/// Returns the eigenvector matrix, energies and doubled sector label per
/// column.
fn sector_eigensystem(h: &CMatrix, twice_m: &[i32]) -> Result<(CMatrix, Vec<f64>, Vec<i32>)> {
    let n = h.nrows();
    let mut sectors: Vec<i32> = twice_m.to_vec();
    sectors.sort_unstable();
    sectors.dedup();

    let mut vectors = CMatrix::zeros(n, n);
    let mut energies = Vec::with_capacity(n);
    let mut sector_of = Vec::with_capacity(n);
    let mut col = 0;
    for m in sectors {
        let idx: Vec<usize> = (0..n).filter(|&i| twice_m[i] == m).collect();
        let block = CMatrix::from_fn(idx.len(), idx.len(), |a, b| h[(idx[a], idx[b])]);
        let eig = eigendecompose(&block)?;
        for k in 0..idx.len() {
            for (a, &i) in idx.iter().enumerate() {
                vectors[(i, col)] = eig.vectors[(a, k)];
            }
            energies.push(eig.values[k]);
            sector_of.push(m);
            col += 1;
        }
    }
    Ok((vectors, energies, sector_of))
}

pub fn propagate(
    params: &ModelParams,
    pulse: &PulseParams,
    psi0: &CVector,
    options: PropagationOptions,
) -> Result<PropagationResult> {
    Propagator::new(params, pulse, options)?.propagate(psi0)
}
