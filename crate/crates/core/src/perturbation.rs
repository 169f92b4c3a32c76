//! First-order time-dependent perturbation theory for a rectangular pulse of
//! the rotating transverse field, and for the transverse exchange term.
//!
//! Amplitudes are dimensionless; rates are `|C|² / T` in s⁻¹ for every
//! channel.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::linalg::CMatrix;
use crate::model::{self, gap, kelvin_to_angular, ComputingBasis, ModelParams, CONSTANTS};
use crate::spin::{DimerOperators, ProductState};

/// Amplitudes above this modulus are outside the first-order regime.
pub const PERTURBATIVE_LIMIT: f64 = 0.3;

/// Tesla per Gauss.
pub const GAUSS: f64 = 1.0e-4;

/// Rectangular pulse of the rotating transverse field, switched on over
/// `(-T/2, T/2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PulseParams {
    pub b_perp_tesla: f64,
    /// Carrier angular frequency, rad/s.
    pub omega: f64,
    /// Duration `T`, seconds.
    pub duration: f64,
}

impl PulseParams {
    pub fn new(b_perp_tesla: f64, omega: f64, duration: f64) -> Result<Self> {
        let p = Self {
            b_perp_tesla,
            omega,
            duration,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.b_perp_tesla.is_finite() && self.b_perp_tesla >= 0.0) {
            return Err(invalid("b_perp", "must be finite and non-negative"));
        }
        if !self.omega.is_finite() {
            return Err(invalid("omega", "must be finite"));
        }
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(invalid("duration", "must be finite and positive"));
        }
        Ok(())
    }

    pub fn start(&self) -> f64 {
        -0.5 * self.duration
    }

    pub fn end(&self) -> f64 {
        0.5 * self.duration
    }

    /// Bare drive frequency `g μB B⊥ / ħ`, rad/s, without matrix elements.
    pub fn bare_rabi_frequency(&self, params: &ModelParams) -> f64 {
        params.g_factor * CONSTANTS.mu_b_over_hbar() * self.b_perp_tesla
    }
}

/// Finite-duration delta function `sin(ωT/2) / (πω)`, with value `T/2π` at
/// `ω = 0`.
pub fn delta_t(omega: f64, duration: f64) -> f64 {
    if omega == 0.0 {
        duration / (2.0 * PI)
    } else {
        (0.5 * omega * duration).sin() / (PI * omega)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Channel {
    /// `Δm = -1` on one unit (absorbs a σ⁻ photon).
    DriveAbsorption,
    /// `Δm = +1` on one unit (emits a σ⁻ photon).
    DriveEmission,
    /// `(m1, m2) -> (m1 ± 1, m2 ∓ 1)` via transverse exchange.
    Exchange,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TransitionRecord {
    pub from_state: ProductState,
    pub to_state: ProductState,
    pub channel: Channel,
    #[serde(serialize_with = "serialize_complex")]
    pub amplitude: Complex64,
    pub rate: f64,
    /// Both endpoints belong to the computing basis.
    pub within_basis: bool,
    /// `|amplitude| <= PERTURBATIVE_LIMIT`.
    pub perturbative: bool,
}

fn serialize_complex<S: serde::Serializer>(
    z: &Complex64,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut st = s.serialize_struct("Complex", 2)?;
    st.serialize_field("re", &z.re)?;
    st.serialize_field("im", &z.im)?;
    st.end()
}

/// Evaluates amplitudes against the dimer operators of one model.
pub struct Perturbation {
    params: ModelParams,
    ops: DimerOperators,
    exchange: CMatrix,
}

impl Perturbation {
    pub fn new(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params: *params,
            ops: DimerOperators::new(params.spin),
            exchange: model::h_transverse_exchange(params)?,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// `(<to|S+_total|from>, <to|S-_total|from>)`; at most one is non-zero.
    pub fn ladder_elements(&self, from: &ProductState, to: &ProductState) -> (f64, f64) {
        let (i, j) = (to.index(), from.index());
        let up = self.ops.s_plus1[(i, j)].re + self.ops.s_plus2[(i, j)].re;
        let down = self.ops.s_minus1[(i, j)].re + self.ops.s_minus2[(i, j)].re;
        (up, down)
    }

    pub fn drive_amplitude(
        &self,
        pulse: &PulseParams,
        from: &ProductState,
        to: &ProductState,
    ) -> Complex64 {
        let (up, down) = self.ladder_elements(from, to);
        if up == 0.0 && down == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let w = gap(&self.params, from, to).gap_angular;
        let t = pulse.duration;
        let bracket = up * delta_t(w + pulse.omega, t) + down * delta_t(w - pulse.omega, t);
        // π g μB B⊥ / (i ħ) = -i π Ω₀
        Complex64::new(0.0, -PI * pulse.bare_rabi_frequency(&self.params) * bracket)
    }

    pub fn drive_rate(&self, pulse: &PulseParams, from: &ProductState, to: &ProductState) -> f64 {
        self.drive_amplitude(pulse, from, to).norm_sqr() / pulse.duration
    }

    /// Upper bound `Ω₀² M² / (Δ² T)` on a detuned drive rate, where `Δ` is
    /// the argument of the finite delta function. `None` when the states are
    /// not drive-coupled or the transition is exactly resonant.
    pub fn drive_rate_envelope(
        &self,
        pulse: &PulseParams,
        from: &ProductState,
        to: &ProductState,
    ) -> Option<f64> {
        let (up, down) = self.ladder_elements(from, to);
        let w = gap(&self.params, from, to).gap_angular;
        let (m, detuning) = if up != 0.0 {
            (up, w + pulse.omega)
        } else if down != 0.0 {
            (down, w - pulse.omega)
        } else {
            return None;
        };
        if detuning == 0.0 {
            return None;
        }
        let o0 = pulse.bare_rabi_frequency(&self.params);
        Some((o0 * m / detuning).powi(2) / pulse.duration)
    }

    /// `(2π / iħ) <to|H_xy|from> δ_T(ω_gap)`.
    pub fn exchange_amplitude(
        &self,
        duration: f64,
        from: &ProductState,
        to: &ProductState,
    ) -> Complex64 {
        let element = self.exchange[(to.index(), from.index())].re;
        if element == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let w = gap(&self.params, from, to).gap_angular;
        Complex64::new(
            0.0,
            -2.0 * PI * kelvin_to_angular(element) * delta_t(w, duration),
        )
    }

    pub fn exchange_rate(&self, duration: f64, from: &ProductState, to: &ProductState) -> f64 {
        self.exchange_amplitude(duration, from, to).norm_sqr() / duration
    }

    /// Drive and exchange transitions out of the computing basis, sorted by
    /// descending rate.
    pub fn rate_table(&self, pulse: &PulseParams) -> Result<Vec<TransitionRecord>> {
        pulse.validate()?;
        let basis = self.params.basis();
        let cb = ComputingBasis::new(self.params.spin);
        let mut records = Vec::new();

        for from in cb.states() {
            let (t1, t2) = (from.twice_m1(), from.twice_m2());
            let drive_targets = [(t1 - 2, t2), (t1, t2 - 2), (t1 + 2, t2), (t1, t2 + 2)];
            for (a, b) in drive_targets {
                let Ok(to) = basis.state_twice(a, b) else {
                    continue;
                };
                let amplitude = self.drive_amplitude(pulse, &from, &to);
                let channel = if to.twice_total_m() < from.twice_total_m() {
                    Channel::DriveAbsorption
                } else {
                    Channel::DriveEmission
                };
                records.push(self.record(from, to, channel, amplitude, pulse.duration, &cb));
            }
            for (a, b) in [(t1 - 2, t2 + 2), (t1 + 2, t2 - 2)] {
                let Ok(to) = basis.state_twice(a, b) else {
                    continue;
                };
                let amplitude = self.exchange_amplitude(pulse.duration, &from, &to);
                records.push(self.record(
                    from,
                    to,
                    Channel::Exchange,
                    amplitude,
                    pulse.duration,
                    &cb,
                ));
            }
        }

        records.sort_by(|x, y| {
            y.rate
                .total_cmp(&x.rate)
                .then(x.from_state.index().cmp(&y.from_state.index()))
                .then(x.to_state.index().cmp(&y.to_state.index()))
        });
        Ok(records)
    }

    fn record(
        &self,
        from: ProductState,
        to: ProductState,
        channel: Channel,
        amplitude: Complex64,
        duration: f64,
        cb: &ComputingBasis,
    ) -> TransitionRecord {
        TransitionRecord {
            from_state: from,
            to_state: to,
            channel,
            amplitude,
            rate: amplitude.norm_sqr() / duration,
            within_basis: cb.contains(&from) && cb.contains(&to),
            perturbative: amplitude.norm() <= PERTURBATIVE_LIMIT,
        }
    }
}

pub fn drive_amplitude(
    params: &ModelParams,
    pulse: &PulseParams,
    from: &ProductState,
    to: &ProductState,
) -> Result<Complex64> {
    Ok(Perturbation::new(params)?.drive_amplitude(pulse, from, to))
}

pub fn drive_rate(
    params: &ModelParams,
    pulse: &PulseParams,
    from: &ProductState,
    to: &ProductState,
) -> Result<f64> {
    Ok(Perturbation::new(params)?.drive_rate(pulse, from, to))
}

pub fn exchange_amplitude(
    params: &ModelParams,
    duration: f64,
    from: &ProductState,
    to: &ProductState,
) -> Result<Complex64> {
    Ok(Perturbation::new(params)?.exchange_amplitude(duration, from, to))
}

pub fn rate_table(params: &ModelParams, pulse: &PulseParams) -> Result<Vec<TransitionRecord>> {
    Perturbation::new(params)?.rate_table(pulse)
}

/// Closed-form resonant rate `9 T (g μB B⊥)² / (4 ħ²)` for a pair with
/// ladder element 3, generalised to ladder element `m`.
pub fn resonant_rate_closed_form(params: &ModelParams, pulse: &PulseParams, m: f64) -> f64 {
    let o0 = pulse.bare_rabi_frequency(params);
    m * m * pulse.duration * o0 * o0 / 4.0
}
