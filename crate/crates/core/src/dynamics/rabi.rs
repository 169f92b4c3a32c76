use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::model::{ComputingBasis, ModelParams, CONSTANTS};
use crate::perturbation::PulseParams;
use crate::spin::{DimerOperators, ProductState};

/// Interaction-picture amplitudes of the resonantly driven pair,
/// `c_a` on `(-s, s)` and `c_b` on `(-s, s-1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoLevelState {
    pub c_a: Complex64,
    pub c_b: Complex64,
}

impl TwoLevelState {
    pub fn new(c_a: Complex64, c_b: Complex64) -> Result<Self> {
        let st = Self { c_a, c_b };
        if (st.norm_sqr() - 1.0).abs() > 1e-12 {
            return Err(crate::Error::NotNormalized(st.norm_sqr().sqrt()));
        }
        Ok(st)
    }

    pub fn lower() -> Self {
        Self {
            c_a: Complex64::new(1.0, 0.0),
            c_b: Complex64::new(0.0, 0.0),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c_a.norm_sqr() + self.c_b.norm_sqr()
    }
}

/// Resonant two-level solution
/// `c_a(t) = c_a cos(Ωt/2) + i c_b sin(Ωt/2)`, and symmetrically for `c_b`.
pub fn rabi_evolve(c0: TwoLevelState, rabi_omega: f64, t: f64) -> TwoLevelState {
    let half = 0.5 * rabi_omega * t;
    let (s, c) = half.sin_cos();
    let i_s = Complex64::new(0.0, s);
    TwoLevelState {
        c_a: c0.c_a * c + c0.c_b * i_s,
        c_b: c0.c_b * c + c0.c_a * i_s,
    }
}

/// Modulus of the drive-operator matrix element `<to|S+ + S-|from>`.
pub fn ladder_element(params: &ModelParams, from: &ProductState, to: &ProductState) -> f64 {
    let ops = DimerOperators::new(params.spin);
    let (i, j) = (to.index(), from.index());
    (ops.s_plus1[(i, j)] + ops.s_plus2[(i, j)] + ops.s_minus1[(i, j)] + ops.s_minus2[(i, j)]).norm()
}

/// `g μB B⊥ |<to|S±|from>| / ħ`: the Rabi frequency including the ladder
/// coefficient (3 for the `(-9/2,9/2) <-> (-9/2,7/2)` pair).
pub fn effective_rabi_frequency(
    params: &ModelParams,
    pulse: &PulseParams,
    from: &ProductState,
    to: &ProductState,
) -> f64 {
    pulse.bare_rabi_frequency(params) * ladder_element(params, from, to)
}

fn gate_pair_element(params: &ModelParams) -> f64 {
    let cb = ComputingBasis::new(params.spin);
    ladder_element(params, &cb.c, &cb.d)
}

/// Transverse amplitude (Tesla) that makes a pulse of `duration` a π pulse
/// on the conditional pair.
pub fn calibrate_pi_pulse(params: &ModelParams, duration: f64) -> Result<f64> {
    params.validate()?;
    if !(duration.is_finite() && duration > 0.0) {
        return Err(invalid("duration", "must be finite and positive"));
    }
    let per_tesla = params.g_factor * CONSTANTS.mu_b_over_hbar() * gate_pair_element(params);
    Ok(PI / (per_tesla * duration))
}

/// Duration (seconds) of a π pulse at transverse amplitude `b_perp_tesla`.
pub fn pi_pulse_duration(params: &ModelParams, b_perp_tesla: f64) -> Result<f64> {
    params.validate()?;
    if !(b_perp_tesla.is_finite() && b_perp_tesla > 0.0) {
        return Err(invalid("b_perp", "must be finite and positive"));
    }
    let per_tesla = params.g_factor * CONSTANTS.mu_b_over_hbar() * gate_pair_element(params);
    Ok(PI / (per_tesla * b_perp_tesla))
}

/// Rabi angle `Ω_eff T` the pulse accumulates on the conditional pair.
pub fn rabi_angle(params: &ModelParams, pulse: &PulseParams) -> f64 {
    let cb = ComputingBasis::new(params.spin);
    effective_rabi_frequency(params, pulse, &cb.c, &cb.d) * pulse.duration
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perturbation::GAUSS;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-14
    }

    #[test]
    fn pi_and_two_pi_rotations() {
        let c0 = TwoLevelState::lower();
        let pi = rabi_evolve(c0, 1.0, PI);
        assert!(close(pi.c_a, Complex64::new(0.0, 0.0)));
        assert!(close(pi.c_b, Complex64::new(0.0, 1.0)));
        let two_pi = rabi_evolve(c0, 2.0, PI);
        assert!(close(two_pi.c_a, Complex64::new(-1.0, 0.0)));
        assert!(close(two_pi.c_b, Complex64::new(0.0, 0.0)));
        assert_eq!(rabi_evolve(c0, 3.0e8, 0.0), c0);
    }

    #[test]
    fn norm_preserved() {
        let c0 = TwoLevelState::new(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)).unwrap();
        for k in 0..50 {
            let t = f64::from(k) * 0.37;
            assert!((rabi_evolve(c0, 1.3, t).norm_sqr() - 1.0).abs() <= 1e-12);
        }
        assert!(TwoLevelState::new(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn effective_frequency_and_calibration() {
        let p = ModelParams::default();
        let cb = ComputingBasis::new(p.spin);
        let pl = PulseParams::new(3.8 * GAUSS, 0.0, 1e-8).unwrap();
        let w = effective_rabi_frequency(&p, &pl, &cb.c, &cb.d);
        assert!((w / 2.00e8 - 1.0).abs() < 5e-3, "{w}");
        let doubled = PulseParams {
            b_perp_tesla: 7.6 * GAUSS,
            ..pl
        };
        assert!((effective_rabi_frequency(&p, &doubled, &cb.c, &cb.d) / w - 2.0).abs() < 1e-12);
        let off = PulseParams {
            b_perp_tesla: 0.0,
            ..pl
        };
        assert_eq!(effective_rabi_frequency(&p, &off, &cb.c, &cb.d), 0.0);

        let b8 = calibrate_pi_pulse(&p, 1e-8).unwrap();
        assert!((b8 / 5.954e-4 - 1.0).abs() < 1e-3, "{b8}");
        let b7 = calibrate_pi_pulse(&p, 1e-7).unwrap();
        assert!((b7 / 0.5954e-4 - 1.0).abs() < 1e-3);
        assert!((calibrate_pi_pulse(&p, 2e-8).unwrap() / b8 - 0.5).abs() < 1e-12);
        assert!(calibrate_pi_pulse(&p, 0.0).is_err());
        assert!((pi_pulse_duration(&p, b8).unwrap() / 1e-8 - 1.0).abs() < 1e-12);

        // The 3.8 G / 10 ns setting is short of a π rotation.
        assert!((rabi_angle(&p, &pl) - 2.0).abs() < 0.01);
    }
}
